// Copyright 2026 The gqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gqc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace gqc {

namespace {

constexpr double kTraceTol = 1e-6;
constexpr double kHermTol = 1e-6;
// Integration windows extend this many envelope standard deviations past the
// envelope centre; exp(-9^2/2) ~ 2.6e-18 keeps truncation far below the grid
// comparison tolerances.
constexpr double kWindowSigmas = 9.0;

/// Complex quadratic exponent of the closed-form state sample:
/// ln rho(x, r) = k + lx x + lr r + qxx x^2 + qxr x r + qrr r^2.
struct StateExponent {
  complexd k, lx, lr, qxx, qxr, qrr;
};

StateExponent state_exponent(const GaussianState& s) {
  const double s11 = s.sigma(0, 0);
  const double s12 = s.sigma(0, 1);
  const double s22 = s.sigma(1, 1);
  if (!(s11 > 0.0)) {
    throw InvalidDomainError("position representation needs sigma11 > 0");
  }
  const double cond_var = s22 - s12 * s12 / s11;
  if (!(cond_var > 0.0)) {
    throw InvalidDomainError(
        "position representation needs sigma22 - sigma12^2/sigma11 > 0");
  }
  StateExponent e;
  e.qrr = -0.5 / s11;
  e.qxx = -0.5 * cond_var;
  e.qxr = complexd(0.0, -s12 / s11);
  e.lr = s.mean(0) / s11;
  e.lx = complexd(0.0, -(s.mean(1) - s12 * s.mean(0) / s11));
  e.k = -0.5 * std::log(2.0 * std::numbers::pi * s11) -
        s.mean(0) * s.mean(0) / (2.0 * s11);
  return e;
}

/// Fill f[j] = exp(q0 + q1 j + q2 j^2) for j = 0..m-1, iterating outward from
/// the peak of the real part so the recurrence never overflows mid-row.
/// Entries smaller than ~1e-18 of the peak are flushed to zero.
void fill_quad_exp(complexd q0, complexd q1, complexd q2, int m, complexd* f) {
  const double re2 = q2.real();
  int j0 = 0;
  if (re2 < 0.0) {
    const double peak = -q1.real() / (2.0 * re2);
    j0 = static_cast<int>(std::lround(std::clamp(peak, 0.0, m - 1.0)));
  } else if (q1.real() > 0.0) {
    j0 = m - 1;  // real part grows with j; start at the large end
  }
  const complexd fpeak =
      std::exp(q0 + q1 * static_cast<double>(j0) +
               q2 * static_cast<double>(j0) * static_cast<double>(j0));
  const double cutoff = std::abs(fpeak) * 1e-18;
  f[j0] = fpeak;
  const complexd ratio2 = std::exp(2.0 * q2);
  // Upward sweep: f(j+1) = f(j) exp(q1 + q2 (2j + 1)).
  complexd t = fpeak;
  complexd g = std::exp(q1 + q2 * static_cast<double>(2 * j0 + 1));
  for (int j = j0 + 1; j < m; ++j) {
    t *= g;
    g *= ratio2;
    if (std::abs(t) < cutoff) {
      std::fill(f + j, f + m, complexd(0.0));
      break;
    }
    f[j] = t;
  }
  // Downward sweep: f(j-1) = f(j) exp(-q1 - q2 (2j - 1)).
  t = fpeak;
  g = std::exp(-q1 - q2 * static_cast<double>(2 * j0 - 1));
  for (int j = j0 - 1; j >= 0; --j) {
    t *= g;
    g *= ratio2;
    if (std::abs(t) < cutoff) {
      std::fill(f, f + j + 1, complexd(0.0));
      break;
    }
    f[j] = t;
  }
}

/// Trapezoid sum of exp(q0 + q1 j + q2 j^2) over j = 0..m-1 (end weights
/// 1/2), iterating outward from the real-part peak with early exit once the
/// envelope has decayed.
complexd sum_quad_exp(complexd q0, complexd q1, complexd q2, int m) {
  const double re2 = q2.real();
  int j0 = 0;
  if (re2 < 0.0) {
    const double peak = -q1.real() / (2.0 * re2);
    j0 = static_cast<int>(std::lround(std::clamp(peak, 0.0, m - 1.0)));
  } else if (q1.real() > 0.0) {
    j0 = m - 1;
  }
  const auto weight = [m](int j) { return (j == 0 || j == m - 1) ? 0.5 : 1.0; };
  const complexd fpeak =
      std::exp(q0 + q1 * static_cast<double>(j0) +
               q2 * static_cast<double>(j0) * static_cast<double>(j0));
  if (fpeak == complexd(0.0)) return {0.0, 0.0};
  const double cutoff = std::abs(fpeak) * 1e-18;
  const complexd ratio2 = std::exp(2.0 * q2);
  complexd sum = weight(j0) * fpeak;
  complexd t = fpeak;
  complexd g = std::exp(q1 + q2 * static_cast<double>(2 * j0 + 1));
  for (int j = j0 + 1; j < m; ++j) {
    t *= g;
    g *= ratio2;
    sum += weight(j) * t;
    if (std::abs(t) < cutoff) break;
  }
  t = fpeak;
  g = std::exp(-q1 - q2 * static_cast<double>(2 * j0 - 1));
  for (int j = j0 - 1; j >= 0; --j) {
    t *= g;
    g *= ratio2;
    sum += weight(j) * t;
    if (std::abs(t) < cutoff) break;
  }
  return sum;
}

double delta_ratio_a(const FormI& k) {
  if (k.beta == 0.0) throw InvalidDomainError("propagation needs beta != 0");
  return k.alpha / k.beta;
}

void check_tp(const KernelSpec& k) {
  const ValidationReport rep = validate_tp(k);
  if (!rep.passed()) {
    throw InvalidDomainError(
        "propagation expects a trace-preserving kernel (residual " +
        std::to_string(rep.max_residual()) + ")");
  }
}

DensityGrid propagate_form2(const FormII& k, const GaussianState& s,
                            const PositionGrid& g) {
  if (k.eta == 0.0) {
    throw UnsupportedError(
        "two-delta kernel with eta = 0 concentrates on a line; no grid "
        "propagation");
  }
  const double A = k.alpha / k.beta;
  const double B = k.gamma / k.eta;
  const double pref = std::abs(k.gamma / k.eta);
  const SigmaCoefficients& c = k.coef;
  DensityGrid out(g);
  for (int j = 0; j < g.n; ++j) {
    const double x = g.coord(j);
    const double xi = A * x;
    for (int q = 0; q < g.n; ++q) {
      const double r = g.coord(q);
      const double ri = B * r;
      const double re = -c.a1 * x * x - c.a2 * x * xi - c.a3 * xi * xi -
                        c.e1 * r * r - c.e2 * r * ri - c.e3 * ri * ri -
                        c.d1 * r - c.d2 * ri;
      const double im = c.b1 * x * r + c.b2 * x * ri + c.b3 * xi * r +
                        c.b4 * xi * ri + c.c1 * x + c.c2 * xi;
      out.at(j, q) =
          pref * std::exp(complexd(re, im)) * state_to_position(s, xi, ri);
    }
  }
  return out;
}

detail::QuadraturePlan plan_form1(const FormI& k, const GaussianState& s,
                                  const PositionGrid& g) {
  const SigmaCoefficients& c = k.coef;
  const double A = delta_ratio_a(k);
  const double s11 = s.sigma(0, 0);
  const double slope = s.sigma(0, 1) / s11;
  const double decay = c.e3 + 0.5 / s11;
  if (!(decay > 1e-9)) {
    throw InvalidDomainError("kernel-state combination is not integrable");
  }
  const double sig = 1.0 / std::sqrt(2.0 * decay);
  // Envelope centre as a function of r_f; scan the output range endpoints.
  const double c0 = (s.mean(0) / s11 - c.d2) / (2.0 * decay);
  const double cslope = -c.e2 / (2.0 * decay);
  const double c_lo = std::min(c0 - cslope * g.extent, c0 + cslope * g.extent);
  const double c_hi = std::max(c0 - cslope * g.extent, c0 + cslope * g.extent);
  detail::QuadraturePlan plan;
  plan.r_lo = c_lo - kWindowSigmas * sig;
  plan.r_hi = c_hi + kWindowSigmas * sig;
  const double omega =
      std::abs(c.b2 + A * (c.b4 - slope)) * g.extent + 1e-12;
  const double h = 2.0 * std::numbers::pi / (omega + kWindowSigmas / sig);
  plan.m_r = std::clamp(
      static_cast<int>(std::ceil((plan.r_hi - plan.r_lo) / h)) + 1, 121,
      200001);
  return plan;
}

DensityGrid propagate_form1(const FormI& k, const GaussianState& s,
                            const PositionGrid& g) {
  const SigmaCoefficients& c = k.coef;
  const double A = delta_ratio_a(k);
  const StateExponent se = state_exponent(s);
  const detail::QuadraturePlan plan = plan_form1(k, s, g);
  const int m = plan.m_r;
  const double h = (plan.r_hi - plan.r_lo) / (m - 1);
  const double r0 = plan.r_lo;
  // delta(alpha x_f - beta x_i) consumes the x_i integral with Jacobian
  // 1/|beta|; combined with N_I this leaves sqrt(e1/pi).
  const double pref = normalization(KernelSpec(k)) / std::abs(k.beta);

  // r_i-quadratic pieces of the total exponent (kernel + state at x = A x_f).
  const complexd C2 = se.qrr - c.e3;
  if (!(C2.real() < 0.0)) {
    throw InvalidDomainError("kernel-state combination is not integrable");
  }
  DensityGrid out(g);
  for (int j = 0; j < g.n; ++j) {
    const double xf = g.coord(j);
    const double xi = A * xf;
    // x-only and constant pieces.
    const complexd base =
        complexd(-c.a1 * xf * xf - c.a2 * xf * xi - c.a3 * xi * xi,
                 c.c1 * xf + c.c2 * xi) +
        se.k + se.lx * xi + se.qxx * xi * xi;
    const complexd C1x =
        complexd(-c.d2, (c.b2 * xf + c.b4 * xi)) + se.lr + se.qxr * xi;
    for (int q = 0; q < g.n; ++q) {
      const double rf = g.coord(q);
      const complexd C0 = base + complexd(-c.e1 * rf * rf - c.d1 * rf,
                                          (c.b1 * xf + c.b3 * xi) * rf);
      const complexd C1 = C1x + complexd(-c.e2 * rf, 0.0);
      // Change variable r_i = r0 + j h.
      const complexd q2 = C2 * h * h;
      const complexd q1 = (C1 + 2.0 * C2 * r0) * h;
      const complexd q0 = C0 + C1 * r0 + C2 * r0 * r0;
      out.at(j, q) = pref * h * sum_quad_exp(q0, q1, q2, m);
    }
  }
  return out;
}

detail::QuadraturePlan plan_gf(const GaussianForm& k, const GaussianState& s,
                               const PositionGrid& g) {
  const SigmaCoefficients& c = k.coef;
  const double s11 = s.sigma(0, 0);
  const double slope = s.sigma(0, 1) / s11;
  const double cond_var = s.sigma(1, 1) - s.sigma(0, 1) * slope;
  const double mu0 = s.mean(1) - slope * s.mean(0);

  const double dx = c.a3 + 0.5 * cond_var;
  if (!(dx > 1e-9)) {
    throw InvalidDomainError("kernel-state combination is not integrable");
  }
  const double sigx = 1.0 / std::sqrt(2.0 * dx);
  const double xshift = std::abs(c.a2) * g.extent / (2.0 * dx);
  const double sigr = std::sqrt(s11);

  detail::QuadraturePlan plan;
  plan.x_hi = xshift + kWindowSigmas * sigx;
  plan.x_lo = -plan.x_hi;
  plan.r_lo = s.mean(0) - kWindowSigmas * sigr;
  plan.r_hi = s.mean(0) + kWindowSigmas * sigr;

  const double rmax = std::max(std::abs(plan.r_lo), std::abs(plan.r_hi));
  const double cross = std::abs(c.b4 - slope);
  const double omega_x = std::abs(c.b3) * g.extent + cross * rmax +
                         std::abs(c.c2) + std::abs(mu0);
  const double hx = 2.0 * std::numbers::pi / (omega_x + kWindowSigmas / sigx);
  plan.m_x = std::clamp(
      static_cast<int>(std::ceil((plan.x_hi - plan.x_lo) / hx)) + 1, 161,
      6001);

  const double omega_r = std::abs(c.b2) * g.extent + cross * plan.x_hi;
  const double hr = 2.0 * std::numbers::pi / (omega_r + kWindowSigmas / sigr);
  plan.m_r = std::clamp(
      static_cast<int>(std::ceil((plan.r_hi - plan.r_lo) / hr)) + 1, 161,
      6001);
  return plan;
}

DensityGrid propagate_gf(const GaussianForm& k, const GaussianState& s,
                         const PositionGrid& g) {
  const SigmaCoefficients& c = k.coef;
  if (c.b3 == 0.0) {
    throw InvalidDomainError("smooth-form propagation needs b3 != 0");
  }
  const StateExponent se = state_exponent(s);
  const detail::QuadraturePlan plan = plan_gf(k, s, g);
  const int mx = plan.m_x;
  const int mr = plan.m_r;
  const double hx = (plan.x_hi - plan.x_lo) / (mx - 1);
  const double hr = (plan.r_hi - plan.r_lo) / (mr - 1);

  // psi[p][j]: every factor depending only on the integration variables
  // (x_p, r_j), including trapezoid weights.
  std::vector<complexd> psi(static_cast<size_t>(mx) * mr);
  {
    const complexd qj2 = se.qrr * hr * hr;
    for (int p = 0; p < mx; ++p) {
      const double xp = plan.x_lo + p * hx;
      const complexd row_const = se.k + (se.lx + complexd(0.0, c.c2)) * xp +
                                 (se.qxx - c.a3) * xp * xp;
      const complexd cr = se.lr + (se.qxr + complexd(0.0, c.b4)) * xp;
      const complexd qj1 = (cr + 2.0 * se.qrr * plan.r_lo) * hr;
      const complexd qj0 =
          row_const + cr * plan.r_lo + se.qrr * plan.r_lo * plan.r_lo;
      complexd* row = psi.data() + static_cast<size_t>(p) * mr;
      fill_quad_exp(qj0, qj1, qj2, mr, row);
      const double wp = (p == 0 || p == mx - 1) ? 0.5 : 1.0;
      for (int j = 0; j < mr; ++j) {
        const double wj = (j == 0 || j == mr - 1) ? 0.5 : 1.0;
        row[j] *= wp * wj;
      }
    }
  }

  // Output-r phase steps exp(i b3 x_p h_out) are x_f independent.
  const double h_out = g.spacing();
  std::vector<complexd> phase_step(mx), phase(mx);
  for (int p = 0; p < mx; ++p) {
    const double xp = plan.x_lo + p * hx;
    phase_step[p] = std::exp(complexd(0.0, c.b3 * xp * h_out));
  }

  const double norm = std::abs(c.b3) / (2.0 * std::numbers::pi);
  std::vector<complexd> ph(mr), srow(mx), u(mx);
  DensityGrid out(g);
  for (int j = 0; j < g.n; ++j) {
    const double xf = g.coord(j);
    // ph[j'] = exp(i b2 x_f r_j'): linear phase over the input r grid.
    fill_quad_exp(complexd(0.0, c.b2 * xf * plan.r_lo),
                  complexd(0.0, c.b2 * xf * hr), complexd(0.0), mr, ph.data());
    // Contract the input-r axis.
    for (int p = 0; p < mx; ++p) {
      const complexd* row = psi.data() + static_cast<size_t>(p) * mr;
      complexd acc(0.0);
      for (int jj = 0; jj < mr; ++jj) acc += row[jj] * ph[jj];
      srow[p] = acc;
    }
    // Real coupling exp(-a2 x_f x_p) via a running product.
    {
      complexd t = std::exp(complexd(-c.a2 * xf * plan.x_lo, 0.0));
      const complexd ratio = std::exp(complexd(-c.a2 * xf * hx, 0.0));
      for (int p = 0; p < mx; ++p) {
        u[p] = srow[p] * t;
        t *= ratio;
      }
    }
    // Initial output-r phases exp(i b3 x_p r_q0).
    for (int p = 0; p < mx; ++p) {
      const double xp = plan.x_lo + p * hx;
      phase[p] = std::exp(complexd(0.0, c.b3 * xp * g.coord(0)));
    }
    const complexd pref =
        norm * hx * hr * std::exp(complexd(-c.a1 * xf * xf, c.c1 * xf));
    complexd outer_phase = std::exp(complexd(0.0, c.b1 * xf * g.coord(0)));
    const complexd outer_step = std::exp(complexd(0.0, c.b1 * xf * h_out));
    for (int q = 0; q < g.n; ++q) {
      complexd acc(0.0);
      for (int p = 0; p < mx; ++p) {
        acc += phase[p] * u[p];
        phase[p] *= phase_step[p];
      }
      out.at(j, q) = pref * outer_phase * acc;
      outer_phase *= outer_step;
    }
  }
  return out;
}

}  // namespace

complexd state_to_position(const GaussianState& s, double x, double r) {
  const double s11 = s.sigma(0, 0);
  const double s12 = s.sigma(0, 1);
  const double s22 = s.sigma(1, 1);
  if (!(s11 > 0.0)) {
    throw InvalidDomainError("position representation needs sigma11 > 0");
  }
  const double cond_var = s22 - s12 * s12 / s11;
  if (!(cond_var > 0.0)) {
    throw InvalidDomainError(
        "position representation needs sigma22 - sigma12^2/sigma11 > 0");
  }
  const double dr = r - s.mean(0);
  const double mu_p = s.mean(1) + (s12 / s11) * dr;
  const double re = -dr * dr / (2.0 * s11) - 0.5 * cond_var * x * x;
  const complexd expo(re, -mu_p * x);
  return std::exp(expo) / std::sqrt(2.0 * std::numbers::pi * s11);
}

DensityGrid sample_state(const GaussianState& s, const PositionGrid& g) {
  DensityGrid out(g);
  for (int j = 0; j < g.n; ++j) {
    for (int q = 0; q < g.n; ++q) {
      out.at(j, q) = state_to_position(s, g.coord(j), g.coord(q));
    }
  }
  return out;
}

double grid_trace(const DensityGrid& rho) {
  const int n = rho.grid.n;
  const int c = rho.grid.centre();
  double sum = 0.0;
  for (int q = 0; q < n; ++q) {
    const double w = (q == 0 || q == n - 1) ? 0.5 : 1.0;
    sum += w * rho.at(c, q).real();
  }
  return sum * rho.grid.spacing();
}

DensityGrid propagate(const KernelSpec& k, const GaussianState& s,
                      const PositionGrid& g) {
  check_tp(k);
  if (const auto* f2 = std::get_if<FormII>(&k)) return propagate_form2(*f2, s, g);
  if (const auto* f1 = std::get_if<FormI>(&k)) return propagate_form1(*f1, s, g);
  return propagate_gf(std::get<GaussianForm>(k), s, g);
}

GaussianState extract_moments(const DensityGrid& rho) {
  const int n = rho.grid.n;
  if (n < 13) {
    throw InvalidDomainError(
        "moment extraction needs at least 13 grid points");
  }
  const double h = rho.grid.spacing();
  const int c = rho.grid.centre();

  double amax = 0.0;
  for (const complexd& v : rho.values) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) throw NotNormalizedError("grid is identically zero");

  double herm = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int q = 0; q < n; ++q) {
      herm = std::max(herm,
                      std::abs(rho.at(n - 1 - j, q) - std::conj(rho.at(j, q))));
    }
  }
  if (herm > kHermTol * amax) {
    throw NotNormalizedError("grid violates Hermiticity rho(-x,r) = rho(x,r)*");
  }

  const auto w = [n](int q) { return (q == 0 || q == n - 1) ? 0.5 : 1.0; };

  double tr = 0.0, mr1 = 0.0, mr2 = 0.0;
  for (int q = 0; q < n; ++q) {
    const double r = rho.grid.coord(q);
    const double v = rho.at(c, q).real();
    tr += w(q) * v;
    mr1 += w(q) * r * v;
    mr2 += w(q) * r * r * v;
  }
  tr *= h;
  mr1 *= h;
  mr2 *= h;
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw NotNormalizedError("grid trace deviates from 1 by " +
                             std::to_string(std::abs(tr - 1.0)));
  }
  const double d1 = mr1 / tr;
  const double s11 = mr2 / tr - d1 * d1;

  // Momentum moments per column: estimate the local phase slope from the
  // log-ratio of the +-h samples, remove it exactly, differentiate the
  // slowly varying remainder with 13-point order-12 central stencils, and add
  // the slope back analytically. The remaining truncation on the momentum
  // variance is ~1.6 (h sqrt(cond))^12 cond for a conditional envelope
  // exp(-cond x^2 / 2); grid_resolves() bounds that below 1e-7.
  static const double d1c[13] = {
      1.0 / 5544,  -1.0 / 385, 1.0 / 56,  -5.0 / 63, 15.0 / 56, -6.0 / 7, 0.0,
      6.0 / 7,     -15.0 / 56, 5.0 / 63,  -1.0 / 56, 1.0 / 385, -1.0 / 5544};
  static const double d2c[13] = {
      -1.0 / 16632,   2.0 / 1925, -1.0 / 112, 10.0 / 189, -15.0 / 56,
      12.0 / 7,       -5369.0 / 1800,
      12.0 / 7,       -15.0 / 56, 10.0 / 189, -1.0 / 112, 2.0 / 1925,
      -1.0 / 16632};
  complexd p1(0.0), p2(0.0), crs(0.0);
  for (int q = 0; q < n; ++q) {
    const complexd rho0 = rho.at(c, q);
    double mu = 0.0;
    if (std::abs(rho0) > 1e-12 * amax && rho.at(c + 1, q) != complexd(0.0) &&
        rho.at(c - 1, q) != complexd(0.0)) {
      mu = -std::log(rho.at(c + 1, q) / rho.at(c - 1, q)).imag() / (2.0 * h);
    }
    complexd g1(0.0), g2(0.0);
    for (int t = -6; t <= 6; ++t) {
      const complexd f =
          rho.at(c + t, q) * std::exp(complexd(0.0, mu * t * h));
      g1 += d1c[t + 6] * f;
      g2 += d2c[t + 6] * f;
    }
    g1 /= h;
    g2 /= (h * h);
    const complexd m1 = complexd(0.0, 1.0) * g1 + mu * rho0;
    const complexd m2 =
        -g2 + 2.0 * complexd(0.0, 1.0) * mu * g1 + mu * mu * rho0;
    p1 += w(q) * m1;
    p2 += w(q) * m2;
    crs += w(q) * rho.grid.coord(q) * m1;
  }
  p1 *= h;
  p2 *= h;
  crs *= h;

  const double d2 = p1.real() / tr;
  const double s22 = p2.real() / tr - d2 * d2;
  const double s12 = crs.real() / tr - d1 * d2;

  Mat2 sig;
  sig << s11, s12, s12, s22;
  Vec2 mean;
  mean << d1, d2;
  return make_state(sig, mean);
}

OracleReport oracle_compare(const KernelSpec& k, const GaussianState& s,
                            const PositionGrid& g, SignConvention sc) {
  OracleReport rep;
  const DensityGrid out = propagate(k, s, g);
  rep.trace_dev = std::abs(grid_trace(out) - 1.0);
  rep.oracle = extract_moments(out);

  // The two conventions differ only for delta forms (and only in the mean);
  // both diagnostics are always reported.
  const GaussianState pred_printed =
      apply(to_affine(k, SignConvention::AsPrinted), s);
  const GaussianState pred_flipped =
      apply(to_affine(k, SignConvention::GlobalFlip), s);
  rep.predicted =
      (sc == SignConvention::GlobalFlip) ? pred_flipped : pred_printed;

  rep.sigma_dev =
      (rep.oracle.sigma - rep.predicted.sigma).cwiseAbs().maxCoeff();
  rep.mean_dev_printed =
      (rep.oracle.mean - pred_printed.mean).cwiseAbs().maxCoeff();
  rep.mean_dev_flipped =
      (rep.oracle.mean - pred_flipped.mean).cwiseAbs().maxCoeff();
  rep.mean_dev = (sc == SignConvention::GlobalFlip) ? rep.mean_dev_flipped
                                                    : rep.mean_dev_printed;
  return rep;
}

PositionGrid auto_output_grid(const KernelSpec& k, const GaussianState& s,
                              int n) {
  // The affine prediction is used for window sizing only; all grid values
  // remain quadrature outputs.
  const GaussianState pred = apply(to_affine(k), s);
  const double sf11 = std::max(pred.sigma(0, 0), 0.04);
  const double cond =
      std::max(pred.sigma(1, 1) - pred.sigma(0, 1) * pred.sigma(0, 1) / sf11,
               0.04);
  const double need_r = std::abs(pred.mean(0)) + 8.5 * std::sqrt(sf11);
  const double need_x = 8.5 / std::sqrt(cond);
  PositionGrid g;
  g.n = n;
  g.extent = std::ceil(std::max(need_r, need_x) * 4.0) / 4.0;
  return g;
}

bool grid_resolves(const GaussianState& s, const PositionGrid& g) {
  const double s11 = s.sigma(0, 0);
  if (!(s11 > 0.0)) return false;
  const double cond = s.sigma(1, 1) - s.sigma(0, 1) * s.sigma(0, 1) / s11;
  if (!(cond > 0.0)) return false;
  const double h = g.spacing();
  const double width = std::sqrt(s11);

  // Window coverage: the position marginal and the offset envelope must both
  // decay below the amplitude cutoff inside the grid.
  if (g.extent < std::abs(s.mean(0)) + 8.0 * width) return false;
  if (g.extent < 8.0 / std::sqrt(cond)) return false;

  // Row spacing must resolve the position marginal.
  if (h > 0.5 * width) return false;

  // Offset-envelope resolution: keeps the order-12 stencil truncation of the
  // momentum variance (~1.6 (h sqrt(cond))^12 cond) below 1e-7 for
  // conditional variances up to ~50.
  if (h * std::sqrt(cond) > 0.18) return false;

  // Conditional-phase sampling: the +-h log-ratio recovers the phase slope
  // mu_p(r) only inside its principal branch |mu_p| h < pi/2. Every column
  // with weight above the amplitude cutoff must stay clear of the branch
  // point, with margin for quadrature noise.
  const double slope = std::abs(s.sigma(0, 1)) / s11;
  const double mu_max = std::abs(s.mean(1)) + slope * 8.0 * width;
  return h * mu_max <= 1.2;
}

void dump_grid(const DensityGrid& rho, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  const char magic[8] = {'G', 'Q', 'C', 'G', 'R', 'I', 'D', '1'};
  out.write(magic, sizeof(magic));
  const std::int64_t n = rho.grid.n;
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&rho.grid.extent), sizeof(double));
  out.write(reinterpret_cast<const char*>(rho.values.data()),
            static_cast<std::streamsize>(rho.values.size() * sizeof(complexd)));
  if (!out) throw Error("short write to '" + path + "'");
}

DensityGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, "GQCGRID1", 8) != 0) {
    throw Error("'" + path + "' is not a grid snapshot");
  }
  std::int64_t n = 0;
  double extent = 0.0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&extent), sizeof(extent));
  if (!in || n < 3 || n % 2 == 0 || !(extent > 0.0)) {
    throw Error("'" + path + "' has an invalid header");
  }
  PositionGrid g;
  g.n = static_cast<int>(n);
  g.extent = extent;
  DensityGrid rho(g);
  in.read(reinterpret_cast<char*>(rho.values.data()),
          static_cast<std::streamsize>(rho.values.size() * sizeof(complexd)));
  if (!in) throw Error("'" + path + "' is truncated");
  return rho;
}

namespace detail {

QuadraturePlan plan_quadrature(const KernelSpec& k, const GaussianState& s,
                               const PositionGrid& g) {
  if (const auto* f1 = std::get_if<FormI>(&k)) return plan_form1(*f1, s, g);
  if (const auto* gf = std::get_if<GaussianForm>(&k)) return plan_gf(*gf, s, g);
  return {};
}

}  // namespace detail

}  // namespace gqc
