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

#include "gqc/mastereq.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "gqc/convert.hpp"

namespace gqc {

namespace {

constexpr complexd kI{0.0, 1.0};

/// Second-order time derivative on a uniform grid: central in the interior,
/// one-sided three-point at the endpoints.
double deriv(const std::vector<double>& f, std::size_t i, double dt) {
  const std::size_t n = f.size();
  if (n < 3) {
    throw InvalidDomainError("time derivatives need at least 3 samples");
  }
  if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
  if (i == n - 1) {
    return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
  }
  return (f[i + 1] - f[i - 1]) / (2.0 * dt);
}

double delta_a(const KernelSpec& k) {
  double alpha = 0.0, beta = 0.0;
  if (const auto* f1 = std::get_if<FormI>(&k)) {
    alpha = f1->alpha;
    beta = f1->beta;
  } else if (const auto* f2 = std::get_if<FormII>(&k)) {
    alpha = f2->alpha;
    beta = f2->beta;
  } else {
    throw UnsupportedError("A = alpha/beta is defined for delta forms only");
  }
  if (beta == 0.0) throw InvalidDomainError("A = alpha/beta needs beta != 0");
  return alpha / beta;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_nonsingular_sample(const CoefficientTrajectory& traj,
                              std::size_t index) {
  if (classify_kernel(traj.samples[index]) != ChannelClass::NonSingular) {
    throw InvalidDomainError(
        "sample " + std::to_string(index) +
        " classifies as singular; det T is continuous along a differentiable "
        "family, so no generator exists at a singular member");
  }
}

}  // namespace

CoefficientTrajectory make_trajectory(std::vector<double> times,
                                      std::vector<KernelSpec> samples) {
  if (times.size() != samples.size()) {
    throw InvalidDomainError("trajectory needs one kernel per time sample");
  }
  if (times.size() < 2) {
    throw InvalidDomainError("trajectory needs at least 2 samples");
  }
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) {
    throw InvalidDomainError("trajectory time step must be positive");
  }
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    if (std::abs(times[i + 1] - times[i] - dt) > 1e-9 * std::max(1.0, dt)) {
      throw InvalidDomainError("trajectory time grid must be uniform");
    }
  }
  const std::size_t variant = samples.front().index();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].index() != variant) {
      throw InvalidDomainError("trajectory samples must share one form");
    }
    const ValidationReport rep = validate_tp(samples[i]);
    if (!rep.passed()) {
      throw InvalidDomainError(
          "trajectory sample " + std::to_string(i) +
          " is not trace preserving (residual " +
          std::to_string(rep.max_residual()) + ")");
    }
  }
  CoefficientTrajectory traj;
  traj.times = std::move(times);
  traj.samples = std::move(samples);
  traj.dt = dt;
  return traj;
}

std::size_t nearest_index(const CoefficientTrajectory& traj, double t) {
  std::size_t best = 0;
  double dist = std::abs(traj.times[0] - t);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double d = std::abs(traj.times[i] - t);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

bool existence_check(const CoefficientTrajectory& traj, double tol) {
  if (std::holds_alternative<GaussianForm>(traj.samples.front())) {
    throw UnsupportedError(
        "the existence condition c(t) proportional to A(t) applies to "
        "delta-form trajectories");
  }
  std::vector<double> ratio(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double a = delta_a(traj.samples[i]);
    if (a == 0.0) {
      throw InvalidDomainError(
          "existence condition degenerates where A(t) = 0");
    }
    const SigmaCoefficients& c = coefficients(traj.samples[i]);
    ratio[i] = (c.c1 + a * c.c2) / a;
  }
  const double med = median(ratio);
  double dev = 0.0;
  for (const double r : ratio) dev = std::max(dev, std::abs(r - med));
  return dev <= tol * (1.0 + std::abs(med));
}

Liouvillian liouvillian_form1(const CoefficientTrajectory& traj,
                              std::size_t index) {
  if (index >= traj.size()) throw InvalidDomainError("sample index is out of range");
  if (!std::holds_alternative<FormI>(traj.samples.front())) {
    throw UnsupportedError(
        "this generator set applies to one-delta trajectories");
  }
  check_nonsingular_sample(traj, index);

  const std::size_t n = traj.size();
  std::vector<double> a(n), e1(n), e2(n), l1(n), l2(n), l3(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& k = std::get<FormI>(traj.samples[i]);
    const SigmaCoefficients& c = k.coef;
    a[i] = delta_a(traj.samples[i]);
    e1[i] = c.e1;
    e2[i] = c.e2;
    l1[i] = c.b1 + a[i] * c.b3;
    l2[i] = c.b2 + a[i] * c.b4;
    l3[i] = c.a1 + a[i] * c.a2 + a[i] * a[i] * c.a3;
  }
  const double A = a[index], E1 = e1[index], E2 = e2[index];
  if (A == 0.0 || E1 == 0.0 || E2 == 0.0) {
    throw InvalidDomainError("generator denominators e1, e2, A must be nonzero");
  }
  const double dA = deriv(a, index, traj.dt);
  const double dE1 = deriv(e1, index, traj.dt);
  const double dE2 = deriv(e2, index, traj.dt);
  const double dL1 = deriv(l1, index, traj.dt);
  const double dL2 = deriv(l2, index, traj.dt);
  const double dL3 = deriv(l3, index, traj.dt);
  const double L1 = l1[index], L2 = l2[index], L3 = l3[index];

  Liouvillian l;
  l.y(0, 0) = dA / A;
  l.lc = dE1 / E1 - dE2 / E2;
  l.y(1, 1) = l.lc;
  l.x(1, 1) = dE1 / (4.0 * E1 * E1) - dE2 / (2.0 * E1 * E2);
  l.y(0, 1) = kI * (L1 * dE2 / (E1 * E2) + L2 * dA / (E2 * A) -
                    L1 * dE1 / (2.0 * E1 * E1) - dL2 / E2);
  l.z(0, 0) = 0.5 * L1 * L1 * (dE2 / (E1 * E2) - dE1 / (2.0 * E1 * E1)) +
              (L1 / E2) * (L2 * dA / A - dL2) + 2.0 * L3 * dA / A - dL3;
  l.z(0, 1) = kI * ((dA / A) * (E1 * L2 / E2 - 0.5 * L1) + 0.5 * dL1 -
                    dL2 * E1 / E2 + 0.5 * L1 * (dE2 / E2 - dE1 / E1));
  l.z(1, 0) = l.z(0, 1);
  return l;
}

Liouvillian liouvillian_form2(const CoefficientTrajectory& traj,
                              std::size_t index) {
  if (index >= traj.size()) throw InvalidDomainError("sample index is out of range");
  if (!std::holds_alternative<FormII>(traj.samples.front())) {
    throw UnsupportedError(
        "this generator set applies to two-delta trajectories");
  }
  check_nonsingular_sample(traj, index);

  const std::size_t n = traj.size();
  std::vector<double> a(n), b(n), a1(n), a2(n), a3(n), lam(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& k = std::get<FormII>(traj.samples[i]);
    if (k.eta == 0.0) {
      throw InvalidDomainError("B = gamma/eta needs eta != 0");
    }
    const SigmaCoefficients& c = k.coef;
    a[i] = delta_a(traj.samples[i]);
    b[i] = k.gamma / k.eta;
    a1[i] = c.a1;
    a2[i] = c.a2;
    a3[i] = c.a3;
    lam[i] = c.b1 + a[i] * c.b3 + b[i] * (c.b2 + a[i] * c.b4);
  }
  const double A = a[index], B = b[index];
  if (A == 0.0 || B == 0.0) {
    throw InvalidDomainError("generator needs A != 0 and B != 0");
  }
  const double dA = deriv(a, index, traj.dt);
  const double dB = deriv(b, index, traj.dt);
  const double dA1 = deriv(a1, index, traj.dt);
  const double dA2 = deriv(a2, index, traj.dt);
  const double dA3 = deriv(a3, index, traj.dt);
  const double dLam = deriv(lam, index, traj.dt);

  Liouvillian l;
  l.y(0, 0) = dA / A;
  l.y(1, 1) = dB / B;
  l.z(0, 0) = a2[index] * dA + 2.0 * a1[index] * dA / A - A * A * dA3 -
              A * dA2 - dA1;
  l.z(0, 1) = kI * (0.5 * dLam - 0.5 * lam[index] * (dA / A + dB / B));
  l.z(1, 0) = l.z(0, 1);
  return l;
}

Liouvillian liouvillian_at(const CoefficientTrajectory& traj,
                           std::size_t index) {
  if (std::holds_alternative<FormI>(traj.samples.front())) {
    return liouvillian_form1(traj, index);
  }
  if (std::holds_alternative<FormII>(traj.samples.front())) {
    return liouvillian_form2(traj, index);
  }
  throw UnsupportedError("no generator set for smooth-form trajectories");
}

DensityGrid apply_liouvillian(const Liouvillian& l, const DensityGrid& rho,
                              std::vector<std::string>* warnings) {
  const int n = rho.grid.n;
  const double h = rho.grid.spacing();
  DensityGrid out(rho.grid);

  if (warnings != nullptr) {
    double amax = 0.0;
    for (const complexd& v : rho.values) amax = std::max(amax, std::abs(v));
    const double floor = 1e-6 * amax;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int q = 0; q + 1 < n; ++q) {
        const complexd v0 = rho.at(j, q), v1 = rho.at(j, q + 1);
        if (std::abs(v0) > floor && std::abs(v1) > floor) {
          worst = std::max(worst, std::abs(std::arg(v1 * std::conj(v0))));
        }
        if (j + 1 < n) {
          const complexd w1 = rho.at(j + 1, q);
          if (std::abs(v0) > floor && std::abs(w1) > floor) {
            worst = std::max(worst, std::abs(std::arg(w1 * std::conj(v0))));
          }
        }
      }
    }
    if (worst > 1.5) {
      warnings->push_back(
          "grid_too_coarse: phase advances " + std::to_string(worst) +
          " rad per step; derivative stencils are unreliable");
    }
  }

  const double h2 = h * h;
  for (int j = 1; j + 1 < n; ++j) {
    const double x = rho.grid.coord(j);
    for (int q = 1; q + 1 < n; ++q) {
      const double r = rho.grid.coord(q);
      const complexd f0 = rho.at(j, q);
      const complexd fx = (rho.at(j + 1, q) - rho.at(j - 1, q)) / (2.0 * h);
      const complexd fr = (rho.at(j, q + 1) - rho.at(j, q - 1)) / (2.0 * h);
      const complexd fxx =
          (rho.at(j + 1, q) - 2.0 * f0 + rho.at(j - 1, q)) / h2;
      const complexd frr =
          (rho.at(j, q + 1) - 2.0 * f0 + rho.at(j, q - 1)) / h2;
      const complexd fxr = (rho.at(j + 1, q + 1) - rho.at(j + 1, q - 1) -
                            rho.at(j - 1, q + 1) + rho.at(j - 1, q - 1)) /
                           (4.0 * h2);
      out.at(j, q) = l.lc * f0 + l.x(0, 0) * fxx + 2.0 * l.x(0, 1) * fxr +
                     l.x(1, 1) * frr + (x * l.y(0, 0) + r * l.y(1, 0)) * fx +
                     (x * l.y(0, 1) + r * l.y(1, 1)) * fr +
                     (l.z(0, 0) * x * x + 2.0 * l.z(0, 1) * x * r +
                      l.z(1, 1) * r * r) *
                         f0;
    }
  }
  return out;
}

MasterEqReport verify_master_equation(const CoefficientTrajectory& traj,
                                      const GaussianState& s,
                                      std::size_t index,
                                      const PositionGrid& grid, double tol) {
  if (traj.size() < 3 || index == 0 || index + 1 >= traj.size()) {
    throw InvalidDomainError(
        "verification needs an interior sample with both neighbours");
  }
  MasterEqReport rep;
  rep.index = index;
  rep.time = traj.times[index];
  rep.tolerance = tol;
  rep.existence = existence_check(traj, 1e-6);

  const DensityGrid mid = propagate(traj.samples[index], s, grid);
  const DensityGrid lo = propagate(traj.samples[index - 1], s, grid);
  const DensityGrid hi = propagate(traj.samples[index + 1], s, grid);
  const Liouvillian l = liouvillian_at(traj, index);
  const DensityGrid rhs = apply_liouvillian(l, mid, &rep.warnings);

  const int n = grid.n;
  const double inv2dt = 1.0 / (2.0 * traj.dt);
  double diff = 0.0, lhs_norm = 0.0, rhs_norm = 0.0, rho_max = 0.0;
  for (int j = 1; j + 1 < n; ++j) {
    for (int q = 1; q + 1 < n; ++q) {
      const complexd lhs = (hi.at(j, q) - lo.at(j, q)) * inv2dt;
      diff = std::max(diff, std::abs(lhs - rhs.at(j, q)));
      lhs_norm = std::max(lhs_norm, std::abs(lhs));
      rhs_norm = std::max(rhs_norm, std::abs(rhs.at(j, q)));
      rho_max = std::max(rho_max, std::abs(mid.at(j, q)));
    }
  }
  rep.lhs_norm = lhs_norm;
  rep.rhs_norm = rhs_norm;
  const double denom = std::max(lhs_norm, rhs_norm);
  rep.residual = (denom <= 1e-14 * rho_max) ? 0.0 : diff / denom;
  rep.passed = rep.residual <= tol;
  return rep;
}

CoefficientTrajectory qbm_trajectory(const QbmParams& p, double duration,
                                     int samples) {
  if (samples < 2) throw InvalidDomainError("demo needs at least 2 samples");
  if (!(duration > 0.0)) throw InvalidDomainError("duration must be positive");
  if (!(p.damping > 0.0)) throw InvalidDomainError("damping must be positive");
  if (p.frequency == 0.0 || p.amplitude == 0.0) {
    throw InvalidDomainError("frequency and amplitude must be nonzero");
  }
  const double dt = duration / samples;
  std::vector<double> times(static_cast<std::size_t>(samples));
  std::vector<KernelSpec> kernels;
  kernels.reserve(times.size());
  for (int k = 0; k < samples; ++k) {
    // Half-step sampling keeps sin(frequency t) away from exact zeros, where
    // the b3 coefficient of this parametrization diverges in det T = b2/b3.
    const double t = (k + 0.5) * dt;
    times[static_cast<std::size_t>(k)] = t;
    const double osc = std::sin(p.frequency * t);
    const double b2 = p.amplitude * std::exp(-0.5 * p.damping * t) * osc;
    const double det =
        p.amplitude * p.frequency * p.frequency * std::exp(-p.damping * t);
    GaussianForm g;
    g.coef.a1 = 0.25;
    g.coef.a3 = 0.25;
    g.coef.b2 = b2;
    g.coef.b3 = b2 / det;
    kernels.emplace_back(g);
  }
  return make_trajectory(std::move(times), std::move(kernels));
}

SingularScanReport singular_time_scan(const CoefficientTrajectory& traj,
                                      double threshold) {
  if (!std::holds_alternative<GaussianForm>(traj.samples.front())) {
    throw UnsupportedError("the determinant scan applies to smooth-form "
                           "trajectories");
  }
  SingularScanReport rep;
  rep.threshold = threshold;
  rep.caveat =
      "isolated b2 zeros make the smooth parametrization itself diverge; "
      "such samples are parametrization artifacts, not rank-1 channels";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const SigmaCoefficients& c = coefficients(traj.samples[i]);
    if (c.b3 == 0.0) continue;  // parametrization breakdown, see caveat
    const double det = c.b2 / c.b3;
    if (std::abs(det) < threshold) {
      rep.flagged.push_back({i, traj.times[i], det, c.b2});
    }
  }
  return rep;
}

std::vector<double> b2_zero_crossings(const CoefficientTrajectory& traj) {
  if (!std::holds_alternative<GaussianForm>(traj.samples.front())) {
    throw UnsupportedError("b2 crossings apply to smooth-form trajectories");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double v0 = coefficients(traj.samples[i]).b2;
    const double v1 = coefficients(traj.samples[i + 1]).b2;
    if (v0 == 0.0) {
      out.push_back(traj.times[i]);
    } else if (v0 * v1 < 0.0) {
      out.push_back(0.5 * (traj.times[i] + traj.times[i + 1]));
    }
  }
  if (!traj.times.empty() &&
      coefficients(traj.samples.back()).b2 == 0.0) {
    out.push_back(traj.times.back());
  }
  return out;
}

}  // namespace gqc
