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

#include "gqc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gqc {

namespace {

bool all_finite(const SigmaCoefficients& c) {
  for (double v : {c.a1, c.a2, c.a3, c.b1, c.b2, c.b3, c.b4, c.c1, c.c2, c.e1,
                   c.e2, c.e3, c.d1, c.d2}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void add_check(ValidationReport& rep, const std::string& name, double residual,
               double tol) {
  // Non-finite residuals count as failures with an infinite violation.
  const bool ok = std::isfinite(residual) && std::abs(residual) <= tol;
  rep.checks.push_back({name, ok, std::abs(residual), tol});
}

void add_flag(ValidationReport& rep, const std::string& name, bool ok,
              double residual, double tol) {
  rep.checks.push_back({name, ok, ok ? 0.0 : residual, tol});
}

}  // namespace

const char* form_name(const KernelSpec& k) {
  if (std::holds_alternative<GaussianForm>(k)) return "gaussian";
  if (std::holds_alternative<FormI>(k)) return "delta1";
  return "delta2";
}

const SigmaCoefficients& coefficients(const KernelSpec& k) {
  return std::visit([](const auto& f) -> const SigmaCoefficients& {
    return f.coef;
  }, k);
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

double ValidationReport::max_residual() const {
  double worst = 0;
  for (const auto& c : checks) worst = std::max(worst, c.residual);
  return worst;
}

const CheckResult* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_hp(const KernelSpec& k) {
  ValidationReport rep;
  const SigmaCoefficients& c = coefficients(k);
  add_flag(rep, "finite_coefficients", all_finite(c),
           std::numeric_limits<double>::infinity(), 0.0);

  if (const auto* gf = std::get_if<GaussianForm>(&k)) {
    // The smooth form already pairs (x_f, x_i) with (r_f, r_i) through the
    // b-phases; compatibility additionally requires an empty r sector and a
    // nonzero b3 (otherwise the prefactor vanishes).
    const double r_terms =
        std::max({std::abs(c.e1), std::abs(c.e2), std::abs(c.e3),
                  std::abs(c.d1), std::abs(c.d2)});
    add_check(rep, "gf_no_r_sector", r_terms, kStructuralTol);
    add_flag(rep, "gf_b3_nonzero", std::abs(gf->coef.b3) > 0.0, 1.0, 0.0);
    if (gf->coef.b3 < 0.0) {
      rep.warnings.push_back(
          "b3 < 0: admitted via the |b3| normalization convention");
    }
  } else if (const auto* f1 = std::get_if<FormI>(&k)) {
    add_flag(rep, "delta_finite",
             std::isfinite(f1->alpha) && std::isfinite(f1->beta),
             std::numeric_limits<double>::infinity(), 0.0);
  } else if (const auto* f2 = std::get_if<FormII>(&k)) {
    add_flag(rep, "delta_finite",
             std::isfinite(f2->alpha) && std::isfinite(f2->beta) &&
                 std::isfinite(f2->gamma) && std::isfinite(f2->eta),
             std::numeric_limits<double>::infinity(), 0.0);
  }
  return rep;
}

ValidationReport validate_tp(const KernelSpec& k, double tol) {
  ValidationReport rep;
  const SigmaCoefficients& c = coefficients(k);

  if (const auto* f1 = std::get_if<FormI>(&k)) {
    if (f1->beta == 0.0) {
      throw InvalidDomainError("trace check needs beta != 0");
    }
    add_flag(rep, "e1_positive", c.e1 > 0.0, std::max(0.0, -c.e1), 0.0);
    if (c.e1 > 0.0) {
      add_check(rep, "r_quadratic_balance", c.e2 * c.e2 / (4.0 * c.e1) - c.e3,
                tol);
    }
    add_check(rep, "r_linear_d1", c.d1, tol);
    add_check(rep, "r_linear_d2", c.d2, tol);
  } else if (const auto* f2 = std::get_if<FormII>(&k)) {
    if (f2->beta == 0.0) {
      throw InvalidDomainError("trace check needs beta != 0");
    }
    if (f2->gamma == 0.0) {
      throw InvalidDomainError("trace check needs gamma != 0");
    }
    const double q = f2->eta / f2->gamma;
    add_check(rep, "r_quadratic_balance", c.e1 * q * q + c.e2 * q + c.e3, tol);
    add_check(rep, "r_linear_balance", c.d1 * q + c.d2, tol);
  } else {
    // Smooth form: trace preservation is structural (no r sector at all).
    const double r_terms =
        std::max({std::abs(c.e1), std::abs(c.e2), std::abs(c.e3),
                  std::abs(c.d1), std::abs(c.d2)});
    add_check(rep, "gf_no_r_sector", r_terms, tol);
  }
  return rep;
}

double normalization(const KernelSpec& k) {
  if (const auto* gf = std::get_if<GaussianForm>(&k)) {
    return std::abs(gf->coef.b3) / (2.0 * std::numbers::pi);
  }
  if (const auto* f1 = std::get_if<FormI>(&k)) {
    if (f1->coef.e1 <= 0.0) {
      throw InvalidDomainError(
          "one-delta normalization needs e1 > 0");
    }
    return std::abs(f1->beta) * std::sqrt(f1->coef.e1 / std::numbers::pi);
  }
  const auto& f2 = std::get<FormII>(k);
  return std::abs(f2.beta * f2.gamma);
}

complexd evaluate_smooth(const KernelSpec& k, double x_f, double r_f,
                         double x_i, double r_i) {
  const SigmaCoefficients& c = coefficients(k);
  const double re = -c.a1 * x_f * x_f - c.a2 * x_f * x_i - c.a3 * x_i * x_i -
                    c.e1 * r_f * r_f - c.e2 * r_f * r_i - c.e3 * r_i * r_i -
                    c.d1 * r_f - c.d2 * r_i;
  const double im = c.b1 * x_f * r_f + c.b2 * x_f * r_i + c.b3 * x_i * r_f +
                    c.b4 * x_i * r_i + c.c1 * x_f + c.c2 * x_i;
  return normalization(k) * std::exp(complexd(re, im));
}

CharRep char_rep(const FormI& k) {
  const SigmaCoefficients& c = k.coef;
  if (k.beta == 0.0) {
    throw InvalidDomainError("characteristic form needs beta != 0");
  }
  if (c.e1 <= 0.0) {
    throw InvalidDomainError("characteristic form needs e1 > 0");
  }
  const double A = k.alpha / k.beta;
  CharRep out;
  out.ratio = A;
  out.p11 = -(A * A * (c.a3 + c.b3 * c.b3 / (4.0 * c.e1)) +
              A * (c.a2 + c.b1 * c.b3 / (2.0 * c.e1)) + c.a1 +
              c.b1 * c.b1 / (4.0 * c.e1));
  out.p12 = -(A * c.b3 + c.b1) / (2.0 * c.e1);
  out.p22 = -1.0 / (4.0 * c.e1);
  out.phi(0) = A * (c.b4 - c.b3 * c.e2 / (2.0 * c.e1)) -
               c.b1 * c.e2 / (2.0 * c.e1) + c.b2;
  out.phi(1) = -c.e2 / (2.0 * c.e1);
  out.p01_imag = A * c.c2 + c.c1;
  return out;
}

CharRep char_rep(const FormII& k) {
  const SigmaCoefficients& c = k.coef;
  if (k.beta == 0.0) {
    throw InvalidDomainError("characteristic form needs beta != 0");
  }
  if (k.gamma == 0.0) {
    throw InvalidDomainError("characteristic form needs gamma != 0");
  }
  const double A = k.alpha / k.beta;
  const double q = k.eta / k.gamma;
  CharRep out;
  out.ratio = A;
  out.p11 = -(A * A * c.a3 + A * c.a2 + c.a1);
  out.p12 = 0.0;
  out.p22 = 0.0;
  out.phi(0) = A * q * c.b3 + A * c.b4 + q * c.b1 + c.b2;
  out.phi(1) = q;
  out.p01_imag = A * c.c2 + c.c1;
  return out;
}

CharRep char_rep(const KernelSpec& k) {
  if (const auto* f1 = std::get_if<FormI>(&k)) return char_rep(*f1);
  if (const auto* f2 = std::get_if<FormII>(&k)) return char_rep(*f2);
  throw InvalidDomainError(
      "the smooth form has no delta ratio; characteristic form undefined");
}

double cp_closed_form_margin(const KernelSpec& k) {
  if (const auto* f1 = std::get_if<FormI>(&k)) {
    const SigmaCoefficients& c = f1->coef;
    // Depolarising-limit family: the condition collapses to e1 <= a1.
    if (std::abs(c.e2) <= kStructuralTol &&
        std::abs(f1->alpha) <= kStructuralTol &&
        std::abs(c.b2) <= kStructuralTol) {
      return c.a1 - c.e1;
    }
    const CharRep r = char_rep(*f1);
    const double w =
        1.0 + f1->alpha * c.e2 / (2.0 * f1->beta * c.e1);  // 1 - det T
    const double root = std::sqrt((r.p11 - r.p22) * (r.p11 - r.p22) +
                                  r.p12 * r.p12 + w * w);
    return -(r.p11 + r.p22) - root;
  }
  if (const auto* f2 = std::get_if<FormII>(&k)) {
    const CharRep r = char_rep(*f2);
    const double w = 1.0 - f2->alpha * f2->eta / (f2->beta * f2->gamma);
    return -r.p11 - std::sqrt(r.p11 * r.p11 + w * w);
  }
  // Smooth form: analytic smallest eigenvalue of C = N + i(1 - det T) Omega
  // built from the affine tuple of the kernel.
  const SigmaCoefficients& c = std::get<GaussianForm>(k).coef;
  if (c.b3 == 0.0) {
    throw InvalidDomainError("smooth-form CP margin needs b3 != 0");
  }
  const double n11 = 2.0 * c.a3 / (c.b3 * c.b3);
  const double n12 = c.a2 / c.b3 - 2.0 * c.a3 * c.b1 / (c.b3 * c.b3);
  const double n22 =
      2.0 * (c.a3 * c.b1 * c.b1 / (c.b3 * c.b3) - c.a2 * c.b1 / c.b3 + c.a1);
  const double w = 1.0 - c.b2 / c.b3;  // 1 - det T
  const double tr = n11 + n22;
  const double gap = std::sqrt((n11 - n22) * (n11 - n22) +
                               4.0 * (n12 * n12 + w * w));
  return 0.5 * (tr - gap);
}

bool cp_closed_form(const KernelSpec& k, double tol) {
  return cp_closed_form_margin(k) >= -tol;
}

FormI regularize(const FormII& k, double eps) {
  if (!(eps > 0.0)) {
    throw InvalidDomainError("regularization width must be positive");
  }
  if (k.gamma == 0.0) {
    throw InvalidDomainError("regularization needs gamma != 0");
  }
  const double q = k.eta / k.gamma;
  const double inv = 1.0 / (eps * eps);
  FormI out;
  out.coef = k.coef;
  out.coef.e1 += inv;
  out.coef.e2 += -2.0 * q * inv;
  out.coef.e3 += q * q * inv;
  out.alpha = k.alpha;
  out.beta = k.beta;
  return out;
}

}  // namespace gqc
