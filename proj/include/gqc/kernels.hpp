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

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gqc/common.hpp"

namespace gqc {

/// Coefficients of the shared quadratic exponent
///
///   Sigma = i(b1 x_f r_f + b2 x_f r_i + b3 x_i r_f + b4 x_i r_i
///             + c1 x_f + c2 x_i)
///           - a1 x_f^2 - a2 x_f x_i - a3 x_i^2
///           - e1 r_f^2 - e2 r_f r_i - e3 r_i^2 - d1 r_f - d2 r_i
///
/// written in the coordinates of the position representation
/// rho(x, r) = <r - x/2| rho |r + x/2>: x is the offset between the two
/// position arguments and r their midpoint; subscript f is the output,
/// subscript i the input.
struct SigmaCoefficients {
  double a1 = 0, a2 = 0, a3 = 0;
  double b1 = 0, b2 = 0, b3 = 0, b4 = 0;
  double c1 = 0, c2 = 0;
  double e1 = 0, e2 = 0, e3 = 0;
  double d1 = 0, d2 = 0;
};

/// Smooth propagator (|b3|/2pi) exp(Sigma); Hermiticity-compatible instances
/// carry no r-sector terms (e = d = 0) and need b3 != 0.
struct GaussianForm {
  SigmaCoefficients coef;
};

/// One-delta propagator N_I delta(alpha x_f - beta x_i) exp(Sigma) with
/// N_I = |beta| sqrt(e1/pi); valid instances have beta != 0 and e1 > 0.
struct FormI {
  SigmaCoefficients coef;
  double alpha = 0;
  double beta = 1;
};

/// Two-delta propagator
/// N_II delta(gamma r_f - eta r_i) delta(alpha x_f - beta x_i) exp(Sigma)
/// with N_II = |beta gamma|; valid instances have beta != 0 and gamma != 0.
struct FormII {
  SigmaCoefficients coef;
  double alpha = 0;
  double beta = 1;
  double gamma = 1;
  double eta = 0;
};

using KernelSpec = std::variant<GaussianForm, FormI, FormII>;

const char* form_name(const KernelSpec& k);
const SigmaCoefficients& coefficients(const KernelSpec& k);

/// One named constraint check: residual is the magnitude of the violation
/// (0 when the check passes).
struct CheckResult {
  std::string name;
  bool passed = true;
  double residual = 0;
  double tolerance = 0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool passed() const;
  double max_residual() const;
  const CheckResult* find(const std::string& name) const;
};

/// Hermiticity-compatibility checks: coefficient finiteness plus the
/// structural requirements of each form (no r-sector terms and b3 != 0 for
/// the smooth form). Reports violations, never throws.
ValidationReport validate_hp(const KernelSpec& k);

/// Trace-preservation checks.
///   GaussianForm: e = d = 0.
///   FormI:  e1 > 0, e2^2/(4 e1) - e3 = 0, d1 = d2 = 0.
///   FormII: e1 q^2 + e2 q + e3 = 0 and d1 q + d2 = 0 with q = eta/gamma
///           (for eta = 0 this reduces to e3 = d2 = 0).
/// Throws InvalidDomainError if beta = 0, or gamma = 0 for FormII.
ValidationReport validate_tp(const KernelSpec& k, double tol = kDefaultTol);

/// Trace-fixing prefactor: |b3|/(2 pi), |beta| sqrt(e1/pi), or |beta gamma|.
/// Throws InvalidDomainError when the prefactor is undefined (e1 <= 0).
double normalization(const KernelSpec& k);

/// Value of the smooth factor normalization * exp(Sigma); delta factors are
/// never evaluated.
complexd evaluate_smooth(const KernelSpec& k, double x_f, double r_f,
                         double x_i, double r_i);

/// Quadratic form of the kernel in characteristic coordinates. p12 is the
/// coefficient of the mixed monomial k1 k2 (counted once); the corresponding
/// noise matrix is N = [[-2 p22, p12], [p12, -2 p11]]. The linear part is
/// P01 = i p01_imag, P02 = 0.
struct CharRep {
  double ratio = 0;  // alpha/beta
  Vec2 phi = Vec2::Zero();
  double p11 = 0, p12 = 0, p22 = 0;
  double p01_imag = 0;
};

CharRep char_rep(const FormI& k);
CharRep char_rep(const FormII& k);
/// Dispatch; the smooth form has no delta ratio, so it is rejected with
/// InvalidDomainError.
CharRep char_rep(const KernelSpec& k);

/// Closed-form CP margin: the smallest eigenvalue of the CP matrix evaluated
/// analytically from the kernel coefficients (no numeric eigensolver).
///   FormI:  -(p11 + p22) - sqrt((p11 - p22)^2 + p12^2 + w^2),
///           w = 1 - det T = 1 + alpha e2/(2 beta e1).
///   FormII: -p11 - sqrt(p11^2 + w^2), w = 1 - alpha eta/(beta gamma).
///   FormI with e2 = alpha = b2 = 0 reduces to a1 - e1 (scaled), the
///   depolarising-limit condition e1 <= a1.
///   GaussianForm: analytic 2x2 eigenvalue of C from its affine tuple.
double cp_closed_form_margin(const KernelSpec& k);

/// True iff cp_closed_form_margin(k) >= -tol.
bool cp_closed_form(const KernelSpec& k, double tol = kDefaultTol);

/// Replace the r-sector delta of a two-delta kernel by a Gaussian of width
/// eps: e1 += 1/eps^2, e2 += -2 q/eps^2, e3 += q^2/eps^2 with q = eta/gamma.
/// Throws InvalidDomainError for eps <= 0 or gamma = 0.
FormI regularize(const FormII& k, double eps);

}  // namespace gqc
