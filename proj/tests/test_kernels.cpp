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

#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "gqc/convert.hpp"
#include "gqc/kernels.hpp"

namespace gqc {
namespace {

GaussianForm sample_gf() {
  GaussianForm k;
  k.coef.a1 = 0.5;
  k.coef.a2 = -0.6;
  k.coef.a3 = 0.5;
  k.coef.b1 = 1.0;
  k.coef.b2 = -1.1;
  k.coef.b3 = 1.2;
  k.coef.b4 = -1.0;
  k.coef.c1 = 0.3;
  k.coef.c2 = -0.2;
  return k;
}

FormI sample_form1() {
  FormI k;
  k.coef.a1 = 0.3;
  k.coef.a2 = -0.1;
  k.coef.a3 = 0.2;
  k.coef.b1 = 0.4;
  k.coef.b2 = 0.7;
  k.coef.b3 = 0.2;
  k.coef.b4 = -0.3;
  k.coef.c1 = 0.1;
  k.coef.c2 = -0.2;
  k.coef.e1 = 0.9;
  k.coef.e2 = 0.5;
  k.coef.e3 = 0.5 * 0.5 / (4.0 * 0.9);
  k.alpha = 1.2;
  k.beta = -0.8;
  return k;
}

FormII sample_form2() {
  FormII k;
  k.coef.a1 = 0.25;
  k.coef.a3 = 0.25;
  k.alpha = 2.0;
  k.beta = 1.0;
  k.gamma = 1.0;
  k.eta = 0.5;
  // Trace preservation: e1 q^2 + e2 q + e3 = 0 and d1 q + d2 = 0 at q = 1/2.
  k.coef.e1 = 0.4;
  k.coef.e2 = 0.2;
  k.coef.e3 = -(0.4 * 0.25 + 0.2 * 0.5);
  k.coef.d1 = 0.3;
  k.coef.d2 = -0.15;
  return k;
}

TEST_CASE("form names and coefficient access") {
  CHECK(std::string(form_name(KernelSpec(sample_gf()))) == "gaussian");
  CHECK(std::string(form_name(KernelSpec(sample_form1()))) == "delta1");
  CHECK(std::string(form_name(KernelSpec(sample_form2()))) == "delta2");
  CHECK(coefficients(KernelSpec(sample_form1())).e1 == 0.9);
}

TEST_CASE("compatibility checks on the smooth form") {
  CHECK(validate_hp(KernelSpec(sample_gf())).passed());

  GaussianForm leaking = sample_gf();
  leaking.coef.e1 = 1e-6;
  const ValidationReport rep = validate_hp(KernelSpec(leaking));
  CHECK_FALSE(rep.passed());
  const CheckResult* check = rep.find("gf_no_r_sector");
  REQUIRE(check != nullptr);
  CHECK_FALSE(check->passed);
  CHECK(check->residual == doctest::Approx(1e-6).epsilon(1e-12));

  GaussianForm flat = sample_gf();
  flat.coef.b3 = 0.0;
  const ValidationReport rep2 = validate_hp(KernelSpec(flat));
  CHECK_FALSE(rep2.passed());
  REQUIRE(rep2.find("gf_b3_nonzero") != nullptr);
  CHECK_FALSE(rep2.find("gf_b3_nonzero")->passed);

  GaussianForm negative = sample_gf();
  negative.coef.b3 = -1.2;
  const ValidationReport rep3 = validate_hp(KernelSpec(negative));
  CHECK(rep3.passed());
  CHECK(rep3.warnings.size() == 1);
}

TEST_CASE("compatibility checks reject non-finite parameters") {
  FormI bad = sample_form1();
  bad.alpha = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(validate_hp(KernelSpec(bad)).passed());

  GaussianForm badc = sample_gf();
  badc.coef.a2 = std::numeric_limits<double>::infinity();
  CHECK_FALSE(validate_hp(KernelSpec(badc)).passed());
}

TEST_CASE("trace checks on the one-delta form") {
  CHECK(validate_tp(KernelSpec(sample_form1())).passed());

  FormI imb = sample_form1();
  imb.coef.e3 += 1e-3;
  const ValidationReport rep = validate_tp(KernelSpec(imb));
  CHECK_FALSE(rep.passed());
  REQUIRE(rep.find("r_quadratic_balance") != nullptr);
  CHECK_FALSE(rep.find("r_quadratic_balance")->passed);

  FormI drift = sample_form1();
  drift.coef.d1 = 0.2;
  CHECK_FALSE(validate_tp(KernelSpec(drift)).passed());

  FormI flat = sample_form1();
  flat.coef.e1 = -0.1;
  const ValidationReport rep2 = validate_tp(KernelSpec(flat));
  CHECK_FALSE(rep2.passed());
  REQUIRE(rep2.find("e1_positive") != nullptr);
  // The quadratic balance is skipped when e1 is not positive.
  CHECK(rep2.find("r_quadratic_balance") == nullptr);

  FormI noBeta = sample_form1();
  noBeta.beta = 0.0;
  CHECK_THROWS_AS(validate_tp(KernelSpec(noBeta)), InvalidDomainError);
}

TEST_CASE("trace checks on the two-delta form") {
  CHECK(validate_tp(KernelSpec(sample_form2())).passed());

  FormII imb = sample_form2();
  imb.coef.e3 += 1e-3;
  CHECK_FALSE(validate_tp(KernelSpec(imb)).passed());

  FormII drift = sample_form2();
  drift.coef.d2 += 1e-3;
  const ValidationReport rep = validate_tp(KernelSpec(drift));
  REQUIRE(rep.find("r_linear_balance") != nullptr);
  CHECK_FALSE(rep.find("r_linear_balance")->passed);

  FormII noGamma = sample_form2();
  noGamma.gamma = 0.0;
  CHECK_THROWS_AS(validate_tp(KernelSpec(noGamma)), InvalidDomainError);
}

TEST_CASE("trace check on the smooth form requires an empty r sector") {
  CHECK(validate_tp(KernelSpec(sample_gf())).passed());
  GaussianForm leaking = sample_gf();
  leaking.coef.d2 = 1e-3;
  CHECK_FALSE(validate_tp(KernelSpec(leaking)).passed());
}

TEST_CASE("normalization constants") {
  GaussianForm gf;
  gf.coef.b3 = 1.7;
  CHECK(normalization(KernelSpec(gf)) ==
        doctest::Approx(0.2705634032562221).epsilon(1e-14));

  FormI f1;
  f1.beta = -2.0;
  f1.coef.e1 = 0.9;
  CHECK(normalization(KernelSpec(f1)) ==
        doctest::Approx(1.0704744696916626).epsilon(1e-14));

  FormI flat = f1;
  flat.coef.e1 = 0.0;
  CHECK_THROWS_AS(normalization(KernelSpec(flat)), InvalidDomainError);

  FormII f2;
  f2.beta = -1.2;
  f2.gamma = 0.5;
  CHECK(normalization(KernelSpec(f2)) == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("smooth kernel point evaluation") {
  const KernelSpec k(sample_gf());
  const complexd v = evaluate_smooth(k, 0.3, -0.2, 0.1, 0.4);
  CHECK(v.real() == doctest::Approx(0.1817807152094999).epsilon(1e-13));
  CHECK(v.imag() == doctest::Approx(-0.03420659631242099).epsilon(1e-13));
}

TEST_CASE("characteristic representation of the one-delta form") {
  const CharRep r = char_rep(sample_form1());
  // Frozen against the quadratic-form coefficients evaluated at
  // A = alpha/beta = -1.5 with the sample parameters above.
  CHECK(r.ratio == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(r.p11 == doctest::Approx(-0.9027777777777779).epsilon(1e-13));
  CHECK(r.p12 == doctest::Approx(-0.05555555555555557).epsilon(1e-13));
  CHECK(r.p22 == doctest::Approx(-0.2777777777777778).epsilon(1e-13));
  CHECK(r.phi(0) == doctest::Approx(1.1222222222222222).epsilon(1e-13));
  CHECK(r.phi(1) == doctest::Approx(-0.2777777777777778).epsilon(1e-13));
  CHECK(r.p01_imag == doctest::Approx(0.4).epsilon(1e-13));

  FormI noBeta = sample_form1();
  noBeta.beta = 0.0;
  CHECK_THROWS_AS(char_rep(noBeta), InvalidDomainError);

  FormI flat = sample_form1();
  flat.coef.e1 = 0.0;
  CHECK_THROWS_AS(char_rep(flat), InvalidDomainError);
}

TEST_CASE("characteristic representation of the two-delta form") {
  const CharRep r = char_rep(sample_form2());
  CHECK(r.ratio == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.p11 == doctest::Approx(-(4.0 * 0.25 + 0.25)).epsilon(1e-13));
  CHECK(r.p12 == 0.0);
  CHECK(r.p22 == 0.0);
  CHECK(r.phi(1) == doctest::Approx(0.5).epsilon(1e-14));

  // The noise entry never depends on the phase couplings b.
  FormII shifted = sample_form2();
  shifted.coef.b1 = 0.9;
  shifted.coef.b4 = -0.4;
  CHECK(char_rep(shifted).p11 == doctest::Approx(r.p11).epsilon(1e-14));

  CHECK_THROWS_AS(char_rep(KernelSpec(sample_gf())), InvalidDomainError);
}

TEST_CASE("positivity margin agrees with the eigenvalue route") {
  // The closed forms must reproduce the smallest eigenvalue of the
  // positivity matrix built from the affine tuple.
  const KernelSpec kernels[] = {
      KernelSpec(sample_gf()),
      KernelSpec(sample_form1()),
      KernelSpec(sample_form2()),
  };
  for (const KernelSpec& k : kernels) {
    const double margin = cp_closed_form_margin(k);
    const double eig = cp_min_eigenvalue(to_affine(k));
    CHECK(margin == doctest::Approx(eig).epsilon(1e-12));
  }
}

TEST_CASE("positivity margin of the two-delta boundary family is zero") {
  // alpha eta = beta gamma puts the two-delta sample exactly on the
  // boundary: w = 0 and the margin collapses to -p11 - |p11|.
  FormII k = sample_form2();
  k.coef.a1 = 0.0;
  k.coef.a3 = 0.0;
  CHECK(cp_closed_form_margin(KernelSpec(k)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cp_closed_form(KernelSpec(k), 1e-12));
}

TEST_CASE("total-depolarising one-delta branch reduces to a1 - e1") {
  FormI k;
  k.alpha = 0.0;
  k.beta = 1.0;
  k.coef.b1 = 0.4;
  k.coef.e1 = 0.7;
  k.coef.a1 = 0.9;
  CHECK(cp_closed_form_margin(KernelSpec(k)) ==
        doctest::Approx(0.2).epsilon(1e-13));
  // The reduced margin is a rescaled determinant: it shares the sign of the
  // eigenvalue route but not its magnitude.
  CHECK(cp_closed_form(KernelSpec(k), 1e-12) ==
        is_cp(to_affine(KernelSpec(k)), 1e-12));

  k.coef.a1 = 0.5;  // below e1: not completely positive
  CHECK_FALSE(cp_closed_form(KernelSpec(k), 1e-12));
  CHECK_FALSE(is_cp(to_affine(KernelSpec(k)), 1e-12));
}

TEST_CASE("positivity margin of the smooth form needs b3") {
  GaussianForm flat = sample_gf();
  flat.coef.b3 = 0.0;
  CHECK_THROWS_AS(cp_closed_form_margin(KernelSpec(flat)), InvalidDomainError);
}

TEST_CASE("regularization widens the two-delta kernel") {
  const FormII k = sample_form2();
  const double eps = 0.25;
  const double inv = 1.0 / (eps * eps);
  const double q = k.eta / k.gamma;
  const FormI wide = regularize(k, eps);

  CHECK(wide.alpha == k.alpha);
  CHECK(wide.beta == k.beta);
  CHECK(wide.coef.e1 == doctest::Approx(k.coef.e1 + inv).epsilon(1e-14));
  CHECK(wide.coef.e2 ==
        doctest::Approx(k.coef.e2 - 2.0 * q * inv).epsilon(1e-14));
  CHECK(wide.coef.e3 ==
        doctest::Approx(k.coef.e3 + q * q * inv).epsilon(1e-14));
  // Untouched sectors carry over verbatim.
  CHECK(wide.coef.a1 == k.coef.a1);
  CHECK(wide.coef.d1 == k.coef.d1);

  CHECK_THROWS_AS(regularize(k, 0.0), InvalidDomainError);
  FormII noGamma = k;
  noGamma.gamma = 0.0;
  CHECK_THROWS_AS(regularize(noGamma, eps), InvalidDomainError);
}

TEST_CASE("regularized unitary carries noise eps^2/2") {
  // A noiseless unitary two-delta kernel picks up exactly eps^2/2 of noise
  // in the leading entry when widened.
  FormII u;
  u.alpha = 2.0;
  u.beta = 1.0;
  u.gamma = 1.0;
  u.eta = 0.5;
  u.coef.e1 = 0.0;
  const FormI wide = regularize(u, 0.1);
  const AffineChannel ch = to_affine(KernelSpec(wide));
  CHECK(ch.N.cwiseAbs().maxCoeff() == doctest::Approx(0.005).epsilon(1e-12));
  // Widening a kernel without an r sector keeps it trace preserving: the
  // injected e's satisfy the quadratic balance by construction.
  CHECK(validate_tp(KernelSpec(wide)).passed());
}

}  // namespace
}  // namespace gqc
