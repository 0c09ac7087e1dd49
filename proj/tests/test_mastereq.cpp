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
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gqc/mastereq.hpp"

namespace gqc {
namespace {

// One-delta family exercising every generator term: A, the b-couplings and
// the noise coefficients all vary, and c1 = 0.15 A keeps c proportional to A.
KernelSpec form1_at(double t, bool break_existence) {
  FormI k;
  const double A = 1.0 + 0.3 * t;
  k.coef.a1 = 0.3 + 0.05 * t;
  k.coef.a2 = 0.1 * t;
  k.coef.a3 = 0.2 - 0.03 * t;
  k.coef.b1 = 0.4 + 0.1 * t;
  k.coef.b2 = 0.7 - 0.2 * t;
  k.coef.b3 = 0.2 + 0.05 * t;
  k.coef.b4 = -0.3 + 0.1 * t;
  k.coef.c1 = break_existence ? 0.3 * t : 0.15 * A;
  k.coef.c2 = 0.05;
  k.coef.e1 = 0.7 * std::exp(0.8 * t);
  k.coef.e2 = 0.5 * std::exp(0.3 * t);
  k.coef.e3 = k.coef.e2 * k.coef.e2 / (4.0 * k.coef.e1);
  k.alpha = A;
  k.beta = 1.0;
  return KernelSpec(k);
}

// Two-delta family with constant B and quadratically growing noise strength.
KernelSpec form2_at(double t, bool break_existence) {
  FormII k;
  k.coef.a1 = 0.25;
  k.coef.a3 = 0.25;
  k.coef.b1 = 0.4;
  if (break_existence) k.coef.c1 = 0.3 * t;
  k.alpha = std::exp(t);
  k.beta = 1.0;
  k.gamma = 1.0;
  k.eta = 1.0;
  return KernelSpec(k);
}

CoefficientTrajectory window(double t0, int half, double dt,
                             KernelSpec (*at)(double, bool),
                             bool broken = false) {
  std::vector<double> times;
  std::vector<KernelSpec> kernels;
  for (int i = -half; i <= half; ++i) {
    times.push_back(t0 + i * dt);
    kernels.push_back(at(times.back(), broken));
  }
  return make_trajectory(std::move(times), std::move(kernels));
}

TEST_CASE("trajectory construction enforces its invariants") {
  const KernelSpec k = form1_at(0.1, false);
  CHECK_THROWS_AS(make_trajectory({0.0, 0.1}, {k}), InvalidDomainError);
  CHECK_THROWS_AS(make_trajectory({0.0}, {k}), InvalidDomainError);
  CHECK_THROWS_AS(make_trajectory({0.1, 0.0}, {k, k}), InvalidDomainError);
  CHECK_THROWS_AS(make_trajectory({0.0, 0.1, 0.3}, {k, k, k}),
                  InvalidDomainError);
  CHECK_THROWS_AS(make_trajectory({0.0, 0.1}, {k, form2_at(0.1, false)}),
                  InvalidDomainError);

  FormI leaky = std::get<FormI>(form1_at(0.1, false));
  leaky.coef.d1 = 0.2;
  CHECK_THROWS_AS(make_trajectory({0.0, 0.1}, {k, KernelSpec(leaky)}),
                  InvalidDomainError);

  const CoefficientTrajectory traj = window(0.2, 3, 1e-3, form1_at);
  CHECK(traj.size() == 7);
  CHECK(traj.dt == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("nearest_index picks the closest sample") {
  const CoefficientTrajectory traj = window(0.2, 3, 1e-3, form1_at);
  CHECK(nearest_index(traj, 0.2) == 3);
  CHECK(nearest_index(traj, 0.2004) == 3);
  CHECK(nearest_index(traj, 0.2006) == 4);
  CHECK(nearest_index(traj, -5.0) == 0);
  CHECK(nearest_index(traj, 5.0) == 6);
}

TEST_CASE("existence condition") {
  CHECK(existence_check(window(0.2, 3, 1e-3, form1_at)));
  CHECK_FALSE(existence_check(window(0.2, 3, 1e-3, form1_at, true)));
  CHECK(existence_check(window(0.2, 3, 1e-3, form2_at)));
  CHECK_FALSE(existence_check(window(0.2, 3, 1e-3, form2_at, true)));

  const QbmParams p;
  CHECK_THROWS_AS(existence_check(qbm_trajectory(p, 5.0, 50)),
                  UnsupportedError);
}

TEST_CASE("one-delta generator entries match the analytic derivatives") {
  const CoefficientTrajectory traj = window(0.2, 3, 1e-3, form1_at);
  const Liouvillian l = liouvillian_form1(traj, 3);

  // Frozen from the closed-form time derivatives of the family at t = 0.2;
  // the implementation differentiates the sampled series, so agreement is
  // limited by the dt^2 stencil error on the exponential coefficients.
  CHECK(l.y(0, 0).real() ==
        doctest::Approx(0.2830188679245283).epsilon(1e-9));
  CHECK(l.lc.real() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(l.x(1, 1).real() ==
        doctest::Approx(0.06086741349758654).epsilon(1e-6));
  CHECK(l.y(0, 1).imag() ==
        doctest::Approx(0.45065394692010136).epsilon(1e-6));
  CHECK(l.z(0, 0).real() ==
        doctest::Approx(0.37390419518851137).epsilon(1e-6));
  CHECK(l.z(0, 1).imag() ==
        doctest::Approx(0.2908691517721227).epsilon(1e-6));

  // Structural zeros of this generator set.
  CHECK(std::abs(l.x(0, 0)) == 0.0);
  CHECK(std::abs(l.x(0, 1)) == 0.0);
  CHECK(std::abs(l.y(1, 0)) == 0.0);
  CHECK(std::abs(l.z(1, 1)) == 0.0);
  // lc doubles as the r-sector drag.
  CHECK(l.y(1, 1).real() == doctest::Approx(l.lc.real()).epsilon(1e-12));
  // Z is symmetric.
  CHECK(l.z(1, 0) == l.z(0, 1));

  CHECK_THROWS_AS(liouvillian_form1(traj, 99), InvalidDomainError);
  CHECK_THROWS_AS(liouvillian_form2(traj, 3), UnsupportedError);
}

TEST_CASE("two-delta generator entries match the analytic derivatives") {
  const CoefficientTrajectory traj = window(0.2, 3, 1e-3, form2_at);
  const Liouvillian l = liouvillian_form2(traj, 3);

  // A = e^t gives dA/A = 1 at every t; B is constant; lambda = b1 is
  // constant, so z_xr = -i lambda / 2.
  CHECK(l.y(0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(l.y(1, 1)) <= 1e-12);
  CHECK(l.z(0, 0).real() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(l.z(0, 1).imag() == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(std::abs(l.lc) == 0.0);
  CHECK(l.x.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(liouvillian_form1(traj, 3), UnsupportedError);

  const Liouvillian via_dispatch = liouvillian_at(traj, 3);
  CHECK(via_dispatch.y(0, 0) == l.y(0, 0));
}

TEST_CASE("generators are refused at singular samples") {
  // e2 = 0 makes the one-delta sample rank one; no generator exists there.
  auto singular_at = [](double t, bool) {
    FormI k;
    k.coef.a1 = 0.3;
    k.coef.e1 = 0.7 + 0.1 * t;
    k.coef.e2 = 0.0;
    k.coef.e3 = 0.0;
    k.alpha = 1.0 + t;
    k.beta = 1.0;
    return KernelSpec(k);
  };
  const CoefficientTrajectory traj = window(0.2, 3, 1e-3, singular_at);
  CHECK_THROWS_AS(liouvillian_form1(traj, 3), InvalidDomainError);
}

TEST_CASE("smooth-form trajectories have no generator set") {
  const CoefficientTrajectory traj = qbm_trajectory(QbmParams{}, 5.0, 50);
  CHECK_THROWS_AS(liouvillian_at(traj, 3), UnsupportedError);
}

TEST_CASE("generator application matches analytic derivatives") {
  // Manufactured Gaussian grid with a known closed-form image under L.
  PositionGrid g;
  g.extent = 4.0;
  g.n = 401;
  const double a = 0.3, b = 0.35, c = 0.1, u = 0.4, v = -0.2;
  DensityGrid rho(g);
  for (int j = 0; j < g.n; ++j) {
    const double x = g.coord(j);
    for (int q = 0; q < g.n; ++q) {
      const double r = g.coord(q);
      rho.at(j, q) = std::exp(
          complexd(-a * x * x - b * r * r - c * x * r, u * x + v * r));
    }
  }

  Liouvillian l;
  l.lc = complexd(0.4, 0.0);
  l.x(1, 1) = 0.06;
  l.y(0, 0) = 0.28;
  l.y(1, 1) = 0.4;
  l.y(0, 1) = complexd(0.0, 0.45);
  l.z(0, 0) = 0.37;
  l.z(0, 1) = complexd(0.0, 0.29);
  l.z(1, 0) = l.z(0, 1);

  const DensityGrid got = apply_liouvillian(l, rho);

  double worst = 0.0, scale = 0.0;
  for (int j = 1; j + 1 < g.n; ++j) {
    const double x = g.coord(j);
    for (int q = 1; q + 1 < g.n; ++q) {
      const double r = g.coord(q);
      const complexd f = rho.at(j, q);
      const complexd gx = complexd(-2.0 * a * x - c * r, u);
      const complexd gr = complexd(-2.0 * b * r - c * x, v);
      const complexd frr = (gr * gr - 2.0 * b) * f;
      const complexd fx = gx * f;
      const complexd fr = gr * f;
      const complexd want =
          l.lc * f + l.x(1, 1) * frr + x * l.y(0, 0) * fx +
          (x * l.y(0, 1) + r * l.y(1, 1)) * fr +
          (l.z(0, 0) * x * x + 2.0 * l.z(0, 1) * x * r) * f;
      worst = std::max(worst, std::abs(want - got.at(j, q)));
      scale = std::max(scale, std::abs(want));
    }
  }
  CHECK(worst <= 2e-4 * scale);

  // Boundary nodes stay zero.
  CHECK(got.at(0, 5) == complexd(0.0));
  CHECK(got.at(5, g.n - 1) == complexd(0.0));
}

TEST_CASE("coarse grids with fast phases are flagged") {
  PositionGrid g;
  g.extent = 4.0;
  g.n = 41;  // h = 0.2, so a phase of 50 x advances 10 rad per step
  DensityGrid rho(g);
  for (int j = 0; j < g.n; ++j) {
    const double x = g.coord(j);
    for (int q = 0; q < g.n; ++q) {
      const double r = g.coord(q);
      rho.at(j, q) =
          std::exp(complexd(-0.3 * x * x - 0.3 * r * r, 50.0 * x));
    }
  }
  std::vector<std::string> warnings;
  apply_liouvillian(Liouvillian{}, rho, &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("grid_too_coarse") != std::string::npos);
}

TEST_CASE("master equation holds along the two-delta family") {
  PositionGrid g;
  g.extent = 5.0;
  g.n = 301;
  const CoefficientTrajectory good = window(0.2, 3, 1e-3, form2_at);
  const MasterEqReport rep =
      verify_master_equation(good, vacuum_state(), 3, g, 1e-3);
  CHECK(rep.existence);
  CHECK(rep.passed);
  CHECK(rep.residual <= 1e-3);
  CHECK(rep.lhs_norm > 0.0);

  // Breaking the existence condition leaves a visible defect.
  const CoefficientTrajectory bad = window(0.2, 3, 1e-3, form2_at, true);
  const MasterEqReport ctrl =
      verify_master_equation(bad, vacuum_state(), 3, g, 1e-3);
  CHECK_FALSE(ctrl.existence);
  CHECK_FALSE(ctrl.passed);
  CHECK(ctrl.residual >= 10.0 * rep.residual);

  // Only interior samples have both neighbours.
  CHECK_THROWS_AS(verify_master_equation(good, vacuum_state(), 0, g, 1e-3),
                  InvalidDomainError);
  CHECK_THROWS_AS(verify_master_equation(good, vacuum_state(), 6, g, 1e-3),
                  InvalidDomainError);
}

TEST_CASE("damped-oscillation demo trajectory") {
  QbmParams p;
  p.damping = 1.0;
  p.frequency = 2.0;
  p.amplitude = 1.0;
  const double duration = 10.0;
  const int samples = 200;
  const CoefficientTrajectory traj = qbm_trajectory(p, duration, samples);
  CHECK(traj.size() == 200);

  // Half-step sampling.
  const double dt = duration / samples;
  CHECK(traj.times[0] == doctest::Approx(0.5 * dt).epsilon(1e-12));
  CHECK(traj.times[1] == doctest::Approx(1.5 * dt).epsilon(1e-12));

  // det T of the affine tuple reproduces the closed form exactly; the
  // parametrization cancels the oscillation between b2 and b3.
  for (std::size_t i = 0; i < traj.size(); i += 37) {
    const double t = traj.times[i];
    const double want = p.amplitude * p.frequency * p.frequency *
                        std::exp(-p.damping * t);
    const AffineChannel ch = to_affine(traj.samples[i]);
    CHECK(std::abs(ch.T.determinant() - want) <= 1e-12 * want);
  }

  CHECK_THROWS_AS(qbm_trajectory(p, 10.0, 1), InvalidDomainError);
  CHECK_THROWS_AS(qbm_trajectory(p, -1.0, 50), InvalidDomainError);
  QbmParams bad = p;
  bad.damping = 0.0;
  CHECK_THROWS_AS(qbm_trajectory(bad, 10.0, 50), InvalidDomainError);
  bad = p;
  bad.frequency = 0.0;
  CHECK_THROWS_AS(qbm_trajectory(bad, 10.0, 50), InvalidDomainError);
}

TEST_CASE("determinant scan flags the decayed tail") {
  QbmParams p;
  p.damping = 1.0;
  p.frequency = 2.0;
  p.amplitude = 1.0;
  const CoefficientTrajectory traj = qbm_trajectory(p, 10.0, 200);
  const double threshold = 0.05;
  const SingularScanReport rep = singular_time_scan(traj, threshold);
  CHECK_FALSE(rep.caveat.empty());
  CHECK(rep.threshold == threshold);
  REQUIRE(!rep.flagged.empty());
  // det T decays monotonically, so the flagged set is exactly the suffix
  // below the threshold (strict comparison).
  std::size_t first = traj.size();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double det = p.amplitude * p.frequency * p.frequency *
                       std::exp(-p.damping * traj.times[i]);
    if (det < threshold) {
      first = i;
      break;
    }
  }
  CHECK(rep.flagged.size() == traj.size() - first);
  CHECK(rep.flagged.front().index == first);
  for (const SingularScanEntry& e : rep.flagged) {
    CHECK(std::abs(e.det_t) < threshold);
  }

  const CoefficientTrajectory delta = window(0.2, 3, 1e-3, form1_at);
  CHECK_THROWS_AS(singular_time_scan(delta, 0.1), UnsupportedError);
  CHECK_THROWS_AS(b2_zero_crossings(delta), UnsupportedError);
}

TEST_CASE("b2 sign changes are located to one step") {
  QbmParams p;
  p.damping = 1.0;
  p.frequency = 2.0;
  p.amplitude = 1.0;
  const double duration = 10.0;
  const CoefficientTrajectory traj = qbm_trajectory(p, duration, 200);
  const std::vector<double> zeros = b2_zero_crossings(traj);
  // sin(2t) changes sign at t = k pi/2 inside (0, 10): k = 1..6.
  REQUIRE(zeros.size() == 6);
  const double step = duration / 200;
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    const double want = (k + 1) * std::numbers::pi / 2.0;
    CHECK(std::abs(zeros[k] - want) <= step);
  }
}

}  // namespace
}  // namespace gqc
