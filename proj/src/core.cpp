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

#include "gqc/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace gqc {

GaussianState make_state(const Mat2& sigma, const Vec2& mean) {
  GaussianState s;
  s.sigma = 0.5 * (sigma + sigma.transpose());
  s.mean = mean;
  return s;
}

GaussianState vacuum_state() { return GaussianState{}; }

bool is_physical(const GaussianState& s, double tol) {
  return s.sigma.determinant() >= 0.25 - tol;
}

const char* to_string(ChannelClass c) {
  switch (c) {
    case ChannelClass::NonSingular:
      return "non_singular";
    case ChannelClass::A2:
      return "a2";
    case ChannelClass::A1:
      return "a1";
  }
  return "unknown";
}

AffineChannel identity_channel() { return AffineChannel{}; }

GaussianState apply(const AffineChannel& ch, const GaussianState& s) {
  GaussianState out;
  Mat2 sig = ch.T * s.sigma * ch.T.transpose() + ch.N;
  out.sigma = 0.5 * (sig + sig.transpose());
  out.mean = ch.T * s.mean + ch.tau;
  return out;
}

AffineChannel compose(const AffineChannel& outer, const AffineChannel& inner) {
  AffineChannel out;
  out.T = outer.T * inner.T;
  Mat2 n = outer.T * inner.N * outer.T.transpose() + outer.N;
  out.N = 0.5 * (n + n.transpose());
  out.tau = outer.T * inner.tau + outer.tau;
  return out;
}

CMat2 cp_matrix(const AffineChannel& ch) {
  const Mat2 w = symplectic_form();
  const Mat2 residual = w - ch.T * w * ch.T.transpose();
  const complexd i(0.0, 1.0);
  return ch.N.cast<complexd>() + i * residual.cast<complexd>();
}

double cp_min_eigenvalue(const AffineChannel& ch) {
  Eigen::SelfAdjointEigenSolver<CMat2> solver(cp_matrix(ch));
  return solver.eigenvalues().minCoeff();
}

bool is_cp(const AffineChannel& ch, double tol) {
  return cp_min_eigenvalue(ch) >= -tol;
}

bool is_unitary(const AffineChannel& ch, double tol) {
  const double noise = ch.N.cwiseAbs().maxCoeff();
  return noise <= tol && std::abs(ch.T.determinant() - 1.0) <= tol;
}

ChannelClass classify(const AffineChannel& ch, double tol) {
  const double scale = ch.T.cwiseAbs().maxCoeff();
  if (scale <= tol) return ChannelClass::A1;
  Eigen::JacobiSVD<Mat2> svd(ch.T);
  const double threshold = tol * scale;
  int rank = 0;
  for (int i = 0; i < 2; ++i) {
    if (svd.singularValues()(i) > threshold) ++rank;
  }
  if (rank == 2) return ChannelClass::NonSingular;
  if (rank == 1) return ChannelClass::A2;
  return ChannelClass::A1;
}

AffineChannel invert(const AffineChannel& ch, double tol) {
  if (classify(ch, tol) != ChannelClass::NonSingular) {
    throw SingularChannelError("cannot invert a singular channel");
  }
  const Mat2 ti = ch.T.inverse();
  AffineChannel out;
  out.T = ti;
  Mat2 n = -ti * ch.N * ti.transpose();
  out.N = 0.5 * (n + n.transpose());
  out.tau = -ti * ch.tau;
  return out;
}

}  // namespace gqc
