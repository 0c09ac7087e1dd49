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

#include "gqc/common.hpp"

namespace gqc {

/// One-mode Gaussian state: symmetric covariance matrix over (q, p) and a
/// mean vector. Channels must accept arbitrary symmetric sigma, so physical
/// validity (the uncertainty bound) is a separate, optional check.
struct GaussianState {
  Mat2 sigma = Mat2::Identity() * 0.5;
  Vec2 mean = Vec2::Zero();
};

/// Build a state, symmetrising sigma.
GaussianState make_state(const Mat2& sigma, const Vec2& mean);

/// Vacuum: sigma = I/2, zero mean.
GaussianState vacuum_state();

/// Uncertainty bound det(sigma) >= 1/4, with slack tol.
bool is_physical(const GaussianState& s, double tol = kDefaultTol);

/// Gaussian channel on moments: sigma -> T sigma T^t + N, mean -> T mean + tau.
struct AffineChannel {
  Mat2 T = Mat2::Identity();
  Mat2 N = Mat2::Zero();
  Vec2 tau = Vec2::Zero();
};

/// Rank classification of the channel matrix T:
///   NonSingular (rank 2), A2 (rank 1), A1 (rank 0: total depolarising).
enum class ChannelClass { NonSingular, A2, A1 };

const char* to_string(ChannelClass c);

AffineChannel identity_channel();

/// Push a state through a channel.
GaussianState apply(const AffineChannel& ch, const GaussianState& s);

/// Composition (outer . inner): inner acts first.
AffineChannel compose(const AffineChannel& outer, const AffineChannel& inner);

/// Complete-positivity matrix C = N + i Omega - i T Omega T^t. Hermitian by
/// construction; the channel is CP iff C >= 0.
CMat2 cp_matrix(const AffineChannel& ch);

/// Smallest eigenvalue of cp_matrix(ch).
double cp_min_eigenvalue(const AffineChannel& ch);

/// CP test: min eigenvalue of C >= -tol.
bool is_cp(const AffineChannel& ch, double tol = kDefaultTol);

/// Unitary test: ||N||_max <= tol and T symplectic. For one mode
/// T Omega T^t = det(T) Omega, so the symplectic test is |det T - 1| <= tol.
bool is_unitary(const AffineChannel& ch, double tol = kDefaultTol);

/// Classify by the rank of T, computed from its singular values with
/// threshold tol * ||T||_max (absolute tol when T is the zero matrix).
ChannelClass classify(const AffineChannel& ch, double tol = kDefaultTol);

/// Inverse channel (T^-1, -T^-1 N T^-t, -T^-1 tau).
/// Throws SingularChannelError unless classify(ch) is NonSingular.
AffineChannel invert(const AffineChannel& ch, double tol = kDefaultTol);

}  // namespace gqc
