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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace gqc {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using CMat2 = Eigen::Matrix2cd;
using complexd = std::complex<double>;

/// Default tolerance for algebraic checks (matrix identities, CP margins).
inline constexpr double kDefaultTol = 1e-9;

/// Tolerance used when deciding that a coefficient is structurally zero,
/// e.g. while recognising channel families from their coefficients.
inline constexpr double kStructuralTol = 1e-12;

/// Default tolerance for quadrature-based (grid) comparisons.
inline constexpr double kOracleTol = 1e-6;

/// Name of the environment variable that overrides the default algebraic
/// tolerance in the command line tool.
inline constexpr const char* kTolEnvVar = "GQC_TOL";

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of the requested operation.
struct InvalidDomainError : Error {
  using Error::Error;
};

/// The requested operation needs an invertible channel.
struct SingularChannelError : Error {
  using Error::Error;
};

/// The requested combination is outside the supported algebra.
struct UnsupportedError : Error {
  using Error::Error;
};

/// A density grid failed its trace or Hermiticity check.
struct NotNormalizedError : Error {
  using Error::Error;
};

/// An empirical sign audit could not separate the two conventions.
struct AmbiguousSignError : Error {
  using Error::Error;
};

/// A JSON document failed schema validation.
struct SchemaError : Error {
  using Error::Error;
};

/// The symplectic form for one mode, Omega = [[0, 1], [-1, 0]].
inline Mat2 symplectic_form() {
  Mat2 w;
  w << 0.0, 1.0, -1.0, 0.0;
  return w;
}

}  // namespace gqc
