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

#ifndef GQC_MASTEREQ_HPP_
#define GQC_MASTEREQ_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "gqc/common.hpp"
#include "gqc/core.hpp"
#include "gqc/kernels.hpp"
#include "gqc/oracle.hpp"

namespace gqc {

/// A uniformly sampled one-parameter family of kernels, all of one form.
struct CoefficientTrajectory {
  std::vector<double> times;
  std::vector<KernelSpec> samples;
  double dt = 0.0;

  std::size_t size() const { return times.size(); }
};

/// Builds a trajectory and enforces its invariants: at least two samples, all
/// samples share one form variant, the time grid is uniform with positive
/// step, and every sample is trace preserving.
CoefficientTrajectory make_trajectory(std::vector<double> times,
                                      std::vector<KernelSpec> samples);

/// Index of the sample whose time is closest to t.
std::size_t nearest_index(const CoefficientTrajectory& traj, double t);

/// Second-order generator of a differentiable channel family:
/// L[rho] = lc rho + (dx,dr) X (dx,dr)^T rho + (x,r) Y (dx,dr)^T rho
///        + (x,r) Z (x,r)^T rho,
/// with X and Z symmetric.
struct Liouvillian {
  complexd lc{0.0, 0.0};
  CMat2 x = CMat2::Zero();
  CMat2 y = CMat2::Zero();
  CMat2 z = CMat2::Zero();
};

/// Tests the generator-existence condition for delta-form trajectories:
/// c(t) = c1(t) + A(t) c2(t) must stay proportional to A(t) = alpha/beta.
/// Passes iff max_t |c/A - median(c/A)| <= tol (1 + |median|).
///
/// Throws InvalidDomainError if any A(t) = 0 (the condition degenerates) and
/// UnsupportedError for smooth-form trajectories.
bool existence_check(const CoefficientTrajectory& traj,
                     double tol = kDefaultTol);

/// Generator of a one-delta trajectory at sample `index`. Time derivatives
/// use second-order differences (one-sided at the endpoints). Throws
/// InvalidDomainError if the sample is singular (a singular channel cannot be
/// reached smoothly: det T is continuous along the family) or if a
/// denominator among e1, e2, A vanishes.
Liouvillian liouvillian_form1(const CoefficientTrajectory& traj,
                              std::size_t index);

/// Generator of a two-delta trajectory at sample `index`. Throws
/// InvalidDomainError if A = alpha/beta or B = gamma/eta vanishes or is
/// undefined.
Liouvillian liouvillian_form2(const CoefficientTrajectory& traj,
                              std::size_t index);

/// Form-dispatching wrapper; smooth-form trajectories are unsupported.
Liouvillian liouvillian_at(const CoefficientTrajectory& traj,
                           std::size_t index);

/// Applies the generator with second-order central differences. Boundary
/// nodes are left at zero; callers compare interior nodes only. If `warnings`
/// is non-null, a grid_too_coarse note is appended when the phase of rho
/// advances more than ~1.5 rad between adjacent significant samples.
DensityGrid apply_liouvillian(const Liouvillian& l, const DensityGrid& rho,
                              std::vector<std::string>* warnings = nullptr);

struct MasterEqReport {
  std::size_t index = 0;
  double time = 0.0;
  bool existence = false;   ///< proportionality condition held on the grid
  double residual = 0.0;    ///< max-norm relative residual, interior nodes
  double lhs_norm = 0.0;    ///< max |centered time derivative|
  double rhs_norm = 0.0;    ///< max |applied generator|
  double tolerance = 0.0;
  bool passed = false;
  std::vector<std::string> warnings;
};

/// Propagates `s` through the kernels at index-1, index, index+1, forms the
/// centered time derivative, and compares it against the generator applied to
/// the middle grid. `index` must be an interior sample.
MasterEqReport verify_master_equation(const CoefficientTrajectory& traj,
                                      const GaussianState& s,
                                      std::size_t index,
                                      const PositionGrid& grid, double tol);

/// Damped-oscillation demo parameters (names avoid the kernel's own gamma
/// and eta symbols).
struct QbmParams {
  double damping = 1.0;
  double frequency = 1.0;
  double amplitude = 1.0;
};

/// Synthetic smooth-form trajectory with
///   b2(t) = amplitude e^{-damping t/2} sin(frequency t),
///   det T = b2/b3 = amplitude frequency^2 e^{-damping t},
/// sampled at half steps t_k = (k + 1/2) duration/samples so b3 never lands
/// exactly on a sin zero. All other coefficients are constants:
/// a1 = a3 = 1/4, a2 = 0, b1 = b4 = 0, c = 0, e = d = 0.
CoefficientTrajectory qbm_trajectory(const QbmParams& p, double duration,
                                     int samples);

struct SingularScanEntry {
  std::size_t index = 0;
  double time = 0.0;
  double det_t = 0.0;
  double b2 = 0.0;
};

struct SingularScanReport {
  double threshold = 0.0;
  std::vector<SingularScanEntry> flagged;  ///< |det T| < threshold
  std::string caveat;
};

/// Flags samples of a smooth-form trajectory whose |det T| falls below the
/// threshold (strict), tagging them as an approach to the rank-1 class. The
/// caveat records that isolated b2 zeros with divergent coefficients are a
/// parametrization artifact, not a singular channel.
SingularScanReport singular_time_scan(const CoefficientTrajectory& traj,
                                      double threshold);

/// Midpoints of consecutive sample pairs where b2 changes sign (smooth-form
/// trajectories).
std::vector<double> b2_zero_crossings(const CoefficientTrajectory& traj);

}  // namespace gqc

#endif  // GQC_MASTEREQ_HPP_
