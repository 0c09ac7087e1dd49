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

#include "gqc/core.hpp"
#include "gqc/kernels.hpp"

namespace gqc {

/// The delta-form affine tuples carry a global sign ambiguity in T (the
/// kernel determines the channel, but the printed tuples and the map
/// recovered from the characteristic propagator differ by T -> -T). The
/// ambiguity is settled empirically by sign_audit; N and tau are sign-free.
enum class SignConvention { AsPrinted, GlobalFlip };

/// Convention selected by the audit for this build: the mean map of both
/// delta forms is d -> -T_printed d + tau. The smooth-form tuple is
/// self-consistent and always used as printed.
inline constexpr SignConvention kAuditedConvention = SignConvention::GlobalFlip;

const char* to_string(SignConvention sc);

/// Structural families used by the concatenation table.
///   GU / dU:        unitary smooth / two-delta kernels
///   GA2:            smooth rank-one family (b2 = 0)
///   dA2_alpha:      one-delta rank-one family with alpha = 0
///   dA2_e2:         one-delta rank-one family with e2 = 0
///   dA2_alpha_e2:   one-delta family with alpha = e2 = 0 (b2 != 0)
///   dA1:            one-delta total-depolarising family (e2 = alpha = b2 = 0)
///   *_general:      anything else of that form
enum class FormTag {
  GU,
  dU,
  GA2,
  dA2_alpha,
  dA2_e2,
  dA2_alpha_e2,
  dA1,
  G_general,
  J1_general,
  J2_general,
};

const char* to_string(FormTag t);

/// Affine tuple of a smooth kernel (independent of the sign convention):
///   T = [[-b4/b3, 1/b3], [b1 b4/b3 - b2, -b1/b3]]
///   N = [[2 a3/b3^2, a2/b3 - 2 a3 b1/b3^2], [., 2(a3 b1^2/b3^2 - a2 b1/b3 + a1)]]
///   tau = (-c2/b3, b1 c2/b3 - c1)
/// Throws InvalidDomainError when b3 = 0.
AffineChannel gf_to_affine(const GaussianForm& k);

/// Affine tuple of a one-delta kernel. As printed,
///   T = [[e2/(2 e1), 0], [phi1, -alpha/beta]],
///   N = [[-2 p22, p12], [p12, -2 p11]], tau = (0, -(alpha/beta) c2 - c1);
/// under GlobalFlip T is negated.
AffineChannel form1_to_affine(const FormI& k,
                              SignConvention sc = kAuditedConvention);

/// Affine tuple of a two-delta kernel. As printed,
///   T = [[-eta/gamma, 0], [phi1, -alpha/beta]],
///   N = [[0, 0], [0, -2 p11]], tau = (0, -(alpha/beta) c2 - c1);
/// under GlobalFlip T is negated.
AffineChannel form2_to_affine(const FormII& k,
                              SignConvention sc = kAuditedConvention);

AffineChannel to_affine(const KernelSpec& k,
                        SignConvention sc = kAuditedConvention);

/// Decide the sign convention empirically. printed_prediction must be the
/// as-printed affine image of a displaced test state whose grid propagation
/// produced oracle_result. The flipped mean is reconstructed exactly as
/// 2 tau - mean_printed. Throws AmbiguousSignError when the two conventions
/// cannot be separated by a factor of ten (e.g. a zero-mean test state).
SignConvention sign_audit(const KernelSpec& k,
                          const GaussianState& oracle_result,
                          const GaussianState& printed_prediction);

/// Classification from kernel structure alone:
///   GaussianForm: A2 iff b2 = 0, else NonSingular.
///   FormI: A1 iff e2 = alpha = b2 = 0; A2 iff e2 alpha = 0 otherwise;
///          else NonSingular.
///   FormII: always NonSingular (CP excludes singular two-delta kernels).
ChannelClass classify_kernel(const KernelSpec& k,
                             double tol = kStructuralTol);

/// Recognise the structural family of a kernel (see FormTag).
FormTag tag_kernel(const KernelSpec& k, double tol = kStructuralTol);

/// Concatenation algebra on recognised families: outer is applied after
/// inner. Covers the unitary closure, absorption into the total-depolarising
/// family, and the twelve printed mixed rows; anything else throws
/// UnsupportedError.
FormTag compose_form(FormTag outer, FormTag inner);

/// State-dependent scalars entering the rank-one final-state formulas: s1 is
/// the covariance combination, s2 the mean combination picked out by the
/// surviving row of T.
struct A2Stats {
  double s1 = 0;
  double s2 = 0;
};

struct A2FinalState {
  GaussianState state;
  A2Stats stats;
};

/// Closed-form final state for the three rank-one families (smooth with
/// b2 = 0; one-delta with e2 = 0; one-delta with alpha = 0), written directly
/// in terms of the input moments. Throws UnsupportedError for kernels outside
/// these families.
A2FinalState a2_final_state(const KernelSpec& k, const GaussianState& s,
                            SignConvention sc = kAuditedConvention);

}  // namespace gqc
