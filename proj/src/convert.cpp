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

#include "gqc/convert.hpp"

#include <cmath>

namespace gqc {

namespace {

bool near_zero(double v, double tol) { return std::abs(v) <= tol; }

}  // namespace

const char* to_string(SignConvention sc) {
  return sc == SignConvention::AsPrinted ? "as_printed" : "global_flip";
}

const char* to_string(FormTag t) {
  switch (t) {
    case FormTag::GU:
      return "GU";
    case FormTag::dU:
      return "dU";
    case FormTag::GA2:
      return "GA2";
    case FormTag::dA2_alpha:
      return "dA2_alpha";
    case FormTag::dA2_e2:
      return "dA2_e2";
    case FormTag::dA2_alpha_e2:
      return "dA2_alpha_e2";
    case FormTag::dA1:
      return "dA1";
    case FormTag::G_general:
      return "G_general";
    case FormTag::J1_general:
      return "J1_general";
    case FormTag::J2_general:
      return "J2_general";
  }
  return "unknown";
}

AffineChannel gf_to_affine(const GaussianForm& k) {
  const SigmaCoefficients& c = k.coef;
  if (c.b3 == 0.0) {
    throw InvalidDomainError("smooth-form affine tuple needs b3 != 0");
  }
  AffineChannel ch;
  ch.T << -c.b4 / c.b3, 1.0 / c.b3,  //
      c.b1 * c.b4 / c.b3 - c.b2, -c.b1 / c.b3;
  const double n11 = 2.0 * c.a3 / (c.b3 * c.b3);
  const double n12 = c.a2 / c.b3 - 2.0 * c.a3 * c.b1 / (c.b3 * c.b3);
  const double n22 =
      2.0 * (c.a3 * c.b1 * c.b1 / (c.b3 * c.b3) - c.a2 * c.b1 / c.b3 + c.a1);
  ch.N << n11, n12, n12, n22;
  ch.tau << -c.c2 / c.b3, c.b1 * c.c2 / c.b3 - c.c1;
  return ch;
}

namespace {

// Shared assembly for the two delta forms: the characteristic representation
// fixes N and tau outright, and T up to the audited global sign.
AffineChannel delta_tuple(const CharRep& r, double t11, SignConvention sc) {
  AffineChannel ch;
  ch.T << t11, 0.0,  //
      r.phi(0), -r.ratio;
  if (sc == SignConvention::GlobalFlip) ch.T = -ch.T;
  ch.N << -2.0 * r.p22, r.p12,  //
      r.p12, -2.0 * r.p11;
  ch.tau << 0.0, -r.p01_imag;
  return ch;
}

}  // namespace

AffineChannel form1_to_affine(const FormI& k, SignConvention sc) {
  const CharRep r = char_rep(k);
  return delta_tuple(r, k.coef.e2 / (2.0 * k.coef.e1), sc);
}

AffineChannel form2_to_affine(const FormII& k, SignConvention sc) {
  const CharRep r = char_rep(k);
  return delta_tuple(r, -k.eta / k.gamma, sc);
}

AffineChannel to_affine(const KernelSpec& k, SignConvention sc) {
  if (const auto* gf = std::get_if<GaussianForm>(&k)) return gf_to_affine(*gf);
  if (const auto* f1 = std::get_if<FormI>(&k)) return form1_to_affine(*f1, sc);
  return form2_to_affine(std::get<FormII>(k), sc);
}

SignConvention sign_audit(const KernelSpec& k,
                          const GaussianState& oracle_result,
                          const GaussianState& printed_prediction) {
  // The two candidate means differ only through the sign of T d:
  // mean_flip = -T d + tau = 2 tau - mean_printed.
  const AffineChannel printed = to_affine(k, SignConvention::AsPrinted);
  const Vec2 mean_printed = printed_prediction.mean;
  const Vec2 mean_flipped = 2.0 * printed.tau - mean_printed;
  const double dev_printed = (oracle_result.mean - mean_printed).norm();
  const double dev_flipped = (oracle_result.mean - mean_flipped).norm();
  if (dev_flipped * 10.0 <= dev_printed) return SignConvention::GlobalFlip;
  if (dev_printed * 10.0 <= dev_flipped) return SignConvention::AsPrinted;
  throw AmbiguousSignError(
      "sign audit inconclusive: use a test state with |T d| well above the "
      "grid error");
}

ChannelClass classify_kernel(const KernelSpec& k, double tol) {
  if (const auto* gf = std::get_if<GaussianForm>(&k)) {
    return near_zero(gf->coef.b2, tol) ? ChannelClass::A2
                                       : ChannelClass::NonSingular;
  }
  if (const auto* f1 = std::get_if<FormI>(&k)) {
    const bool e2_zero = near_zero(f1->coef.e2, tol);
    const bool alpha_zero = near_zero(f1->alpha, tol);
    if (e2_zero && alpha_zero && near_zero(f1->coef.b2, tol)) {
      return ChannelClass::A1;
    }
    if (e2_zero || alpha_zero) return ChannelClass::A2;
    return ChannelClass::NonSingular;
  }
  // CP excludes singular two-delta kernels.
  return ChannelClass::NonSingular;
}

FormTag tag_kernel(const KernelSpec& k, double tol) {
  if (const auto* gf = std::get_if<GaussianForm>(&k)) {
    const SigmaCoefficients& c = gf->coef;
    const bool no_noise = near_zero(c.a1, tol) && near_zero(c.a2, tol) &&
                          near_zero(c.a3, tol);
    if (no_noise && near_zero(c.b2 - c.b3, tol)) return FormTag::GU;
    if (near_zero(c.b2, tol)) return FormTag::GA2;
    return FormTag::G_general;
  }
  if (const auto* f1 = std::get_if<FormI>(&k)) {
    const bool e2_zero = near_zero(f1->coef.e2, tol);
    const bool alpha_zero = near_zero(f1->alpha, tol);
    const bool b2_zero = near_zero(f1->coef.b2, tol);
    if (e2_zero && alpha_zero && b2_zero) return FormTag::dA1;
    if (e2_zero && alpha_zero) return FormTag::dA2_alpha_e2;
    if (alpha_zero) return FormTag::dA2_alpha;
    if (e2_zero) return FormTag::dA2_e2;
    return FormTag::J1_general;
  }
  const auto& f2 = std::get<FormII>(k);
  const SigmaCoefficients& c = f2.coef;
  const bool no_noise =
      near_zero(c.a1, tol) && near_zero(c.a2, tol) && near_zero(c.a3, tol);
  if (no_noise && near_zero(f2.alpha * f2.eta - f2.beta * f2.gamma, tol)) {
    return FormTag::dU;
  }
  return FormTag::J2_general;
}

FormTag compose_form(FormTag outer, FormTag inner) {
  const auto is_unitary_tag = [](FormTag t) {
    return t == FormTag::GU || t == FormTag::dU;
  };
  // Total depolarising absorbs everything recognised on either side.
  const auto absorbable = [&](FormTag t) {
    return is_unitary_tag(t) || t == FormTag::dA1;
  };
  if ((outer == FormTag::dA1 && absorbable(inner)) ||
      (inner == FormTag::dA1 && absorbable(outer))) {
    return FormTag::dA1;
  }
  // Unitary closure: only a pair of two-delta unitaries stays two-delta.
  if (is_unitary_tag(outer) && is_unitary_tag(inner)) {
    return (outer == FormTag::dU && inner == FormTag::dU) ? FormTag::dU
                                                          : FormTag::GU;
  }
  // The twelve mixed rows: a rank-one delta family against a unitary. A
  // delta factor in x_i survives a smooth or two-delta map applied after it;
  // a delta factor acting on the intermediate variable is consumed unless
  // the outer kernel is two-delta.
  struct Row {
    FormTag outer, inner, result;
  };
  static const Row rows[] = {
      {FormTag::dA2_alpha, FormTag::GU, FormTag::GA2},
      {FormTag::GU, FormTag::dA2_alpha, FormTag::dA2_alpha},
      {FormTag::dA2_alpha, FormTag::dU, FormTag::dA2_alpha},
      {FormTag::dU, FormTag::dA2_alpha, FormTag::dA2_alpha},
      {FormTag::dA2_e2, FormTag::GU, FormTag::dA2_e2},
      {FormTag::GU, FormTag::dA2_e2, FormTag::GA2},
      {FormTag::dA2_e2, FormTag::dU, FormTag::dA2_e2},
      {FormTag::dU, FormTag::dA2_e2, FormTag::dA2_e2},
      {FormTag::GU, FormTag::dA2_alpha_e2, FormTag::dA2_alpha_e2},
      {FormTag::dA2_alpha_e2, FormTag::GU, FormTag::GA2},
      {FormTag::dU, FormTag::dA2_alpha_e2, FormTag::dA2_alpha_e2},
      {FormTag::dA2_alpha_e2, FormTag::dU, FormTag::dA2_alpha_e2},
  };
  for (const Row& row : rows) {
    if (row.outer == outer && row.inner == inner) return row.result;
  }
  throw UnsupportedError(
      std::string("concatenation not covered for pair (") + to_string(outer) +
      ", " + to_string(inner) + ")");
}

A2FinalState a2_final_state(const KernelSpec& k, const GaussianState& s,
                            SignConvention sc) {
  const double chi = (sc == SignConvention::GlobalFlip) ? -1.0 : 1.0;
  const Mat2& si = s.sigma;
  const Vec2& di = s.mean;
  A2FinalState out;

  if (const auto* gf = std::get_if<GaussianForm>(&k)) {
    const SigmaCoefficients& c = gf->coef;
    if (c.b3 == 0.0 || !near_zero(c.b2, kStructuralTol)) {
      throw UnsupportedError("closed-form final state needs b2 = 0, b3 != 0");
    }
    // Smooth rank-one family: the tuple is used as printed (no flip).
    const double s1 = (c.b4 * c.b4 * si(0, 0) - 2.0 * c.b4 * si(0, 1) +
                       si(1, 1)) /
                      (c.b3 * c.b3);
    const double s2 = (di(1) - c.b4 * di(0)) / c.b3;
    Mat2 sf;
    sf(0, 0) = 2.0 * c.a3 / (c.b3 * c.b3) + s1;
    sf(0, 1) = c.a2 / c.b3 - 2.0 * c.a3 * c.b1 / (c.b3 * c.b3) - c.b1 * s1;
    sf(1, 0) = sf(0, 1);
    sf(1, 1) = c.b1 * c.b1 * s1 - 2.0 * c.a2 * c.b1 / c.b3 +
               2.0 * c.a3 * c.b1 * c.b1 / (c.b3 * c.b3) + 2.0 * c.a1;
    Vec2 df;
    df << s2 - c.c2 / c.b3, c.b1 * (c.c2 / c.b3 - s2) - c.c1;
    out.state = make_state(sf, df);
    out.stats = {s1, s2};
    return out;
  }

  const auto* f1 = std::get_if<FormI>(&k);
  if (f1 == nullptr) {
    throw UnsupportedError(
        "closed-form final state covers only the rank-one families");
  }
  const SigmaCoefficients& c = f1->coef;
  if (c.e1 <= 0.0 || f1->beta == 0.0) {
    throw InvalidDomainError("closed-form final state needs e1 > 0, beta != 0");
  }
  const double A = f1->alpha / f1->beta;

  if (near_zero(f1->alpha, kStructuralTol)) {
    // One-delta family with alpha = 0: the input enters only through
    // sigma_11 and d_1, which play the role of (s1, s2) here. The e2 = 0
    // limit of these formulas also covers the total-depolarising family.
    const double kap = c.e2 / (2.0 * c.e1);
    const double s1 = si(0, 0);
    const double s2 = di(0);
    Mat2 sf;
    sf(0, 0) = kap * kap * s1 + 1.0 / (2.0 * c.e1);
    sf(0, 1) = kap * (c.b2 - c.b1 * kap) * s1 - c.b1 / (2.0 * c.e1);
    sf(1, 0) = sf(0, 1);
    sf(1, 1) = (c.b2 - c.b1 * kap) * (c.b2 - c.b1 * kap) * s1 +
               c.b1 * c.b1 / (2.0 * c.e1) + 2.0 * c.a1;
    Vec2 df;
    df << chi * kap * s2, chi * (c.b2 - c.b1 * kap) * s2 - c.c1;
    out.state = make_state(sf, df);
    out.stats = {s1, s2};
    return out;
  }

  if (near_zero(c.e2, kStructuralTol)) {
    // One-delta family with e2 = 0 (alpha != 0): T has a single surviving
    // row proportional to (phi1, -A).
    const double s1 = (c.b2 * c.b2 + 2.0 * A * c.b2 * c.b4 +
                       A * A * c.b4 * c.b4) *
                          si(0, 0) -
                      2.0 * (A * c.b2 + A * A * c.b4) * si(0, 1) +
                      A * A * si(1, 1);
    const double s2 = (A * c.b4 + c.b2) * di(0) - A * di(1);
    Mat2 sf;
    sf(0, 0) = 1.0 / (2.0 * c.e1);
    sf(0, 1) = -(A * c.b3 + c.b1) / (2.0 * c.e1);
    sf(1, 0) = sf(0, 1);
    sf(1, 1) = A * A * (c.b3 * c.b3 / (2.0 * c.e1) + 2.0 * c.a3) +
               A * (2.0 * c.a2 + c.b1 * c.b3 / c.e1) + 2.0 * c.a1 +
               c.b1 * c.b1 / (2.0 * c.e1) + s1;
    Vec2 df;
    df << 0.0, -(A * c.c2 + c.c1) + chi * s2;
    out.state = make_state(sf, df);
    out.stats = {s1, s2};
    return out;
  }

  throw UnsupportedError(
      "closed-form final state covers only the rank-one families");
}

}  // namespace gqc
