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

#include "gqc/json_io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <vector>

namespace gqc::json_io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw SchemaError(what); }

const json& require_object(const json& j, const char* what) {
  if (!j.is_object()) fail(std::string(what) + " must be a JSON object");
  return j;
}

double finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where + " must be finite");
  return v;
}

std::vector<double> number_array(const json& parent, const char* key,
                                 std::size_t size) {
  std::vector<double> out(size, 0.0);
  if (!parent.contains(key)) return out;  // omitted arrays default to zeros
  const json& arr = parent.at(key);
  if (!arr.is_array() || arr.size() != size) {
    fail(std::string("coefficients.") + key + " must be an array of " +
         std::to_string(size) + " numbers");
  }
  for (std::size_t i = 0; i < size; ++i) {
    out[i] = finite_number(arr[i], std::string("coefficients.") + key + "[" +
                                       std::to_string(i) + "]");
  }
  return out;
}

SigmaCoefficients parse_coefficients(const json& j) {
  require_object(j, "coefficients");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "a" && key != "b" && key != "c" && key != "e" && key != "d") {
      fail("coefficients has unknown key '" + key + "'");
    }
  }
  const auto a = number_array(j, "a", 3);
  const auto b = number_array(j, "b", 4);
  const auto c = number_array(j, "c", 2);
  const auto e = number_array(j, "e", 3);
  const auto d = number_array(j, "d", 2);
  SigmaCoefficients out;
  out.a1 = a[0];
  out.a2 = a[1];
  out.a3 = a[2];
  out.b1 = b[0];
  out.b2 = b[1];
  out.b3 = b[2];
  out.b4 = b[3];
  out.c1 = c[0];
  out.c2 = c[1];
  out.e1 = e[0];
  out.e2 = e[1];
  out.e3 = e[2];
  out.d1 = d[0];
  out.d2 = d[1];
  return out;
}

double delta_field(const json& j, const char* key) {
  if (!j.contains(key)) {
    fail(std::string("delta.") + key + " is required for this form");
  }
  return finite_number(j.at(key), std::string("delta.") + key);
}

json coefficients_to_json(const SigmaCoefficients& c) {
  json j;
  j["a"] = {c.a1, c.a2, c.a3};
  j["b"] = {c.b1, c.b2, c.b3, c.b4};
  j["c"] = {c.c1, c.c2};
  j["e"] = {c.e1, c.e2, c.e3};
  j["d"] = {c.d1, c.d2};
  return j;
}

double unsign_zero(double v) { return v + 0.0 == 0.0 ? 0.0 : v; }

json mat2_to_json(const Mat2& m) {
  return json::array(
      {json::array({unsign_zero(m(0, 0)), unsign_zero(m(0, 1))}),
       json::array({unsign_zero(m(1, 0)), unsign_zero(m(1, 1))})});
}

json vec2_to_json(const Vec2& v) {
  return json::array({unsign_zero(v(0)), unsign_zero(v(1))});
}

json cmat2_to_json(const CMat2& m) {
  const auto entry = [](const complexd& z) {
    return json::array({unsign_zero(z.real()), unsign_zero(z.imag())});
  };
  return json::array({json::array({entry(m(0, 0)), entry(m(0, 1))}),
                      json::array({entry(m(1, 0)), entry(m(1, 1))})});
}

Mat2 parse_mat2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where + " must be a 2x2 array");
  Mat2 out;
  for (int r = 0; r < 2; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 2) {
      fail(where + " must be a 2x2 array");
    }
    for (int c = 0; c < 2; ++c) {
      out(r, c) = finite_number(row[static_cast<std::size_t>(c)],
                                where + "[" + std::to_string(r) + "][" +
                                    std::to_string(c) + "]");
    }
  }
  return out;
}

void reject_unknown_keys(const json& j, const char* what,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(std::string(what) + " has unknown key '" + key + "'");
  }
}

}  // namespace

KernelSpec parse_channel(const json& j) {
  require_object(j, "channel document");
  reject_unknown_keys(j, "channel document", {"form", "coefficients", "delta"});
  if (!j.contains("form") || !j.at("form").is_string()) {
    fail("channel document needs a string field 'form'");
  }
  const std::string form = j.at("form").get<std::string>();
  SigmaCoefficients coef;
  if (j.contains("coefficients")) coef = parse_coefficients(j.at("coefficients"));
  if (form == "gaussian") {
    if (j.contains("delta")) {
      fail("form 'gaussian' does not take a delta object");
    }
    GaussianForm g;
    g.coef = coef;
    return g;
  }
  if (form == "delta1" || form == "delta2") {
    if (!j.contains("delta")) {
      fail("form '" + form + "' needs a delta object");
    }
    const json& d = require_object(j.at("delta"), "delta");
    if (form == "delta1") {
      for (const auto& [key, value] : d.items()) {
        (void)value;
        if (key != "alpha" && key != "beta") {
          fail("delta has unknown key '" + key + "' for form delta1");
        }
      }
      FormI k;
      k.coef = coef;
      k.alpha = delta_field(d, "alpha");
      k.beta = delta_field(d, "beta");
      return k;
    }
    FormII k;
    k.coef = coef;
    k.alpha = delta_field(d, "alpha");
    k.beta = delta_field(d, "beta");
    k.gamma = delta_field(d, "gamma");
    k.eta = delta_field(d, "eta");
    return k;
  }
  fail("unknown form '" + form + "' (expected gaussian, delta1 or delta2)");
}

json channel_to_json(const KernelSpec& k) {
  json j;
  j["form"] = form_name(k);
  j["coefficients"] = coefficients_to_json(coefficients(k));
  if (const auto* f1 = std::get_if<FormI>(&k)) {
    j["delta"] = {{"alpha", f1->alpha}, {"beta", f1->beta}};
  } else if (const auto* f2 = std::get_if<FormII>(&k)) {
    j["delta"] = {{"alpha", f2->alpha},
                  {"beta", f2->beta},
                  {"gamma", f2->gamma},
                  {"eta", f2->eta}};
  }
  return j;
}

GaussianState parse_state(const json& j) {
  require_object(j, "state document");
  reject_unknown_keys(j, "state document", {"sigma", "mean"});
  if (!j.contains("sigma")) fail("state document needs 'sigma'");
  const Mat2 sigma = parse_mat2(j.at("sigma"), "sigma");
  if (std::abs(sigma(0, 1) - sigma(1, 0)) >
      1e-12 * (1.0 + sigma.cwiseAbs().maxCoeff())) {
    fail("sigma must be symmetric");
  }
  Vec2 mean = Vec2::Zero();
  if (j.contains("mean")) {
    const json& m = j.at("mean");
    if (!m.is_array() || m.size() != 2) fail("mean must be an array of 2");
    mean(0) = finite_number(m[0], "mean[0]");
    mean(1) = finite_number(m[1], "mean[1]");
  }
  return make_state(sigma, mean);
}

json state_to_json(const GaussianState& s) {
  json j;
  j["sigma"] = mat2_to_json(s.sigma);
  j["mean"] = vec2_to_json(s.mean);
  return j;
}

CoefficientTrajectory parse_trajectory(const json& j) {
  require_object(j, "trajectory document");
  reject_unknown_keys(j, "trajectory document", {"times", "channels"});
  if (!j.contains("times") || !j.at("times").is_array()) {
    fail("trajectory document needs an array 'times'");
  }
  if (!j.contains("channels") || !j.at("channels").is_array()) {
    fail("trajectory document needs an array 'channels'");
  }
  const json& jt = j.at("times");
  const json& jc = j.at("channels");
  std::vector<double> times(jt.size());
  for (std::size_t i = 0; i < jt.size(); ++i) {
    times[i] = finite_number(jt[i], "times[" + std::to_string(i) + "]");
  }
  std::vector<KernelSpec> kernels;
  kernels.reserve(jc.size());
  for (const json& c : jc) kernels.push_back(parse_channel(c));
  try {
    return make_trajectory(std::move(times), std::move(kernels));
  } catch (const InvalidDomainError& err) {
    fail(std::string("trajectory invariant violated: ") + err.what());
  }
}

json trajectory_to_json(const CoefficientTrajectory& traj) {
  json j;
  j["times"] = traj.times;
  json channels = json::array();
  for (const KernelSpec& k : traj.samples) channels.push_back(channel_to_json(k));
  j["channels"] = std::move(channels);
  return j;
}

json report_to_json(const ValidationReport& r) {
  json checks = json::array();
  for (const CheckResult& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance}});
  }
  return json{{"passed", r.passed()},
              {"max_residual", r.max_residual()},
              {"checks", std::move(checks)},
              {"warnings", r.warnings}};
}

json affine_to_json(const AffineChannel& ch) {
  return json{{"T", mat2_to_json(ch.T)},
              {"N", mat2_to_json(ch.N)},
              {"tau", vec2_to_json(ch.tau)}};
}

json state_report_json(const GaussianState& s) { return state_to_json(s); }

json oracle_report_to_json(const OracleReport& r) {
  return json{{"oracle_state", state_to_json(r.oracle)},
              {"predicted_state", state_to_json(r.predicted)},
              {"sigma_deviation", r.sigma_dev},
              {"mean_deviation", r.mean_dev},
              {"mean_deviation_as_printed", r.mean_dev_printed},
              {"mean_deviation_global_flip", r.mean_dev_flipped},
              {"trace_deviation", r.trace_dev}};
}

json master_report_to_json(const MasterEqReport& r) {
  return json{{"index", r.index},
              {"time", r.time},
              {"existence", r.existence},
              {"residual", r.residual},
              {"lhs_norm", r.lhs_norm},
              {"rhs_norm", r.rhs_norm},
              {"tolerance", r.tolerance},
              {"passed", r.passed},
              {"warnings", r.warnings}};
}

json liouvillian_to_json(const Liouvillian& l) {
  return json{{"lc", json::array({l.lc.real(), l.lc.imag()})},
              {"X", cmat2_to_json(l.x)},
              {"Y", cmat2_to_json(l.y)},
              {"Z", cmat2_to_json(l.z)}};
}

json scan_report_to_json(const SingularScanReport& r) {
  json flagged = json::array();
  for (const SingularScanEntry& e : r.flagged) {
    flagged.push_back({{"index", e.index},
                       {"time", e.time},
                       {"det_t", e.det_t},
                       {"b2", e.b2},
                       {"tag", "approach_to_a2"}});
  }
  return json{{"threshold", r.threshold},
              {"flagged", std::move(flagged)},
              {"caveat", r.caveat}};
}

json load_json_file(const std::string& path) {
  try {
    if (path == "-") return json::parse(std::cin);
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    return json::parse(in);
  } catch (const json::parse_error& err) {
    fail("invalid JSON in '" + path + "': " + err.what());
  }
}

}  // namespace gqc::json_io
