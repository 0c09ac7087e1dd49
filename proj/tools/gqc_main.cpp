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
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gqc/convert.hpp"
#include "gqc/core.hpp"
#include "gqc/json_io.hpp"
#include "gqc/kernels.hpp"
#include "gqc/mastereq.hpp"
#include "gqc/oracle.hpp"

namespace {

using gqc::json_io::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitSchema = 2;
constexpr int kExitUnsupported = 3;

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

/// Tolerance resolution: explicit flag, then the GQC_TOL environment
/// variable, then the built-in default.
double resolve_tol(const std::optional<double>& flag, double fallback) {
  if (flag.has_value()) return *flag;
  if (const char* env = std::getenv(gqc::kTolEnvVar)) {
    try {
      return std::stod(env);
    } catch (const std::exception&) {
      throw gqc::SchemaError(std::string(gqc::kTolEnvVar) +
                             " is not a number: '" + env + "'");
    }
  }
  return fallback;
}

gqc::SignConvention parse_convention(const std::string& name) {
  if (name == "printed" || name == "as_printed") {
    return gqc::SignConvention::AsPrinted;
  }
  if (name == "audited" || name == "global_flip") {
    return gqc::SignConvention::GlobalFlip;
  }
  throw gqc::SchemaError("unknown sign convention '" + name +
                         "' (expected printed|audited)");
}

int cmd_validate(const std::string& file, const std::optional<double>& tol_flag) {
  const double tol = resolve_tol(tol_flag, gqc::kDefaultTol);
  const gqc::KernelSpec k = gqc::json_io::parse_channel(
      gqc::json_io::load_json_file(file));

  const gqc::ValidationReport hp = gqc::validate_hp(k);
  const gqc::ValidationReport tp = gqc::validate_tp(k, tol);

  json doc;
  doc["form"] = gqc::form_name(k);
  doc["tolerance"] = tol;
  doc["hp"] = gqc::json_io::report_to_json(hp);
  doc["tp"] = gqc::json_io::report_to_json(tp);

  bool cp_ok = false;
  if (hp.passed() && tp.passed()) {
    const double margin = gqc::cp_closed_form_margin(k);
    const gqc::AffineChannel ch = gqc::to_affine(k);
    const double eig = gqc::cp_min_eigenvalue(ch);
    cp_ok = margin >= -tol;
    doc["cp"] = json{{"passed", cp_ok},
                     {"residual", std::max(0.0, -margin)},
                     {"tolerance", tol},
                     {"closed_form_margin", margin},
                     {"min_eigenvalue", eig}};
    doc["class"] = gqc::to_string(gqc::classify_kernel(k));
    doc["unitary"] = gqc::is_unitary(ch, tol);
    doc["affine"] = gqc::json_io::affine_to_json(ch);
    doc["sign_convention"] = gqc::to_string(gqc::kAuditedConvention);
  } else {
    doc["cp"] = json{{"passed", false},
                     {"residual", std::max(hp.max_residual(), tp.max_residual())},
                     {"tolerance", tol},
                     {"skipped", "hp or tp failed; cp not evaluated"}};
  }
  doc["passed"] = hp.passed() && tp.passed() && cp_ok;
  emit(doc);
  return doc["passed"].get<bool>() ? kExitOk : kExitFailure;
}

int cmd_classify(const std::string& file) {
  const gqc::KernelSpec k = gqc::json_io::parse_channel(
      gqc::json_io::load_json_file(file));
  const gqc::AffineChannel ch = gqc::to_affine(k);
  json doc;
  doc["form"] = gqc::form_name(k);
  doc["class"] = gqc::to_string(gqc::classify_kernel(k));
  doc["class_from_affine"] = gqc::to_string(gqc::classify(ch));
  doc["det_t"] = ch.T.determinant();
  doc["tag"] = gqc::to_string(gqc::tag_kernel(k));
  doc["unitary"] = gqc::is_unitary(ch);
  emit(doc);
  return kExitOk;
}

int cmd_to_affine(const std::string& file, const std::string& convention) {
  const gqc::SignConvention sc = parse_convention(convention);
  const gqc::KernelSpec k = gqc::json_io::parse_channel(
      gqc::json_io::load_json_file(file));
  const gqc::AffineChannel ch = gqc::to_affine(k, sc);
  json doc = gqc::json_io::affine_to_json(ch);
  doc["sign_convention"] = gqc::to_string(sc);
  doc["class"] = gqc::to_string(gqc::classify(ch));
  doc["unitary"] = gqc::is_unitary(ch);
  emit(doc);
  return kExitOk;
}

int cmd_apply(const std::string& channel_file, const std::string& state_file) {
  const gqc::KernelSpec k = gqc::json_io::parse_channel(
      gqc::json_io::load_json_file(channel_file));
  const gqc::GaussianState s = gqc::json_io::parse_state(
      gqc::json_io::load_json_file(state_file));
  const gqc::GaussianState out = gqc::apply(gqc::to_affine(k), s);
  json doc = gqc::json_io::state_to_json(out);
  doc["physical"] = gqc::is_physical(out);
  doc["sign_convention"] = gqc::to_string(gqc::kAuditedConvention);
  emit(doc);
  return kExitOk;
}

int cmd_compose(const std::string& outer_file, const std::string& inner_file) {
  const gqc::KernelSpec outer = gqc::json_io::parse_channel(
      gqc::json_io::load_json_file(outer_file));
  const gqc::KernelSpec inner = gqc::json_io::parse_channel(
      gqc::json_io::load_json_file(inner_file));
  const gqc::AffineChannel comp =
      gqc::compose(gqc::to_affine(outer), gqc::to_affine(inner));
  json doc;
  doc["affine"] = gqc::json_io::affine_to_json(comp);
  doc["class"] = gqc::to_string(gqc::classify(comp));
  doc["unitary"] = gqc::is_unitary(comp);
  // The concatenation table needs both factors to carry a recognized tag.
  try {
    const gqc::FormTag ta = gqc::tag_kernel(outer);
    const gqc::FormTag tb = gqc::tag_kernel(inner);
    doc["outer_tag"] = gqc::to_string(ta);
    doc["inner_tag"] = gqc::to_string(tb);
    doc["tag"] = gqc::to_string(gqc::compose_form(ta, tb));
  } catch (const gqc::UnsupportedError& err) {
    doc["tag"] = nullptr;
    doc["tag_note"] = err.what();
  }
  emit(doc);
  return kExitOk;
}

int cmd_master_eq(const std::string& traj_file, const std::optional<double>& t,
                  const std::optional<std::string>& state_file, int grid_n,
                  const std::optional<double>& extent,
                  const std::optional<double>& tol_flag) {
  const double tol = resolve_tol(tol_flag, 1e-3);
  const gqc::CoefficientTrajectory traj = gqc::json_io::parse_trajectory(
      gqc::json_io::load_json_file(traj_file));
  const gqc::GaussianState s =
      state_file.has_value()
          ? gqc::json_io::parse_state(gqc::json_io::load_json_file(*state_file))
          : gqc::vacuum_state();

  std::size_t index = traj.size() / 2;
  if (t.has_value()) index = gqc::nearest_index(traj, *t);
  index = std::min(std::max<std::size_t>(index, 1), traj.size() - 2);

  gqc::PositionGrid grid;
  grid.n = grid_n;
  if (extent.has_value()) {
    grid.extent = *extent;
  } else {
    grid.extent = gqc::auto_output_grid(traj.samples[index], s, grid_n).extent;
  }

  const gqc::MasterEqReport rep =
      gqc::verify_master_equation(traj, s, index, grid, tol);
  json doc = gqc::json_io::master_report_to_json(rep);
  doc["generator"] =
      gqc::json_io::liouvillian_to_json(gqc::liouvillian_at(traj, index));
  doc["grid"] = json{{"n", grid.n}, {"extent", grid.extent}};
  emit(doc);
  return rep.passed ? kExitOk : kExitFailure;
}

int cmd_oracle_check(const std::string& channel_file,
                     const std::string& state_file, int grid_n,
                     const std::optional<double>& extent,
                     const std::optional<double>& tol_flag) {
  const double tol = resolve_tol(tol_flag, gqc::kOracleTol);
  const gqc::KernelSpec k = gqc::json_io::parse_channel(
      gqc::json_io::load_json_file(channel_file));
  const gqc::GaussianState s = gqc::json_io::parse_state(
      gqc::json_io::load_json_file(state_file));
  gqc::PositionGrid grid = gqc::auto_output_grid(k, s, grid_n);
  if (extent.has_value()) grid.extent = *extent;

  const gqc::OracleReport rep = gqc::oracle_compare(k, s, grid);
  json doc = gqc::json_io::oracle_report_to_json(rep);
  doc["grid"] = json{{"n", grid.n}, {"extent", grid.extent}};
  doc["tolerance"] = tol;
  doc["sign_convention"] = gqc::to_string(gqc::kAuditedConvention);
  doc["passed"] = rep.passed(tol);
  emit(doc);
  return rep.passed(tol) ? kExitOk : kExitFailure;
}

int cmd_qbm_demo(double damping, double frequency, double amplitude,
                 double duration, int samples, double threshold) {
  gqc::QbmParams p;
  p.damping = damping;
  p.frequency = frequency;
  p.amplitude = amplitude;
  const gqc::CoefficientTrajectory traj =
      gqc::qbm_trajectory(p, duration, samples);
  const gqc::SingularScanReport scan =
      gqc::singular_time_scan(traj, threshold);

  std::printf("# damped-oscillation channel family: b2(t) = amplitude "
              "e^{-damping t/2} sin(frequency t), det T = b2/b3 = amplitude "
              "frequency^2 e^{-damping t}\n");
  std::printf("# damping=%g frequency=%g amplitude=%g duration=%g samples=%d "
              "threshold=%g\n",
              damping, frequency, amplitude, duration, samples, threshold);
  std::printf("# held constant: a1=a3=0.25, a2=0, b1=b4=0, c=0, e=0, d=0\n");
  std::printf("# singular_flag marks |det T| < threshold (approach to the "
              "rank-1 class)\n");
  std::printf("t,b2,det_t,singular_flag\n");
  std::size_t flag_pos = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const gqc::SigmaCoefficients& c = gqc::coefficients(traj.samples[i]);
    const double det = c.b2 / c.b3;
    bool flagged = false;
    while (flag_pos < scan.flagged.size() &&
           scan.flagged[flag_pos].index < i) {
      ++flag_pos;
    }
    if (flag_pos < scan.flagged.size() && scan.flagged[flag_pos].index == i) {
      flagged = true;
    }
    std::printf("%.9g,%.17g,%.17g,%d\n", traj.times[i], c.b2, det,
                int(flagged));
  }
  const std::vector<double> zeros = gqc::b2_zero_crossings(traj);
  std::printf("# b2 zero crossings:");
  for (const double z : zeros) std::printf(" %.9g", z);
  std::printf("\n# %s\n", scan.caveat.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-mode Gaussian channel toolkit"};
  app.require_subcommand(1);

  std::string file_a, file_b, convention = "audited";
  std::optional<double> tol, t_at, extent;
  std::optional<std::string> state_file;
  int master_grid_n = 301;
  int oracle_grid_n = 401;
  double damping = 1.0, frequency = 1.0, amplitude = 1.0, duration = 20.0;
  double threshold = 1e-6;
  int samples = 400;

  CLI::App* validate = app.add_subcommand("validate",
                                          "check a channel document");
  validate->add_option("file", file_a, "channel JSON (- for stdin)")
      ->required();
  validate->add_option("--tol", tol, "algebraic tolerance");

  CLI::App* classify = app.add_subcommand("classify",
                                          "rank taxonomy of a channel");
  classify->add_option("file", file_a, "channel JSON (- for stdin)")
      ->required();

  CLI::App* to_affine = app.add_subcommand("to-affine",
                                           "affine tuple of a channel");
  to_affine->add_option("file", file_a, "channel JSON (- for stdin)")
      ->required();
  to_affine->add_option("--convention", convention,
                        "sign convention: printed|audited");

  CLI::App* apply = app.add_subcommand("apply", "apply a channel to a state");
  apply->add_option("channel", file_a, "channel JSON")->required();
  apply->add_option("state", file_b, "state JSON")->required();

  CLI::App* compose = app.add_subcommand(
      "compose", "compose two channels (first argument applied last)");
  compose->add_option("outer", file_a, "outer channel JSON")->required();
  compose->add_option("inner", file_b, "inner channel JSON")->required();

  CLI::App* master = app.add_subcommand("master-eq",
                                        "verify the generator at a sample");
  master->add_option("trajectory", file_a, "trajectory JSON")->required();
  master->add_option("--t", t_at, "sample time (defaults to the middle)");
  master->add_option("--state", state_file, "initial state JSON");
  master->add_option("--grid-n", master_grid_n, "grid points per axis");
  master->add_option("--grid-extent", extent, "grid half-width");
  master->add_option("--tol", tol, "residual tolerance");

  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "propagate on a grid and compare moments");
  oracle->add_option("channel", file_a, "channel JSON")->required();
  oracle->add_option("state", file_b, "state JSON")->required();
  oracle->add_option("--grid-n", oracle_grid_n, "grid points per axis");
  oracle->add_option("--grid-extent", extent, "grid half-width");
  oracle->add_option("--tol", tol, "moment deviation tolerance");

  CLI::App* qbm = app.add_subcommand("qbm-demo",
                                     "damped-oscillation singularity scan");
  qbm->add_option("--damping", damping, "envelope decay rate (> 0)");
  qbm->add_option("--frequency", frequency, "oscillation frequency");
  qbm->add_option("--amplitude", amplitude, "b2 amplitude scale");
  qbm->add_option("--duration", duration, "time span");
  qbm->add_option("--samples", samples, "number of samples");
  qbm->add_option("--threshold", threshold, "|det T| singularity threshold");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(file_a, tol);
    if (classify->parsed()) return cmd_classify(file_a);
    if (to_affine->parsed()) return cmd_to_affine(file_a, convention);
    if (apply->parsed()) return cmd_apply(file_a, file_b);
    if (compose->parsed()) return cmd_compose(file_a, file_b);
    if (master->parsed()) {
      return cmd_master_eq(file_a, t_at, state_file, master_grid_n, extent, tol);
    }
    if (oracle->parsed()) {
      return cmd_oracle_check(file_a, file_b, oracle_grid_n, extent, tol);
    }
    if (qbm->parsed()) {
      return cmd_qbm_demo(damping, frequency, amplitude, duration, samples,
                          threshold);
    }
  } catch (const gqc::SchemaError& err) {
    emit(json{{"error", {{"type", "schema"}, {"message", err.what()}}}});
    return kExitSchema;
  } catch (const gqc::UnsupportedError& err) {
    emit(json{{"error", {{"type", "unsupported"}, {"message", err.what()}}}});
    return kExitUnsupported;
  } catch (const gqc::Error& err) {
    emit(json{{"error", {{"type", "domain"}, {"message", err.what()}}}});
    return kExitFailure;
  } catch (const std::exception& err) {
    emit(json{{"error", {{"type", "internal"}, {"message", err.what()}}}});
    return kExitFailure;
  }
  return kExitFailure;
}
