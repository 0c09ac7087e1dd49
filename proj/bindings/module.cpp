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
//
// Python bindings for the one-mode Gaussian channel toolkit. Kernel structs,
// affine tuples and states map to plain Python classes (Eigen blocks become
// numpy arrays); the library's exception hierarchy is mirrored under the
// module's `Error` base.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "gqc/convert.hpp"
#include "gqc/core.hpp"
#include "gqc/json_io.hpp"
#include "gqc/kernels.hpp"
#include "gqc/mastereq.hpp"
#include "gqc/oracle.hpp"

namespace py = pybind11;

namespace {

void bind_errors(py::module_& m) {
  // Derived classes are registered after the base so their translators run
  // first and preserve the most specific Python type.
  const py::object base = py::register_exception<gqc::Error>(
      m, "Error", PyExc_RuntimeError);
  py::register_exception<gqc::InvalidDomainError>(m, "InvalidDomainError",
                                                  base);
  py::register_exception<gqc::SingularChannelError>(m, "SingularChannelError",
                                                    base);
  py::register_exception<gqc::UnsupportedError>(m, "UnsupportedError", base);
  py::register_exception<gqc::NotNormalizedError>(m, "NotNormalizedError",
                                                  base);
  py::register_exception<gqc::AmbiguousSignError>(m, "AmbiguousSignError",
                                                  base);
  py::register_exception<gqc::SchemaError>(m, "SchemaError", base);
}

void bind_core(py::module_& m) {
  py::class_<gqc::GaussianState>(m, "GaussianState")
      .def(py::init([](const gqc::Mat2& sigma, const gqc::Vec2& mean) {
             return gqc::make_state(sigma, mean);
           }),
           py::arg("sigma"), py::arg("mean") = gqc::Vec2::Zero().eval())
      .def_readonly("sigma", &gqc::GaussianState::sigma)
      .def_readonly("mean", &gqc::GaussianState::mean)
      .def("__repr__", [](const gqc::GaussianState& s) {
        std::ostringstream out;
        out << "GaussianState(sigma=[[" << s.sigma(0, 0) << ", "
            << s.sigma(0, 1) << "], [" << s.sigma(1, 0) << ", "
            << s.sigma(1, 1) << "]], mean=[" << s.mean(0) << ", " << s.mean(1)
            << "])";
        return out.str();
      });
  m.def("make_state", &gqc::make_state, py::arg("sigma"), py::arg("mean"),
        "Build a state, symmetrising sigma.");
  m.def("vacuum_state", &gqc::vacuum_state, "Vacuum: sigma = I/2, zero mean.");
  m.def("is_physical", &gqc::is_physical, py::arg("state"),
        py::arg("tol") = gqc::kDefaultTol,
        "Uncertainty bound det(sigma) >= 1/4, with slack tol.");

  py::class_<gqc::AffineChannel>(m, "AffineChannel")
      .def(py::init<>())
      .def(py::init([](const gqc::Mat2& t, const gqc::Mat2& n,
                       const gqc::Vec2& tau) {
             gqc::AffineChannel ch;
             ch.T = t;
             ch.N = n;
             ch.tau = tau;
             return ch;
           }),
           py::arg("T"), py::arg("N"), py::arg("tau"))
      .def_readwrite("T", &gqc::AffineChannel::T)
      .def_readwrite("N", &gqc::AffineChannel::N)
      .def_readwrite("tau", &gqc::AffineChannel::tau);

  py::enum_<gqc::ChannelClass>(m, "ChannelClass")
      .value("NonSingular", gqc::ChannelClass::NonSingular)
      .value("A2", gqc::ChannelClass::A2)
      .value("A1", gqc::ChannelClass::A1);

  m.def("identity_channel", &gqc::identity_channel);
  m.def("apply", &gqc::apply, py::arg("channel"), py::arg("state"),
        "Push a state through a channel.");
  m.def("compose", &gqc::compose, py::arg("outer"), py::arg("inner"),
        "Composition (outer . inner): inner acts first.");
  m.def("cp_matrix", &gqc::cp_matrix, py::arg("channel"),
        "Complete-positivity matrix C = N + i Omega - i T Omega T^t.");
  m.def("cp_min_eigenvalue", &gqc::cp_min_eigenvalue, py::arg("channel"));
  m.def("is_cp", &gqc::is_cp, py::arg("channel"),
        py::arg("tol") = gqc::kDefaultTol);
  m.def("is_unitary", &gqc::is_unitary, py::arg("channel"),
        py::arg("tol") = gqc::kDefaultTol);
  m.def("classify", &gqc::classify, py::arg("channel"),
        py::arg("tol") = gqc::kDefaultTol,
        "Rank class of T: NonSingular, A2 (rank 1) or A1 (rank 0).");
  m.def("invert", &gqc::invert, py::arg("channel"),
        py::arg("tol") = gqc::kDefaultTol);
}

void bind_kernels(py::module_& m) {
  py::class_<gqc::SigmaCoefficients>(m, "SigmaCoefficients")
      .def(py::init<>())
      .def_readwrite("a1", &gqc::SigmaCoefficients::a1)
      .def_readwrite("a2", &gqc::SigmaCoefficients::a2)
      .def_readwrite("a3", &gqc::SigmaCoefficients::a3)
      .def_readwrite("b1", &gqc::SigmaCoefficients::b1)
      .def_readwrite("b2", &gqc::SigmaCoefficients::b2)
      .def_readwrite("b3", &gqc::SigmaCoefficients::b3)
      .def_readwrite("b4", &gqc::SigmaCoefficients::b4)
      .def_readwrite("c1", &gqc::SigmaCoefficients::c1)
      .def_readwrite("c2", &gqc::SigmaCoefficients::c2)
      .def_readwrite("e1", &gqc::SigmaCoefficients::e1)
      .def_readwrite("e2", &gqc::SigmaCoefficients::e2)
      .def_readwrite("e3", &gqc::SigmaCoefficients::e3)
      .def_readwrite("d1", &gqc::SigmaCoefficients::d1)
      .def_readwrite("d2", &gqc::SigmaCoefficients::d2);

  py::class_<gqc::GaussianForm>(m, "GaussianForm")
      .def(py::init<>())
      .def_readwrite("coef", &gqc::GaussianForm::coef);

  py::class_<gqc::FormI>(m, "FormI")
      .def(py::init<>())
      .def_readwrite("coef", &gqc::FormI::coef)
      .def_readwrite("alpha", &gqc::FormI::alpha)
      .def_readwrite("beta", &gqc::FormI::beta);

  py::class_<gqc::FormII>(m, "FormII")
      .def(py::init<>())
      .def_readwrite("coef", &gqc::FormII::coef)
      .def_readwrite("alpha", &gqc::FormII::alpha)
      .def_readwrite("beta", &gqc::FormII::beta)
      .def_readwrite("gamma", &gqc::FormII::gamma)
      .def_readwrite("eta", &gqc::FormII::eta);

  m.def("form_name",
        [](const gqc::KernelSpec& k) { return gqc::form_name(k); },
        py::arg("kernel"));

  py::class_<gqc::CheckResult>(m, "CheckResult")
      .def_readonly("name", &gqc::CheckResult::name)
      .def_readonly("passed", &gqc::CheckResult::passed)
      .def_readonly("residual", &gqc::CheckResult::residual)
      .def_readonly("tolerance", &gqc::CheckResult::tolerance);

  py::class_<gqc::ValidationReport>(m, "ValidationReport")
      .def_readonly("checks", &gqc::ValidationReport::checks)
      .def_readonly("warnings", &gqc::ValidationReport::warnings)
      .def("passed", &gqc::ValidationReport::passed)
      .def("max_residual", &gqc::ValidationReport::max_residual);

  m.def("validate_hp", &gqc::validate_hp, py::arg("kernel"),
        "Hermiticity-compatibility checks (never throws).");
  m.def("validate_tp", &gqc::validate_tp, py::arg("kernel"),
        py::arg("tol") = gqc::kDefaultTol, "Trace-preservation checks.");
  m.def("normalization", &gqc::normalization, py::arg("kernel"),
        "Trace-fixing prefactor of the kernel.");
  m.def("evaluate_smooth", &gqc::evaluate_smooth, py::arg("kernel"),
        py::arg("x_f"), py::arg("r_f"), py::arg("x_i"), py::arg("r_i"),
        "Smooth factor normalization * exp(Sigma); deltas are not evaluated.");

  py::class_<gqc::CharRep>(m, "CharRep")
      .def_readonly("ratio", &gqc::CharRep::ratio)
      .def_readonly("phi", &gqc::CharRep::phi)
      .def_readonly("p11", &gqc::CharRep::p11)
      .def_readonly("p12", &gqc::CharRep::p12)
      .def_readonly("p22", &gqc::CharRep::p22)
      .def_readonly("p01_imag", &gqc::CharRep::p01_imag);
  m.def("char_rep",
        [](const gqc::KernelSpec& k) { return gqc::char_rep(k); },
        py::arg("kernel"),
        "Quadratic form of a delta kernel in characteristic coordinates.");

  m.def("cp_closed_form_margin", &gqc::cp_closed_form_margin,
        py::arg("kernel"),
        "Smallest CP-matrix eigenvalue from the kernel coefficients.");
  m.def("cp_closed_form", &gqc::cp_closed_form, py::arg("kernel"),
        py::arg("tol") = gqc::kDefaultTol);
  m.def("regularize", &gqc::regularize, py::arg("kernel"), py::arg("eps"),
        "Replace the r-sector delta of a two-delta kernel by a width-eps "
        "Gaussian.");
}

void bind_convert(py::module_& m) {
  py::enum_<gqc::SignConvention>(m, "SignConvention")
      .value("AsPrinted", gqc::SignConvention::AsPrinted)
      .value("GlobalFlip", gqc::SignConvention::GlobalFlip);
  m.attr("AUDITED_CONVENTION") = gqc::kAuditedConvention;

  py::enum_<gqc::FormTag>(m, "FormTag")
      .value("GU", gqc::FormTag::GU)
      .value("dU", gqc::FormTag::dU)
      .value("GA2", gqc::FormTag::GA2)
      .value("dA2_alpha", gqc::FormTag::dA2_alpha)
      .value("dA2_e2", gqc::FormTag::dA2_e2)
      .value("dA2_alpha_e2", gqc::FormTag::dA2_alpha_e2)
      .value("dA1", gqc::FormTag::dA1)
      .value("G_general", gqc::FormTag::G_general)
      .value("J1_general", gqc::FormTag::J1_general)
      .value("J2_general", gqc::FormTag::J2_general);

  m.def("to_affine", &gqc::to_affine, py::arg("kernel"),
        py::arg("convention") = gqc::kAuditedConvention,
        "Affine tuple (T, N, tau) of a kernel.");
  m.def("sign_audit", &gqc::sign_audit, py::arg("kernel"),
        py::arg("oracle_result"), py::arg("printed_prediction"),
        "Decide the sign convention empirically from a propagated state.");
  m.def("classify_kernel", &gqc::classify_kernel, py::arg("kernel"),
        py::arg("tol") = gqc::kStructuralTol,
        "Classification from kernel structure alone.");
  m.def("tag_kernel", &gqc::tag_kernel, py::arg("kernel"),
        py::arg("tol") = gqc::kStructuralTol,
        "Recognise the structural family of a kernel.");
  m.def("compose_form", &gqc::compose_form, py::arg("outer"),
        py::arg("inner"),
        "Concatenation algebra on recognised families (outer after inner).");

  py::class_<gqc::A2Stats>(m, "A2Stats")
      .def_readonly("s1", &gqc::A2Stats::s1)
      .def_readonly("s2", &gqc::A2Stats::s2);
  py::class_<gqc::A2FinalState>(m, "A2FinalState")
      .def_readonly("state", &gqc::A2FinalState::state)
      .def_readonly("stats", &gqc::A2FinalState::stats);
  m.def("a2_final_state", &gqc::a2_final_state, py::arg("kernel"),
        py::arg("state"), py::arg("convention") = gqc::kAuditedConvention,
        "Closed-form final state of the rank-one families.");
}

void bind_oracle(py::module_& m) {
  py::class_<gqc::PositionGrid>(m, "PositionGrid")
      .def(py::init<>())
      .def(py::init([](double extent, int n) {
             gqc::PositionGrid g;
             g.extent = extent;
             g.n = n;
             return g;
           }),
           py::arg("extent"), py::arg("n"))
      .def_readwrite("extent", &gqc::PositionGrid::extent)
      .def_readwrite("n", &gqc::PositionGrid::n)
      .def("spacing", &gqc::PositionGrid::spacing)
      .def("coord", &gqc::PositionGrid::coord, py::arg("j"))
      .def("centre", &gqc::PositionGrid::centre);

  py::class_<gqc::DensityGrid>(m, "DensityGrid")
      .def_readonly("grid", &gqc::DensityGrid::grid)
      .def("at",
           [](const gqc::DensityGrid& d, int j, int k) { return d.at(j, k); },
           py::arg("j"), py::arg("k"))
      .def_property_readonly("values", [](const gqc::DensityGrid& d) {
        return d.values;  // row-major rho(x_j, r_k) samples
      });

  m.def("state_to_position", &gqc::state_to_position, py::arg("state"),
        py::arg("x"), py::arg("r"),
        "Closed-form position representation rho(x, r).");
  m.def("sample_state", &gqc::sample_state, py::arg("state"), py::arg("grid"));
  m.def("grid_trace", &gqc::grid_trace, py::arg("rho"));
  m.def("propagate", &gqc::propagate, py::arg("kernel"), py::arg("state"),
        py::arg("grid"),
        "Propagate a state through a kernel by quadrature of the propagator "
        "integral.");
  m.def("extract_moments", &gqc::extract_moments, py::arg("rho"),
        "Measure trace-validated moments from a grid.");

  py::class_<gqc::OracleReport>(m, "OracleReport")
      .def_readonly("oracle", &gqc::OracleReport::oracle)
      .def_readonly("predicted", &gqc::OracleReport::predicted)
      .def_readonly("sigma_dev", &gqc::OracleReport::sigma_dev)
      .def_readonly("mean_dev", &gqc::OracleReport::mean_dev)
      .def_readonly("mean_dev_printed", &gqc::OracleReport::mean_dev_printed)
      .def_readonly("mean_dev_flipped", &gqc::OracleReport::mean_dev_flipped)
      .def_readonly("trace_dev", &gqc::OracleReport::trace_dev)
      .def("passed", &gqc::OracleReport::passed,
           py::arg("tol") = gqc::kOracleTol);
  m.def("oracle_compare", &gqc::oracle_compare, py::arg("kernel"),
        py::arg("state"), py::arg("grid"),
        py::arg("convention") = gqc::kAuditedConvention,
        "Side-by-side comparison of grid propagation and the affine "
        "prediction.");
  m.def("auto_output_grid", &gqc::auto_output_grid, py::arg("kernel"),
        py::arg("state"), py::arg("n") = 401,
        "Output grid sized from the affine prediction.");
  m.def("grid_resolves", &gqc::grid_resolves, py::arg("state"),
        py::arg("grid"),
        "True when moments of the state are measurable on the grid "
        "(window coverage, envelope resolution, and conditional-phase "
        "sampling within the demodulation branch).");
  m.def("dump_grid", &gqc::dump_grid, py::arg("rho"), py::arg("path"));
  m.def("load_grid", &gqc::load_grid, py::arg("path"));
}

void bind_mastereq(py::module_& m) {
  py::class_<gqc::CoefficientTrajectory>(m, "CoefficientTrajectory")
      .def_readonly("times", &gqc::CoefficientTrajectory::times)
      .def_readonly("samples", &gqc::CoefficientTrajectory::samples)
      .def_readonly("dt", &gqc::CoefficientTrajectory::dt)
      .def("__len__", &gqc::CoefficientTrajectory::size);
  m.def("make_trajectory", &gqc::make_trajectory, py::arg("times"),
        py::arg("samples"),
        "Build a trajectory and enforce its invariants.");
  m.def("nearest_index", &gqc::nearest_index, py::arg("trajectory"),
        py::arg("t"));

  py::class_<gqc::Liouvillian>(m, "Liouvillian")
      .def_readonly("lc", &gqc::Liouvillian::lc)
      .def_readonly("x", &gqc::Liouvillian::x)
      .def_readonly("y", &gqc::Liouvillian::y)
      .def_readonly("z", &gqc::Liouvillian::z);
  m.def("existence_check", &gqc::existence_check, py::arg("trajectory"),
        py::arg("tol") = gqc::kDefaultTol,
        "Generator-existence condition for delta-form trajectories.");
  m.def("liouvillian_at", &gqc::liouvillian_at, py::arg("trajectory"),
        py::arg("index"), "Generator of a delta-form trajectory at a sample.");

  py::class_<gqc::MasterEqReport>(m, "MasterEqReport")
      .def_readonly("index", &gqc::MasterEqReport::index)
      .def_readonly("time", &gqc::MasterEqReport::time)
      .def_readonly("existence", &gqc::MasterEqReport::existence)
      .def_readonly("residual", &gqc::MasterEqReport::residual)
      .def_readonly("lhs_norm", &gqc::MasterEqReport::lhs_norm)
      .def_readonly("rhs_norm", &gqc::MasterEqReport::rhs_norm)
      .def_readonly("tolerance", &gqc::MasterEqReport::tolerance)
      .def_readonly("passed", &gqc::MasterEqReport::passed)
      .def_readonly("warnings", &gqc::MasterEqReport::warnings);
  m.def("verify_master_equation", &gqc::verify_master_equation,
        py::arg("trajectory"), py::arg("state"), py::arg("index"),
        py::arg("grid"), py::arg("tol"),
        "Compare the centered time derivative of propagated grids against "
        "the generator.");

  py::class_<gqc::QbmParams>(m, "QbmParams")
      .def(py::init<>())
      .def_readwrite("damping", &gqc::QbmParams::damping)
      .def_readwrite("frequency", &gqc::QbmParams::frequency)
      .def_readwrite("amplitude", &gqc::QbmParams::amplitude);
  m.def("qbm_trajectory", &gqc::qbm_trajectory, py::arg("params"),
        py::arg("duration"), py::arg("samples"),
        "Synthetic damped-oscillation smooth-form trajectory.");

  py::class_<gqc::SingularScanEntry>(m, "SingularScanEntry")
      .def_readonly("index", &gqc::SingularScanEntry::index)
      .def_readonly("time", &gqc::SingularScanEntry::time)
      .def_readonly("det_t", &gqc::SingularScanEntry::det_t)
      .def_readonly("b2", &gqc::SingularScanEntry::b2);
  py::class_<gqc::SingularScanReport>(m, "SingularScanReport")
      .def_readonly("threshold", &gqc::SingularScanReport::threshold)
      .def_readonly("flagged", &gqc::SingularScanReport::flagged)
      .def_readonly("caveat", &gqc::SingularScanReport::caveat);
  m.def("singular_time_scan", &gqc::singular_time_scan, py::arg("trajectory"),
        py::arg("threshold"),
        "Flag samples whose |det T| falls below the threshold.");
  m.def("b2_zero_crossings", &gqc::b2_zero_crossings, py::arg("trajectory"));
}

nlohmann::json parse_json_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw gqc::SchemaError(std::string("malformed JSON: ") + err.what());
  }
}

void bind_json(py::module_& m) {
  m.def("channel_from_json",
        [](const std::string& text) {
          return gqc::json_io::parse_channel(parse_json_text(text));
        },
        py::arg("text"), "Parse a channel JSON document.");
  m.def("channel_to_json",
        [](const gqc::KernelSpec& k) {
          return gqc::json_io::channel_to_json(k).dump(2);
        },
        py::arg("kernel"), "Serialize a kernel to its JSON document.");
  m.def("state_from_json",
        [](const std::string& text) {
          return gqc::json_io::parse_state(parse_json_text(text));
        },
        py::arg("text"), "Parse a state JSON document.");
  m.def("state_to_json",
        [](const gqc::GaussianState& s) {
          return gqc::json_io::state_to_json(s).dump(2);
        },
        py::arg("state"), "Serialize a state to its JSON document.");
  m.def("trajectory_from_json",
        [](const std::string& text) {
          return gqc::json_io::parse_trajectory(parse_json_text(text));
        },
        py::arg("text"), "Parse a trajectory JSON document.");
  m.def("trajectory_to_json",
        [](const gqc::CoefficientTrajectory& traj) {
          return gqc::json_io::trajectory_to_json(traj).dump(2);
        },
        py::arg("trajectory"), "Serialize a trajectory to its JSON document.");
}

}  // namespace

PYBIND11_MODULE(gqc, m) {
  m.doc() =
      "One-mode Gaussian quantum channels in the position representation: "
      "kernel validation, classification, affine tuples, concatenation, "
      "quadrature oracles and master-equation verification.";
  m.attr("DEFAULT_TOL") = gqc::kDefaultTol;
  m.attr("STRUCTURAL_TOL") = gqc::kStructuralTol;
  m.attr("ORACLE_TOL") = gqc::kOracleTol;

  bind_errors(m);
  bind_core(m);
  bind_kernels(m);
  bind_convert(m);
  bind_oracle(m);
  bind_mastereq(m);
  bind_json(m);
}
