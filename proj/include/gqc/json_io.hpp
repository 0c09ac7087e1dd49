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

#ifndef GQC_JSON_IO_HPP_
#define GQC_JSON_IO_HPP_

#include <string>

#include "json.hpp"

#include "gqc/convert.hpp"
#include "gqc/core.hpp"
#include "gqc/kernels.hpp"
#include "gqc/mastereq.hpp"
#include "gqc/oracle.hpp"

namespace gqc::json_io {

using nlohmann::json;

/// Channel document:
/// { "form": "gaussian" | "delta1" | "delta2",
///   "coefficients": { "a": [a1,a2,a3], "b": [b1,b2,b3,b4],
///                     "c": [c1,c2], "e": [e1,e2,e3], "d": [d1,d2] },
///   "delta": { "alpha": _, "beta": _ [, "gamma": _, "eta": _] } }
/// The delta object is required for delta1/delta2 and rejected for gaussian;
/// omitted coefficient arrays default to zeros; all numbers must be finite.
KernelSpec parse_channel(const json& j);
json channel_to_json(const KernelSpec& k);

/// State document: { "sigma": [[s11,s12],[s12,s22]], "mean": [m1,m2] }.
GaussianState parse_state(const json& j);
json state_to_json(const GaussianState& s);

/// Trajectory document: { "times": [t0,...], "channels": [channel,...] }.
CoefficientTrajectory parse_trajectory(const json& j);
json trajectory_to_json(const CoefficientTrajectory& traj);

json report_to_json(const ValidationReport& r);
json affine_to_json(const AffineChannel& ch);
json state_report_json(const GaussianState& s);
json oracle_report_to_json(const OracleReport& r);
json master_report_to_json(const MasterEqReport& r);
json liouvillian_to_json(const Liouvillian& l);
json scan_report_to_json(const SingularScanReport& r);

/// Parses a JSON document from a file, or from standard input when the path
/// is "-". Throws SchemaError on unreadable files or malformed JSON.
json load_json_file(const std::string& path);

}  // namespace gqc::json_io

#endif  // GQC_JSON_IO_HPP_
