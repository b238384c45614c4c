// Copyright 2026 The knnlab Authors
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

#include <json.hpp>

#include "knnlab/adversarial.hpp"
#include "knnlab/metric.hpp"
#include "knnlab/nagata.hpp"
#include "knnlab/schedule.hpp"

namespace knnlab {

using Json = nlohmann::json;

// Points: Real as a number, VecD as an array, HPoint as [x, y, z], Word as
// an array of letters and SparsePoint as an array of [id, value] pairs.
Json point_to_json(const Point& p);
Point point_from_json(const MetricSpace& space, const Json& j);

/// {gamma_rule, delta_rule, k_rule, m, n, mode, max_depth}
Json schedule_to_json(const Schedule& s);
/// Missing keys fall back to the Schedule defaults.
Schedule schedule_from_json(const Json& j);

/// Per-stage bound values and slack, one object per stage.
Json bounds_to_json(const Schedule& s);

/// {kind, centers, radii, witness, multiplicity}
Json certificate_to_json(const DimensionCertificate& c);
DimensionCertificate certificate_from_json(const MetricSpace& space, const Json& j);

std::string to_string(CertificateKind kind);

/// Centres, atoms and radii of every materialized node; for inspection only.
Json geometry_to_json(const AdversarialProblem& problem, std::size_t depth);

}  // namespace knnlab
