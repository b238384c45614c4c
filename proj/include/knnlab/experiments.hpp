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

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "knnlab/adversarial.hpp"
#include "knnlab/knn.hpp"
#include "knnlab/nagata.hpp"
#include "knnlab/schedule.hpp"
#include "knnlab/serialization.hpp"

namespace knnlab {

enum class Experiment { Consistency, Baseline, CoverHart, Dimension, Schedule };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& text);

/// Inclusive stage range, written "A..B" (or a single "A").
struct StageRange {
  std::size_t first = 0;
  std::size_t last = 1;
};
StageRange parse_stage_range(const std::string& text);

struct ExperimentConfig {
  Experiment experiment = Experiment::Consistency;
  std::uint64_t seed = 1;
  StageRange stages;
  std::optional<std::uint64_t> n_override;
  std::optional<KRule> k_rule;  // per-experiment default when unset
  std::size_t test_count = 10000;
  std::optional<ScheduleMode> mode;  // proof for `schedule`, else empirical
  std::string output_path;
  // Explicit schedule; when m or n is empty the mode's default is used.
  std::string gamma_rule = "dyadic";
  std::string delta_rule = "dyadic";
  std::vector<std::uint64_t> m;
  std::vector<std::uint64_t> n;
  // Truncation depth is stages.last + truncation_margin.
  std::size_t truncation_margin = 2;
};

/// Reads the JSON config. Unknown keys are rejected.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& c);

struct StageReport {
  std::size_t stage = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::optional<double> frac_pred1_nonatomic;
  double error = 0.0;
  double bayes = 0.0;
  std::optional<double> delta;
  double std_error = 0.0;
};

inline constexpr const char* kCsvHeader = "stage,n,k,frac_pred1_nonatomic,error,bayes,delta,stderr";
void write_csv(std::ostream& out, const std::vector<StageReport>& rows);

ScheduleMode effective_mode(const ExperimentConfig& c);

/// Schedule used by run_consistency and print_schedule. ProofBound without
/// an explicit schedule derives the minimal one through stages.last and
/// appends the next branching; Empirical defaults to m = (1, 512, 16384),
/// n = (512, 10^6). Throws ScheduleValidationError or ScheduleOverflowError.
Schedule config_schedule(const ExperimentConfig& c);

/// One row per stage from the count simulator; bayes is 0. The stderr
/// column belongs to frac_pred1_nonatomic.
std::vector<StageReport> run_consistency(const ExperimentConfig& c);

/// Uniform X on [0, 1], Y = 1{X > 1/2}, n in {10^2, 10^3, 10^4}.
/// k defaults to SqrtCeil.
std::vector<StageReport> run_baseline(const ExperimentConfig& c);

struct CoverHartRow {
  std::string name;
  std::uint64_t n = 0;
  Estimate error;
  double bayes = 0.0;
  double asymptotic = 0.0;  // E 2 eta (1 - eta)
  double ratio() const { return bayes > 0.0 ? error.value / bayes : 0.0; }
};

/// 1-NN on uniform [0,1]^2: eta = 0.3 (n = 2*10^4), the half-plane
/// eta = 1{x_1 > 1/2} (n = 10^4) and eta = x_1 (n = 10^4).
std::vector<CoverHartRow> run_coverhart(const ExperimentConfig& c);
std::vector<StageReport> coverhart_rows(const std::vector<CoverHartRow>& rows);

// Random families shared by the dimension suite and its tests.
BallFamily random_interval_family(Rng& rng, std::size_t size);
/// Built by rejection, so every member keeps the family disconnected.
BallFamily random_disconnected_interval_family(Rng& rng, std::size_t size);
BallFamily random_plane_family(Rng& rng, std::size_t size);
BallFamily random_word_family(Rng& rng, std::size_t size, std::uint32_t alphabet,
                              std::size_t max_len);
Word random_word(Rng& rng, std::uint32_t alphabet, std::size_t max_len);

/// Exact multiplicity for closed/open balls of an ultrametric: any common
/// point of two balls lies in the smaller one, so pairwise intersection
/// decides everything.
std::size_t ultrametric_multiplicity_exact(const BallFamily& family);

/// The dyadic base grid {-1, -3/4, ..., 1}^3 of the Heisenberg group.
std::vector<Point> heisenberg_base_grid();

struct DoublingRow {
  double radius = 0.0;
  std::size_t grid_points = 0;
  std::size_t separated = 0;  // greedy r/2-separated points in B(e, r)
};

struct DimensionReport {
  DimensionCertificate plane;
  bool plane_verified = false;
  std::size_t interval_families = 0;
  std::size_t interval_max_multiplicity = 0;
  std::size_t ultrametric_families = 0;
  std::size_t ultrametric_max_multiplicity = 0;
  std::size_t sparse_checked = 0;
  std::size_t sparse_verified = 0;
  std::vector<DimensionCertificate> sparse_samples;
  std::vector<DoublingRow> doubling;
};

DimensionReport run_dimension_suite(const ExperimentConfig& c);
Json dimension_report_to_json(const DimensionReport& r);

/// Schedule JSON plus per-stage bounds and slack.
Json print_schedule(const ExperimentConfig& c);

}  // namespace knnlab
