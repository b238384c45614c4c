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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "knnlab/adversarial.hpp"
#include "knnlab/knn.hpp"

namespace knnlab {

/// Relation of a class of sample points to a fixed test point Q with path u.
enum class Relation : std::uint8_t {
  Same,      // the identical point
  Ancestor,  // path is a proper prefix of u (or equal path, other kind)
  Sibling,   // branches off u below the common prefix
  Below,     // path strictly extends u
};

/// All sample points sharing (common prefix length, kind, depth) relative to
/// the test point. They sit at one common distance from it.
struct OccupancyGroup {
  std::size_t common_prefix = 0;
  PointKind kind = PointKind::Diffuse;
  std::size_t depth = 0;
  Relation relation = Relation::Sibling;
  Label label = 0;
  double distance = 0.0;
  double probability = 0.0;  // mass under the truncated mu
};

/// The partition of the truncated mu seen from a test point of a given kind
/// and depth, sorted by distance. By symmetry of the construction it does not
/// depend on the test point's letters.
struct OccupancyProfile {
  PointKind test_kind = PointKind::Diffuse;
  std::size_t test_depth = 0;
  std::vector<OccupancyGroup> groups;

  /// Index of the group holding a sample point with `sample` provenance when
  /// the test point has path `test_path`.
  std::size_t group_of(const TreeWord& test_path, const Provenance& sample) const;
  /// True when two groups of different labels share a distance.
  bool has_mixed_ties() const;
};

/// Builds the profile. Group distances are computed from the multiset of
/// coordinate differences with the same summation as the sparse metric, so
/// they equal the brute-force distances bit for bit.
OccupancyProfile occupancy_profile(const AdversarialProblem& problem, PointKind test_kind,
                                   std::size_t test_depth);

/// k-NN vote from per-group counts (aligned with profile.groups). Groups are
/// consumed nearest first; an equal-distance run of mixed labels that is cut
/// by the k boundary is split uniformly at random, matching uniform
/// tie-breaking.
Label classify_counts(const OccupancyProfile& profile, std::span<const std::uint64_t> counts,
                      std::size_t k, Rng& rng);

/// Multinomial occupancy of the groups for an n-sample, drawn by sequential
/// conditional binomials. Stops once the first groups hold k points; later
/// entries are left at zero.
std::vector<std::uint64_t> draw_occupancy(const OccupancyProfile& profile, std::uint64_t n,
                                          std::size_t k, Rng& rng);

/// Structured prediction for one test point from an explicit sample
/// (provenance only). Used to cross-check against brute-force k-NN.
Label structured_predict(const AdversarialProblem& problem, std::span<const Provenance> sample,
                         const Provenance& test, std::size_t k, Rng& rng);

struct StageSimResult {
  std::size_t stage = 0;
  std::uint64_t n = 0;
  std::size_t k = 0;
  Estimate nonatomic_pred1;  // P[predict 1 | X diffuse]
  Estimate atomic_pred0;     // P[predict 0 | X atomic]
  Estimate error;            // (nonatomic_pred1 + atomic_pred0) / 2
};

/// Fraction of diffuse test points predicted 1 (and the companion atomic
/// error) at sample size n and k neighbours. Every test point gets its own
/// multinomial occupancy; the n sample points are never materialized.
/// Throws std::domain_error unless stage + 1 <= truncation depth.
StageSimResult structured_stage_sim(const AdversarialProblem& problem, std::size_t stage,
                                    std::uint64_t n, std::size_t k, std::size_t test_count,
                                    std::uint64_t seed);

}  // namespace knnlab
