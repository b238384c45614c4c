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

#include <gtest/gtest.h>

#include <cmath>

#include "knnlab/simulator.hpp"

namespace knnlab {
namespace {

Schedule sim_schedule() {
  Schedule s;
  s.m = {1, 6, 5, 3};
  s.n = {200, 2000};
  s.mode = ScheduleMode::Empirical;
  return s;
}

TEST(Profile, ProbabilitiesSumToOne) {
  const AdversarialProblem p(sim_schedule(), 3);
  for (std::size_t h = 0; h <= 3; ++h) {
    const OccupancyProfile prof = occupancy_profile(p, PointKind::Atom, h);
    double total = 0;
    for (const auto& g : prof.groups) total += g.probability;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_FALSE(prof.has_mixed_ties());
    EXPECT_TRUE(std::is_sorted(prof.groups.begin(), prof.groups.end(),
                               [](const auto& a, const auto& b) { return a.distance < b.distance; }));
  }
  const OccupancyProfile d = occupancy_profile(p, PointKind::Diffuse, 3);
  double total = 0;
  for (const auto& g : d.groups) total += g.probability;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_THROW(occupancy_profile(p, PointKind::Diffuse, 2), std::domain_error);
  EXPECT_THROW(occupancy_profile(p, PointKind::Atom, 4), std::domain_error);
}

TEST(Profile, GroupDistancesEqualMaterializedDistances) {
  const AdversarialProblem p(sim_schedule(), 3);
  const MetricSpace space = AdversarialL2{};
  const auto tests = sample_provenance(p, 30, 1);
  const auto sample = sample_provenance(p, 300, 2);
  for (const Provenance& t : tests) {
    const OccupancyProfile prof = occupancy_profile(p, t.kind, t.t.depth());
    const Point x = p.materialize(t);
    for (const Provenance& s : sample) {
      const auto& g = prof.groups[prof.group_of(t.t, s)];
      ASSERT_EQ(distance(space, x, p.materialize(s)), g.distance);
      ASSERT_EQ(g.label, s.kind == PointKind::Atom ? 1 : 0);
    }
  }
}

TEST(Profile, GroupProbabilitiesMatchSampling) {
  const AdversarialProblem p(sim_schedule(), 3);
  const Provenance test{PointKind::Atom, TreeWord{{2, 1}}};
  const OccupancyProfile prof = occupancy_profile(p, test.kind, 2);
  const std::size_t n = 200000;
  std::vector<std::size_t> counts(prof.groups.size(), 0);
  for (const auto& s : sample_provenance(p, n, 4)) ++counts[prof.group_of(test.t, s)];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double q = prof.groups[i].probability;
    EXPECT_NEAR(counts[i] / static_cast<double>(n), q, 5 * std::sqrt(q * (1 - q) / n) + 1e-9);
  }
}

TEST(Predict, StructuredMatchesBruteForce) {
  const AdversarialProblem p(sim_schedule(), 3);
  const MetricSpace space = AdversarialL2{};
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const std::size_t n = 50 + 40 * trial;
    const auto draws = sample_mu(p, n, 100 + trial);
    LabelledSample s;
    std::vector<Provenance> prov;
    Rng keys = make_rng(trial, 9);
    for (const auto& d : draws) {
      s.points.push_back(d.point);
      s.labels.push_back(d.label);
      s.tie_keys.push_back(uniform01(keys));
      prov.push_back(d.provenance);
    }
    const auto tests = sample_provenance(p, 20, 500 + trial);
    for (const Provenance& t : tests) {
      for (std::size_t k : {1u, 3u, 8u}) {
        Rng rng = make_rng(trial, 1);
        const Label a = structured_predict(p, prov, t, k, rng);
        const Label b = knn_predict(s, p.materialize(t), k, TieStrategy::UniformRandom, space);
        ASSERT_EQ(a, b) << "trial " << trial << " k " << k;
      }
    }
  }
}

TEST(Occupancy, CountsFollowTheMultinomial) {
  const AdversarialProblem p(sim_schedule(), 3);
  const OccupancyProfile prof = occupancy_profile(p, PointKind::Diffuse, 3);
  const std::uint64_t n = 1000;
  std::vector<double> mean(prof.groups.size(), 0.0);
  const int reps = 2000;
  Rng rng = make_rng(3, 3);
  for (int r = 0; r < reps; ++r) {
    const auto c = draw_occupancy(prof, n, n, rng);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      total += c[i];
      mean[i] += static_cast<double>(c[i]) / reps;
    }
    ASSERT_EQ(total, n);
  }
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double q = prof.groups[i].probability;
    EXPECT_NEAR(mean[i], n * q, 5 * std::sqrt(n * q * (1 - q) / reps) + 1e-9);
  }
}

TEST(Occupancy, EarlyStopKeepsTheFirstKPoints) {
  const AdversarialProblem p(sim_schedule(), 3);
  const OccupancyProfile prof = occupancy_profile(p, PointKind::Diffuse, 3);
  Rng rng = make_rng(1, 1);
  for (int r = 0; r < 200; ++r) {
    const auto c = draw_occupancy(prof, 500, 5, rng);
    std::uint64_t total = 0;
    for (auto x : c) total += x;
    EXPECT_GE(total, 5u);
  }
}

TEST(Classify, MixedTieIsSplitUniformly) {
  OccupancyProfile prof;
  OccupancyGroup near;
  near.distance = 0.1;
  near.label = 0;
  OccupancyGroup one = near;
  one.distance = 0.2;
  one.label = 1;
  OccupancyGroup zero = one;
  zero.label = 0;
  prof.groups = {near, one, zero};
  ASSERT_TRUE(prof.has_mixed_ties());
  // One zero first, then 2 of {1,1,0,0} for k = 3: predict 1 iff both are ones.
  const std::vector<std::uint64_t> counts{1, 2, 2};
  Rng rng = make_rng(4, 4);
  int ones = 0;
  const int reps = 60000;
  for (int r = 0; r < reps; ++r) ones += classify_counts(prof, counts, 3, rng);
  EXPECT_NEAR(ones / static_cast<double>(reps), 1.0 / 6.0, 0.01);
  EXPECT_THROW(classify_counts(prof, std::vector<std::uint64_t>{0, 1, 1}, 3, rng), std::domain_error);
}

TEST(StageSim, DeterministicAndGuarded) {
  const AdversarialProblem p(sim_schedule(), 3);
  const StageSimResult a = structured_stage_sim(p, 1, 2000, 11, 500, 8);
  const StageSimResult b = structured_stage_sim(p, 1, 2000, 11, 500, 8);
  EXPECT_EQ(a.nonatomic_pred1.value, b.nonatomic_pred1.value);
  EXPECT_EQ(a.atomic_pred0.value, b.atomic_pred0.value);
  EXPECT_NEAR(a.error.value, (a.nonatomic_pred1.value + a.atomic_pred0.value) / 2, 1e-15);
  EXPECT_THROW(structured_stage_sim(p, 3, 2000, 11, 500, 8), std::domain_error);
  EXPECT_THROW(structured_stage_sim(p, 1, 10, 11, 500, 8), std::domain_error);
}

}  // namespace
}  // namespace knnlab
