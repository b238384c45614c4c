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

#include <sstream>

#include "knnlab/experiments.hpp"

namespace knnlab {
namespace {

TEST(Config, StageRanges) {
  EXPECT_EQ(parse_stage_range("0..3").last, 3u);
  EXPECT_EQ(parse_stage_range("2").first, 2u);
  EXPECT_THROW(parse_stage_range("3..1"), std::invalid_argument);
  EXPECT_THROW(parse_stage_range("a..1"), std::invalid_argument);
}

TEST(Config, JsonRoundTrip) {
  const Json j = Json::parse(R"({"experiment": "baseline", "seed": 9, "stages": "1..2",
                                 "k_rule": "const1", "mode": "proof", "m": [1, 293], "n": [128]})");
  const ExperimentConfig c = config_from_json(j);
  EXPECT_EQ(c.experiment, Experiment::Baseline);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.stages.first, 1u);
  EXPECT_EQ(*c.k_rule, KRule::Const1);
  EXPECT_EQ(*c.mode, ScheduleMode::ProofBound);
  const ExperimentConfig d = config_from_json(config_to_json(c));
  EXPECT_EQ(d.m, c.m);
  EXPECT_EQ(d.stages.last, 2u);
  EXPECT_THROW(config_from_json(Json::parse(R"({"sed": 1})")), std::invalid_argument);
}

TEST(Serialization, ScheduleJsonRoundTrip) {
  Schedule s = derive_schedule("dyadic", "dyadic", KRule::Log2Ceil, 1);
  const Json j = schedule_to_json(s);
  for (const char* key : {"gamma_rule", "delta_rule", "k_rule", "m", "n", "mode", "max_depth"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const Schedule t = schedule_from_json(j);
  EXPECT_EQ(t.m, s.m);
  EXPECT_EQ(t.n, s.n);
  EXPECT_EQ(t.mode, s.mode);
  EXPECT_EQ(t.max_depth, s.max_depth);
}

TEST(Serialization, CertificateRoundTrip) {
  IdSource ids;
  const DimensionCertificate c = nagata_witness_sparse(4, SparsePoint{}, 1.0, ids);
  const Json j = certificate_to_json(c);
  for (const char* key : {"kind", "centers", "radii", "witness", "multiplicity"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  DimensionCertificate back = certificate_from_json(AdversarialL2{}, j);
  back.family.scale = c.family.scale;
  EXPECT_TRUE(verify_certificate(back));
  EXPECT_EQ(back.multiplicity, 4u);
  EXPECT_THROW(point_from_json(Heisenberg{}, Json::array({1.0, 2.0})), std::invalid_argument);
}

TEST(Csv, HeaderAndRows) {
  StageReport r;
  r.stage = 1;
  r.n = 10;
  r.k = 3;
  r.error = 0.5;
  r.std_error = 0.01;
  std::ostringstream out;
  write_csv(out, {r});
  EXPECT_EQ(out.str(), "stage,n,k,frac_pred1_nonatomic,error,bayes,delta,stderr\n1,10,3,,0.5,0,,0.01\n");
}

TEST(Consistency, RowsAreReproducible) {
  ExperimentConfig c;
  c.stages = {0, 0};
  c.test_count = 300;
  c.seed = 5;
  const auto a = run_consistency(c);
  const auto b = run_consistency(c);
  ASSERT_EQ(a.size(), 1u);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a[0].bayes, 0.0);
  EXPECT_EQ(a[0].n, 512u);
  EXPECT_EQ(a[0].k, 9u);
}

TEST(Consistency, ValidationFailuresAbort) {
  ExperimentConfig c;
  c.mode = ScheduleMode::ProofBound;
  c.m = {1, 292};
  c.n = {128};
  c.stages = {0, 0};
  EXPECT_THROW(run_consistency(c), ScheduleValidationError);
  c.m = {1, 293};
  c.stages = {0, 1};
  EXPECT_THROW(run_consistency(c), ScheduleValidationError);
  c.stages = {0, 0};
  c.test_count = 50;
  EXPECT_THROW(run_consistency(c), std::invalid_argument);
}

TEST(Schedule, PrintedBoundsAndOverflow) {
  ExperimentConfig c;
  c.experiment = Experiment::Schedule;
  c.stages = {0, 1};
  const Json j = print_schedule(c);
  EXPECT_NEAR(j["bounds"][0]["n_bound"].get<double>(), 66.542129333754, 1e-9);
  EXPECT_EQ(j["schedule"]["n"][0].get<std::uint64_t>(), 67u);
  c.stages = {0, 4};
  EXPECT_THROW(print_schedule(c), ScheduleOverflowError);
}

TEST(Baseline, ConstantOneIsLearnedExactly) {
  // eta = 1 everywhere: every label is 1, so the rule never errs.
  LearningProblem p;
  p.sample_point = [](Rng& rng) -> Point { return Real{uniform01(rng)}; };
  p.eta = [](const Point&) { return 1.0; };
  EXPECT_EQ(knn_error_estimate(p, 100, 10, 500, EuclideanLine{}, 1).value, 0.0);
}

}  // namespace
}  // namespace knnlab
