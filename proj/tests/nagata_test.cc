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

#include <algorithm>
#include <cmath>

#include "knnlab/experiments.hpp"
#include "knnlab/nagata.hpp"

namespace knnlab {
namespace {

// Intervals on the 1/64 grid keep every endpoint exact and make touching
// endpoints common.
BallFamily grid_intervals(Rng& rng, std::size_t size) {
  BallFamily f;
  std::uniform_int_distribution<int> c(0, 64);
  std::uniform_int_distribution<int> r(1, 12);
  for (std::size_t i = 0; i < size; ++i) {
    f.balls.push_back({Real{c(rng) / 64.0}, r(rng) / 64.0, uniform01(rng) < 0.5});
  }
  return f;
}

// Probe every endpoint and every midpoint between consecutive endpoints.
std::size_t brute_interval_multiplicity(const BallFamily& f) {
  std::vector<double> xs;
  for (const Ball& b : f.balls) {
    const double c = std::get<Real>(b.center).value;
    xs.push_back(c - b.radius);
    xs.push_back(c + b.radius);
  }
  std::sort(xs.begin(), xs.end());
  std::vector<Point> probes;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    probes.push_back(Real{xs[i]});
    if (i + 1 < xs.size()) probes.push_back(Real{(xs[i] + xs[i + 1]) / 2});
  }
  return multiplicity_over_probes(f, probes).multiplicity;
}

TEST(IntervalSweep, MatchesBruteForce) {
  Rng rng = make_rng(21, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const BallFamily f = grid_intervals(rng, 1 + trial % 12);
    ASSERT_EQ(interval_multiplicity_exact(f), brute_interval_multiplicity(f)) << "trial " << trial;
  }
}

TEST(IntervalSweep, TouchingEndpoints) {
  BallFamily f;
  f.balls = {{Real{0.0}, 1.0, true}, {Real{2.0}, 1.0, true}};
  EXPECT_EQ(interval_multiplicity_exact(f), 2u);
  f.balls[0].closed = false;
  EXPECT_EQ(interval_multiplicity_exact(f), 1u);
  BallFamily plane;
  plane.space = EuclideanD{2};
  EXPECT_THROW(interval_multiplicity_exact(plane), KindMismatchError);
}

TEST(FiveBalls, DisconnectedWithMultiplicityFive) {
  const BallFamily f = five_ball_plane_family();
  ASSERT_EQ(f.size(), 5u);
  EXPECT_TRUE(is_disconnected(f));
  const Point origin = VecD{{0.0, 0.0}};
  EXPECT_EQ(multiplicity_over_probes(f, std::span<const Point>(&origin, 1)).multiplicity, 5u);
  for (const Ball& b : f.balls) {
    EXPECT_LE(distance(f.space, b.center, origin), 1.0);
    EXPECT_GT(distance(f.space, b.center, origin), 1.0 - 1e-12);
  }
}

// Exhaustive search over subfamilies: some disconnected covering subfamily
// of multiplicity at most 2 exists on the line, and the greedy one is such.
TEST(Greedy, LineOutputAgainstExhaustiveSearch) {
  Rng rng = make_rng(5, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const BallFamily f = grid_intervals(rng, 2 + trial % 7);
    const auto idx = greedy_covering_indices(f);
    ASSERT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    const BallFamily sub = greedy_covering_subfamily(f);
    EXPECT_TRUE(is_disconnected(sub));
    EXPECT_TRUE(covers_centers(sub, f));
    EXPECT_LE(interval_multiplicity_exact(sub), 2u);

    std::size_t best = f.size() + 1;
    for (unsigned mask = 1; mask < (1u << f.size()); ++mask) {
      BallFamily s;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (mask >> i & 1u) s.balls.push_back(f.balls[i]);
      }
      if (is_disconnected(s) && covers_centers(s, f)) {
        best = std::min(best, interval_multiplicity_exact(s));
      }
    }
    EXPECT_LE(best, 2u);
  }
}

TEST(Greedy, PlaneFamilies) {
  Rng rng = make_rng(6, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const BallFamily f = random_plane_family(rng, 1 + trial % 25);
    const BallFamily sub = greedy_covering_subfamily(f);
    EXPECT_TRUE(is_disconnected(sub));
    EXPECT_TRUE(covers_centers(sub, f));
  }
}

TEST(Greedy, NestedBallsKeepTheLargest) {
  BallFamily f;
  f.balls = {{Real{0.0}, 0.1, true}, {Real{0.05}, 1.0, true}, {Real{0.5}, 0.2, false}};
  EXPECT_EQ(greedy_covering_indices(f), (std::vector<std::size_t>{1}));
}

TEST(Ultrametric, GreedyFamiliesHaveMultiplicityOne) {
  Rng rng = make_rng(8, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const BallFamily f = random_word_family(rng, 2 + trial % 20, 3, 5);
    const BallFamily sub = greedy_covering_subfamily(f);
    ASSERT_TRUE(is_disconnected(sub));
    EXPECT_EQ(ultrametric_multiplicity_exact(sub), 1u);
    // Random probes never beat the exact value.
    std::vector<Point> probes;
    for (int i = 0; i < 50; ++i) probes.push_back(random_word(rng, 3, 6));
    EXPECT_LE(multiplicity_over_probes(sub, probes).multiplicity, 1u);
  }
}

TEST(Ultrametric, ExactMultiplicityOnAChain) {
  BallFamily f;
  f.space = UltrametricWords{2};
  f.balls = {{Word{{1}}, 0.5, true}, {Word{{1, 1}}, 0.25, true}, {Word{{1, 1, 2}}, 0.125, false}};
  EXPECT_EQ(ultrametric_multiplicity_exact(f), 3u);
}

TEST(SparseWitness, CertifiesMultiplicityM) {
  IdSource ids;
  for (std::size_t m : {1u, 2u, 7u, 64u}) {
    DimensionCertificate c = nagata_witness_sparse(m, SparsePoint{}, 1.0, ids);
    EXPECT_TRUE(verify_certificate(c));
    EXPECT_EQ(c.multiplicity, m);
    c.multiplicity = m + 1;
    EXPECT_FALSE(verify_certificate(c));
  }
  // Centre with support: fresh directions skip the occupied ones.
  SparsePoint centre({{ids.peek(), 0.25}});
  const DimensionCertificate c = nagata_witness_sparse(5, centre, 0.5, ids);
  EXPECT_TRUE(verify_certificate(c));
  EXPECT_THROW(nagata_witness_sparse(0, SparsePoint{}, 1.0, ids), std::invalid_argument);
}

TEST(SparseWitness, ConnectedFamilyIsRejected) {
  IdSource ids;
  DimensionCertificate c = nagata_witness_sparse(3, SparsePoint{}, 1.0, ids);
  c.family.balls[0].radius = 1.01 * std::sqrt(2.0) * 0.9;  // swallows the other centres
  c.family.scale = 2.0;
  EXPECT_FALSE(verify_certificate(c));
}

// Greedy separated subsets against an exhaustive maximum on small sets.
TEST(Doubling, GreedyIsSeparatedAndBelowTheMaximum) {
  Rng rng = make_rng(13, 0);
  const MetricSpace space = EuclideanD{2};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(VecD{{uniform01(rng), uniform01(rng)}});
    const Point centre = VecD{{0.5, 0.5}};
    const double r = 0.5;
    const std::size_t greedy = doubling_cover_greedy(pts, centre, r, space);
    std::size_t best = 0;
    for (unsigned mask = 0; mask < (1u << pts.size()); ++mask) {
      bool ok = true;
      std::size_t count = 0;
      for (std::size_t i = 0; i < pts.size() && ok; ++i) {
        if (!(mask >> i & 1u)) continue;
        ++count;
        ok = distance(space, centre, pts[i]) <= r;
        for (std::size_t j = 0; j < i && ok; ++j) {
          if (mask >> j & 1u) ok = distance(space, pts[i], pts[j]) > r / 2;
        }
      }
      if (ok) best = std::max(best, count);
    }
    EXPECT_LE(greedy, best);
    // Independent first-fit pass in input order.
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (distance(space, centre, pts[i]) > r) continue;
      bool far = true;
      for (std::size_t j : kept) far = far && distance(space, pts[i], pts[j]) > r / 2;
      if (far) kept.push_back(i);
    }
    EXPECT_EQ(greedy, kept.size());
  }
}

TEST(Doubling, HeisenbergCountsAgreeAcrossDyadicScales) {
  const std::vector<Point> grid = heisenberg_base_grid();
  std::vector<std::size_t> counts;
  for (double r : {1.0, 0.5, 0.25}) {
    std::vector<Point> scaled;
    for (const Point& p : grid) scaled.push_back(h_dilate(r, std::get<HPoint>(p)));
    counts.push_back(doubling_cover_greedy(scaled, HPoint{}, r, Heisenberg{}));
  }
  EXPECT_GT(counts[0], 1u);
  EXPECT_EQ(counts[0], counts[1]);
  EXPECT_EQ(counts[1], counts[2]);
}

TEST(Families, Validation) {
  BallFamily f;
  f.balls = {{Real{0.0}, 0.0, true}};
  EXPECT_THROW(validate_family(f), std::invalid_argument);
  f.balls = {{Real{0.0}, 2.0, true}};
  f.scale = 1.0;
  EXPECT_THROW(validate_family(f), std::invalid_argument);
  f.balls = {{HPoint{}, 0.5, true}};
  EXPECT_THROW(validate_family(f), std::invalid_argument);
  EXPECT_THROW(multiplicity_over_probes(f, {}), std::invalid_argument);
  BallFamily g;
  g.balls = {{Real{0.0}, 0.5, true}, {Real{3.0}, 0.5, false}};
  EXPECT_TRUE(degroot_family_check(g));
  g.balls[1].radius = 0.25;
  EXPECT_FALSE(degroot_family_check(g));
}

}  // namespace
}  // namespace knnlab
