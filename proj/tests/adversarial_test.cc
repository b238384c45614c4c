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
#include <functional>

#include "knnlab/adversarial.hpp"

namespace knnlab {
namespace {

Schedule small_schedule() {
  Schedule s;
  s.m = {1, 3, 4, 2};
  s.n = {100};
  s.mode = ScheduleMode::Empirical;
  return s;
}

void for_each_word(const AdversarialProblem& p, std::size_t depth,
                   const std::function<void(const TreeWord&)>& f) {
  std::function<void(TreeWord)> rec = [&](TreeWord t) {
    if (t.depth() == depth) {
      f(t);
      return;
    }
    for (std::uint64_t j = 1; j <= p.branching(t.depth() + 1); ++j) {
      rec(t.child(static_cast<std::uint32_t>(j)));
    }
  };
  rec(TreeWord{});
}

TEST(Constants, DyadicRadii) {
  const GeometryConstants c;
  EXPECT_EQ(c.radius(0), 0.5);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(c.eps(i), std::ldexp(1.0, -5 * static_cast<int>(i + 1)));
    EXPECT_EQ(c.atom_offset(i), 0.6 * c.radius(i));
    if (i > 0) EXPECT_EQ(c.radius(i), 0.5 * c.eps(i - 1));
  }
}

TEST(Measure, AtomMassesSumToGammaExactly) {
  const AdversarialProblem p(small_schedule(), 3);
  for (std::size_t i = 0; i <= 3; ++i) {
    Rational total = 0;
    for_each_word(p, i, [&](const TreeWord& t) { total += atom_mass(p.schedule(), t); });
    EXPECT_EQ(total, Rational(p.schedule().gamma(i))) << "depth " << i;
  }
}

TEST(Measure, BallMassesPartitionTheHalves) {
  const AdversarialProblem p(small_schedule(), 3);
  Rational gamma_before = 0;
  for (std::size_t i = 1; i <= 3; ++i) {
    gamma_before += Rational(p.schedule().gamma(i - 1));
    Rational diffuse = 0;
    Rational atomic = 0;
    for_each_word(p, i, [&](const TreeWord& t) {
      const BallMass b = ball_mass(p, t);
      diffuse += b.diffuse;
      atomic += b.atomic;
    });
    EXPECT_EQ(diffuse, Rational(1, 2));
    EXPECT_EQ(atomic, Rational(1, 2) - gamma_before);
  }
  EXPECT_THROW(ball_mass(p, TreeWord{}), std::domain_error);
}

TEST(Measure, TruncatedAtomicMassIsHalf) {
  const AdversarialProblem p(small_schedule(), 2);
  EXPECT_EQ(p.atomic_depth_mass(0), Rational(1, 4));
  EXPECT_EQ(p.atomic_depth_mass(1), Rational(1, 8));
  EXPECT_EQ(p.atomic_depth_mass(2), Rational(1, 8));  // lumped remainder
  EXPECT_THROW(p.atomic_depth_mass(3), std::out_of_range);
}

TEST(Problem, RejectsBadBranching) {
  Schedule s = small_schedule();
  s.m[0] = 2;
  EXPECT_THROW(AdversarialProblem(s, 2), std::invalid_argument);
  s = small_schedule();
  s.m[2] = 1;
  EXPECT_THROW(AdversarialProblem(s, 2), std::invalid_argument);
  s = small_schedule();
  s.m[1] = 1ULL << 33;
  EXPECT_THROW(AdversarialProblem(s, 1), std::invalid_argument);
}

TEST(Problem, WordChecks) {
  const AdversarialProblem p(small_schedule(), 3);
  EXPECT_NO_THROW(p.check_word(TreeWord{{3, 4, 2}}));
  EXPECT_THROW(p.check_word(TreeWord{{4}}), std::domain_error);
  EXPECT_THROW(p.check_word(TreeWord{{1, 0}}), std::domain_error);
  EXPECT_THROW(p.check_word(TreeWord{{1, 1, 1, 1}}), std::domain_error);
}

TEST(Geometry, EdgeLengthsAndMemoization) {
  const AdversarialProblem p(small_schedule(), 3);
  const MetricSpace space = AdversarialL2{};
  const GeometryConstants c;
  const NodeGeometry& root = node_geometry(p, TreeWord{});
  EXPECT_EQ(root.y, SparsePoint{});
  const NodeGeometry& a = node_geometry(p, TreeWord{{2}});
  const NodeGeometry& b = node_geometry(p, TreeWord{{2, 3}});
  EXPECT_EQ(distance(space, root.y, a.y), c.radius(0));
  EXPECT_EQ(distance(space, a.y, b.y), c.radius(1));
  EXPECT_EQ(distance(space, a.y, a.x_atom), c.atom_offset(1));
  EXPECT_EQ(&a, &node_geometry(p, TreeWord{{2}}));
  // Siblings at equal distance from the parent atom, bit for bit.
  const NodeGeometry& s1 = node_geometry(p, TreeWord{{1}});
  const NodeGeometry& s3 = node_geometry(p, TreeWord{{3}});
  EXPECT_EQ(distance(space, s1.y, root.x_atom), distance(space, s3.y, root.x_atom));
  EXPECT_EQ(distance(space, s1.y, a.y), distance(space, s3.y, a.y));
}

TEST(Geometry, VerifyNodeExhaustive) {
  const AdversarialProblem p(small_schedule(), 3);
  for (std::size_t d = 0; d <= 3; ++d) {
    for_each_word(p, d, [&](const TreeWord& t) { EXPECT_TRUE(verify_node(p, t)); });
  }
}

TEST(Geometry, BadConstantsFail) {
  GeometryConstants wide;
  wide.eps_factor = 0.5;  // balls too large for separation
  const AdversarialProblem p(small_schedule(), 3, wide);
  EXPECT_FALSE(verify_node(p, TreeWord{}));
  GeometryConstants far_atom;
  far_atom.atom_offset_factor = 1.5;  // atom farther than a sibling
  const AdversarialProblem q(small_schedule(), 3, far_atom);
  EXPECT_FALSE(verify_node(q, TreeWord{}));
}

TEST(Sampling, KindAndDepthFrequencies) {
  const AdversarialProblem p(small_schedule(), 3);
  const auto draws = sample_provenance(p, 40000, 17);
  std::size_t atoms = 0;
  std::size_t root_atoms = 0;
  for (const auto& d : draws) {
    if (d.kind == PointKind::Atom) {
      ++atoms;
      root_atoms += d.t.depth() == 0;
    } else {
      EXPECT_EQ(d.t.depth(), 3u);
    }
    EXPECT_NO_THROW(p.check_word(d.t));
  }
  EXPECT_NEAR(atoms / 40000.0, 0.5, 0.01);
  EXPECT_NEAR(root_atoms / 40000.0, 0.25, 0.01);
  EXPECT_EQ(sample_provenance(p, 100, 17), sample_provenance(p, 100, 17));
  const auto mu = sample_mu(p, 10, 3);
  for (const auto& d : mu) EXPECT_EQ(d.label, d.provenance.kind == PointKind::Atom ? 1 : 0);
}

}  // namespace
}  // namespace knnlab
