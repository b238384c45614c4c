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

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "knnlab/knn.hpp"
#include "knnlab/metric.hpp"
#include "knnlab/nagata.hpp"
#include "knnlab/schedule.hpp"

namespace knnlab {

using Rational = boost::multiprecision::cpp_rational;

/// Vertex of the indexing tree: letter i (1-based depth) lies in [1, m_i].
/// The empty word is the root.
struct TreeWord {
  std::vector<std::uint32_t> letters;

  std::size_t depth() const { return letters.size(); }
  TreeWord child(std::uint32_t j) const;
  TreeWord parent() const;
  TreeWord prefix(std::size_t len) const;

  bool operator==(const TreeWord&) const = default;
  auto operator<=>(const TreeWord&) const = default;
};

struct TreeWordHash {
  std::size_t operator()(const TreeWord& t) const noexcept;
};

/// Length of the longest common prefix.
std::size_t common_prefix(const TreeWord& a, const TreeWord& b);

/// Radii of the construction; every value depends on the depth only.
///
///   r(0) = root_radius,  r(i) = child_radius_factor * eps(i - 1)
///   eps(i) = eps_factor * r(i),  atom offset a(i) = atom_offset_factor * r(i)
///
/// r(i) is the distance from y^t (the origin for the root) to each child
/// centre, eps(i) the radius of the balls around those children and a(i) the
/// offset of the atom x^t along its own fresh direction.
struct GeometryConstants {
  double root_radius = 0.5;
  double child_radius_factor = 0.5;
  double eps_factor = 1.0 / 16.0;
  double atom_offset_factor = 0.6;

  double radius(std::size_t depth) const;
  double eps(std::size_t depth) const;
  double atom_offset(std::size_t depth) const;
};

struct NodeGeometry {
  TreeWord t;
  SparsePoint y;       // centre y^t; the origin for the root
  SparsePoint x_atom;  // atom x^t = y^t + a e_atom
  double eps = 0.0;
  double r = 0.0;
  double atom_offset = 0.0;
  DirectionId direction_id = 0;  // edge from the parent; 0 for the root
  DirectionId atom_direction_id = 0;
};

class AdversarialProblem;

/// Lazily materialized, memoized tree geometry. Each node is built once;
/// concurrent readers are safe. Direction ids are issued fresh per node, so
/// their values depend on materialization order but distances do not.
class TreeGeometry {
 public:
  TreeGeometry(GeometryConstants constants, std::size_t max_depth);

  const NodeGeometry& node(const TreeWord& t);
  std::size_t materialized() const;
  const GeometryConstants& constants() const { return constants_; }

 private:
  const NodeGeometry& node_locked(const TreeWord& t);

  GeometryConstants constants_;
  std::size_t max_depth_;
  IdSource ids_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<TreeWord, std::unique_ptr<NodeGeometry>, TreeWordHash> nodes_;
};

enum class PointKind : std::uint8_t { Atom, Diffuse };

/// Where a draw came from: the atom x^t or the diffuse point y^t (|t| = D).
struct Provenance {
  PointKind kind = PointKind::Diffuse;
  TreeWord t;

  bool operator==(const Provenance&) const = default;
};

struct Draw {
  Point point;
  Label label = 0;
  Provenance provenance;
};

/// The learning problem mu = mu_0 + mu_1 with eta the indicator of the atoms,
/// truncated at depth D: mu_0 is uniform on the centres y^t, |t| = D, and the
/// atoms deeper than D are lumped onto their depth-D ancestor atom, so the
/// atomic part keeps total mass exactly 1/2.
class AdversarialProblem {
 public:
  AdversarialProblem(Schedule schedule, std::size_t truncation_depth,
                     GeometryConstants constants = {});

  const Schedule& schedule() const { return schedule_; }
  std::size_t truncation_depth() const { return truncation_depth_; }
  std::uint64_t branching(std::size_t i) const { return schedule_.branching(i); }
  TreeGeometry& geometry() const { return *geometry_; }
  const GeometryConstants& constants() const { return geometry_->constants(); }

  /// Total atomic mass placed at depth g in the truncated measure.
  const Rational& atomic_depth_mass(std::size_t g) const;
  double atomic_depth_probability(std::size_t g) const;

  /// Throws std::domain_error when letters exceed the branching bounds or the
  /// word is deeper than the truncation depth.
  void check_word(const TreeWord& t) const;

  Point materialize(const Provenance& p) const;

 private:
  Schedule schedule_;
  std::size_t truncation_depth_;
  std::unique_ptr<TreeGeometry> geometry_;
  std::vector<Rational> atomic_depth_mass_;
  std::vector<double> atomic_depth_probability_;
};

/// prod_{a <= j <= b} m_j as an exact integer (1 when a > b).
Rational branching_product(const Schedule& schedule, std::size_t a, std::size_t b);

/// mu_1{x^t} = gamma_|t| / prod_{0<=j<=|t|} m_j, exact.
Rational atom_mass(const Schedule& schedule, const TreeWord& t);

/// Masses of the closed ball of radius eps^{t-} around y^t, |t| >= 1.
struct BallMass {
  Rational diffuse;  // 1 / (2 prod_{1<=j<=|t|} m_j)
  Rational atomic;   // all atoms x^s with s extending t
};
BallMass ball_mass(const AdversarialProblem& problem, const TreeWord& t);

const NodeGeometry& node_geometry(const AdversarialProblem& problem, const TreeWord& t);

/// Checks the three separation properties around node t, plus eps^t < 2^-|t|:
///  (1) eps^t + d(y^tj, x^t) < d(y^tj, y^ts) - 2 eps^t for all siblings j != s,
///  (2) d(x^tj, y^tj) < eps^t,
///  (3) d(y^tj, y^tjl) + eps^tj < eps^t.
/// Children and grandchildren beyond the truncation depth are skipped.
bool verify_node(const AdversarialProblem& problem, const TreeWord& t);

/// `count` provenance records drawn from the truncated mu. Deterministic in seed.
std::vector<Provenance> sample_provenance(const AdversarialProblem& problem, std::size_t count,
                                          std::uint64_t seed);

/// A single diffuse draw from mu_0 (uniform branch to depth D).
Provenance sample_diffuse(const AdversarialProblem& problem, Rng& rng);
/// A single atomic draw from mu_1 (depth by mass, then a uniform atom).
Provenance sample_atomic(const AdversarialProblem& problem, Rng& rng);

/// Provenance plus materialized point and its deterministic label.
std::vector<Draw> sample_mu(const AdversarialProblem& problem, std::size_t count,
                            std::uint64_t seed);

}  // namespace knnlab
