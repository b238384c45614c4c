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

#include "knnlab/adversarial.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace knnlab {

TreeWord TreeWord::child(std::uint32_t j) const {
  TreeWord out = *this;
  out.letters.push_back(j);
  return out;
}

TreeWord TreeWord::parent() const {
  if (letters.empty()) throw std::domain_error("the root has no parent");
  TreeWord out = *this;
  out.letters.pop_back();
  return out;
}

TreeWord TreeWord::prefix(std::size_t len) const {
  if (len > letters.size()) throw std::out_of_range("prefix longer than word");
  return TreeWord{{letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(len)}};
}

std::size_t TreeWordHash::operator()(const TreeWord& t) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ t.letters.size();
  for (std::uint32_t c : t.letters) {
    h ^= c;
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

std::size_t common_prefix(const TreeWord& a, const TreeWord& b) {
  const std::size_t len = std::min(a.depth(), b.depth());
  std::size_t i = 0;
  while (i < len && a.letters[i] == b.letters[i]) ++i;
  return i;
}

double GeometryConstants::radius(std::size_t depth) const {
  return depth == 0 ? root_radius : child_radius_factor * eps(depth - 1);
}

double GeometryConstants::eps(std::size_t depth) const { return eps_factor * radius(depth); }

double GeometryConstants::atom_offset(std::size_t depth) const {
  return atom_offset_factor * radius(depth);
}

// ---------------------------------------------------------------------------

TreeGeometry::TreeGeometry(GeometryConstants constants, std::size_t max_depth)
    : constants_(constants), max_depth_(max_depth) {}

const NodeGeometry& TreeGeometry::node(const TreeWord& t) {
  {
    std::shared_lock lock(mutex_);
    auto it = nodes_.find(t);
    if (it != nodes_.end()) return *it->second;
  }
  std::unique_lock lock(mutex_);
  return node_locked(t);
}

std::size_t TreeGeometry::materialized() const {
  std::shared_lock lock(mutex_);
  return nodes_.size();
}

const NodeGeometry& TreeGeometry::node_locked(const TreeWord& t) {
  if (auto it = nodes_.find(t); it != nodes_.end()) return *it->second;
  if (t.depth() > max_depth_) throw std::domain_error("tree word deeper than the truncation depth");

  auto geo = std::make_unique<NodeGeometry>();
  geo->t = t;
  const std::size_t depth = t.depth();
  if (depth > 0) {
    const NodeGeometry& parent = node_locked(t.parent());
    geo->direction_id = ids_.fresh();
    geo->y = parent.y.shifted(geo->direction_id, constants_.radius(depth - 1));
  }
  geo->r = constants_.radius(depth);
  geo->eps = constants_.eps(depth);
  geo->atom_offset = constants_.atom_offset(depth);
  geo->atom_direction_id = ids_.fresh();
  geo->x_atom = geo->y.shifted(geo->atom_direction_id, geo->atom_offset);
  auto [it, inserted] = nodes_.emplace(t, std::move(geo));
  return *it->second;
}

// ---------------------------------------------------------------------------

AdversarialProblem::AdversarialProblem(Schedule schedule, std::size_t truncation_depth,
                                       GeometryConstants constants)
    : schedule_(std::move(schedule)),
      truncation_depth_(truncation_depth),
      geometry_(std::make_unique<TreeGeometry>(constants, truncation_depth)) {
  if (schedule_.branching(0) != 1) throw std::invalid_argument("m_0 must equal 1");
  for (std::size_t i = 1; i <= truncation_depth_; ++i) {
    const std::uint64_t m = schedule_.branching(i);
    if (m < 2) throw std::invalid_argument("branching must be at least 2 below the root");
    if (m > std::numeric_limits<std::uint32_t>::max()) {
      throw std::invalid_argument("branching exceeds the letter range");
    }
  }
  Rational remaining(1, 2);
  for (std::size_t g = 0; g <= truncation_depth_; ++g) {
    Rational mass = g < truncation_depth_ ? Rational(schedule_.gamma(g)) : remaining;
    remaining -= mass;
    if (mass < 0) throw std::invalid_argument("gamma sequence exceeds total mass 1/2");
    atomic_depth_probability_.push_back(2.0 * static_cast<double>(mass));
    atomic_depth_mass_.push_back(std::move(mass));
  }
}

const Rational& AdversarialProblem::atomic_depth_mass(std::size_t g) const {
  return atomic_depth_mass_.at(g);
}

double AdversarialProblem::atomic_depth_probability(std::size_t g) const {
  return atomic_depth_probability_.at(g);
}

void AdversarialProblem::check_word(const TreeWord& t) const {
  if (t.depth() > truncation_depth_) {
    throw std::domain_error("tree word deeper than the truncation depth");
  }
  for (std::size_t i = 0; i < t.depth(); ++i) {
    if (t.letters[i] < 1 || t.letters[i] > branching(i + 1)) {
      throw std::domain_error("tree letter outside the branching range");
    }
  }
}

Point AdversarialProblem::materialize(const Provenance& p) const {
  const NodeGeometry& geo = node_geometry(*this, p.t);
  return p.kind == PointKind::Atom ? geo.x_atom : geo.y;
}

// ---------------------------------------------------------------------------

Rational branching_product(const Schedule& schedule, std::size_t a, std::size_t b) {
  boost::multiprecision::cpp_int p = 1;
  for (std::size_t j = a; j <= b; ++j) p *= schedule.branching(j);
  return Rational(p);
}

Rational atom_mass(const Schedule& schedule, const TreeWord& t) {
  return Rational(schedule.gamma(t.depth())) / branching_product(schedule, 0, t.depth());
}

BallMass ball_mass(const AdversarialProblem& problem, const TreeWord& t) {
  if (t.depth() == 0) throw std::domain_error("ball mass is defined for non-root words");
  problem.check_word(t);
  const Schedule& s = problem.schedule();
  BallMass out;
  out.diffuse = Rational(1, 2) / branching_product(s, 1, t.depth());
  // Atoms inside the ball are exactly those of the subtree rooted at t; each
  // depth g >= |t| contributes gamma_g / prod_{0<=j<=|t|} m_j.
  Rational tail(1, 2);
  for (std::size_t g = 0; g < t.depth(); ++g) tail -= Rational(s.gamma(g));
  out.atomic = tail / branching_product(s, 0, t.depth());
  return out;
}

const NodeGeometry& node_geometry(const AdversarialProblem& problem, const TreeWord& t) {
  problem.check_word(t);
  return problem.geometry().node(t);
}

bool verify_node(const AdversarialProblem& problem, const TreeWord& t) {
  const NodeGeometry& node = node_geometry(problem, t);
  if (!(node.eps > 0.0 && node.eps < std::ldexp(1.0, -static_cast<int>(t.depth())))) return false;
  if (t.depth() >= problem.truncation_depth()) return true;

  const MetricSpace space = AdversarialL2{};
  const auto m = static_cast<std::uint32_t>(problem.branching(t.depth() + 1));
  std::vector<const NodeGeometry*> children;
  children.reserve(m);
  for (std::uint32_t j = 1; j <= m; ++j) children.push_back(&node_geometry(problem, t.child(j)));

  for (const NodeGeometry* c : children) {
    // (2) the child's atom lies in the open eps^t ball around the child centre.
    if (!(distance(space, c->x_atom, c->y) < node.eps)) return false;
  }
  for (std::size_t j = 0; j < children.size(); ++j) {
    const double to_atom = distance(space, children[j]->y, node.x_atom);
    for (std::size_t s = 0; s < children.size(); ++s) {
      if (s == j) continue;
      // (1) via the triangle inequality bound d(z,x^t) < d(z,w).
      const double sibling = distance(space, children[j]->y, children[s]->y);
      if (!(node.eps + to_atom < sibling - 2.0 * node.eps)) return false;
    }
  }
  if (t.depth() + 2 <= problem.truncation_depth()) {
    const auto mm = static_cast<std::uint32_t>(problem.branching(t.depth() + 2));
    for (const NodeGeometry* c : children) {
      for (std::uint32_t l = 1; l <= mm; ++l) {
        const NodeGeometry& g = node_geometry(problem, c->t.child(l));
        // (3) nested balls.
        if (!(distance(space, c->y, g.y) + c->eps < node.eps)) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

TreeWord uniform_branch(const AdversarialProblem& problem, std::size_t depth, Rng& rng) {
  TreeWord t;
  t.letters.reserve(depth);
  for (std::size_t i = 1; i <= depth; ++i) {
    std::uniform_int_distribution<std::uint64_t> letter(1, problem.branching(i));
    t.letters.push_back(static_cast<std::uint32_t>(letter(rng)));
  }
  return t;
}

}  // namespace

Provenance sample_diffuse(const AdversarialProblem& problem, Rng& rng) {
  return {PointKind::Diffuse, uniform_branch(problem, problem.truncation_depth(), rng)};
}

Provenance sample_atomic(const AdversarialProblem& problem, Rng& rng) {
  double u = uniform01(rng);
  std::size_t depth = problem.truncation_depth();
  for (std::size_t g = 0; g < problem.truncation_depth(); ++g) {
    const double p = problem.atomic_depth_probability(g);
    if (u < p) {
      depth = g;
      break;
    }
    u -= p;
  }
  return {PointKind::Atom, uniform_branch(problem, depth, rng)};
}

std::vector<Provenance> sample_provenance(const AdversarialProblem& problem, std::size_t count,
                                          std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x5a3);
  std::vector<Provenance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const bool atomic = uniform01(rng) < 0.5;
    out.push_back(atomic ? sample_atomic(problem, rng) : sample_diffuse(problem, rng));
  }
  return out;
}

std::vector<Draw> sample_mu(const AdversarialProblem& problem, std::size_t count,
                            std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("count must be positive");
  std::vector<Draw> out;
  out.reserve(count);
  for (Provenance& p : sample_provenance(problem, count, seed)) {
    Draw d;
    d.point = problem.materialize(p);
    d.label = p.kind == PointKind::Atom ? 1 : 0;
    d.provenance = std::move(p);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace knnlab
