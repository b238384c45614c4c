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

#include "knnlab/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "knnlab/parallel.hpp"

namespace knnlab {

namespace {

double group_distance(const GeometryConstants& c, const OccupancyGroup& g,
                      PointKind test_kind, std::size_t test_depth) {
  if (g.relation == Relation::Same) return 0.0;
  std::vector<double> diffs;
  for (std::size_t l = g.common_prefix; l < test_depth; ++l) diffs.push_back(c.radius(l));
  if (test_kind == PointKind::Atom) diffs.push_back(c.atom_offset(test_depth));
  for (std::size_t l = g.common_prefix; l < g.depth; ++l) diffs.push_back(c.radius(l));
  if (g.kind == PointKind::Atom) diffs.push_back(c.atom_offset(g.depth));
  return canonical_l2(diffs);
}

}  // namespace

OccupancyProfile occupancy_profile(const AdversarialProblem& problem, PointKind test_kind,
                                   std::size_t test_depth) {
  const std::size_t depth_d = problem.truncation_depth();
  if (test_depth > depth_d) throw std::domain_error("test point deeper than the truncation depth");
  if (test_kind == PointKind::Diffuse && test_depth != depth_d) {
    throw std::domain_error("diffuse points live at the truncation depth");
  }
  const Schedule& s = problem.schedule();
  const std::size_t h = test_depth;
  auto prod = [&](std::size_t a, std::size_t b) { return branching_product(s, a, b); };
  auto siblings = [&](std::size_t l) { return Rational(problem.branching(l + 1) - 1); };

  OccupancyProfile profile;
  profile.test_kind = test_kind;
  profile.test_depth = h;
  auto add = [&](std::size_t l, PointKind kind, std::size_t depth, Relation rel,
                 const Rational& mass) {
    if (mass == 0) return;
    OccupancyGroup g;
    g.common_prefix = l;
    g.kind = kind;
    g.depth = depth;
    g.relation = rel;
    g.label = kind == PointKind::Atom ? 1 : 0;
    g.probability = static_cast<double>(mass);
    g.distance = group_distance(problem.constants(), g, test_kind, h);
    profile.groups.push_back(g);
  };

  for (std::size_t g = 0; g <= depth_d; ++g) {
    const Rational& pg = problem.atomic_depth_mass(g);
    for (std::size_t l = 0; l <= std::min(h, g); ++l) {
      if (l == g) {
        const bool same = l == h && test_kind == PointKind::Atom;
        add(l, PointKind::Atom, g, same ? Relation::Same : Relation::Ancestor, pg / prod(0, g));
      } else if (l < h) {
        add(l, PointKind::Atom, g, Relation::Sibling, pg * siblings(l) / prod(0, l + 1));
      } else {
        add(l, PointKind::Atom, g, Relation::Below, pg / prod(0, h));
      }
    }
  }
  const Rational half(1, 2);
  for (std::size_t l = 0; l <= h; ++l) {
    if (l == depth_d) {
      const bool same = test_kind == PointKind::Diffuse;
      add(l, PointKind::Diffuse, depth_d, same ? Relation::Same : Relation::Ancestor,
          half / prod(1, depth_d));
    } else if (l < h) {
      add(l, PointKind::Diffuse, depth_d, Relation::Sibling, half * siblings(l) / prod(1, l + 1));
    } else {
      add(l, PointKind::Diffuse, depth_d, Relation::Below, half / prod(1, h));
    }
  }
  std::stable_sort(profile.groups.begin(), profile.groups.end(),
                   [](const OccupancyGroup& a, const OccupancyGroup& b) {
                     return a.distance < b.distance;
                   });
  return profile;
}

std::size_t OccupancyProfile::group_of(const TreeWord& test_path, const Provenance& sample) const {
  const std::size_t l = common_prefix(test_path, sample.t);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const OccupancyGroup& g = groups[i];
    if (g.common_prefix == l && g.kind == sample.kind && g.depth == sample.t.depth()) return i;
  }
  throw std::logic_error("sample point matches no occupancy group");
}

bool OccupancyProfile::has_mixed_ties() const {
  for (std::size_t i = 1; i < groups.size(); ++i) {
    if (groups[i].distance == groups[i - 1].distance && groups[i].label != groups[i - 1].label) {
      return true;
    }
  }
  return false;
}

Label classify_counts(const OccupancyProfile& profile, std::span<const std::uint64_t> counts,
                      std::size_t k, Rng& rng) {
  if (counts.size() != profile.groups.size()) {
    throw std::invalid_argument("counts do not match the profile");
  }
  const auto& groups = profile.groups;
  std::uint64_t remaining = k;
  std::uint64_t ones = 0;
  for (std::size_t i = 0; i < groups.size() && remaining > 0;) {
    std::size_t end = i;
    std::uint64_t run_ones = 0;
    std::uint64_t run_zeros = 0;
    while (end < groups.size() && groups[end].distance == groups[i].distance) {
      (groups[end].label ? run_ones : run_zeros) += counts[end];
      ++end;
    }
    const std::uint64_t run = run_ones + run_zeros;
    if (run <= remaining) {
      ones += run_ones;
      remaining -= run;
    } else {
      // Uniform tie-breaking picks a uniform subset of the equidistant run.
      std::uint64_t a = run_ones;
      std::uint64_t b = run_zeros;
      for (std::uint64_t take = remaining; take > 0; --take) {
        std::uniform_int_distribution<std::uint64_t> pick(0, a + b - 1);
        if (pick(rng) < a) {
          ++ones;
          --a;
        } else {
          --b;
        }
      }
      remaining = 0;
    }
    i = end;
  }
  if (remaining > 0) throw std::domain_error("fewer than k sample points");
  return majority_vote(ones, k);
}

std::vector<std::uint64_t> draw_occupancy(const OccupancyProfile& profile, std::uint64_t n,
                                          std::size_t k, Rng& rng) {
  const auto& groups = profile.groups;
  std::vector<double> suffix(groups.size() + 1, 0.0);
  for (std::size_t i = groups.size(); i-- > 0;) suffix[i] = suffix[i + 1] + groups[i].probability;

  std::vector<std::uint64_t> counts(groups.size(), 0);
  std::uint64_t left = n;
  std::uint64_t taken = 0;
  for (std::size_t i = 0; i < groups.size() && left > 0; ++i) {
    if (taken >= k && groups[i].distance != groups[i - 1].distance) break;
    if (suffix[i] <= 0.0) break;
    const double p = std::min(1.0, groups[i].probability / suffix[i]);
    const std::uint64_t c =
        p >= 1.0 ? left : std::binomial_distribution<std::uint64_t>(left, p)(rng);
    counts[i] = c;
    left -= c;
    taken += c;
  }
  return counts;
}

Label structured_predict(const AdversarialProblem& problem, std::span<const Provenance> sample,
                         const Provenance& test, std::size_t k, Rng& rng) {
  const OccupancyProfile profile = occupancy_profile(problem, test.kind, test.t.depth());
  std::vector<std::uint64_t> counts(profile.groups.size(), 0);
  for (const Provenance& p : sample) ++counts[profile.group_of(test.t, p)];
  return classify_counts(profile, counts, k, rng);
}

StageSimResult structured_stage_sim(const AdversarialProblem& problem, std::size_t stage,
                                    std::uint64_t n, std::size_t k, std::size_t test_count,
                                    std::uint64_t seed) {
  if (stage + 1 > problem.truncation_depth()) {
    throw std::domain_error("stage too deep for the truncation depth");
  }
  if (k == 0 || k > n) throw std::domain_error("k must satisfy 1 <= k <= n");
  if (test_count == 0) throw std::invalid_argument("test_count must be positive");

  const std::size_t depth_d = problem.truncation_depth();
  const OccupancyProfile diffuse = occupancy_profile(problem, PointKind::Diffuse, depth_d);
  std::vector<OccupancyProfile> atomic;
  for (std::size_t g = 0; g <= depth_d; ++g) {
    atomic.push_back(occupancy_profile(problem, PointKind::Atom, g));
  }

  std::atomic<std::size_t> diffuse_ones{0};
  std::atomic<std::size_t> atomic_zeros{0};
  parallel_for(test_count, [&](std::size_t i) {
    Rng rng = make_rng(seed, 2 * i);
    auto counts = draw_occupancy(diffuse, n, k, rng);
    if (classify_counts(diffuse, counts, k, rng) == 1) diffuse_ones.fetch_add(1);

    Rng arng = make_rng(seed, 2 * i + 1);
    const Provenance test = sample_atomic(problem, arng);
    const OccupancyProfile& profile = atomic[test.t.depth()];
    counts = draw_occupancy(profile, n, k, arng);
    if (classify_counts(profile, counts, k, arng) == 0) atomic_zeros.fetch_add(1);
  });

  StageSimResult out;
  out.stage = stage;
  out.n = n;
  out.k = k;
  out.nonatomic_pred1 = proportion(diffuse_ones.load(), test_count);
  out.atomic_pred0 = proportion(atomic_zeros.load(), test_count);
  out.error.value = 0.5 * (out.nonatomic_pred1.value + out.atomic_pred0.value);
  out.error.std_error = 0.5 * std::hypot(out.nonatomic_pred1.std_error, out.atomic_pred0.std_error);
  return out;
}

}  // namespace knnlab
