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

#include "knnlab/serialization.hpp"

#include <stdexcept>

namespace knnlab {

Json point_to_json(const Point& p) {
  return std::visit(
      [](const auto& q) -> Json {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Real>) {
          return q.value;
        } else if constexpr (std::is_same_v<T, VecD>) {
          return q.coords;
        } else if constexpr (std::is_same_v<T, HPoint>) {
          return Json::array({q.x, q.y, q.z});
        } else if constexpr (std::is_same_v<T, Word>) {
          return q.letters;
        } else {
          Json out = Json::array();
          for (const auto& [id, v] : q.entries()) out.push_back(Json::array({id, v}));
          return out;
        }
      },
      p);
}

Point point_from_json(const MetricSpace& space, const Json& j) {
  Point p = std::visit(
      [&](const auto& s) -> Point {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, EuclideanLine>) {
          return Real{j.get<double>()};
        } else if constexpr (std::is_same_v<S, EuclideanD>) {
          return VecD{j.get<std::vector<double>>()};
        } else if constexpr (std::is_same_v<S, Heisenberg>) {
          const auto v = j.get<std::vector<double>>();
          if (v.size() != 3) throw std::invalid_argument("Heisenberg point needs 3 coordinates");
          return HPoint{v[0], v[1], v[2]};
        } else if constexpr (std::is_same_v<S, UltrametricWords>) {
          return Word{j.get<std::vector<std::uint32_t>>()};
        } else {
          std::vector<SparsePoint::Entry> entries;
          for (const auto& e : j) entries.emplace_back(e.at(0).get<DirectionId>(), e.at(1).get<double>());
          return SparsePoint(std::move(entries));
        }
      },
      space);
  if (!belongs(space, p)) throw KindMismatchError("point does not belong to " + space_name(space));
  return p;
}

Json schedule_to_json(const Schedule& s) {
  return {{"gamma_rule", s.gamma_rule}, {"delta_rule", s.delta_rule},
          {"k_rule", to_string(s.k_rule)}, {"m", s.m},
          {"n", s.n}, {"mode", to_string(s.mode)},
          {"max_depth", s.max_depth}};
}

Schedule schedule_from_json(const Json& j) {
  Schedule s;
  s.gamma_rule = j.value("gamma_rule", s.gamma_rule);
  s.delta_rule = j.value("delta_rule", s.delta_rule);
  if (j.contains("k_rule")) s.k_rule = parse_k_rule(j.at("k_rule").get<std::string>());
  if (j.contains("m")) s.m = j.at("m").get<std::vector<std::uint64_t>>();
  if (j.contains("n")) s.n = j.at("n").get<std::vector<std::uint64_t>>();
  if (j.contains("mode")) s.mode = parse_mode(j.at("mode").get<std::string>());
  s.max_depth = j.value("max_depth", s.m.empty() ? std::size_t{0} : s.m.size() - 1);
  // Reject malformed rules early.
  (void)s.gamma(0);
  (void)s.delta(0);
  return s;
}

Json bounds_to_json(const Schedule& s) {
  Json rows = Json::array();
  for (const StageBounds& b : schedule_bounds(s)) {
    Json row = {{"stage", b.stage},
                {"m", s.branching(b.stage)},
                {"n", b.n},
                {"k", b.k},
                {"gamma", s.gamma(b.stage)},
                {"delta", s.delta(b.stage)},
                {"kn", static_cast<double>(b.k) / static_cast<double>(b.n)},
                {"kn_limit", static_cast<double>(b.kn_limit)},
                {"n_bound", static_cast<double>(b.n_bound)},
                {"n_slack", static_cast<double>(static_cast<long double>(b.n) - b.n_bound)}};
    if (b.has_next_m) {
      row["m_next"] = s.m[b.stage + 1];
      row["m_next_bound"] = static_cast<double>(b.m_next_bound);
      row["m_next_slack"] =
          static_cast<double>(static_cast<long double>(s.m[b.stage + 1]) - b.m_next_bound);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string to_string(CertificateKind kind) {
  return kind == CertificateKind::NagataWitness ? "nagata" : "degroot";
}

Json certificate_to_json(const DimensionCertificate& c) {
  Json centers = Json::array();
  Json radii = Json::array();
  for (const Ball& b : c.family.balls) {
    centers.push_back(point_to_json(b.center));
    radii.push_back(b.radius);
  }
  return {{"kind", to_string(c.kind)},
          {"space", space_name(c.family.space)},
          {"centers", std::move(centers)},
          {"radii", std::move(radii)},
          {"witness", point_to_json(c.witness_point)},
          {"multiplicity", c.multiplicity}};
}

DimensionCertificate certificate_from_json(const MetricSpace& space, const Json& j) {
  DimensionCertificate c;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "nagata") {
    c.kind = CertificateKind::NagataWitness;
  } else if (kind == "degroot") {
    c.kind = CertificateKind::DeGrootWitness;
  } else {
    throw std::invalid_argument("unknown certificate kind: " + kind);
  }
  const Json& centers = j.at("centers");
  const Json& radii = j.at("radii");
  if (centers.size() != radii.size()) throw std::invalid_argument("centers and radii differ in length");
  c.family.space = space;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    c.family.balls.push_back({point_from_json(space, centers[i]), radii[i].get<double>(), true});
  }
  c.witness_point = point_from_json(space, j.at("witness"));
  c.multiplicity = j.at("multiplicity").get<std::size_t>();
  return c;
}

Json geometry_to_json(const AdversarialProblem& problem, std::size_t depth) {
  Json nodes = Json::array();
  std::vector<TreeWord> frontier{TreeWord{}};
  for (std::size_t d = 0; d <= depth && d <= problem.truncation_depth(); ++d) {
    std::vector<TreeWord> next;
    for (const TreeWord& t : frontier) {
      const NodeGeometry& g = node_geometry(problem, t);
      nodes.push_back({{"t", t.letters},
                       {"y", point_to_json(g.y)},
                       {"x", point_to_json(g.x_atom)},
                       {"r", g.r},
                       {"eps", g.eps}});
      if (d < depth) {
        for (std::uint64_t j = 1; j <= problem.branching(d + 1); ++j) {
          next.push_back(t.child(static_cast<std::uint32_t>(j)));
        }
      }
    }
    frontier = std::move(next);
  }
  return nodes;
}

}  // namespace knnlab
