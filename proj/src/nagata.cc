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

#include "knnlab/nagata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace knnlab {

void validate_family(const BallFamily& family) {
  for (const Ball& b : family.balls) {
    if (!(b.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    if (!(b.radius < family.scale)) throw std::invalid_argument("ball radius must be below scale");
    if (!belongs(family.space, b.center)) {
      throw std::invalid_argument("ball centre is not a point of the family's space");
    }
  }
}

bool contains(const Ball& ball, const Point& p, const MetricSpace& space) {
  const double d = distance(space, ball.center, p);
  return ball.closed ? d <= ball.radius : d < ball.radius;
}

bool is_disconnected(const BallFamily& family) {
  const auto& balls = family.balls;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = 0; j < balls.size(); ++j) {
      if (i != j && contains(balls[j], balls[i].center, family.space)) return false;
    }
  }
  return true;
}

ProbeMultiplicity multiplicity_over_probes(const BallFamily& family,
                                           std::span<const Point> probes) {
  if (probes.empty()) throw std::invalid_argument("probe set is empty");
  ProbeMultiplicity best;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    std::size_t count = 0;
    for (const Ball& b : family.balls) count += contains(b, probes[p], family.space);
    if (count > best.multiplicity) best = {count, p};
  }
  return best;
}

std::vector<Point> default_probes(const BallFamily& family, std::span<const Point> witnesses) {
  std::vector<Point> probes;
  probes.reserve(family.size() + witnesses.size());
  for (const Ball& b : family.balls) probes.push_back(b.center);
  probes.insert(probes.end(), witnesses.begin(), witnesses.end());
  return probes;
}

std::size_t interval_multiplicity_exact(const BallFamily& family) {
  if (!std::holds_alternative<EuclideanLine>(family.space)) {
    throw KindMismatchError("interval sweep needs the real line");
  }
  // Phase order at one coordinate x: open intervals ending at x leave, closed
  // ones starting at x enter (state at x), closed ones ending at x leave,
  // open ones starting at x enter (state just right of x).
  enum Phase : int { kOpenEnd = 0, kClosedStart = 1, kClosedEnd = 2, kOpenStart = 3 };
  struct Event {
    double x;
    int phase;
  };
  std::vector<Event> events;
  events.reserve(2 * family.size());
  for (const Ball& b : family.balls) {
    const double c = std::get<Real>(b.center).value;
    events.push_back({c - b.radius, b.closed ? kClosedStart : kOpenStart});
    events.push_back({c + b.radius, b.closed ? kClosedEnd : kOpenEnd});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.x != b.x ? a.x < b.x : a.phase < b.phase;
  });
  std::size_t active = 0;
  std::size_t best = 0;
  for (const Event& e : events) {
    if (e.phase == kClosedStart || e.phase == kOpenStart) {
      best = std::max(best, ++active);
    } else {
      --active;
    }
  }
  return best;
}

std::vector<std::size_t> greedy_covering_indices(const BallFamily& family) {
  const auto& balls = family.balls;
  const std::size_t n = balls.size();
  std::vector<std::size_t> selected;
  auto covered = [&](std::size_t i) {
    return std::any_of(selected.begin(), selected.end(), [&](std::size_t s) {
      return contains(balls[s], balls[i].center, family.space);
    });
  };
  auto before = [&](std::size_t a, std::size_t b) {
    if (balls[a].radius != balls[b].radius) return balls[a].radius > balls[b].radius;
    if (balls[a].closed != balls[b].closed) return balls[a].closed;
    return a < b;
  };
  for (std::size_t step = 0; step <= n; ++step) {
    std::size_t pivot = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (covered(i)) continue;
      if (pivot == n || before(i, pivot)) pivot = i;
    }
    if (pivot == n) {
      std::sort(selected.begin(), selected.end());
      return selected;
    }
    std::erase_if(selected, [&](std::size_t s) {
      return contains(balls[pivot], balls[s].center, family.space);
    });
    selected.push_back(pivot);
  }
  throw std::logic_error("greedy covering exchange did not terminate");
}

BallFamily greedy_covering_subfamily(const BallFamily& family) {
  BallFamily out{{}, family.space, family.scale};
  for (std::size_t i : greedy_covering_indices(family)) out.balls.push_back(family.balls[i]);
  return out;
}

bool covers_centers(const BallFamily& sub, const BallFamily& original) {
  return std::all_of(original.balls.begin(), original.balls.end(), [&](const Ball& b) {
    return std::any_of(sub.balls.begin(), sub.balls.end(), [&](const Ball& s) {
      return contains(s, b.center, original.space);
    });
  });
}

bool degroot_family_check(const BallFamily& family) {
  return std::all_of(family.balls.begin(), family.balls.end(), [&](const Ball& b) {
    return b.radius == family.balls.front().radius;
  });
}

std::size_t doubling_cover_greedy(std::span<const Point> points, const Point& center, double r,
                                  const MetricSpace& space) {
  std::vector<const Point*> kept;
  for (const Point& p : points) {
    if (distance(space, center, p) > r) continue;
    const bool separated = std::all_of(kept.begin(), kept.end(), [&](const Point* q) {
      return distance(space, *q, p) > r / 2.0;
    });
    if (separated) kept.push_back(&p);
  }
  return kept.size();
}

DimensionCertificate nagata_witness_sparse(std::size_t m, const SparsePoint& center,
                                           double scale, IdSource& ids) {
  if (m == 0) throw std::invalid_argument("witness family needs at least one ball");
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  const double r = 0.9 * scale;
  DimensionCertificate cert;
  cert.kind = CertificateKind::NagataWitness;
  cert.family.space = AdversarialL2{};
  cert.family.scale = scale;
  cert.family.balls.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    DirectionId d = ids.fresh();
    while (center.get(d) != 0.0) d = ids.fresh();
    cert.family.balls.push_back({center.shifted(d, r), r, true});
  }
  cert.witness_point = center;
  cert.multiplicity = m;
  return cert;
}

bool verify_certificate(const DimensionCertificate& certificate) {
  const BallFamily& f = certificate.family;
  for (const Ball& b : f.balls) {
    if (!(b.radius > 0.0 && b.radius < f.scale)) return false;
  }
  if (certificate.kind == CertificateKind::DeGrootWitness && !degroot_family_check(f)) {
    return false;
  }
  if (!is_disconnected(f)) return false;
  const Point probe[] = {certificate.witness_point};
  return multiplicity_over_probes(f, probe).multiplicity == certificate.multiplicity;
}

BallFamily five_ball_plane_family() {
  BallFamily family;
  family.space = EuclideanD{2};
  for (int k = 1; k <= 5; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / 5.0;
    double x = std::cos(angle);
    double y = std::sin(angle);
    const std::vector<double> origin{0.0, 0.0};
    while (euclidean_distance(std::vector<double>{x, y}, origin) > 1.0) {
      x = std::nextafter(x, 0.0);
      y = std::nextafter(y, 0.0);
    }
    family.balls.push_back({VecD{{x, y}}, 1.0, true});
  }
  return family;
}

}  // namespace knnlab
