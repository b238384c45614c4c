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

#include <atomic>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "knnlab/metric.hpp"

namespace knnlab {

struct Ball {
  Point center;
  double radius = 1.0;
  bool closed = true;
};

/// Finite family of balls of radii < scale in one space.
struct BallFamily {
  std::vector<Ball> balls;
  MetricSpace space = EuclideanLine{};
  double scale = std::numeric_limits<double>::infinity();

  std::size_t size() const { return balls.size(); }
};

/// Throws std::invalid_argument if a radius is not in (0, scale) or a
/// centre is not a point of the space.
void validate_family(const BallFamily& family);

enum class CertificateKind { NagataWitness, DeGrootWitness };

/// A disconnected family together with a point lying in `multiplicity`
/// of its balls. Proves dimension >= multiplicity - 1 at the family's scale.
struct DimensionCertificate {
  CertificateKind kind = CertificateKind::NagataWitness;
  BallFamily family;
  Point witness_point;
  std::size_t multiplicity = 0;
};

bool contains(const Ball& ball, const Point& p, const MetricSpace& space);

/// No ball contains the centre of another ball of the family.
bool is_disconnected(const BallFamily& family);

struct ProbeMultiplicity {
  std::size_t multiplicity = 0;
  std::size_t probe_index = 0;
};

/// Maximum number of balls containing a single probe. A lower bound for the
/// true multiplicity; exact once a true witness is among the probes.
/// Throws std::invalid_argument on an empty probe set.
ProbeMultiplicity multiplicity_over_probes(const BallFamily& family,
                                           std::span<const Point> probes);

/// Centres of the family followed by any extra witnesses.
std::vector<Point> default_probes(const BallFamily& family,
                                  std::span<const Point> witnesses = {});

/// Exact maximum overlap of a family of intervals on the line, by an
/// endpoint sweep. Throws KindMismatchError for any other space.
std::size_t interval_multiplicity_exact(const BallFamily& family);

/// Indices (ascending) of a disconnected subfamily covering every centre.
///
/// Repeats the exchange step: take an uncovered ball B, drop from the
/// current subfamily every ball whose centre lies in B, insert B. The
/// uncovered ball taken is the one of largest radius (closed before open,
/// then lowest index). With that order no selected ball ever has its centre
/// inside a later pivot, so nothing is dropped and the loop ends after at
/// most |family| insertions.
std::vector<std::size_t> greedy_covering_indices(const BallFamily& family);
BallFamily greedy_covering_subfamily(const BallFamily& family);

/// Every centre of `original` lies in some ball of `sub`.
bool covers_centers(const BallFamily& sub, const BallFamily& original);

/// All radii equal (vacuously true for the empty family).
bool degroot_family_check(const BallFamily& family);

/// Size of a greedy r/2-separated subset of the points lying in the closed
/// ball B(center, r). Lower-bounds the number of r/2-balls needed to cover
/// B(center, r).
std::size_t doubling_cover_greedy(std::span<const Point> points, const Point& center, double r,
                                  const MetricSpace& space);

/// Issues fresh sparse direction ids. Thread safe.
class IdSource {
 public:
  explicit IdSource(DirectionId first = 1) : next_(first) {}
  DirectionId fresh() { return next_.fetch_add(1, std::memory_order_relaxed); }
  DirectionId peek() const { return next_.load(std::memory_order_relaxed); }

 private:
  std::atomic<DirectionId> next_;
};

/// m closed balls of radius 0.9 * scale centred at center + r e_d along m
/// fresh directions; the witness is `center` itself.
DimensionCertificate nagata_witness_sparse(std::size_t m, const SparsePoint& center,
                                           double scale, IdSource& ids);

/// Checks the certificate invariants directly: the family is disconnected,
/// radii are below scale, the witness sits in `multiplicity` balls, and the
/// de Groot kind has equal radii.
bool verify_certificate(const DimensionCertificate& certificate);

/// Five closed unit balls in the plane centred at the fifth roots of unity.
/// Centres are pulled inward by at most a few ulps so the origin lies in
/// every ball in floating point.
BallFamily five_ball_plane_family();

}  // namespace knnlab
