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

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace knnlab {

/// Raised when a point does not belong to the space it is measured in.
class KindMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Spaces

struct EuclideanLine {
  bool operator==(const EuclideanLine&) const = default;
};

struct EuclideanD {
  std::size_t dim = 2;
  bool operator==(const EuclideanD&) const = default;
};

/// The Heisenberg group with the Cygan-Koranyi metric d(p,q) = |p^-1 q|_H.
struct Heisenberg {
  bool operator==(const Heisenberg&) const = default;
};

/// Finite words over {1..alphabet_size} with d = 2^-LCP. Words are padded
/// with the reserved blank letter 0 before the common prefix is taken.
struct UltrametricWords {
  std::uint32_t alphabet_size = 2;
  bool operator==(const UltrametricWords&) const = default;
};

/// Sparse l2-type space: every direction id is a unit vector orthogonal to
/// every other id. Hosts the adversarial tree.
struct AdversarialL2 {
  bool operator==(const AdversarialL2&) const = default;
};

using MetricSpace =
    std::variant<EuclideanLine, EuclideanD, Heisenberg, UltrametricWords, AdversarialL2>;

std::string space_name(const MetricSpace& space);

// ---------------------------------------------------------------------------
// Points

struct Real {
  double value = 0.0;
  bool operator==(const Real&) const = default;
};

struct VecD {
  std::vector<double> coords;
  bool operator==(const VecD&) const = default;
};

struct HPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const HPoint&) const = default;
};

struct Word {
  std::vector<std::uint32_t> letters;
  bool operator==(const Word&) const = default;
};

using DirectionId = std::uint64_t;

/// Finitely supported point. Entries are kept sorted by id and zero
/// coordinates are never stored, so structural equality is point equality.
class SparsePoint {
 public:
  using Entry = std::pair<DirectionId, double>;

  SparsePoint() = default;
  explicit SparsePoint(std::vector<Entry> entries);

  double get(DirectionId id) const;
  void set(DirectionId id, double value);
  /// Copy of this point moved by `step` along direction `id`.
  SparsePoint shifted(DirectionId id, double step) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  bool operator==(const SparsePoint&) const = default;

 private:
  std::vector<Entry> entries_;
};

using Point = std::variant<Real, VecD, HPoint, Word, SparsePoint>;

/// True when `p` is a valid point of `space` (kind and dimension/alphabet).
bool belongs(const MetricSpace& space, const Point& p);

// ---------------------------------------------------------------------------
// Distances

double distance(const MetricSpace& space, const Point& p, const Point& q);

double euclidean_distance(std::span<const double> a, std::span<const double> b);
double word_distance(const Word& a, const Word& b);
double sparse_distance(const SparsePoint& a, const SparsePoint& b);

/// sqrt of the sum of squares of `abs_diffs`, summed in ascending order.
/// Sorts the span in place. The result depends only on the multiset of
/// values, which is what makes symmetric sparse configurations tie exactly.
double canonical_l2(std::span<double> abs_diffs);

// ---------------------------------------------------------------------------
// Heisenberg group

HPoint h_mul(const HPoint& p, const HPoint& q);
HPoint h_inv(const HPoint& p);
double h_norm(const HPoint& p);
HPoint h_dilate(double t, const HPoint& p);
double h_distance(const HPoint& p, const HPoint& q);

}  // namespace knnlab
