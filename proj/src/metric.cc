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

#include "knnlab/metric.hpp"

#include <algorithm>
#include <cmath>

namespace knnlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <class T>
const T& expect(const Point& p, const char* what) {
  if (const T* v = std::get_if<T>(&p)) return *v;
  throw KindMismatchError(std::string("point is not a ") + what);
}

}  // namespace

std::string space_name(const MetricSpace& space) {
  return std::visit(
      Overloaded{
          [](const EuclideanLine&) { return std::string("line"); },
          [](const EuclideanD& s) { return "euclidean" + std::to_string(s.dim); },
          [](const Heisenberg&) { return std::string("heisenberg"); },
          [](const UltrametricWords& s) { return "words" + std::to_string(s.alphabet_size); },
          [](const AdversarialL2&) { return std::string("sparse-l2"); },
      },
      space);
}

SparsePoint::SparsePoint(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first) {
      throw std::invalid_argument("duplicate direction id in sparse point");
    }
  }
  std::erase_if(entries, [](const Entry& e) { return e.second == 0.0; });
  entries_ = std::move(entries);
}

double SparsePoint::get(DirectionId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, DirectionId key) { return e.first < key; });
  return (it != entries_.end() && it->first == id) ? it->second : 0.0;
}

void SparsePoint::set(DirectionId id, double value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, DirectionId key) { return e.first < key; });
  const bool present = it != entries_.end() && it->first == id;
  if (value == 0.0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->second = value;
  } else {
    entries_.insert(it, {id, value});
  }
}

SparsePoint SparsePoint::shifted(DirectionId id, double step) const {
  SparsePoint out = *this;
  out.set(id, get(id) + step);
  return out;
}

bool belongs(const MetricSpace& space, const Point& p) {
  return std::visit(
      Overloaded{
          [&](const EuclideanLine&) { return std::holds_alternative<Real>(p); },
          [&](const EuclideanD& s) {
            const VecD* v = std::get_if<VecD>(&p);
            return v != nullptr && v->coords.size() == s.dim;
          },
          [&](const Heisenberg&) { return std::holds_alternative<HPoint>(p); },
          [&](const UltrametricWords& s) {
            const Word* w = std::get_if<Word>(&p);
            if (w == nullptr) return false;
            return std::all_of(w->letters.begin(), w->letters.end(), [&](std::uint32_t c) {
              return c >= 1 && c <= s.alphabet_size;
            });
          },
          [&](const AdversarialL2&) { return std::holds_alternative<SparsePoint>(p); },
      },
      space);
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw KindMismatchError("dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double word_distance(const Word& a, const Word& b) {
  const std::size_t len = std::max(a.letters.size(), b.letters.size());
  for (std::size_t i = 0; i < len; ++i) {
    const std::uint32_t ca = i < a.letters.size() ? a.letters[i] : 0;
    const std::uint32_t cb = i < b.letters.size() ? b.letters[i] : 0;
    if (ca != cb) return std::ldexp(1.0, -static_cast<int>(i));
  }
  return 0.0;
}

double canonical_l2(std::span<double> abs_diffs) {
  std::sort(abs_diffs.begin(), abs_diffs.end());
  double sum = 0.0;
  for (double v : abs_diffs) sum += v * v;
  return std::sqrt(sum);
}

double sparse_distance(const SparsePoint& a, const SparsePoint& b) {
  thread_local std::vector<double> diffs;
  diffs.clear();
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && ea[i].first < eb[j].first)) {
      diffs.push_back(std::fabs(ea[i].second));
      ++i;
    } else if (i == ea.size() || eb[j].first < ea[i].first) {
      diffs.push_back(std::fabs(eb[j].second));
      ++j;
    } else {
      const double d = std::fabs(ea[i].second - eb[j].second);
      if (d != 0.0) diffs.push_back(d);
      ++i;
      ++j;
    }
  }
  return canonical_l2(diffs);
}

double distance(const MetricSpace& space, const Point& p, const Point& q) {
  return std::visit(
      Overloaded{
          [&](const EuclideanLine&) {
            return std::fabs(expect<Real>(p, "real").value - expect<Real>(q, "real").value);
          },
          [&](const EuclideanD& s) {
            const auto& a = expect<VecD>(p, "vector");
            const auto& b = expect<VecD>(q, "vector");
            if (a.coords.size() != s.dim || b.coords.size() != s.dim) {
              throw KindMismatchError("vector dimension does not match the space");
            }
            return euclidean_distance(a.coords, b.coords);
          },
          [&](const Heisenberg&) {
            return h_distance(expect<HPoint>(p, "Heisenberg point"),
                              expect<HPoint>(q, "Heisenberg point"));
          },
          [&](const UltrametricWords& s) {
            const auto& a = expect<Word>(p, "word");
            const auto& b = expect<Word>(q, "word");
            auto in_alphabet = [&](const Word& w) {
              return std::all_of(w.letters.begin(), w.letters.end(),
                                 [&](std::uint32_t c) { return c >= 1 && c <= s.alphabet_size; });
            };
            if (!in_alphabet(a) || !in_alphabet(b)) {
              throw KindMismatchError("word letter outside the alphabet");
            }
            return word_distance(a, b);
          },
          [&](const AdversarialL2&) {
            return sparse_distance(expect<SparsePoint>(p, "sparse point"),
                                   expect<SparsePoint>(q, "sparse point"));
          },
      },
      space);
}

HPoint h_mul(const HPoint& p, const HPoint& q) {
  return {p.x + q.x, p.y + q.y, p.z + q.z - 2.0 * p.x * q.y + 2.0 * p.y * q.x};
}

HPoint h_inv(const HPoint& p) { return {-p.x, -p.y, -p.z}; }

double h_norm(const HPoint& p) {
  const double planar = p.x * p.x + p.y * p.y;
  // sqrt(sqrt(.)) keeps dyadic dilations exact, unlike pow(., 0.25).
  return std::sqrt(std::sqrt(planar * planar + p.z * p.z));
}

HPoint h_dilate(double t, const HPoint& p) {
  if (!(t > 0.0)) throw std::domain_error("dilation factor must be positive");
  return {t * p.x, t * p.y, t * t * p.z};
}

double h_distance(const HPoint& p, const HPoint& q) { return h_norm(h_mul(h_inv(p), q)); }

}  // namespace knnlab
