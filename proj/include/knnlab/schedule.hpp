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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace knnlab {

/// k as a function of the sample size.
enum class KRule { Log2Ceil, SqrtCeil, Const1 };

std::uint64_t k_of(KRule rule, std::uint64_t n);
std::string to_string(KRule rule);
KRule parse_k_rule(const std::string& text);

enum class ScheduleMode { ProofBound, Empirical };

std::string to_string(ScheduleMode mode);
ScheduleMode parse_mode(const std::string& text);

/// A positive sequence given by a short textual rule.
///
///   gamma: "dyadic"          -> 2^-(i+2)            (sums to 1/2)
///          "geometric:q"     -> (1-q) q^i / 2       (sums to 1/2)
///   delta: "dyadic"          -> 2^-(i+3)
///          "geometric:c:q"   -> c q^i
class SequenceRule {
 public:
  enum class Family { Gamma, Delta };

  SequenceRule(Family family, const std::string& text);

  double operator()(std::size_t i) const;
  const std::string& text() const { return text_; }

 private:
  Family family_;
  std::string text_;
  bool dyadic_ = true;
  double scale_ = 1.0;
  double ratio_ = 0.5;
};

/// Branching used below the explicitly scheduled levels.
inline constexpr std::uint64_t kTailBranching = 2;

/// The sequences driving the adversarial construction: masses gamma_i,
/// risks delta_i, the k rule, branching m_i (m_0 = 1) and sample sizes n_i.
struct Schedule {
  std::string gamma_rule = "dyadic";
  std::string delta_rule = "dyadic";
  KRule k_rule = KRule::Log2Ceil;
  std::vector<std::uint64_t> m{1};
  std::vector<std::uint64_t> n;
  ScheduleMode mode = ScheduleMode::ProofBound;
  std::size_t max_depth = 0;

  double gamma(std::size_t i) const;
  double delta(std::size_t i) const;
  /// m_i, or kTailBranching beyond the supplied list.
  std::uint64_t branching(std::size_t i) const;
  std::uint64_t k_at(std::size_t stage) const;
  std::size_t stages() const { return n.size(); }
};

/// Per-stage bound values of the three schedule constraints.
struct StageBounds {
  std::size_t stage = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  long double product_m = 1;        // prod_{0<=j<=i} m_j
  long double kn_limit = 0;         // gamma_i / (2 prod m_j); need k/n below it
  long double n_bound = 0;          // (2 prod m_j^2 / gamma_i^2)(sum ln m_j - ln delta_i)
  bool has_next_m = false;
  long double m_next_bound = 0;     // 2 n_i / (k delta_i prod m_j)
};

/// Bounds for every stage i with n_i present.
std::vector<StageBounds> schedule_bounds(const Schedule& schedule);

struct Violation {
  std::size_t stage = 0;
  char constraint = 'a';  // 'a' k/n, 'b' sample size, 'c' next branching, 's' structure
  std::string message;
};

/// Empty iff the schedule is admissible. Empirical mode checks only the
/// structure and constraint (a).
std::vector<Violation> validate_schedule(const Schedule& schedule);

class ScheduleOverflowError : public std::overflow_error {
 public:
  ScheduleOverflowError(std::size_t stage, const std::string& what)
      : std::overflow_error(what), stage_(stage) {}
  std::size_t stage() const { return stage_; }

 private:
  std::size_t stage_;
};

class ScheduleValidationError : public std::runtime_error {
 public:
  explicit ScheduleValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Smallest n satisfying constraints (a) and (b) at `stage`, given m_0..m_stage.
std::uint64_t minimal_sample_size(const Schedule& schedule, std::size_t stage);
/// Smallest m_{stage+1} satisfying constraint (c) (and at least 2).
std::uint64_t minimal_next_branching(const Schedule& schedule, std::size_t stage);

/// Minimal ProofBound schedule m_0, n_0, m_1, n_1, ..., m_depth, n_depth.
/// Throws ScheduleOverflowError naming the first stage whose value does not
/// fit in 63 bits.
Schedule derive_schedule(const std::string& gamma_rule, const std::string& delta_rule,
                         KRule k_rule, std::size_t depth);

/// Appends the minimal m_{i+1} after the last stage i when it is missing.
void complete_next_branching(Schedule& schedule);

/// User-supplied sequences in Empirical mode; throws ScheduleValidationError
/// when constraint (a) or the structure fails.
Schedule empirical_schedule(const std::string& gamma_rule, const std::string& delta_rule,
                            KRule k_rule, std::vector<std::uint64_t> m,
                            std::vector<std::uint64_t> n);

}  // namespace knnlab
