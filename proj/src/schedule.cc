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

#include "knnlab/schedule.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace knnlab {

namespace {

// Largest value accepted for m_i or n_i.
constexpr long double kLimit = 9.2e18L;

std::uint64_t ceil_sqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return r;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

long double product_m(const Schedule& s, std::size_t stage) {
  long double p = 1;
  for (std::size_t j = 0; j <= stage; ++j) p *= static_cast<long double>(s.branching(j));
  return p;
}

long double sum_log_m(const Schedule& s, std::size_t stage) {
  long double sum = 0;
  for (std::size_t j = 0; j <= stage; ++j) sum += std::log(static_cast<long double>(s.branching(j)));
  return sum;
}

bool kn_holds(const Schedule& s, std::size_t stage, std::uint64_t n) {
  const long double k = static_cast<long double>(k_of(s.k_rule, n));
  return k * 2 * product_m(s, stage) < static_cast<long double>(s.gamma(stage)) * n;
}

std::uint64_t checked(long double value, std::size_t stage, const char* what) {
  if (!(value < kLimit)) {
    std::ostringstream msg;
    msg << what << " at stage " << stage << " exceeds the 64-bit range (" << value << ")";
    throw ScheduleOverflowError(stage, msg.str());
  }
  return static_cast<std::uint64_t>(value);
}

}  // namespace

std::uint64_t k_of(KRule rule, std::uint64_t n) {
  if (n == 0) throw std::domain_error("sample size must be positive");
  switch (rule) {
    case KRule::Log2Ceil:
      return std::max<std::uint64_t>(1, std::bit_width(n - 1));
    case KRule::SqrtCeil:
      return ceil_sqrt(n);
    case KRule::Const1:
      return 1;
  }
  return 1;
}

std::string to_string(KRule rule) {
  switch (rule) {
    case KRule::Log2Ceil:
      return "log2ceil";
    case KRule::SqrtCeil:
      return "sqrtceil";
    case KRule::Const1:
      return "const1";
  }
  return "?";
}

KRule parse_k_rule(const std::string& text) {
  if (text == "log2ceil") return KRule::Log2Ceil;
  if (text == "sqrtceil") return KRule::SqrtCeil;
  if (text == "const1" || text == "const") return KRule::Const1;
  throw std::invalid_argument("unknown k rule: " + text);
}

std::string to_string(ScheduleMode mode) {
  return mode == ScheduleMode::ProofBound ? "proof" : "empirical";
}

ScheduleMode parse_mode(const std::string& text) {
  if (text == "proof") return ScheduleMode::ProofBound;
  if (text == "empirical") return ScheduleMode::Empirical;
  throw std::invalid_argument("unknown schedule mode: " + text);
}

SequenceRule::SequenceRule(Family family, const std::string& text)
    : family_(family), text_(text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1 && parts[0] == "dyadic") return;
  dyadic_ = false;
  if (family == Family::Gamma && parts.size() == 2 && parts[0] == "geometric") {
    ratio_ = std::stod(parts[1]);
    scale_ = (1.0 - ratio_) / 2.0;
  } else if (family == Family::Delta && parts.size() == 3 && parts[0] == "geometric") {
    scale_ = std::stod(parts[1]);
    ratio_ = std::stod(parts[2]);
    if (!(scale_ > 0.0)) throw std::invalid_argument("delta scale must be positive");
  } else {
    throw std::invalid_argument("unknown sequence rule: " + text);
  }
  if (!(ratio_ > 0.0 && ratio_ < 1.0)) {
    throw std::invalid_argument("geometric ratio must lie in (0, 1): " + text);
  }
}

double SequenceRule::operator()(std::size_t i) const {
  if (dyadic_) {
    const int shift = family_ == Family::Gamma ? 2 : 3;
    return std::ldexp(1.0, -static_cast<int>(i) - shift);
  }
  return scale_ * std::pow(ratio_, static_cast<double>(i));
}

double Schedule::gamma(std::size_t i) const {
  return SequenceRule(SequenceRule::Family::Gamma, gamma_rule)(i);
}

double Schedule::delta(std::size_t i) const {
  return SequenceRule(SequenceRule::Family::Delta, delta_rule)(i);
}

std::uint64_t Schedule::branching(std::size_t i) const {
  return i < m.size() ? m[i] : kTailBranching;
}

std::uint64_t Schedule::k_at(std::size_t stage) const {
  if (stage >= n.size()) throw std::out_of_range("no sample size scheduled for this stage");
  return k_of(k_rule, n[stage]);
}

std::vector<StageBounds> schedule_bounds(const Schedule& s) {
  std::vector<StageBounds> out;
  for (std::size_t i = 0; i < s.n.size(); ++i) {
    StageBounds b;
    b.stage = i;
    b.n = s.n[i];
    b.k = k_of(s.k_rule, s.n[i]);
    b.product_m = product_m(s, i);
    const long double gamma = s.gamma(i);
    const long double delta = s.delta(i);
    b.kn_limit = gamma / (2 * b.product_m);
    b.n_bound = 2 * b.product_m * b.product_m / (gamma * gamma) * (sum_log_m(s, i) - std::log(delta));
    b.has_next_m = i + 1 < s.m.size();
    b.m_next_bound = 2 * static_cast<long double>(b.n) /
                     (static_cast<long double>(b.k) * delta * b.product_m);
    out.push_back(b);
  }
  return out;
}

std::vector<Violation> validate_schedule(const Schedule& s) {
  std::vector<Violation> out;
  auto fail = [&](std::size_t stage, char c, std::string msg) {
    out.push_back({stage, c, std::move(msg)});
  };
  if (s.m.empty() || s.m[0] != 1) fail(0, 's', "m_0 must equal 1");
  for (std::size_t i = 1; i < s.m.size(); ++i) {
    if (s.m[i] < 2) fail(i, 's', "m_" + std::to_string(i) + " must be at least 2");
  }
  if (s.n.size() > s.m.size()) fail(s.m.size(), 's', "sample size scheduled without branching");
  for (std::size_t i = 0; i < s.n.size(); ++i) {
    if (s.n[i] == 0) fail(i, 's', "n_" + std::to_string(i) + " must be positive");
  }
  if (!out.empty()) return out;

  for (const StageBounds& b : schedule_bounds(s)) {
    const long double kn = static_cast<long double>(b.k) / static_cast<long double>(b.n);
    if (!kn_holds(s, b.stage, b.n)) {
      std::ostringstream msg;
      msg << "k/n = " << kn << " is not below gamma/(2 prod m) = " << b.kn_limit;
      fail(b.stage, 'a', msg.str());
    }
    if (s.mode != ScheduleMode::ProofBound) continue;
    if (!(static_cast<long double>(b.n) > b.n_bound)) {
      std::ostringstream msg;
      msg << "n = " << b.n << " does not exceed the concentration bound " << b.n_bound;
      fail(b.stage, 'b', msg.str());
    }
    if (b.has_next_m && !(static_cast<long double>(s.m[b.stage + 1]) > b.m_next_bound)) {
      std::ostringstream msg;
      msg << "m_" << b.stage + 1 << " = " << s.m[b.stage + 1] << " does not exceed "
          << b.m_next_bound;
      fail(b.stage, 'c', msg.str());
    }
  }
  return out;
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream msg;
  msg << "schedule validation failed:";
  for (const auto& v : violations) {
    msg << " [stage " << v.stage << " (" << v.constraint << ") " << v.message << "]";
  }
  return msg.str();
}

}  // namespace

ScheduleValidationError::ScheduleValidationError(std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

std::uint64_t minimal_sample_size(const Schedule& s, std::size_t stage) {
  const long double p = product_m(s, stage);
  const long double gamma = s.gamma(stage);
  long double bound = 0;
  if (s.mode == ScheduleMode::ProofBound) {
    bound = 2 * p * p / (gamma * gamma) * (sum_log_m(s, stage) - std::log((long double)s.delta(stage)));
  }
  std::uint64_t n = checked(std::max<long double>(0, std::floor(bound)) + 1, stage, "n");
  // Constraint (a): k(n) < gamma n / (2 prod m). Jump to the fixed point.
  const long double limit = gamma / (2 * p);
  while (!kn_holds(s, stage, n)) {
    const long double k = static_cast<long double>(k_of(s.k_rule, n));
    const std::uint64_t jump = checked(std::floor(k / limit) + 1, stage, "n");
    n = std::max(n + 1, jump);
  }
  return n;
}

std::uint64_t minimal_next_branching(const Schedule& s, std::size_t stage) {
  if (stage >= s.n.size()) throw std::out_of_range("stage has no sample size");
  const long double bound = 2 * static_cast<long double>(s.n[stage]) /
                            (static_cast<long double>(s.k_at(stage)) * s.delta(stage) *
                             product_m(s, stage));
  return std::max<std::uint64_t>(2, checked(std::floor(bound) + 1, stage + 1, "m"));
}

Schedule derive_schedule(const std::string& gamma_rule, const std::string& delta_rule,
                         KRule k_rule, std::size_t depth) {
  Schedule s;
  s.gamma_rule = gamma_rule;
  s.delta_rule = delta_rule;
  s.k_rule = k_rule;
  s.mode = ScheduleMode::ProofBound;
  s.max_depth = depth;
  s.m = {1};
  s.n.clear();
  for (std::size_t i = 0; i <= depth; ++i) {
    if (i > 0) s.m.push_back(minimal_next_branching(s, i - 1));
    s.n.push_back(minimal_sample_size(s, i));
  }
  return s;
}

void complete_next_branching(Schedule& s) {
  if (s.n.empty() || s.m.size() > s.n.size()) return;
  s.m.push_back(minimal_next_branching(s, s.n.size() - 1));
}

Schedule empirical_schedule(const std::string& gamma_rule, const std::string& delta_rule,
                            KRule k_rule, std::vector<std::uint64_t> m,
                            std::vector<std::uint64_t> n) {
  Schedule s;
  s.gamma_rule = gamma_rule;
  s.delta_rule = delta_rule;
  s.k_rule = k_rule;
  s.mode = ScheduleMode::Empirical;
  s.m = std::move(m);
  s.n = std::move(n);
  s.max_depth = s.m.empty() ? 0 : s.m.size() - 1;
  auto violations = validate_schedule(s);
  if (!violations.empty()) throw ScheduleValidationError(std::move(violations));
  return s;
}

}  // namespace knnlab
