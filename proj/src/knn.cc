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

#include "knnlab/knn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "knnlab/parallel.hpp"

namespace knnlab {

namespace {

struct Candidate {
  double dist;
  double key;
  std::size_t index;
};

void check_k(const LabelledSample& sample, std::size_t k) {
  if (k == 0 || k > sample.size()) {
    throw std::domain_error("k must satisfy 1 <= k <= n");
  }
}

// Fills `out` with the k nearest candidates (unordered beyond position k).
void select_candidates(const LabelledSample& sample, const Point& x, std::size_t k,
                       TieStrategy strategy, const MetricSpace& space,
                       std::vector<Candidate>& out) {
  check_k(sample, k);
  out.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double key =
        strategy == TieStrategy::UniformRandom ? sample.tie_keys[i] : static_cast<double>(i);
    out[i] = {distance(space, x, sample.points[i]), key, i};
  }
  auto less = [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.key != b.key) return a.key < b.key;
    return a.index < b.index;
  };
  std::nth_element(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k - 1), out.end(), less);
  std::sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), less);
}

}  // namespace

void validate_sample(const LabelledSample& sample) {
  if (sample.points.empty()) throw std::invalid_argument("sample is empty");
  if (sample.labels.size() != sample.points.size() ||
      sample.tie_keys.size() != sample.points.size()) {
    throw std::invalid_argument("points, labels and tie keys differ in length");
  }
  for (Label y : sample.labels) {
    if (y > 1) throw std::invalid_argument("labels must be 0 or 1");
  }
  std::unordered_set<double> seen(sample.tie_keys.begin(), sample.tie_keys.end());
  if (seen.size() != sample.tie_keys.size()) {
    throw std::invalid_argument("tie keys must be pairwise distinct");
  }
}

double r_k(const LabelledSample& sample, const Point& x, std::size_t k, const MetricSpace& space) {
  check_k(sample, k);
  std::vector<double> dists(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    dists[i] = distance(space, x, sample.points[i]);
  }
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k - 1), dists.end());
  return dists[k - 1];
}

std::vector<std::size_t> knn_select(const LabelledSample& sample, const Point& x, std::size_t k,
                                    TieStrategy strategy, const MetricSpace& space) {
  std::vector<Candidate> candidates;
  select_candidates(sample, x, k, strategy, space, candidates);
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = candidates[i].index;
  return out;
}

Label majority_vote(std::size_t ones, std::size_t k) { return 2 * ones >= k ? 1 : 0; }

Label knn_predict(const LabelledSample& sample, const Point& x, std::size_t k,
                  TieStrategy strategy, const MetricSpace& space) {
  thread_local std::vector<Candidate> candidates;
  select_candidates(sample, x, k, strategy, space, candidates);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < k; ++i) ones += sample.labels[candidates[i].index];
  return majority_vote(ones, k);
}

double empirical_error(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("prediction and truth sequences differ in length");
  }
  if (predictions.empty()) throw std::invalid_argument("empty prediction sequence");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) wrong += predictions[i] != truths[i];
  return static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

Estimate proportion(std::size_t hits, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("proportion over zero trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double q = std::clamp(p, 0.5 / n, 1.0 - 0.5 / n);
  return {p, std::sqrt(q * (1.0 - q) / n)};
}

Label coupled_label(double eta, double z) { return z <= eta ? 1 : 0; }

LabelledSample draw_labelled_sample(const LearningProblem& problem, std::size_t n, Rng& rng) {
  LabelledSample sample;
  sample.points.reserve(n);
  sample.labels.reserve(n);
  sample.tie_keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point p = problem.sample_point(rng);
    const double z = uniform01(rng);
    sample.labels.push_back(coupled_label(problem.eta(p), z));
    sample.points.push_back(std::move(p));
    sample.tie_keys.push_back(uniform01(rng));
  }
  return sample;
}

Estimate bayes_error(const LearningProblem& problem, std::size_t mc_samples, std::uint64_t seed) {
  if (problem.bayes_error) return {*problem.bayes_error, 0.0};
  if (mc_samples == 0) throw std::invalid_argument("mc_samples must be positive");
  Rng rng = make_rng(seed, 0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    const double e = problem.eta(problem.sample_point(rng));
    const double v = std::min(e, 1.0 - e);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(mc_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

Estimate knn_error_estimate(const LearningProblem& problem, std::size_t n, std::size_t k,
                            std::size_t test_points, const MetricSpace& space, std::uint64_t seed,
                            TieStrategy strategy) {
  Rng train_rng = make_rng(seed, 1);
  const LabelledSample sample = draw_labelled_sample(problem, n, train_rng);
  std::atomic<std::size_t> wrong{0};
  parallel_for(test_points, [&](std::size_t i) {
    Rng rng = make_rng(seed, 1000 + i);
    const Point x = problem.sample_point(rng);
    const Label y = coupled_label(problem.eta(x), uniform01(rng));
    if (knn_predict(sample, x, k, strategy, space) != y) wrong.fetch_add(1);
  });
  return proportion(wrong.load(), test_points);
}

Estimate one_nn_error_estimate(const LearningProblem& problem, std::size_t n,
                               std::size_t test_points, const MetricSpace& space,
                               std::uint64_t seed) {
  return knn_error_estimate(problem, n, 1, test_points, space, seed);
}

}  // namespace knnlab
