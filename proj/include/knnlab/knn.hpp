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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "knnlab/metric.hpp"
#include "knnlab/random.hpp"

namespace knnlab {

using Label = std::uint8_t;

/// How boundary points at distance exactly r_k are chosen.
enum class TieStrategy {
  UniformRandom,  // smaller tie key wins
  FirstIndex,     // smaller sample index wins
};

/// Labelled sample with one auxiliary tie key per point.
struct LabelledSample {
  std::vector<Point> points;
  std::vector<Label> labels;
  std::vector<double> tie_keys;

  std::size_t size() const { return points.size(); }
};

/// Throws std::invalid_argument on length mismatch, empty sample,
/// non-binary labels or repeated tie keys.
void validate_sample(const LabelledSample& sample);

/// Smallest r with at least k sample points in the closed ball B(x, r).
double r_k(const LabelledSample& sample, const Point& x, std::size_t k, const MetricSpace& space);

/// Indices of the k selected neighbours of x, nearest first. Points strictly
/// inside r_k are all taken; boundary slots go to the preferred indices.
std::vector<std::size_t> knn_select(const LabelledSample& sample, const Point& x, std::size_t k,
                                    TieStrategy strategy, const MetricSpace& space);

/// Majority label with an even split resolved as 1.
Label majority_vote(std::size_t ones, std::size_t k);

Label knn_predict(const LabelledSample& sample, const Point& x, std::size_t k,
                  TieStrategy strategy, const MetricSpace& space);

double empirical_error(std::span<const Label> predictions, std::span<const Label> truths);

/// Monte Carlo figure with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Bernoulli proportion estimate with stderr sqrt(p(1-p)/N). When every or
/// no trial hits, p in the stderr is moved 1/(2N) inside (0, 1) so the
/// reported stderr stays positive.
Estimate proportion(std::size_t hits, std::size_t trials);

/// A learning problem given by the law of X and the regression function.
/// Labels are generated through the coupling Y = 1{Z <= eta(X)}, Z ~ U[0,1].
struct LearningProblem {
  std::function<Point(Rng&)> sample_point;
  std::function<double(const Point&)> eta;
  std::optional<double> bayes_error;
};

Label coupled_label(double eta, double z);

/// n labelled draws with fresh uniform tie keys.
LabelledSample draw_labelled_sample(const LearningProblem& problem, std::size_t n, Rng& rng);

/// Exact value when the problem carries one (stderr 0), otherwise the Monte
/// Carlo mean of min(eta, 1 - eta).
Estimate bayes_error(const LearningProblem& problem, std::size_t mc_samples, std::uint64_t seed);

/// Misclassification rate of the k-NN rule trained on one n-sample,
/// measured on `test_points` fresh labelled draws.
Estimate knn_error_estimate(const LearningProblem& problem, std::size_t n, std::size_t k,
                            std::size_t test_points, const MetricSpace& space, std::uint64_t seed,
                            TieStrategy strategy = TieStrategy::UniformRandom);

Estimate one_nn_error_estimate(const LearningProblem& problem, std::size_t n,
                               std::size_t test_points, const MetricSpace& space,
                               std::uint64_t seed);

}  // namespace knnlab
