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

#include "knnlab/experiments.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "knnlab/simulator.hpp"

namespace knnlab {

namespace {

const std::vector<std::pair<Experiment, std::string>> kExperimentNames = {
    {Experiment::Consistency, "consistency"}, {Experiment::Baseline, "baseline"},
    {Experiment::CoverHart, "coverhart"},     {Experiment::Dimension, "dimension"},
    {Experiment::Schedule, "schedule"},
};

std::size_t parse_index(const std::string& text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument("bad stage index: '" + text + "'");
  }
  return std::stoull(text);
}

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

bool coin(Rng& rng) { return std::bernoulli_distribution(0.5)(rng); }

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, name] : kExperimentNames) {
    if (k == e) return name;
  }
  return "?";
}

Experiment parse_experiment(const std::string& text) {
  for (const auto& [k, name] : kExperimentNames) {
    if (name == text) return k;
  }
  throw std::invalid_argument("unknown experiment: " + text);
}

StageRange parse_stage_range(const std::string& text) {
  StageRange r;
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    r.first = r.last = parse_index(text);
  } else {
    r.first = parse_index(text.substr(0, dots));
    r.last = parse_index(text.substr(dots + 2));
  }
  if (r.first > r.last) throw std::invalid_argument("empty stage range: " + text);
  return r;
}

ExperimentConfig config_from_json(const Json& j) {
  static const std::vector<std::string> known = {
      "experiment", "seed",       "stages", "n_override", "k_rule",           "test_count",
      "mode",       "output_path", "gamma_rule", "delta_rule", "m", "n", "truncation_margin"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  ExperimentConfig c;
  if (j.contains("experiment")) c.experiment = parse_experiment(j.at("experiment").get<std::string>());
  c.seed = j.value("seed", c.seed);
  if (j.contains("stages")) {
    const Json& s = j.at("stages");
    if (s.is_string()) {
      c.stages = parse_stage_range(s.get<std::string>());
    } else {
      c.stages = {s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()};
      if (c.stages.first > c.stages.last) throw std::invalid_argument("empty stage range");
    }
  }
  if (j.contains("n_override") && !j.at("n_override").is_null()) {
    c.n_override = j.at("n_override").get<std::uint64_t>();
  }
  if (j.contains("k_rule")) c.k_rule = parse_k_rule(j.at("k_rule").get<std::string>());
  c.test_count = j.value("test_count", c.test_count);
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  c.output_path = j.value("output_path", c.output_path);
  c.gamma_rule = j.value("gamma_rule", c.gamma_rule);
  c.delta_rule = j.value("delta_rule", c.delta_rule);
  if (j.contains("m")) c.m = j.at("m").get<std::vector<std::uint64_t>>();
  if (j.contains("n")) c.n = j.at("n").get<std::vector<std::uint64_t>>();
  c.truncation_margin = j.value("truncation_margin", c.truncation_margin);
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j = {{"experiment", to_string(c.experiment)},
            {"seed", c.seed},
            {"stages", std::to_string(c.stages.first) + ".." + std::to_string(c.stages.last)},
            {"test_count", c.test_count},
            {"output_path", c.output_path},
            {"gamma_rule", c.gamma_rule},
            {"delta_rule", c.delta_rule},
            {"m", c.m},
            {"n", c.n},
            {"truncation_margin", c.truncation_margin}};
  if (c.n_override) j["n_override"] = *c.n_override;
  if (c.k_rule) j["k_rule"] = to_string(*c.k_rule);
  if (c.mode) j["mode"] = to_string(*c.mode);
  return j;
}

void write_csv(std::ostream& out, const std::vector<StageReport>& rows) {
  out << kCsvHeader << '\n';
  out << std::setprecision(10);
  for (const StageReport& r : rows) {
    out << r.stage << ',' << r.n << ',' << r.k << ',';
    write_optional(out, r.frac_pred1_nonatomic);
    out << ',' << r.error << ',' << r.bayes << ',';
    write_optional(out, r.delta);
    out << ',' << r.std_error << '\n';
  }
}

// ---------------------------------------------------------------------------

ScheduleMode effective_mode(const ExperimentConfig& c) {
  if (c.mode) return *c.mode;
  return c.experiment == Experiment::Schedule ? ScheduleMode::ProofBound : ScheduleMode::Empirical;
}

Schedule config_schedule(const ExperimentConfig& c) {
  const ScheduleMode mode = effective_mode(c);
  const KRule k_rule = c.k_rule.value_or(KRule::Log2Ceil);
  Schedule s;
  if (!c.m.empty() && !c.n.empty()) {
    s.gamma_rule = c.gamma_rule;
    s.delta_rule = c.delta_rule;
    s.k_rule = k_rule;
    s.mode = mode;
    s.m = c.m;
    s.n = c.n;
    s.max_depth = s.m.size() - 1;
    auto violations = validate_schedule(s);
    if (!violations.empty()) throw ScheduleValidationError(std::move(violations));
  } else if (mode == ScheduleMode::ProofBound) {
    s = derive_schedule(c.gamma_rule, c.delta_rule, k_rule, c.stages.last);
    complete_next_branching(s);
  } else {
    s = empirical_schedule(c.gamma_rule, c.delta_rule, k_rule, {1, 512, 16384}, {512, 1000000});
  }
  if (c.stages.last >= s.n.size()) {
    throw ScheduleValidationError(
        {{c.stages.last, 's', "no sample size scheduled for stage " + std::to_string(c.stages.last)}});
  }
  return s;
}

std::vector<StageReport> run_consistency(const ExperimentConfig& c) {
  if (c.test_count < 100) throw std::invalid_argument("test_count must be at least 100");
  const Schedule s = config_schedule(c);
  const AdversarialProblem problem(s, c.stages.last + std::max<std::size_t>(1, c.truncation_margin));
  std::vector<StageReport> rows;
  for (std::size_t i = c.stages.first; i <= c.stages.last; ++i) {
    const std::uint64_t n = c.n_override.value_or(s.n[i]);
    const std::uint64_t k = k_of(s.k_rule, n);
    const StageSimResult sim =
        structured_stage_sim(problem, i, n, k, c.test_count, derive_seed(c.seed, 0xc0 + i));
    StageReport r;
    r.stage = i;
    r.n = n;
    r.k = k;
    r.frac_pred1_nonatomic = sim.nonatomic_pred1.value;
    r.error = sim.error.value;
    r.bayes = 0.0;
    r.delta = s.delta(i);
    r.std_error = sim.nonatomic_pred1.std_error;
    rows.push_back(r);
  }
  return rows;
}

std::vector<StageReport> run_baseline(const ExperimentConfig& c) {
  if (c.test_count < 100) throw std::invalid_argument("test_count must be at least 100");
  LearningProblem problem;
  problem.sample_point = [](Rng& rng) -> Point { return Real{uniform01(rng)}; };
  problem.eta = [](const Point& p) { return std::get<Real>(p).value > 0.5 ? 1.0 : 0.0; };
  problem.bayes_error = 0.0;
  const KRule rule = c.k_rule.value_or(KRule::SqrtCeil);
  std::vector<std::uint64_t> sizes{100, 1000, 10000};
  if (c.n_override) sizes = {*c.n_override};
  std::vector<StageReport> rows;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    StageReport r;
    r.stage = i;
    r.n = sizes[i];
    r.k = k_of(rule, r.n);
    const Estimate e = knn_error_estimate(problem, r.n, r.k, c.test_count, EuclideanLine{},
                                          derive_seed(c.seed, 0xba5e + i));
    r.error = e.value;
    r.std_error = e.std_error;
    rows.push_back(r);
  }
  return rows;
}

std::vector<CoverHartRow> run_coverhart(const ExperimentConfig& c) {
  if (c.test_count < 100) throw std::invalid_argument("test_count must be at least 100");
  auto square = [](Rng& rng) -> Point { return VecD{{uniform01(rng), uniform01(rng)}}; };
  auto first = [](const Point& p) { return std::get<VecD>(p).coords[0]; };

  struct Case {
    std::string name;
    std::uint64_t n;
    std::function<double(const Point&)> eta;
    double bayes;
    double asymptotic;
  };
  const std::vector<Case> cases = {
      {"constant", 20000, [](const Point&) { return 0.3; }, 0.3, 2 * 0.3 * 0.7},
      {"halfplane", 10000, [=](const Point& p) { return first(p) > 0.5 ? 1.0 : 0.0; }, 0.0, 0.0},
      // E min(x, 1-x) = 1/4 and E 2x(1-x) = 1/3 for x uniform.
      {"linear", 10000, first, 0.25, 1.0 / 3.0},
  };
  std::vector<CoverHartRow> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    LearningProblem problem;
    problem.sample_point = square;
    problem.eta = cases[i].eta;
    problem.bayes_error = cases[i].bayes;
    CoverHartRow row;
    row.name = cases[i].name;
    row.n = c.n_override.value_or(cases[i].n);
    row.error = one_nn_error_estimate(problem, row.n, c.test_count, EuclideanD{2},
                                      derive_seed(c.seed, 0xc4 + i));
    row.bayes = cases[i].bayes;
    row.asymptotic = cases[i].asymptotic;
    out.push_back(row);
  }
  return out;
}

std::vector<StageReport> coverhart_rows(const std::vector<CoverHartRow>& rows) {
  std::vector<StageReport> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    StageReport r;
    r.stage = i;
    r.n = rows[i].n;
    r.k = 1;
    r.error = rows[i].error.value;
    r.bayes = rows[i].bayes;
    r.std_error = rows[i].error.std_error;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

BallFamily random_interval_family(Rng& rng, std::size_t size) {
  BallFamily f;
  f.space = EuclideanLine{};
  for (std::size_t i = 0; i < size; ++i) {
    f.balls.push_back({Real{uniform01(rng)}, uniform(rng, 0.01, 0.2), coin(rng)});
  }
  return f;
}

BallFamily random_disconnected_interval_family(Rng& rng, std::size_t size) {
  BallFamily f;
  f.space = EuclideanLine{};
  for (std::size_t attempt = 0; f.size() < size && attempt < 100 * size; ++attempt) {
    Ball b{Real{uniform01(rng)}, uniform(rng, 0.01, 0.2), coin(rng)};
    bool ok = true;
    for (const Ball& o : f.balls) {
      if (contains(o, b.center, f.space) || contains(b, o.center, f.space)) {
        ok = false;
        break;
      }
    }
    if (ok) f.balls.push_back(std::move(b));
  }
  return f;
}

BallFamily random_plane_family(Rng& rng, std::size_t size) {
  BallFamily f;
  f.space = EuclideanD{2};
  for (std::size_t i = 0; i < size; ++i) {
    f.balls.push_back({VecD{{uniform01(rng), uniform01(rng)}}, uniform(rng, 0.02, 0.3), coin(rng)});
  }
  return f;
}

Word random_word(Rng& rng, std::uint32_t alphabet, std::size_t max_len) {
  Word w;
  const auto len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  std::uniform_int_distribution<std::uint32_t> letter(1, alphabet);
  for (std::size_t i = 0; i < len; ++i) w.letters.push_back(letter(rng));
  return w;
}

BallFamily random_word_family(Rng& rng, std::size_t size, std::uint32_t alphabet,
                              std::size_t max_len) {
  BallFamily f;
  f.space = UltrametricWords{alphabet};
  for (std::size_t i = 0; i < size; ++i) {
    // Dyadic radii hit the distance values exactly, so open and closed differ.
    const int e = std::uniform_int_distribution<int>(0, static_cast<int>(max_len))(rng);
    const double r = coin(rng) ? std::ldexp(1.0, -e) : uniform(rng, 0.01, 1.0);
    f.balls.push_back({random_word(rng, alphabet, max_len), r, coin(rng)});
  }
  return f;
}

std::size_t ultrametric_multiplicity_exact(const BallFamily& family) {
  if (!std::holds_alternative<UltrametricWords>(family.space)) {
    throw KindMismatchError("ultrametric multiplicity needs a word space");
  }
  // Balls through a common point form a chain; the centre of the smallest
  // (open before closed at equal radius) lies in all of them.
  std::size_t best = 0;
  for (const Ball& b : family.balls) {
    std::size_t count = 0;
    for (const Ball& o : family.balls) count += contains(o, b.center, family.space);
    best = std::max(best, count);
  }
  return best;
}

std::vector<Point> heisenberg_base_grid() {
  std::vector<Point> grid;
  for (int i = -4; i <= 4; ++i) {
    for (int j = -4; j <= 4; ++j) {
      for (int l = -4; l <= 4; ++l) grid.push_back(HPoint{i / 4.0, j / 4.0, l / 4.0});
    }
  }
  return grid;
}

DimensionReport run_dimension_suite(const ExperimentConfig& c) {
  DimensionReport rep;

  rep.plane.kind = CertificateKind::NagataWitness;
  rep.plane.family = five_ball_plane_family();
  rep.plane.witness_point = VecD{{0.0, 0.0}};
  const Point origin = rep.plane.witness_point;
  const auto probes = default_probes(rep.plane.family, std::span<const Point>(&origin, 1));
  rep.plane.multiplicity = multiplicity_over_probes(rep.plane.family, probes).multiplicity;
  rep.plane_verified = verify_certificate(rep.plane);

  Rng rng = make_rng(c.seed, 0xd1);
  rep.interval_families = 1000;
  for (std::size_t i = 0; i < rep.interval_families; ++i) {
    const auto size = std::uniform_int_distribution<std::size_t>(2, 30)(rng);
    const BallFamily f = random_disconnected_interval_family(rng, size);
    rep.interval_max_multiplicity = std::max(rep.interval_max_multiplicity, interval_multiplicity_exact(f));
  }

  rep.ultrametric_families = 1000;
  for (std::size_t i = 0; i < rep.ultrametric_families; ++i) {
    const auto size = std::uniform_int_distribution<std::size_t>(2, 30)(rng);
    const BallFamily sub = greedy_covering_subfamily(random_word_family(rng, size, 3, 6));
    rep.ultrametric_max_multiplicity =
        std::max(rep.ultrametric_max_multiplicity, ultrametric_multiplicity_exact(sub));
  }

  IdSource ids;
  for (std::size_t m = 1; m <= 256; ++m) {
    const DimensionCertificate cert = nagata_witness_sparse(m, SparsePoint{}, 1.0, ids);
    ++rep.sparse_checked;
    if (verify_certificate(cert) && cert.multiplicity == m) ++rep.sparse_verified;
    if (std::has_single_bit(m) && m <= 16) rep.sparse_samples.push_back(cert);
  }

  const std::vector<Point> grid = heisenberg_base_grid();
  for (double r : {1.0, 0.5, 0.25}) {
    std::vector<Point> scaled;
    scaled.reserve(grid.size());
    for (const Point& p : grid) scaled.push_back(h_dilate(r, std::get<HPoint>(p)));
    DoublingRow row;
    row.radius = r;
    row.grid_points = scaled.size();
    row.separated = doubling_cover_greedy(scaled, HPoint{}, r, Heisenberg{});
    rep.doubling.push_back(row);
  }
  return rep;
}

Json dimension_report_to_json(const DimensionReport& r) {
  Json certificates = Json::array();
  certificates.push_back(certificate_to_json(r.plane));
  for (const auto& cert : r.sparse_samples) certificates.push_back(certificate_to_json(cert));
  Json doubling = Json::array();
  for (const DoublingRow& row : r.doubling) {
    doubling.push_back({{"radius", row.radius}, {"grid_points", row.grid_points},
                        {"separated", row.separated}});
  }
  return {{"certificates", std::move(certificates)},
          {"plane_verified", r.plane_verified},
          {"interval_sweep", {{"families", r.interval_families},
                              {"max_multiplicity", r.interval_max_multiplicity}}},
          {"ultrametric", {{"families", r.ultrametric_families},
                           {"max_multiplicity", r.ultrametric_max_multiplicity}}},
          {"sparse_witnesses", {{"checked", r.sparse_checked}, {"verified", r.sparse_verified}}},
          {"heisenberg_doubling", std::move(doubling)}};
}

Json print_schedule(const ExperimentConfig& c) {
  const Schedule s = config_schedule(c);
  return {{"schedule", schedule_to_json(s)}, {"bounds", bounds_to_json(s)}};
}

}  // namespace knnlab
