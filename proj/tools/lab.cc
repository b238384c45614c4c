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

// Command-line front end for the experiment runners.
//
//   lab consistency|baseline|coverhart|dimension|schedule
//       [--seed S] [--config FILE] [--out PATH] [--mode proof|empirical]
//       [--stages A..B] [--n N] [--k-rule R] [--tests T]
//
// Exit codes: 0 success, 1 usage or runtime error, 2 schedule validation
// failure, 3 overflow while deriving a schedule.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "knnlab/experiments.hpp"

namespace {

using namespace knnlab;

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

std::string csv(const std::vector<StageReport>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

int run(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::Consistency:
      emit(c.output_path, csv(run_consistency(c)));
      break;
    case Experiment::Baseline:
      emit(c.output_path, csv(run_baseline(c)));
      break;
    case Experiment::CoverHart: {
      const auto rows = run_coverhart(c);
      emit(c.output_path, csv(coverhart_rows(rows)));
      for (const auto& r : rows) {
        std::cerr << std::setprecision(4) << r.name << ": n=" << r.n << " error=" << r.error.value
                  << " +- " << r.error.std_error << " bayes=" << r.bayes
                  << " 2*eta*(1-eta)=" << r.asymptotic;
        if (r.bayes > 0.0) std::cerr << " ratio=" << r.ratio();
        std::cerr << '\n';
      }
      break;
    }
    case Experiment::Dimension:
      emit(c.output_path, dimension_report_to_json(run_dimension_suite(c)).dump(2) + "\n");
      break;
    case Experiment::Schedule:
      emit(c.output_path, print_schedule(c).dump(2) + "\n");
      break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-NN consistency lab"};
  app.require_subcommand(1, 1);

  std::uint64_t seed = 0;
  std::string config_path, out_path, mode, stages, k_rule;
  std::uint64_t n_override = 0;
  std::size_t tests = 0;
  for (const char* name : {"consistency", "baseline", "coverhart", "dimension", "schedule"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output file (stdout when absent)");
    sub->add_option("--mode", mode, "proof or empirical")->check(CLI::IsMember({"proof", "empirical"}));
    sub->add_option("--stages", stages, "stage range A..B");
    sub->add_option("--n", n_override, "sample size override");
    sub->add_option("--k-rule", k_rule, "log2ceil, sqrtceil or const1");
    sub->add_option("--tests", tests, "test points per stage");
  }
  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    ExperimentConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      c = config_from_json(Json::parse(in));
    }
    c.experiment = parse_experiment(sub->get_name());
    if (sub->count("--seed")) c.seed = seed;
    if (sub->count("--out")) c.output_path = out_path;
    if (sub->count("--mode")) c.mode = parse_mode(mode);
    if (sub->count("--stages")) c.stages = parse_stage_range(stages);
    if (sub->count("--n")) c.n_override = n_override;
    if (sub->count("--k-rule")) c.k_rule = parse_k_rule(k_rule);
    if (sub->count("--tests")) c.test_count = tests;
    return run(c);
  } catch (const ScheduleValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const ScheduleOverflowError& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
