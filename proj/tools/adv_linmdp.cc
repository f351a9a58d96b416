// Copyright 2026 The adv-linmdp Authors.
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

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "advlin/errors.h"
#include "advlin/harness.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int run_checked(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const advlin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const advlin::InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const advlin::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy optimization for adversarial linear MDPs"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool log_realized = false;
  auto* run = app.add_subcommand("run", "Run one config, one trace per seed");
  run->add_option("--config", config_path, "JSON config")->required();
  run->add_option("--seed", seed, "Run only this seed");
  run->add_option("--out", out_dir, "Output directory (default: config output)");
  run->add_flag("--log-realized", log_realized,
                "Add a realized_loss column to the traces");

  std::string k_grid;
  auto* sweep = app.add_subcommand("sweep", "Final regret over a grid of K");
  sweep->add_option("--config", config_path, "JSON config")->required();
  sweep->add_option("--k-grid", k_grid, "Comma-separated K values")->required();
  sweep->add_option("--out", out_dir, "Output directory (default: config output)");

  int trials = 500;
  std::uint64_t ftrl_seed = 0;
  auto* vf = app.add_subcommand("validate-ftrl", "Audit both FTRL regret lemmas");
  vf->add_option("--trials", trials, "Random trials per regularizer");
  vf->add_option("--seed", ftrl_seed, "Seed");

  auto* ce = app.add_subcommand("check-estimators",
                                "MGR, magnitude-reduced and bonus checks");
  ce->add_option("--config", config_path, "JSON config")->required();
  auto* cc = app.add_subcommand("check-covariance", "Covariance sandwich checks");
  cc->add_option("--config", config_path, "JSON config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  return run_checked([&] {
    if (*vf) {
      advlin::write_check_csv(std::cout, advlin::validate_ftrl(trials, ftrl_seed));
      return;
    }
    advlin::ExperimentConfig config = advlin::load_config(config_path);
    if (!out_dir.empty()) config.output = out_dir;
    if (*run) {
      if (seed) config.seeds = {*seed};
      if (log_realized) config.log_realized = true;
      for (const auto& o : advlin::run_experiment(config, config.output)) {
        std::cout << o.trace_path << ','
                  << advlin::format_double(o.final_regret) << '\n';
        for (const auto& line : o.result.log) {
          std::cerr << "seed " << o.seed << ": " << line << '\n';
        }
      }
    } else if (*sweep) {
      std::vector<std::string> diag;
      const auto rows = advlin::sweep(config, advlin::parse_k_grid(k_grid),
                                      config.output, &diag);
      advlin::write_summary_csv(std::cout, rows);
      for (const auto& line : diag) std::cerr << line << '\n';
    } else if (*ce) {
      advlin::write_check_csv(std::cout, advlin::check_estimators(config));
    } else if (*cc) {
      advlin::write_check_csv(std::cout, advlin::check_covariance(config));
    }
  });
}
