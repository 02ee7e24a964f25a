// Copyright 2026 The chansel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end.
//
//   chansel equilibria <config>   pure (and 2x2 mixed) equilibria
//   chansel regions <config>      2x2 region labels, optional scatter data
//   chansel simulate <config>     one dynamics run, trajectory + plot data
//   chansel montecarlo <config>   full experiment
//
// Exit codes: 0 success, 1 configuration or validation error, 2 runtime error.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "chansel/config.hpp"
#include "chansel/equilibrium.hpp"
#include "chansel/experiment.hpp"
#include "chansel/io.hpp"

namespace {

using chansel::ConfigError;
using chansel::Json;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::optional<std::string> variant;
  std::optional<std::string> tie_break;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

chansel::ExperimentConfig load(const std::string& path, const Overrides& o) {
  chansel::ExperimentConfig cfg = chansel::load_config(path);
  try {
    if (o.seed) cfg.seed = *o.seed;
    if (o.steps) {
      if (*o.steps == 0) throw ConfigError("--steps must be >= 1");
      cfg.dynamics.steps = *o.steps;
    }
    if (o.variant) cfg.dynamics.variant = chansel::parse_variant(*o.variant);
    if (o.tie_break) cfg.dynamics.tie_break = chansel::parse_tie_break(*o.tie_break);
    if (o.out) cfg.output.dir = *o.out;
    if (o.format) cfg.output.format = chansel::parse_output_format(*o.format);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::filesystem::path out_dir(const chansel::ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.output.dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int cmd_equilibria(const chansel::ExperimentConfig& cfg, bool persist) {
  Json out;
  if (cfg.game) {
    out = chansel::report_to_json(chansel::analyze_equilibria(*cfg.game));
  } else {
    out = Json::array();
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      Json r = chansel::report_to_json(chansel::analyze_equilibria(cfg.trial_game(i)));
      r["trial"] = i;
      out.push_back(std::move(r));
    }
  }
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (persist) chansel::write_text_file((out_dir(cfg) / "equilibria.json").string(), text);
  return 0;
}

int cmd_regions(const chansel::ExperimentConfig& cfg, bool scatter) {
  std::vector<chansel::GameSpec> games;
  const std::size_t n = cfg.game ? 1 : cfg.trials;
  for (std::size_t i = 0; i < n; ++i) {
    games.push_back(cfg.trial_game(i));
    if (!chansel::is_symmetric_2x2(games.back())) {
      throw ConfigError(
          "regions needs K=2, S=2, equal bandwidths, common noise and power, "
          "positive gains");
    }
  }
  Json out;
  if (cfg.game) {
    const auto label = chansel::classify_region_2x2(games.front());
    Json profiles = Json::array();
    for (const auto& p : label.profiles()) profiles.push_back(chansel::profile_to_json(p));
    out = {{"schema_version", chansel::kSchemaVersion},
           {"region", chansel::region_to_json(label)},
           {"profiles", std::move(profiles)}};
  } else {
    std::map<std::string, std::size_t> hist;
    for (const auto& g : games) hist[chansel::classify_region_2x2(g).to_string()]++;
    out = {{"schema_version", chansel::kSchemaVersion},
           {"samples", games.size()},
           {"region_histogram", hist}};
  }
  std::cout << out.dump(2) << "\n";
  if (scatter) {
    std::ostringstream os;
    chansel::emit_plot_data(games, chansel::PlotKind::kRegions, os);
    chansel::write_text_file((out_dir(cfg) / "regions.csv").string(), os.str());
  }
  return 0;
}

int cmd_simulate(const chansel::ExperimentConfig& cfg) {
  chansel::Trajectory traj;
  const chansel::TrialRecord r = chansel::run_trial(cfg, 0, &traj);
  const auto dir = out_dir(cfg);
  if (cfg.output.format == chansel::OutputFormat::kCsv) {
    std::ostringstream os;
    chansel::write_trajectory_csv(traj, os);
    chansel::write_text_file((dir / "trajectory.csv").string(), os.str());
  } else {
    chansel::write_text_file((dir / "trajectory.json").string(),
                             chansel::trajectory_to_json(traj).dump() + "\n");
  }
  for (auto kind : {chansel::PlotKind::kBeliefs, chansel::PlotKind::kUtility}) {
    std::ostringstream os;
    chansel::emit_plot_data(traj, kind, os);
    chansel::write_text_file(
        (dir / (kind == chansel::PlotKind::kBeliefs ? "beliefs.csv" : "utility.csv")).string(),
        os.str());
  }
  const std::string text = chansel::trial_to_json(cfg, r).dump(2) + "\n";
  chansel::write_text_file((dir / "run.json").string(), text);
  std::cout << text;
  return 0;
}

int cmd_montecarlo(const chansel::ExperimentConfig& cfg) {
  const auto summary = chansel::run_experiment(cfg);
  std::cout << chansel::summary_to_json(cfg, summary).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel-selection games: equilibria and fictitious play"};
  app.require_subcommand(1);

  Overrides o;
  std::string config_path;
  bool scatter = false;
  bool persist = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--steps", o.steps, "number of dynamics rounds");
    sub->add_option("--variant", o.variant, "classic | aggregation");
    sub->add_option("--tie-break", o.tie_break, "lowest | highest");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "trajectory format: csv | json");
  };
  auto* equilibria = app.add_subcommand("equilibria", "enumerate equilibria");
  add_common(equilibria);
  equilibria->add_flag("--persist", persist, "also write equilibria.json to the output directory");
  auto* regions = app.add_subcommand("regions", "classify 2x2 games into equilibrium regions");
  add_common(regions);
  regions->add_flag("--scatter", scatter, "write regions.csv scatter data");
  auto* simulate = app.add_subcommand("simulate", "run the dynamics once");
  add_common(simulate);
  auto* montecarlo = app.add_subcommand("montecarlo", "run a Monte-Carlo experiment");
  add_common(montecarlo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const chansel::ExperimentConfig cfg = load(config_path, o);
    if (equilibria->parsed()) return cmd_equilibria(cfg, persist || o.out.has_value());
    if (regions->parsed()) return cmd_regions(cfg, scatter);
    if (simulate->parsed()) return cmd_simulate(cfg);
    return cmd_montecarlo(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
