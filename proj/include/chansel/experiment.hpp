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

#ifndef CHANSEL_EXPERIMENT_HPP
#define CHANSEL_EXPERIMENT_HPP

// Monte-Carlo experiments: per trial, draw a game, analyse its equilibria,
// run the configured dynamics, look for a terminal cycle, and fold the
// outcome into a summary.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "chansel/config.hpp"
#include "chansel/dynamics.hpp"
#include "chansel/equilibrium.hpp"
#include "chansel/io.hpp"

namespace chansel {

/// Frequencies within this total-variation distance of an equilibrium count
/// as converged to it.
inline constexpr double kConvergenceTolerance = 1e-2;

enum class Outcome { kPureNe, kCycling, kMixedPoint, kUnresolved };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kPureNe: return "pure_ne";
    case Outcome::kCycling: return "cycling";
    case Outcome::kMixedPoint: return "mixed_point";
    case Outcome::kUnresolved: return "unresolved";
  }
  return "?";
}

struct TrialRecord {
  std::size_t index = 0;
  GameSpec game;
  EquilibriumReport equilibria;
  std::optional<CycleReport> cycle;
  MixedProfile frequencies;
  std::vector<double> realized_utility;  // per player, trailing-window mean
  double distance_to_pure_ne = std::numeric_limits<double>::infinity();
  std::optional<double> distance_to_mixed_ne;
  Outcome outcome = Outcome::kUnresolved;
};

inline Trajectory run_dynamics(const GameSpec& game, const DynamicsConfig& d) {
  const BeliefState beliefs = d.initial.build(game);
  if (d.variant == Variant::kClassic) {
    return run_fp(game, beliefs, d.steps, d.tie_break);
  }
  const QState q = d.zero_q ? zero_q_state(game) : matched_q_state(game, beliefs);
  return run_aggregation_fp(game, q, d.steps, d.tie_break);
}

/// Outcome priority: a held pure equilibrium, then an exact cycle, then
/// frequencies at the mixed point, then frequencies at a pure equilibrium.
inline Outcome classify_outcome(const TrialRecord& r) {
  if (r.cycle && r.cycle->period == 1 &&
      std::find(r.equilibria.pure_ne.begin(), r.equilibria.pure_ne.end(),
                r.cycle->cycle_profiles.front()) != r.equilibria.pure_ne.end()) {
    return Outcome::kPureNe;
  }
  if (r.cycle && r.cycle->period >= 2) return Outcome::kCycling;
  if (r.distance_to_mixed_ne && *r.distance_to_mixed_ne <= kConvergenceTolerance) {
    return Outcome::kMixedPoint;
  }
  if (r.distance_to_pure_ne <= kConvergenceTolerance) return Outcome::kPureNe;
  return Outcome::kUnresolved;
}

/// Runs one trial. The trajectory is returned through `traj_out` if given.
inline TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t index,
                             Trajectory* traj_out = nullptr) {
  TrialRecord r{index, cfg.trial_game(index), {}, {}, {}, {}, {}, {}, {}};
  r.equilibria = analyze_equilibria(r.game);
  Trajectory traj = run_dynamics(r.game, cfg.dynamics);
  r.cycle = detect_cycle(traj, cfg.dynamics.cycle_window);
  r.frequencies = empirical_frequencies(traj);
  const std::size_t window = std::min(std::max<std::size_t>(cfg.dynamics.cycle_window, 1),
                                      traj.length());
  r.realized_utility.assign(r.game.players(), 0.0);
  for (std::size_t t = traj.length() - window; t < traj.length(); ++t) {
    for (Player k = 0; k < r.game.players(); ++k) r.realized_utility[k] += traj.utility(t, k);
  }
  for (double& u : r.realized_utility) u /= static_cast<double>(window);
  for (const auto& ne : r.equilibria.pure_ne) {
    r.distance_to_pure_ne = std::min(
        r.distance_to_pure_ne,
        max_total_variation(r.frequencies, point_mass(ne, r.game.channels())));
  }
  if (r.equilibria.mixed_ne) {
    r.distance_to_mixed_ne = max_total_variation(r.frequencies, *r.equilibria.mixed_ne);
  }
  r.outcome = classify_outcome(r);
  if (traj_out) *traj_out = std::move(traj);
  return r;
}

inline Json trial_to_json(const ExperimentConfig& cfg, const TrialRecord& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["trial"] = r.index;
  if (cfg.generator) j["trial_seed"] = trial_seed(cfg.seed, r.index);
  j["game"] = game_to_json(r.game);
  j["equilibria"] = report_to_json(r.equilibria);
  j["outcome"] = to_string(r.outcome);
  j["cycle"] = cycle_to_json(r.cycle);
  j["frequencies"] = mixed_to_json(r.frequencies);
  j["realized_utility"] = r.realized_utility;
  j["distance_to_pure_ne"] = r.distance_to_pure_ne;
  j["distance_to_mixed_ne"] =
      r.distance_to_mixed_ne ? Json(*r.distance_to_mixed_ne) : Json(nullptr);
  return j;
}

/// Aggregate over trials. Histograms are keyed by value and their masses
/// sum to the number of trials.
struct MonteCarloSummary {
  std::size_t trials = 0;
  std::map<std::size_t, std::size_t> ne_count_histogram;
  std::map<std::string, std::size_t> region_histogram;  // "n/a" outside 2x2
  std::map<std::string, std::size_t> outcome_histogram;
  std::size_t ne_count_bound_violations = 0;  // pure-NE count outside [1, S^(K-1)]

  // Payoff statistics. Per-player sums; means are taken when serialising.
  std::vector<double> realized_utility_sum;
  std::vector<double> best_pure_ne_utility_sum;
  std::vector<double> worst_pure_ne_utility_sum;
  std::vector<double> mixed_ne_utility_sum;
  std::size_t trials_with_mixed_ne = 0;
  std::size_t cycles_below_worst_pure_ne = 0;
  std::size_t cycles_below_mixed_ne = 0;

  void add(const TrialRecord& r) {
    ++trials;
    const std::size_t K = r.game.players();
    ++ne_count_histogram[r.equilibria.pure_ne.size()];
    region_histogram[r.equilibria.region ? r.equilibria.region->to_string() : "n/a"]++;
    outcome_histogram[to_string(r.outcome)]++;
    const std::size_t count = r.equilibria.pure_ne.size();
    if (count < 1 || count > opponent_profile_count(r.game)) ++ne_count_bound_violations;

    auto accumulate = [K](std::vector<double>& sum, const std::vector<double>& v) {
      if (sum.empty()) sum.assign(K, 0.0);
      for (std::size_t k = 0; k < K && k < sum.size(); ++k) sum[k] += v[k];
    };
    accumulate(realized_utility_sum, r.realized_utility);
    std::vector<double> best(K, -std::numeric_limits<double>::infinity());
    std::vector<double> worst(K, std::numeric_limits<double>::infinity());
    for (const auto& u : r.equilibria.utilities) {
      for (std::size_t k = 0; k < K; ++k) {
        best[k] = std::max(best[k], u[k]);
        worst[k] = std::min(worst[k], u[k]);
      }
    }
    accumulate(best_pure_ne_utility_sum, best);
    accumulate(worst_pure_ne_utility_sum, worst);
    if (r.equilibria.mixed_ne) {
      ++trials_with_mixed_ne;
      accumulate(mixed_ne_utility_sum, r.equilibria.mixed_utilities);
    }
    if (r.outcome == Outcome::kCycling) {
      bool below_pure = true, below_mixed = r.equilibria.mixed_ne.has_value();
      for (std::size_t k = 0; k < K; ++k) {
        below_pure = below_pure && r.cycle->time_avg_utility[k] < worst[k];
        if (below_mixed) {
          below_mixed = r.cycle->time_avg_utility[k] < r.equilibria.mixed_utilities[k];
        }
      }
      cycles_below_worst_pure_ne += below_pure ? 1 : 0;
      cycles_below_mixed_ne += below_mixed ? 1 : 0;
    }
  }
};

inline Json summary_to_json(const ExperimentConfig& cfg, const MonteCarloSummary& s) {
  auto mean = [](const std::vector<double>& sum, std::size_t n) {
    Json out = Json::array();
    for (double x : sum) out.push_back(n ? x / static_cast<double>(n) : 0.0);
    return out;
  };
  Json ne_hist = Json::object();
  for (const auto& [count, n] : s.ne_count_histogram) ne_hist[std::to_string(count)] = n;
  Json conv = Json::object();
  for (const char* key : {"pure_ne", "cycling", "mixed_point", "unresolved"}) {
    const auto it = s.outcome_histogram.find(key);
    const std::size_t n = it == s.outcome_histogram.end() ? 0 : it->second;
    conv[key] = s.trials ? static_cast<double>(n) / static_cast<double>(s.trials) : 0.0;
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config_to_json(cfg);
  j["trials"] = s.trials;
  j["ne_count_histogram"] = std::move(ne_hist);
  j["region_histogram"] = s.region_histogram;
  j["outcome_histogram"] = s.outcome_histogram;
  j["convergence_stats"] = std::move(conv);
  j["ne_count_bound_violations"] = s.ne_count_bound_violations;
  j["payoff_stats"] = {
      {"mean_realized_utility", mean(s.realized_utility_sum, s.trials)},
      {"mean_best_pure_ne_utility", mean(s.best_pure_ne_utility_sum, s.trials)},
      {"mean_worst_pure_ne_utility", mean(s.worst_pure_ne_utility_sum, s.trials)},
      {"trials_with_mixed_ne", s.trials_with_mixed_ne},
      {"mean_mixed_ne_utility", mean(s.mixed_ne_utility_sum, s.trials_with_mixed_ne)},
      {"cycles_below_worst_pure_ne", s.cycles_below_worst_pure_ne},
      {"cycles_below_mixed_ne", s.cycles_below_mixed_ne}};
  return j;
}

/// Runs every trial of `cfg`, writes per-trial records (and trajectories
/// when enabled) plus summary.json under cfg.output.dir, and returns the
/// summary. Output bytes depend only on the configuration, not on the
/// number of workers.
inline MonteCarloSummary run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);
  if (cfg.trials > 0) fs::create_directories(dir / "trials");

  std::vector<std::optional<TrialRecord>> records(cfg.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      try {
        Trajectory traj;
        TrialRecord r = run_trial(cfg, i, cfg.output.trajectories ? &traj : nullptr);
        char stem[32];
        std::snprintf(stem, sizeof stem, "trial_%06zu", i);
        write_text_file((dir / "trials" / (std::string(stem) + ".json")).string(),
                        trial_to_json(cfg, r).dump(2) + "\n");
        if (cfg.output.trajectories) {
          if (cfg.output.format == OutputFormat::kCsv) {
            std::ostringstream os;
            write_trajectory_csv(traj, os);
            write_text_file((dir / "trials" / (std::string(stem) + "_trajectory.csv")).string(),
                            os.str());
          } else {
            write_text_file((dir / "trials" / (std::string(stem) + "_trajectory.json")).string(),
                            trajectory_to_json(traj).dump() + "\n");
          }
        }
        records[i] = std::move(r);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(
              std::runtime_error("trial " + std::to_string(i) + ": " + e.what()));
        }
        next = cfg.trials;
        return;
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.trials));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloSummary summary;
  for (const auto& r : records) summary.add(*r);
  write_text_file((dir / "summary.json").string(),
                  summary_to_json(cfg, summary).dump(2) + "\n");
  return summary;
}

}  // namespace chansel

#endif  // CHANSEL_EXPERIMENT_HPP
