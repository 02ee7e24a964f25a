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

#ifndef CHANSEL_DYNAMICS_HPP
#define CHANSEL_DYNAMICS_HPP

// Fictitious play in two informational regimes.
//
// Classic: every player observes every action and keeps an empirical
// frequency vector per opponent; it best-responds to the product of those
// marginals.
//
// Aggregation: players only hear the receiver's per-channel aggregate
// (noise plus received power). Each player keeps a running average Q of the
// utility it would have obtained on every channel and plays the argmax.
//
// Both engines are round-synchronous: all players act, then all learn.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chansel/equilibrium.hpp"
#include "chansel/game.hpp"

namespace chansel {

enum class TieBreak { kLowest, kHighest };

inline const char* to_string(TieBreak t) {
  return t == TieBreak::kLowest ? "lowest" : "highest";
}

inline TieBreak parse_tie_break(std::string_view s) {
  if (s == "lowest") return TieBreak::kLowest;
  if (s == "highest") return TieBreak::kHighest;
  throw std::invalid_argument("unknown tie-break policy: " + std::string(s));
}

enum class Variant { kClassic, kAggregation };

inline const char* to_string(Variant v) {
  return v == Variant::kClassic ? "classic" : "aggregation";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "classic") return Variant::kClassic;
  if (s == "aggregation") return Variant::kAggregation;
  throw std::invalid_argument("unknown dynamics variant: " + std::string(s));
}

/// Index of the largest entry; exact ties resolved by `tie`.
inline Channel argmax(std::span<const double> values, TieBreak tie) {
  Channel best = 0;
  for (Channel s = 1; s < values.size(); ++s) {
    if (values[s] > values[best] ||
        (tie == TieBreak::kHighest && values[s] == values[best])) {
      best = s;
    }
  }
  return best;
}

/// Empirical frequencies of each player's actions, shared by all observers.
/// `step` is the number of the round about to be played; the initial
/// marginals count as one pseudo-observation when step = 1.
struct BeliefState {
  std::size_t step = 1;
  std::vector<std::vector<double>> marginals;
};

inline void check_beliefs(const GameSpec& game, const BeliefState& b) {
  if (b.step < 1) throw std::invalid_argument("belief step must be >= 1");
  if (b.marginals.size() != game.players()) {
    throw std::invalid_argument("beliefs have wrong number of players");
  }
  for (const auto& f : b.marginals) {
    if (f.size() != game.channels() || !is_distribution(f, 1e-12)) {
      throw std::invalid_argument("belief marginal is not a distribution");
    }
  }
}

inline BeliefState uniform_beliefs(const GameSpec& game) {
  const double u = 1.0 / static_cast<double>(game.channels());
  return {1, std::vector<std::vector<double>>(
                 game.players(), std::vector<double>(game.channels(), u))};
}

/// Two-channel prior where player j is believed to use channel 1 with
/// probability xi_j / (1 + xi_j) and channel 2 with 1 / (1 + xi_j).
inline BeliefState xi_beliefs(const GameSpec& game, std::span<const double> xi) {
  if (game.channels() != 2) {
    throw std::invalid_argument("xi beliefs require two channels");
  }
  if (xi.size() != game.players()) {
    throw std::invalid_argument("need one xi per player");
  }
  BeliefState b;
  for (double x : xi) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("xi must be in (0, 1)");
    b.marginals.push_back({x / (1.0 + x), 1.0 / (1.0 + x)});
  }
  return b;
}

/// One step of the running-average recursion
/// f' = f + (1/(t+1)) (indicator(observed) - f).
inline std::vector<double> belief_update(std::span<const double> f,
                                         Channel observed, std::size_t t) {
  if (observed >= f.size()) throw std::out_of_range("observed channel out of range");
  if (t < 1) throw std::invalid_argument("belief step must be >= 1");
  if (!is_distribution(f, 1e-12)) {
    throw std::invalid_argument("belief is not a distribution");
  }
  const double rate = 1.0 / static_cast<double>(t + 1);
  std::vector<double> out(f.begin(), f.end());
  for (Channel s = 0; s < out.size(); ++s) {
    out[s] += rate * ((s == observed ? 1.0 : 0.0) - out[s]);
  }
  return out;
}

/// Channel maximizing the expected utility of `player` against the product
/// of the other players' marginals.
inline Channel fp_best_response(const GameSpec& game, Player player,
                                const BeliefState& beliefs, TieBreak tie) {
  check_player(game, player);
  if (opponent_profile_count(game) > kMaxOpponentProfiles) {
    throw std::length_error("too many opponent profiles to enumerate");
  }
  std::vector<double> values(game.channels());
  for (Channel s = 0; s < game.channels(); ++s) {
    values[s] = expected_utility_product(game, player, s, beliefs.marginals);
  }
  return argmax(values, tie);
}

/// Running-average utility estimates of the aggregation engine. `step` is the
/// weight carried by the current estimates: the next sample is blended in
/// with rate 1 / (step + 1).
struct QState {
  std::size_t step = 0;
  std::vector<std::vector<double>> q;
};

inline void check_q_state(const GameSpec& game, const QState& state) {
  if (state.q.size() != game.players()) {
    throw std::invalid_argument("Q state has wrong number of players");
  }
  for (const auto& row : state.q) {
    if (row.size() != game.channels()) {
      throw std::invalid_argument("Q state has wrong number of channels");
    }
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("Q values must be finite and non-negative");
      }
    }
  }
}

inline QState zero_q_state(const GameSpec& game) {
  return {0, std::vector<std::vector<double>>(
                 game.players(), std::vector<double>(game.channels(), 0.0))};
}

/// Q state equivalent to the given beliefs: each entry is the expected
/// utility under the product of opponent marginals, with the same weight.
inline QState matched_q_state(const GameSpec& game, const BeliefState& beliefs) {
  check_beliefs(game, beliefs);
  QState out{beliefs.step, {}};
  for (Player k = 0; k < game.players(); ++k) {
    std::vector<double> row(game.channels());
    for (Channel s = 0; s < game.channels(); ++s) {
      row[s] = expected_utility_product(game, k, s, beliefs.marginals);
    }
    out.q.push_back(std::move(row));
  }
  return out;
}

/// Record of one run. Per-step arrays are flat and row-major:
/// actions and utilities are T x K, snapshots T x K x S, gamma T x S.
///
/// snapshots hold the state each player acted on at that step: the
/// player's own empirical marginal (classic) or its Q row (aggregation).
struct Trajectory {
  Variant variant = Variant::kClassic;
  TieBreak tie_break = TieBreak::kLowest;
  std::size_t players = 0;
  std::size_t channels = 0;
  std::size_t initial_step = 1;
  std::vector<std::vector<double>> initial_state;

  std::vector<Channel> actions;
  std::vector<double> utilities;
  std::vector<double> potentials;
  std::vector<double> snapshots;
  std::vector<double> gamma;

  std::size_t length() const { return potentials.size(); }
  bool empty() const { return potentials.empty(); }

  Channel action(std::size_t t, Player k) const { return actions[t * players + k]; }
  double utility(std::size_t t, Player k) const { return utilities[t * players + k]; }
  double snapshot(std::size_t t, Player k, Channel s) const {
    return snapshots[(t * players + k) * channels + s];
  }
  ActionProfile profile(std::size_t t) const {
    auto first = actions.begin() + static_cast<std::ptrdiff_t>(t * players);
    return {std::vector<Channel>(first, first + static_cast<std::ptrdiff_t>(players))};
  }
  bool same_profile(std::size_t a, std::size_t b) const {
    return std::equal(actions.begin() + static_cast<std::ptrdiff_t>(a * players),
                      actions.begin() + static_cast<std::ptrdiff_t>((a + 1) * players),
                      actions.begin() + static_cast<std::ptrdiff_t>(b * players));
  }
};

/// Throws if the per-step arrays disagree in length or hold invalid values.
inline void check_trajectory(const Trajectory& traj) {
  const std::size_t T = traj.length();
  const std::size_t K = traj.players, S = traj.channels;
  if (traj.actions.size() != T * K || traj.utilities.size() != T * K ||
      traj.snapshots.size() != T * K * S) {
    throw std::invalid_argument("trajectory arrays have inconsistent lengths");
  }
  if (traj.variant == Variant::kAggregation ? traj.gamma.size() != T * S
                                            : !traj.gamma.empty()) {
    throw std::invalid_argument("trajectory gamma has wrong length");
  }
  for (Channel c : traj.actions) {
    if (c >= S) throw std::invalid_argument("trajectory action out of range");
  }
}

namespace detail {

inline Trajectory start_trajectory(const GameSpec& game, Variant v, TieBreak tie,
                                   std::size_t step,
                                   const std::vector<std::vector<double>>& init,
                                   std::size_t T) {
  Trajectory traj;
  traj.variant = v;
  traj.tie_break = tie;
  traj.players = game.players();
  traj.channels = game.channels();
  traj.initial_step = step;
  traj.initial_state = init;
  traj.actions.reserve(T * game.players());
  traj.utilities.reserve(T * game.players());
  traj.potentials.reserve(T);
  traj.snapshots.reserve(T * game.players() * game.channels());
  return traj;
}

inline void record_outcome(const GameSpec& game, const ActionProfile& profile,
                           Trajectory& traj) {
  traj.actions.insert(traj.actions.end(), profile.channels.begin(),
                      profile.channels.end());
  for (Player k = 0; k < game.players(); ++k) {
    traj.utilities.push_back(chansel::utility(game, profile, k));
  }
  traj.potentials.push_back(potential(game, profile));
}

}  // namespace detail

/// Classic fictitious play for `steps` rounds starting from `init`.
inline Trajectory run_fp(const GameSpec& game, const BeliefState& init,
                         std::size_t steps, TieBreak tie = TieBreak::kLowest) {
  if (steps < 1) throw std::invalid_argument("need at least one step");
  check_beliefs(game, init);
  if (opponent_profile_count(game) > kMaxOpponentProfiles) {
    throw std::length_error("too many opponent profiles to enumerate");
  }
  const std::size_t K = game.players();
  const std::size_t S = game.channels();
  Trajectory traj = detail::start_trajectory(game, Variant::kClassic, tie,
                                             init.step, init.marginals, steps);
  BeliefState beliefs = init;
  ActionProfile profile{std::vector<Channel>(K, 0)};
  std::vector<double> values(S);
  for (std::size_t n = 0; n < steps; ++n) {
    for (Player k = 0; k < K; ++k) {
      for (Channel s = 0; s < S; ++s) {
        values[s] = expected_utility_product(game, k, s, beliefs.marginals);
      }
      profile.channels[k] = argmax(values, tie);
      traj.snapshots.insert(traj.snapshots.end(), beliefs.marginals[k].begin(),
                            beliefs.marginals[k].end());
    }
    detail::record_outcome(game, profile, traj);
    const double rate = 1.0 / static_cast<double>(beliefs.step + 1);
    for (Player k = 0; k < K; ++k) {
      auto& f = beliefs.marginals[k];
      for (Channel s = 0; s < S; ++s) {
        f[s] += rate * ((s == profile.channels[k] ? 1.0 : 0.0) - f[s]);
      }
    }
    ++beliefs.step;
  }
  return traj;
}

/// Fictitious play driven only by the receiver's aggregate message.
///
/// After each round every player rebuilds, for each channel, the
/// interference it would have met there (the message minus its own
/// received power on the channel it actually used) and blends the
/// resulting utility into its Q row.
inline Trajectory run_aggregation_fp(const GameSpec& game, const QState& init,
                                     std::size_t steps,
                                     TieBreak tie = TieBreak::kLowest) {
  if (steps < 1) throw std::invalid_argument("need at least one step");
  check_q_state(game, init);
  const std::size_t K = game.players();
  const std::size_t S = game.channels();
  Trajectory traj = detail::start_trajectory(game, Variant::kAggregation, tie,
                                             init.step, init.q, steps);
  traj.gamma.reserve(steps * S);
  QState state = init;
  ActionProfile profile{std::vector<Channel>(K, 0)};
  for (std::size_t n = 0; n < steps; ++n) {
    for (Player k = 0; k < K; ++k) {
      profile.channels[k] = argmax(state.q[k], tie);
      traj.snapshots.insert(traj.snapshots.end(), state.q[k].begin(),
                            state.q[k].end());
    }
    detail::record_outcome(game, profile, traj);
    const std::vector<double> gamma = aggregate_message(game, profile);
    traj.gamma.insert(traj.gamma.end(), gamma.begin(), gamma.end());
    const double rate = 1.0 / static_cast<double>(state.step + 1);
    for (Player k = 0; k < K; ++k) {
      for (Channel s = 0; s < S; ++s) {
        const double v =
            counterfactual_utility(game, k, s, profile.channels[k], gamma);
        state.q[k][s] += rate * (v - state.q[k][s]);
      }
    }
    ++state.step;
  }
  return traj;
}

/// Fraction of the first `upto` steps each player spent on each channel.
inline MixedProfile empirical_frequencies(const Trajectory& traj,
                                          std::size_t upto) {
  if (traj.empty() || upto == 0) {
    throw std::invalid_argument("empirical frequencies of an empty trajectory");
  }
  upto = std::min(upto, traj.length());
  MixedProfile mix;
  mix.probs.assign(traj.players, std::vector<double>(traj.channels, 0.0));
  for (std::size_t t = 0; t < upto; ++t) {
    for (Player k = 0; k < traj.players; ++k) mix.probs[k][traj.action(t, k)] += 1.0;
  }
  for (auto& row : mix.probs) {
    for (double& x : row) x /= static_cast<double>(upto);
  }
  return mix;
}

inline MixedProfile empirical_frequencies(const Trajectory& traj) {
  return empirical_frequencies(traj, traj.length());
}

/// Largest per-player total-variation distance between two mixed profiles.
inline double max_total_variation(const MixedProfile& a, const MixedProfile& b) {
  if (a.probs.size() != b.probs.size()) {
    throw std::invalid_argument("mixed profiles differ in player count");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < a.probs.size(); ++k) {
    if (a.probs[k].size() != b.probs[k].size()) {
      throw std::invalid_argument("mixed profiles differ in channel count");
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < a.probs[k].size(); ++s) {
      tv += std::abs(a.probs[k][s] - b.probs[k][s]);
    }
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

/// Mixed profile putting all mass on a pure profile.
inline MixedProfile point_mass(const ActionProfile& profile, std::size_t channels) {
  MixedProfile mix;
  for (Channel c : profile.channels) {
    std::vector<double> row(channels, 0.0);
    row[c] = 1.0;
    mix.probs.push_back(std::move(row));
  }
  return mix;
}

struct CycleReport {
  std::size_t period = 0;
  std::vector<ActionProfile> cycle_profiles;
  std::size_t onset = 0;  // 1-based step at which the periodic tail begins
  std::vector<double> time_avg_utility;  // per player, over one period
};

/// Smallest period p <= window/2 for which the last `window` profiles are
/// exactly p-periodic. The onset is pushed back as far as the periodicity
/// extends. A window longer than the trajectory is clamped.
inline std::optional<CycleReport> detect_cycle(const Trajectory& traj,
                                               std::size_t window) {
  const std::size_t T = traj.length();
  window = std::min(window, T);
  if (window < 2) return std::nullopt;
  const std::size_t begin = T - window;
  for (std::size_t p = 1; p <= window / 2; ++p) {
    bool periodic = true;
    for (std::size_t i = begin; i + p < T && periodic; ++i) {
      periodic = traj.same_profile(i, i + p);
    }
    if (!periodic) continue;
    std::size_t onset = begin;
    while (onset > 0 && traj.same_profile(onset - 1, onset - 1 + p)) --onset;
    CycleReport report;
    report.period = p;
    report.onset = onset + 1;
    report.time_avg_utility.assign(traj.players, 0.0);
    for (std::size_t i = onset; i < onset + p; ++i) {
      report.cycle_profiles.push_back(traj.profile(i));
      for (Player k = 0; k < traj.players; ++k) {
        report.time_avg_utility[k] += traj.utility(i, k);
      }
    }
    for (double& u : report.time_avg_utility) u /= static_cast<double>(p);
    return report;
  }
  return std::nullopt;
}

/// Interval of belief ratios compatible with the coordination-failure
/// 2-cycle at round n, for a prior parameterized by xi:
/// [(n(xi+1) - 1) / (n(xi+1) - xi), (n(xi+1) + xi) / (n(xi+1) - xi)].
inline std::pair<double, double> cycle_ratio_bounds(double xi, std::size_t n) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("xi must be in (0, 1)");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const double m = static_cast<double>(n) * (xi + 1.0);
  return {(m - 1.0) / (m - xi), (m + xi) / (m - xi)};
}

/// Potential-difference ratios that govern the 2-cycle. Entry k is the ratio
/// of player k's mixed-equilibrium weights on channel 1 and channel 2; the
/// other player keeps cycling only while its belief ratio about k stays on
/// the right side of it.
inline std::array<double, 2> cycle_ratios_2x2(const GameSpec& game) {
  const PotentialTable t = potential_table_2x2(game);
  const double p11 = t.at(0, 0), p12 = t.at(0, 1);
  const double p21 = t.at(1, 0), p22 = t.at(1, 1);
  const double d1 = p12 - p11;
  const double d2 = p21 - p11;
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw std::domain_error(
        "cycle analysis needs sharing channel 1 to be worse than splitting");
  }
  return {(p21 - p22) / d1, (p12 - p22) / d2};
}

/// Whether the (ch1,ch1), (ch2,ch2) cycle started from xi priors survives
/// round n for both players.
inline bool cycle_persistence_2x2(const GameSpec& game,
                                  std::span<const double> xi, std::size_t n) {
  require_symmetric_2x2(game);
  if (xi.size() != 2) throw std::invalid_argument("need one xi per player");
  const auto ratios = cycle_ratios_2x2(game);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto [lo, hi] = cycle_ratio_bounds(xi[k], n);
    if (ratios[k] == 1.0) continue;  // lo < 1 < hi for every n
    if (!(lo <= ratios[k] && ratios[k] <= hi)) return false;
  }
  return true;
}

}  // namespace chansel

#endif  // CHANSEL_DYNAMICS_HPP
