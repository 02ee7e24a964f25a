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

#ifndef CHANSEL_GAME_HPP
#define CHANSEL_GAME_HPP

// Channel-selection game over a parallel multiple-access channel.
//
// K transmitters share S orthogonal channels towards a single receiver that
// decodes every user independently (single-user decoding). A pure action is
// the choice of one channel on which the player transmits at its maximum
// power. Utilities are bandwidth-weighted spectral efficiencies in
// bits/s/Hz. Powers and noise variances are in watts, gains are
// dimensionless power gains and bandwidths are in hertz.
//
// Channel and player indices are zero-based throughout the library. File
// formats written by the harness use one-based channel numbers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chansel {

using Player = std::size_t;
using Channel = std::size_t;

/// Largest number of opponent profiles an exact expectation may enumerate.
inline constexpr std::uint64_t kMaxOpponentProfiles = 1'000'000;
/// Largest number of joint profiles an exhaustive search may visit.
inline constexpr std::uint64_t kMaxJointProfiles = 10'000'000;

/// base^exp, saturating at max uint64.
inline std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    out *= base;
  }
  return out;
}

/// Immutable description of one game instance. All invariants are checked at
/// construction; a constructed GameSpec is always valid.
class GameSpec {
 public:
  /// `gains` is row-major K x S: gains[k * S + s] is g_{k,s}.
  GameSpec(std::vector<double> bandwidths, std::vector<double> noise,
           std::vector<double> max_power, std::vector<double> gains)
      : bandwidths_(std::move(bandwidths)),
        noise_(std::move(noise)),
        max_power_(std::move(max_power)),
        gains_(std::move(gains)) {
    const std::size_t S = bandwidths_.size();
    const std::size_t K = max_power_.size();
    if (K == 0) throw std::invalid_argument("game needs at least one player");
    if (S == 0) throw std::invalid_argument("game needs at least one channel");
    if (noise_.size() != S) {
      throw std::invalid_argument("noise must have one entry per channel");
    }
    if (gains_.size() != K * S) {
      throw std::invalid_argument("gains must be a K x S matrix");
    }
    total_bandwidth_ = 0.0;
    for (double b : bandwidths_) {
      if (!std::isfinite(b) || !(b > 0.0)) {
        throw std::invalid_argument("bandwidth must be positive");
      }
      total_bandwidth_ += b;
    }
    for (double n : noise_) {
      if (!std::isfinite(n) || !(n > 0.0)) {
        throw std::invalid_argument("noise must be positive");
      }
    }
    for (double p : max_power_) {
      if (!std::isfinite(p) || !(p > 0.0)) {
        throw std::invalid_argument("max power must be positive");
      }
    }
    for (double g : gains_) {
      if (!std::isfinite(g) || g < 0.0) {
        throw std::invalid_argument("gains must be finite and non-negative");
      }
    }
    weights_.reserve(S);
    for (double b : bandwidths_) weights_.push_back(b / total_bandwidth_);
  }

  /// Convenience constructor from a nested gain matrix.
  static GameSpec from_rows(std::vector<double> bandwidths,
                            std::vector<double> noise,
                            std::vector<double> max_power,
                            const std::vector<std::vector<double>>& gains) {
    std::vector<double> flat;
    for (const auto& row : gains) {
      if (row.size() != bandwidths.size()) {
        throw std::invalid_argument("gains must be a K x S matrix");
      }
      flat.insert(flat.end(), row.begin(), row.end());
    }
    if (gains.size() != max_power.size()) {
      throw std::invalid_argument("gains must be a K x S matrix");
    }
    return GameSpec(std::move(bandwidths), std::move(noise),
                    std::move(max_power), std::move(flat));
  }

  std::size_t players() const { return max_power_.size(); }
  std::size_t channels() const { return bandwidths_.size(); }

  double bandwidth(Channel s) const { return bandwidths_[s]; }
  double total_bandwidth() const { return total_bandwidth_; }
  /// B_s / B.
  double weight(Channel s) const { return weights_[s]; }
  double noise(Channel s) const { return noise_[s]; }
  double max_power(Player k) const { return max_power_[k]; }
  double gain(Player k, Channel s) const { return gains_[k * channels() + s]; }
  /// Power of player k seen at the receiver when it transmits on channel s.
  double received_power(Player k, Channel s) const {
    return max_power_[k] * gain(k, s);
  }

  const std::vector<double>& bandwidths() const { return bandwidths_; }
  const std::vector<double>& noise() const { return noise_; }
  const std::vector<double>& max_power() const { return max_power_; }
  const std::vector<double>& gains() const { return gains_; }

 private:
  std::vector<double> bandwidths_;
  std::vector<double> noise_;
  std::vector<double> max_power_;
  std::vector<double> gains_;
  std::vector<double> weights_;
  double total_bandwidth_ = 0.0;
};

/// One pure action per player: the channel it transmits on.
struct ActionProfile {
  std::vector<Channel> channels;

  friend bool operator==(const ActionProfile&, const ActionProfile&) = default;
  friend auto operator<=>(const ActionProfile&, const ActionProfile&) = default;
};

/// Row k is the mixed strategy of player k over the channels.
struct MixedProfile {
  std::vector<std::vector<double>> probs;
};

inline void check_profile(const GameSpec& game, const ActionProfile& profile) {
  if (profile.channels.size() != game.players()) {
    throw std::invalid_argument("profile has wrong number of players");
  }
  for (Channel c : profile.channels) {
    if (c >= game.channels()) {
      throw std::invalid_argument("profile channel out of range");
    }
  }
}

inline void check_player(const GameSpec& game, Player k) {
  if (k >= game.players()) throw std::out_of_range("player out of range");
}

inline void check_channel(const GameSpec& game, Channel s) {
  if (s >= game.channels()) throw std::out_of_range("channel out of range");
}

/// Checks a probability vector: entries in [0, 1], sum within `tol` of 1.
inline bool is_distribution(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || x > 1.0 + tol) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= tol;
}

inline void check_mixed_profile(const GameSpec& game, const MixedProfile& mix,
                                double tol = 1e-12) {
  if (mix.probs.size() != game.players()) {
    throw std::invalid_argument("mixed profile has wrong number of players");
  }
  for (const auto& row : mix.probs) {
    if (row.size() != game.channels() || !is_distribution(row, tol)) {
      throw std::invalid_argument("mixed profile row is not a distribution");
    }
  }
}

namespace detail {

// Rate of player k on channel c given the co-channel interference power.
// Every other channel contributes log2(1 + 0) = 0 to the sum, so only the
// occupied channel is evaluated.
inline double own_channel_rate(const GameSpec& game, Player k, Channel c,
                               double interference) {
  const double sinr =
      game.received_power(k, c) / (game.noise(c) + interference);
  return game.weight(c) * std::log2(1.0 + sinr);
}

}  // namespace detail

/// Spectral efficiency of `player` under a pure profile.
inline double utility(const GameSpec& game, const ActionProfile& profile,
                      Player player) {
  check_profile(game, profile);
  check_player(game, player);
  const Channel c = profile.channels[player];
  double interference = 0.0;
  for (Player j = 0; j < game.players(); ++j) {
    if (j != player && profile.channels[j] == c) {
      interference += game.received_power(j, c);
    }
  }
  return detail::own_channel_rate(game, player, c, interference);
}

/// Exact potential: sum_s (B_s/B) log2(noise_s + received power on s).
inline double potential(const GameSpec& game, const ActionProfile& profile) {
  check_profile(game, profile);
  std::vector<double> load(game.noise());
  for (Player k = 0; k < game.players(); ++k) {
    load[profile.channels[k]] += game.received_power(k, profile.channels[k]);
  }
  double phi = 0.0;
  for (Channel s = 0; s < game.channels(); ++s) {
    phi += game.weight(s) * std::log2(load[s]);
  }
  return phi;
}

/// Number of pure profiles of the players other than one, S^(K-1).
inline std::uint64_t opponent_profile_count(const GameSpec& game) {
  return saturating_pow(game.channels(), game.players() - 1);
}

/// Number of joint pure profiles, S^K.
inline std::uint64_t joint_profile_count(const GameSpec& game) {
  return saturating_pow(game.channels(), game.players());
}

/// Advances `profile` to the next profile in lexicographic order, the last
/// player being the fastest digit. Returns false after the last profile.
/// Entries of `frozen` (if any) are never touched.
inline bool next_profile(std::vector<Channel>& profile, std::size_t channels,
                         std::size_t frozen = std::numeric_limits<std::size_t>::max()) {
  for (std::size_t i = profile.size(); i-- > 0;) {
    if (i == frozen) continue;
    if (++profile[i] < channels) return true;
    profile[i] = 0;
  }
  return false;
}

/// Expected utility of `player` on `own_channel` against an explicit joint
/// distribution over opponent profiles. `opponent_dist` has S^(K-1) entries;
/// opponents are taken in increasing player order with the last opponent as
/// the fastest-varying digit.
inline double expected_utility(const GameSpec& game, Player player,
                               Channel own_channel,
                               std::span<const double> opponent_dist) {
  check_player(game, player);
  check_channel(game, own_channel);
  const std::uint64_t n = opponent_profile_count(game);
  if (n > kMaxOpponentProfiles) {
    throw std::length_error("too many opponent profiles to enumerate");
  }
  if (opponent_dist.size() != n) {
    throw std::invalid_argument("opponent distribution has wrong size");
  }
  if (!is_distribution(opponent_dist, 1e-9)) {
    throw std::invalid_argument("opponent distribution is not normalized");
  }
  ActionProfile profile{std::vector<Channel>(game.players(), 0)};
  profile.channels[player] = own_channel;
  double total = 0.0;
  std::size_t idx = 0;
  do {
    const double prob = opponent_dist[idx++];
    if (prob != 0.0) total += prob * utility(game, profile, player);
  } while (next_profile(profile.channels, game.channels(), player));
  return total;
}

/// Joint opponent distribution induced by independent marginals, in the
/// ordering used by expected_utility.
inline std::vector<double> product_distribution(
    const GameSpec& game, Player player,
    const std::vector<std::vector<double>>& marginals) {
  check_player(game, player);
  if (opponent_profile_count(game) > kMaxOpponentProfiles) {
    throw std::length_error("too many opponent profiles to enumerate");
  }
  std::vector<double> out;
  out.reserve(opponent_profile_count(game));
  std::vector<Channel> profile(game.players(), 0);
  do {
    double prob = 1.0;
    for (Player j = 0; j < game.players(); ++j) {
      if (j != player) prob *= marginals[j][profile[j]];
    }
    out.push_back(prob);
  } while (next_profile(profile, game.channels(), player));
  return out;
}

/// Expected utility of `player` on `own_channel` when every opponent j plays
/// independently according to marginals[j]. Same value as expected_utility()
/// on product_distribution(), without materializing the joint.
inline double expected_utility_product(
    const GameSpec& game, Player player, Channel own_channel,
    const std::vector<std::vector<double>>& marginals) {
  const std::size_t K = game.players();
  const std::size_t S = game.channels();
  double total = 0.0;
  // Depth-first over opponents; interference is accumulated in increasing
  // player order, as utility() does.
  auto visit = [&](auto&& self, Player j, double prob,
                   double interference) -> void {
    if (j == K) {
      total += prob * detail::own_channel_rate(game, player, own_channel,
                                               interference);
      return;
    }
    if (j == player) {
      self(self, j + 1, prob, interference);
      return;
    }
    for (Channel c = 0; c < S; ++c) {
      const double pc = marginals[j][c];
      if (pc == 0.0) continue;
      self(self, j + 1, prob * pc,
           c == own_channel ? interference + game.received_power(j, c)
                            : interference);
    }
  };
  visit(visit, 0, 1.0, 0.0);
  return total;
}

/// Expected utility of `player` when every player follows `mix`.
inline double mixed_utility(const GameSpec& game, const MixedProfile& mix,
                            Player player) {
  check_player(game, player);
  check_mixed_profile(game, mix, 1e-9);
  double total = 0.0;
  for (Channel s = 0; s < game.channels(); ++s) {
    const double own = mix.probs[player][s];
    if (own == 0.0) continue;
    total += own * expected_utility_product(game, player, s, mix.probs);
  }
  return total;
}

/// Receiver broadcast: per-channel noise plus total received power.
inline std::vector<double> aggregate_message(const GameSpec& game,
                                             const ActionProfile& profile) {
  check_profile(game, profile);
  std::vector<double> gamma(game.noise());
  for (Player k = 0; k < game.players(); ++k) {
    gamma[profile.channels[k]] += game.received_power(k, profile.channels[k]);
  }
  return gamma;
}

/// Utility of `player` on `own_channel` computed from the receiver message
/// alone. `gamma` must include the player's own contribution on its channel.
inline double aggregated_utility(const GameSpec& game, Player player,
                                 Channel own_channel,
                                 std::span<const double> gamma) {
  check_player(game, player);
  check_channel(game, own_channel);
  if (gamma.size() != game.channels()) {
    throw std::invalid_argument("gamma must have one entry per channel");
  }
  const double own = game.received_power(player, own_channel);
  const double rest = gamma[own_channel] - own;
  if (!(rest > 0.0)) {
    throw std::domain_error(
        "inconsistent gamma: own received power exceeds the aggregate");
  }
  return game.weight(own_channel) * std::log2(1.0 + own / rest);
}

/// Utility `player` would have had on `channel` had the others kept their
/// actions, reconstructed from a message `gamma` produced while the player
/// was on `actual_channel`.
inline double counterfactual_utility(const GameSpec& game, Player player,
                                     Channel channel, Channel actual_channel,
                                     std::span<const double> gamma) {
  check_channel(game, channel);
  check_channel(game, actual_channel);
  if (gamma.size() != game.channels()) {
    throw std::invalid_argument("gamma must have one entry per channel");
  }
  const double others =
      channel == actual_channel
          ? gamma[channel] - game.received_power(player, channel)
          : gamma[channel];
  if (!(others > 0.0)) {
    throw std::domain_error(
        "inconsistent gamma: own received power exceeds the aggregate");
  }
  return game.weight(channel) *
         std::log2(1.0 + game.received_power(player, channel) / others);
}

}  // namespace chansel

#endif  // CHANSEL_GAME_HPP
