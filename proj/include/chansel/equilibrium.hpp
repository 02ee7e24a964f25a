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

#ifndef CHANSEL_EQUILIBRIUM_HPP
#define CHANSEL_EQUILIBRIUM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chansel/game.hpp"

namespace chansel {

/// Pure Nash equilibria by exhaustive search, in lexicographic profile order.
/// A profile qualifies when no player strictly gains by switching channel;
/// exact ties count as equilibria.
inline std::vector<ActionProfile> enumerate_pure_ne(const GameSpec& game) {
  if (joint_profile_count(game) > kMaxJointProfiles) {
    throw std::length_error("instance too large for exhaustive search");
  }
  const std::size_t K = game.players();
  const std::size_t S = game.channels();
  std::vector<ActionProfile> out;
  ActionProfile profile{std::vector<Channel>(K, 0)};
  ActionProfile deviation = profile;
  do {
    bool stable = true;
    for (Player k = 0; k < K && stable; ++k) {
      const double current = utility(game, profile, k);
      deviation.channels = profile.channels;
      for (Channel s = 0; s < S; ++s) {
        if (s == profile.channels[k]) continue;
        deviation.channels[k] = s;
        if (utility(game, deviation, k) > current) {
          stable = false;
          break;
        }
      }
    }
    if (stable) out.push_back(profile);
  } while (next_profile(profile.channels, S));
  return out;
}

// ---------------------------------------------------------------------------
// Two players, two channels, common noise, power and bandwidth.

enum class Region { kH1 = 0, kH2 = 1, kH3 = 2, kH4 = 3 };

inline constexpr std::array<Region, 4> kAllRegions = {
    Region::kH1, Region::kH2, Region::kH3, Region::kH4};

inline const char* region_name(Region r) {
  switch (r) {
    case Region::kH1: return "H1";
    case Region::kH2: return "H2";
    case Region::kH3: return "H3";
    case Region::kH4: return "H4";
  }
  return "?";
}

/// The equilibrium profile associated with each region:
/// H1 -> (ch1, ch2), H2 -> (ch1, ch1), H3 -> (ch2, ch2), H4 -> (ch2, ch1).
inline ActionProfile region_profile(Region r) {
  switch (r) {
    case Region::kH1: return {{0, 1}};
    case Region::kH2: return {{0, 0}};
    case Region::kH3: return {{1, 1}};
    case Region::kH4: return {{1, 0}};
  }
  throw std::logic_error("unknown region");
}

/// Set of regions a gain vector belongs to.
struct RegionLabel {
  std::array<bool, 4> members{};

  bool contains(Region r) const { return members[static_cast<int>(r)]; }
  void insert(Region r) { members[static_cast<int>(r)] = true; }
  bool empty() const { return !(members[0] || members[1] || members[2] || members[3]); }

  /// e.g. "H1+H4"; "none" when empty.
  std::string to_string() const {
    std::string out;
    for (Region r : kAllRegions) {
      if (!contains(r)) continue;
      if (!out.empty()) out += '+';
      out += region_name(r);
    }
    return out.empty() ? "none" : out;
  }

  /// Equilibrium profiles implied by the label, in lexicographic order.
  std::vector<ActionProfile> profiles() const {
    std::vector<ActionProfile> out;
    for (Region r : {Region::kH2, Region::kH1, Region::kH4, Region::kH3}) {
      if (contains(r)) out.push_back(region_profile(r));
    }
    return out;
  }

  friend bool operator==(const RegionLabel&, const RegionLabel&) = default;
};

/// True when the game is the symmetric two-by-two setting: K = S = 2, equal
/// bandwidths, a common noise variance, a common maximum power and strictly
/// positive gains.
inline bool is_symmetric_2x2(const GameSpec& game) {
  if (game.players() != 2 || game.channels() != 2) return false;
  if (game.bandwidth(0) != game.bandwidth(1)) return false;
  if (game.noise(0) != game.noise(1)) return false;
  if (game.max_power(0) != game.max_power(1)) return false;
  for (double g : game.gains()) {
    if (!(g > 0.0)) return false;
  }
  return true;
}

inline void require_symmetric_2x2(const GameSpec& game) {
  if (!is_symmetric_2x2(game)) {
    throw std::invalid_argument(
        "requires K=2, S=2, equal bandwidths, common noise and power, "
        "positive gains");
  }
}

/// Gain ratios and SNR behind the region test, exposed so that
/// samplers can keep away from the boundaries.
struct RegionInequalities {
  double ratio1;  // g11 / g12
  double ratio2;  // g21 / g22
  double snr;

  double psi(double x) const { return 1.0 + snr * x; }
};

inline RegionInequalities region_inequalities(const GameSpec& game) {
  require_symmetric_2x2(game);
  return {game.gain(0, 0) / game.gain(0, 1), game.gain(1, 0) / game.gain(1, 1),
          game.max_power(0) / game.noise(0)};
}

/// Region membership from the closed-form gain-ratio inequalities with
/// SNR = p_max / sigma^2 and psi(x) = 1 + SNR x.
///
/// H1: g11/g12 >= 1/psi(g22)  and  g21/g22 <= psi(g11)
/// H2: g11/g12 >= psi(g21)    and  g21/g22 >= psi(g11)
/// H3: g11/g12 <= 1/psi(g22)  and  g21/g22 <= 1/psi(g12)
/// H4: g11/g12 <= psi(g21)    and  g21/g22 >= 1/psi(g12)
///
/// H4's first bound is psi(g21): it is the condition under which player 1
/// prefers channel 2 when player 2 sits alone on channel 1.
inline RegionLabel classify_region_2x2(const GameSpec& game) {
  const RegionInequalities q = region_inequalities(game);
  const double g11 = game.gain(0, 0), g12 = game.gain(0, 1);
  const double g21 = game.gain(1, 0), g22 = game.gain(1, 1);
  RegionLabel label;
  if (q.ratio1 >= 1.0 / q.psi(g22) && q.ratio2 <= q.psi(g11)) {
    label.insert(Region::kH1);
  }
  if (q.ratio1 >= q.psi(g21) && q.ratio2 >= q.psi(g11)) {
    label.insert(Region::kH2);
  }
  if (q.ratio1 <= 1.0 / q.psi(g22) && q.ratio2 <= 1.0 / q.psi(g12)) {
    label.insert(Region::kH3);
  }
  if (q.ratio1 <= q.psi(g21) && q.ratio2 >= 1.0 / q.psi(g12)) {
    label.insert(Region::kH4);
  }
  return label;
}

/// Smallest relative gap between the two sides of any region inequality.
/// Values near zero mean the gains sit on a region boundary.
inline double region_boundary_margin(const GameSpec& game) {
  const RegionInequalities q = region_inequalities(game);
  const double g11 = game.gain(0, 0), g12 = game.gain(0, 1);
  const double g21 = game.gain(1, 0), g22 = game.gain(1, 1);
  // The eight inequalities share four distinct thresholds.
  const std::array<std::array<double, 2>, 4> sides = {{
      {q.ratio1, 1.0 / q.psi(g22)},
      {q.ratio2, q.psi(g11)},
      {q.ratio1, q.psi(g21)},
      {q.ratio2, 1.0 / q.psi(g12)},
  }};
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : sides) {
    margin = std::min(margin, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
  }
  return margin;
}

/// Potential of the 2x2 game at (row channel, column channel).
struct PotentialTable {
  std::array<std::array<double, 2>, 2> phi{};

  double at(Channel row, Channel col) const { return phi[row][col]; }
};

inline PotentialTable potential_table_2x2(const GameSpec& game) {
  if (game.players() != 2 || game.channels() != 2) {
    throw std::invalid_argument("potential table requires K=2, S=2");
  }
  PotentialTable t;
  for (Channel a = 0; a < 2; ++a) {
    for (Channel b = 0; b < 2; ++b) t.phi[a][b] = potential(game, {{a, b}});
  }
  return t;
}

/// Strictly mixed equilibrium of the 2x2 game, defined only when both
/// orthogonal profiles are equilibria (region H1 and H4). Each player mixes
/// so that the other is indifferent between its two channels.
inline MixedProfile mixed_ne_2x2(const GameSpec& game) {
  const RegionLabel label = classify_region_2x2(game);
  if (!label.contains(Region::kH1) || !label.contains(Region::kH4)) {
    throw std::domain_error(
        "no strictly mixed equilibrium: gains are not in H1 and H4");
  }
  const PotentialTable t = potential_table_2x2(game);
  const double p11 = t.at(0, 0), p12 = t.at(0, 1);
  const double p21 = t.at(1, 0), p22 = t.at(1, 1);
  const double denom = p12 + p21 - p11 - p22;
  if (!(std::abs(denom) > 1e-12)) {
    throw std::domain_error("degenerate potential differences");
  }
  MixedProfile mix;
  mix.probs = {{(p21 - p22) / denom, (p12 - p11) / denom},
               {(p12 - p22) / denom, (p21 - p11) / denom}};
  return mix;
}

/// Everything known about the equilibria of one game.
struct EquilibriumReport {
  std::vector<ActionProfile> pure_ne;
  std::vector<double> potentials;               // one per pure NE
  std::vector<std::vector<double>> utilities;   // [ne][player]
  std::optional<RegionLabel> region;            // symmetric 2x2 only
  std::optional<MixedProfile> mixed_ne;         // strictly mixed only
  std::vector<double> mixed_utilities;          // per player, with mixed_ne
};

inline EquilibriumReport analyze_equilibria(const GameSpec& game) {
  EquilibriumReport report;
  report.pure_ne = enumerate_pure_ne(game);
  for (const auto& p : report.pure_ne) {
    report.potentials.push_back(potential(game, p));
    std::vector<double> u;
    for (Player k = 0; k < game.players(); ++k) u.push_back(utility(game, p, k));
    report.utilities.push_back(std::move(u));
  }
  if (is_symmetric_2x2(game)) {
    report.region = classify_region_2x2(game);
    if (report.region->contains(Region::kH1) &&
        report.region->contains(Region::kH4)) {
      try {
        report.mixed_ne = mixed_ne_2x2(game);
        for (Player k = 0; k < 2; ++k) {
          report.mixed_utilities.push_back(
              mixed_utility(game, *report.mixed_ne, k));
        }
      } catch (const std::domain_error&) {
        // degenerate potential table: no mixed point to report
      }
    }
  }
  return report;
}

}  // namespace chansel

#endif  // CHANSEL_EQUILIBRIUM_HPP
