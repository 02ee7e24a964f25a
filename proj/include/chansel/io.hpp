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

#ifndef CHANSEL_IO_HPP
#define CHANSEL_IO_HPP

// Serialization of games, equilibrium reports, trajectories and plot data.
//
// All files use one-based channel numbers. Reals are printed with 17
// significant digits so that a file read back reproduces the same doubles.
// JSON documents carry a "schema_version" field.

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chansel/dynamics.hpp"
#include "chansel/equilibrium.hpp"
#include "chansel/game.hpp"
#include "json.hpp"

namespace chansel {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Exact decimal form of a double.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// --- games and profiles ----------------------------------------------------

inline Json game_to_json(const GameSpec& game) {
  Json gains = Json::array();
  for (Player k = 0; k < game.players(); ++k) {
    Json row = Json::array();
    for (Channel s = 0; s < game.channels(); ++s) row.push_back(game.gain(k, s));
    gains.push_back(std::move(row));
  }
  Json j;
  j["bandwidths"] = game.bandwidths();
  j["noise"] = game.noise();
  j["max_power"] = game.max_power();
  j["gains"] = std::move(gains);
  return j;
}

/// Builds a GameSpec from its JSON form. Throws std::invalid_argument with a
/// message naming the offending field.
inline GameSpec game_from_json(const Json& j) {
  auto vec = [&](const char* key) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("game.") + key + " is missing");
    }
    try {
      return j.at(key).get<std::vector<double>>();
    } catch (const Json::exception&) {
      throw std::invalid_argument(std::string("game.") + key +
                                  " must be an array of numbers");
    }
  };
  std::vector<double> bandwidths = vec("bandwidths");
  std::vector<double> noise = vec("noise");
  std::vector<double> max_power = vec("max_power");
  if (!j.contains("gains")) throw std::invalid_argument("game.gains is missing");
  std::vector<std::vector<double>> gains;
  try {
    gains = j.at("gains").get<std::vector<std::vector<double>>>();
  } catch (const Json::exception&) {
    throw std::invalid_argument("game.gains must be a matrix of numbers");
  }
  try {
    return GameSpec::from_rows(std::move(bandwidths), std::move(noise),
                               std::move(max_power), gains);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("game: ") + e.what());
  }
}

inline Json profile_to_json(const ActionProfile& p) {
  Json out = Json::array();
  for (Channel c : p.channels) out.push_back(c + 1);
  return out;
}

inline ActionProfile profile_from_json(const Json& j) {
  ActionProfile p;
  for (const auto& c : j) {
    const auto n = c.get<std::size_t>();
    if (n == 0) throw std::invalid_argument("channel numbers start at 1");
    p.channels.push_back(n - 1);
  }
  return p;
}

inline Json mixed_to_json(const MixedProfile& m) { return Json(m.probs); }

inline Json region_to_json(const RegionLabel& label) {
  Json out = Json::array();
  for (Region r : kAllRegions) {
    if (label.contains(r)) out.push_back(region_name(r));
  }
  return out;
}

inline Json report_to_json(const EquilibriumReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["pure_ne_count"] = r.pure_ne.size();
  Json pure = Json::array();
  for (std::size_t i = 0; i < r.pure_ne.size(); ++i) {
    Json e;
    e["profile"] = profile_to_json(r.pure_ne[i]);
    e["potential"] = r.potentials[i];
    e["utilities"] = r.utilities[i];
    pure.push_back(std::move(e));
  }
  j["pure_ne"] = std::move(pure);
  j["region"] = r.region ? region_to_json(*r.region) : Json(nullptr);
  if (r.mixed_ne) {
    j["mixed_ne"] = {{"probs", mixed_to_json(*r.mixed_ne)},
                     {"utilities", r.mixed_utilities}};
  } else {
    j["mixed_ne"] = nullptr;
  }
  return j;
}

inline Json cycle_to_json(const std::optional<CycleReport>& c) {
  if (!c) return nullptr;
  Json profiles = Json::array();
  for (const auto& p : c->cycle_profiles) profiles.push_back(profile_to_json(p));
  return {{"period", c->period},
          {"onset", c->onset},
          {"profiles", std::move(profiles)},
          {"time_avg_utility", c->time_avg_utility}};
}

// --- trajectories ------------------------------------------------------------

inline const char* snapshot_prefix(Variant v) {
  return v == Variant::kClassic ? "belief_" : "q_";
}

/// One row per (step, player):
/// t, player, channel, utility, potential, belief_1..belief_S (classic) or
/// q_1..q_S followed by gamma_1..gamma_S (aggregation). t and player are
/// one-based.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  const std::size_t S = traj.channels;
  os << "t,player,channel,utility,potential";
  for (std::size_t s = 1; s <= S; ++s) os << ',' << snapshot_prefix(traj.variant) << s;
  if (traj.variant == Variant::kAggregation) {
    for (std::size_t s = 1; s <= S; ++s) os << ",gamma_" << s;
  }
  os << '\n';
  for (std::size_t t = 0; t < traj.length(); ++t) {
    for (Player k = 0; k < traj.players; ++k) {
      os << t + 1 << ',' << k + 1 << ',' << traj.action(t, k) + 1 << ','
         << format_real(traj.utility(t, k)) << ','
         << format_real(traj.potentials[t]);
      for (Channel s = 0; s < S; ++s) os << ',' << format_real(traj.snapshot(t, k, s));
      if (traj.variant == Variant::kAggregation) {
        for (Channel s = 0; s < S; ++s) os << ',' << format_real(traj.gamma[t * S + s]);
      }
      os << '\n';
    }
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Reads a trajectory written by write_trajectory_csv. The CSV form carries
/// no tie-break or initial state; those fields are left at their defaults.
inline Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty trajectory file");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 6 || header[0] != "t" || header[1] != "player") {
    throw std::runtime_error("not a trajectory CSV header");
  }
  Trajectory traj;
  traj.variant = header[5].rfind("q_", 0) == 0 ? Variant::kAggregation
                                               : Variant::kClassic;
  const std::size_t extra = header.size() - 5;
  traj.channels = traj.variant == Variant::kAggregation ? extra / 2 : extra;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    rows.push_back(detail::split_csv_line(line));
    if (rows.back().size() != header.size()) {
      throw std::runtime_error("trajectory row has wrong number of cells");
    }
  }
  if (rows.empty()) return traj;
  std::size_t K = 0;
  for (const auto& r : rows) {
    if (std::stoul(r[0]) != 1) break;
    ++K;
  }
  if (K == 0 || rows.size() % K != 0) {
    throw std::runtime_error("trajectory rows do not form whole steps");
  }
  traj.players = K;
  const std::size_t S = traj.channels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::size_t t = i / K, k = i % K;
    if (std::stoul(r[0]) != t + 1 || std::stoul(r[1]) != k + 1) {
      throw std::runtime_error("trajectory rows out of order");
    }
    const std::size_t c = std::stoul(r[2]);
    if (c == 0) throw std::runtime_error("channel numbers start at 1");
    traj.actions.push_back(c - 1);
    traj.utilities.push_back(std::stod(r[3]));
    if (k == 0) traj.potentials.push_back(std::stod(r[4]));
    for (std::size_t s = 0; s < S; ++s) traj.snapshots.push_back(std::stod(r[5 + s]));
    if (traj.variant == Variant::kAggregation && k == 0) {
      for (std::size_t s = 0; s < S; ++s) traj.gamma.push_back(std::stod(r[5 + S + s]));
    }
  }
  check_trajectory(traj);
  return traj;
}

inline Json trajectory_to_json(const Trajectory& traj) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["variant"] = to_string(traj.variant);
  j["tie_break"] = to_string(traj.tie_break);
  j["players"] = traj.players;
  j["channels"] = traj.channels;
  j["initial_step"] = traj.initial_step;
  j["initial_state"] = traj.initial_state;
  j["steps"] = traj.length();
  Json actions = Json::array();
  for (std::size_t t = 0; t < traj.length(); ++t) actions.push_back(profile_to_json(traj.profile(t)));
  j["profiles"] = std::move(actions);
  j["utilities"] = traj.utilities;
  j["potential"] = traj.potentials;
  j["snapshots"] = traj.snapshots;
  j["gamma"] = traj.gamma;
  return j;
}

inline Trajectory trajectory_from_json(const Json& j) {
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw std::runtime_error("unsupported trajectory schema version");
  }
  Trajectory traj;
  traj.variant = parse_variant(j.at("variant").get<std::string>());
  traj.tie_break = parse_tie_break(j.at("tie_break").get<std::string>());
  traj.players = j.at("players").get<std::size_t>();
  traj.channels = j.at("channels").get<std::size_t>();
  traj.initial_step = j.at("initial_step").get<std::size_t>();
  traj.initial_state = j.at("initial_state").get<std::vector<std::vector<double>>>();
  for (const auto& p : j.at("profiles")) {
    const ActionProfile profile = profile_from_json(p);
    traj.actions.insert(traj.actions.end(), profile.channels.begin(), profile.channels.end());
  }
  traj.utilities = j.at("utilities").get<std::vector<double>>();
  traj.potentials = j.at("potential").get<std::vector<double>>();
  traj.snapshots = j.at("snapshots").get<std::vector<double>>();
  traj.gamma = j.at("gamma").get<std::vector<double>>();
  if (j.at("steps").get<std::size_t>() != traj.length()) {
    throw std::runtime_error("trajectory step count mismatch");
  }
  check_trajectory(traj);
  return traj;
}

// --- plot data -----------------------------------------------------------------

enum class PlotKind { kBeliefs, kUtility, kRegions };

inline PlotKind parse_plot_kind(std::string_view s) {
  if (s == "beliefs") return PlotKind::kBeliefs;
  if (s == "utility") return PlotKind::kUtility;
  if (s == "regions") return PlotKind::kRegions;
  throw std::invalid_argument("unsupported plot kind: " + std::string(s));
}

/// t, player, belief_1..belief_S (or q_1..q_S).
inline void write_belief_series(const Trajectory& traj, std::ostream& os) {
  os << "t,player";
  for (std::size_t s = 1; s <= traj.channels; ++s) os << ',' << snapshot_prefix(traj.variant) << s;
  os << '\n';
  for (std::size_t t = 0; t < traj.length(); ++t) {
    for (Player k = 0; k < traj.players; ++k) {
      os << t + 1 << ',' << k + 1;
      for (Channel s = 0; s < traj.channels; ++s) os << ',' << format_real(traj.snapshot(t, k, s));
      os << '\n';
    }
  }
}

/// t, player, utility, running average utility, potential.
inline void write_utility_series(const Trajectory& traj, std::ostream& os) {
  os << "t,player,utility,mean_utility,potential\n";
  std::vector<double> sums(traj.players, 0.0);
  for (std::size_t t = 0; t < traj.length(); ++t) {
    for (Player k = 0; k < traj.players; ++k) {
      sums[k] += traj.utility(t, k);
      os << t + 1 << ',' << k + 1 << ',' << format_real(traj.utility(t, k)) << ','
         << format_real(sums[k] / static_cast<double>(t + 1)) << ','
         << format_real(traj.potentials[t]) << '\n';
    }
  }
}

/// One row per symmetric 2x2 game: the raw gains, the two gain ratios used
/// as axes of the equilibrium-region diagram, and the region membership.
inline void write_region_scatter(const std::vector<GameSpec>& games, std::ostream& os) {
  os << "sample,g11,g12,g21,g22,ratio_21_22,ratio_11_12,H1,H2,H3,H4,label\n";
  for (std::size_t i = 0; i < games.size(); ++i) {
    const GameSpec& g = games[i];
    const RegionLabel label = classify_region_2x2(g);
    os << i << ',' << format_real(g.gain(0, 0)) << ',' << format_real(g.gain(0, 1)) << ','
       << format_real(g.gain(1, 0)) << ',' << format_real(g.gain(1, 1)) << ','
       << format_real(g.gain(1, 0) / g.gain(1, 1)) << ','
       << format_real(g.gain(0, 0) / g.gain(0, 1));
    for (Region r : kAllRegions) os << ',' << (label.contains(r) ? 1 : 0);
    os << ',' << label.to_string() << '\n';
  }
}

/// Writes trajectory-derived plot data of the given kind.
inline void emit_plot_data(const Trajectory& traj, PlotKind kind, std::ostream& os) {
  switch (kind) {
    case PlotKind::kBeliefs: write_belief_series(traj, os); return;
    case PlotKind::kUtility: write_utility_series(traj, os); return;
    case PlotKind::kRegions:
      throw std::invalid_argument("region scatter needs a set of games");
  }
}

inline void emit_plot_data(const std::vector<GameSpec>& games, PlotKind kind,
                           std::ostream& os) {
  if (kind != PlotKind::kRegions) {
    throw std::invalid_argument("only region scatter is built from games");
  }
  write_region_scatter(games, os);
}

// --- files -----------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace chansel

#endif  // CHANSEL_IO_HPP
