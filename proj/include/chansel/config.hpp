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

#ifndef CHANSEL_CONFIG_HPP
#define CHANSEL_CONFIG_HPP

// Experiment configuration files. See configs/README.md for the schema.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chansel/dynamics.hpp"
#include "chansel/game.hpp"
#include "chansel/io.hpp"
#include "chansel/random.hpp"

namespace chansel {

/// Invalid or unreadable configuration. The message names the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { kCsv, kJson };

inline OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  throw std::invalid_argument("unknown output format: " + s);
}

inline const char* to_string(OutputFormat f) {
  return f == OutputFormat::kCsv ? "csv" : "json";
}

/// How the dynamics are initialised.
struct InitialBeliefs {
  enum class Kind { kUniform, kXi, kExplicit } kind = Kind::kUniform;
  std::vector<double> xi;
  std::vector<std::vector<double>> marginals;

  BeliefState build(const GameSpec& game) const {
    switch (kind) {
      case Kind::kUniform: return uniform_beliefs(game);
      case Kind::kXi: return xi_beliefs(game, xi);
      case Kind::kExplicit: {
        BeliefState b{1, marginals};
        check_beliefs(game, b);
        return b;
      }
    }
    throw std::logic_error("unknown initial belief kind");
  }
};

struct DynamicsConfig {
  Variant variant = Variant::kClassic;
  std::size_t steps = 10'000;
  TieBreak tie_break = TieBreak::kLowest;
  InitialBeliefs initial;
  /// Aggregation only: start from Q = 0 (weight 0) instead of the expected
  /// utilities implied by the initial beliefs.
  bool zero_q = false;
  std::size_t cycle_window = 1000;
};

struct OutputConfig {
  std::string dir = "out";
  OutputFormat format = OutputFormat::kCsv;
  /// Write one trajectory file per trial in `montecarlo`.
  bool trajectories = false;
};

struct ExperimentConfig {
  std::optional<GameSpec> game;
  std::optional<GameGenerator> generator;
  std::size_t trials = 1;
  DynamicsConfig dynamics;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  OutputConfig output;

  /// Game used by trial `i`.
  GameSpec trial_game(std::size_t i) const {
    return game ? *game : generator->draw_trial(seed, i);
  }
};

namespace detail {

template <typename T>
T get_field(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

inline void reject_unknown(const Json& j, const std::vector<std::string>& known,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError(where + ": unknown field '" + it.key() + "'");
  }
}

inline InitialBeliefs parse_initial(const Json& j) {
  InitialBeliefs out;
  if (j.is_string()) {
    if (j.get<std::string>() != "uniform") {
      throw ConfigError("dynamics.initial_beliefs: unknown preset '" +
                        j.get<std::string>() + "'");
    }
    return out;
  }
  if (!j.is_object()) throw ConfigError("dynamics.initial_beliefs has the wrong type");
  if (j.contains("xi") == j.contains("marginals")) {
    throw ConfigError("dynamics.initial_beliefs needs exactly one of xi, marginals");
  }
  if (j.contains("xi")) {
    out.kind = InitialBeliefs::Kind::kXi;
    out.xi = get_field<std::vector<double>>(j, "xi", "dynamics.initial_beliefs");
  } else {
    out.kind = InitialBeliefs::Kind::kExplicit;
    out.marginals = get_field<std::vector<std::vector<double>>>(
        j, "marginals", "dynamics.initial_beliefs");
  }
  return out;
}

}  // namespace detail

/// Parses and validates a configuration document. Defaults: classic
/// dynamics, 10^4 steps, lowest-index tie-break, uniform initial beliefs.
inline ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(j, {"schema_version", "game", "generator", "dynamics",
                             "seed", "workers", "output"},
                         "config");
  if (j.contains("schema_version") &&
      detail::get_field<int>(j, "schema_version", "config") != kSchemaVersion) {
    throw ConfigError("config.schema_version must be 1");
  }
  ExperimentConfig cfg;
  if (j.contains("game") == j.contains("generator")) {
    throw ConfigError("config needs exactly one of game, generator");
  }
  if (j.contains("game")) {
    try {
      cfg.game = game_from_json(j.at("game"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else {
    const Json& g = j.at("generator");
    detail::reject_unknown(g, {"players", "channels", "snr_db", "fading", "trials"},
                           "generator");
    GameGenerator gen;
    gen.players = detail::get_field<std::size_t>(g, "players", "generator");
    gen.channels = detail::get_field<std::size_t>(g, "channels", "generator");
    gen.snr_db = detail::get_field<double>(g, "snr_db", "generator");
    if (g.contains("fading")) {
      try {
        gen.fading = parse_fading(detail::get_field<std::string>(g, "fading", "generator"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("generator.fading: ") + e.what());
      }
    }
    if (gen.players == 0 || gen.channels == 0) {
      throw ConfigError("generator.players and generator.channels must be >= 1");
    }
    cfg.trials = detail::get_field<std::size_t>(g, "trials", "generator");
    if (!j.contains("seed")) throw ConfigError("config.seed is required with a generator");
    cfg.generator = gen;
  }
  if (j.contains("seed")) cfg.seed = detail::get_field<std::uint64_t>(j, "seed", "config");
  if (j.contains("workers")) {
    cfg.workers = detail::get_field<std::size_t>(j, "workers", "config");
    if (cfg.workers == 0) throw ConfigError("config.workers must be >= 1");
  }
  if (j.contains("dynamics")) {
    const Json& d = j.at("dynamics");
    detail::reject_unknown(d, {"variant", "steps", "tie_break", "initial_beliefs",
                               "initial_q", "cycle_window"},
                           "dynamics");
    try {
      if (d.contains("variant")) {
        cfg.dynamics.variant =
            parse_variant(detail::get_field<std::string>(d, "variant", "dynamics"));
      }
      if (d.contains("tie_break")) {
        cfg.dynamics.tie_break =
            parse_tie_break(detail::get_field<std::string>(d, "tie_break", "dynamics"));
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("dynamics: ") + e.what());
    }
    if (d.contains("steps")) {
      cfg.dynamics.steps = detail::get_field<std::size_t>(d, "steps", "dynamics");
      if (cfg.dynamics.steps == 0) throw ConfigError("dynamics.steps must be >= 1");
    }
    if (d.contains("initial_beliefs")) {
      cfg.dynamics.initial = detail::parse_initial(d.at("initial_beliefs"));
    }
    if (d.contains("initial_q")) {
      const auto q = detail::get_field<std::string>(d, "initial_q", "dynamics");
      if (q != "matched" && q != "zero") {
        throw ConfigError("dynamics.initial_q must be 'matched' or 'zero'");
      }
      cfg.dynamics.zero_q = q == "zero";
    }
    if (d.contains("cycle_window")) {
      cfg.dynamics.cycle_window =
          detail::get_field<std::size_t>(d, "cycle_window", "dynamics");
    }
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    detail::reject_unknown(o, {"dir", "format", "trajectories"}, "output");
    if (o.contains("dir")) cfg.output.dir = detail::get_field<std::string>(o, "dir", "output");
    if (o.contains("format")) {
      try {
        cfg.output.format =
            parse_output_format(detail::get_field<std::string>(o, "format", "output"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("output: ") + e.what());
      }
    }
    if (o.contains("trajectories")) {
      cfg.output.trajectories = detail::get_field<bool>(o, "trajectories", "output");
    }
  }
  // Initial beliefs must fit the game shape.
  try {
    const GameSpec probe = cfg.game ? *cfg.game : cfg.generator->draw_trial(cfg.seed, 0);
    (void)cfg.dynamics.initial.build(probe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("dynamics.initial_beliefs: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  Json j;
  try {
    j = Json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": parse error: " + e.what());
  }
  return parse_config(j);
}

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  if (cfg.game) {
    j["game"] = game_to_json(*cfg.game);
  } else {
    j["generator"] = {{"players", cfg.generator->players},
                      {"channels", cfg.generator->channels},
                      {"snr_db", cfg.generator->snr_db},
                      {"fading", to_string(cfg.generator->fading)},
                      {"trials", cfg.trials}};
  }
  Json init;
  switch (cfg.dynamics.initial.kind) {
    case InitialBeliefs::Kind::kUniform: init = "uniform"; break;
    case InitialBeliefs::Kind::kXi: init = {{"xi", cfg.dynamics.initial.xi}}; break;
    case InitialBeliefs::Kind::kExplicit:
      init = {{"marginals", cfg.dynamics.initial.marginals}};
      break;
  }
  j["dynamics"] = {{"variant", to_string(cfg.dynamics.variant)},
                   {"steps", cfg.dynamics.steps},
                   {"tie_break", to_string(cfg.dynamics.tie_break)},
                   {"initial_beliefs", std::move(init)},
                   {"initial_q", cfg.dynamics.zero_q ? "zero" : "matched"},
                   {"cycle_window", cfg.dynamics.cycle_window}};
  j["seed"] = cfg.seed;
  j["output"] = {{"format", to_string(cfg.output.format)},
                 {"trajectories", cfg.output.trajectories}};
  return j;
}

}  // namespace chansel

#endif  // CHANSEL_CONFIG_HPP
