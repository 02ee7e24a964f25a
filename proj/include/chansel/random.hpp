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

#ifndef CHANSEL_RANDOM_HPP
#define CHANSEL_RANDOM_HPP

// Seeded channel realizations.
//
// Trial i of an experiment with master seed `seed` draws from
// std::mt19937_64 seeded with splitmix64(seed ^ i). Gains are produced by
// inverse-transform sampling from 53-bit uniforms so the stream does not
// depend on the standard library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chansel/game.hpp"

namespace chansel {

/// One round of the splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(seed ^ trial);
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

enum class Fading {
  kExponential,  // unit-mean exponential power gains (Rayleigh amplitudes)
  kUniform,      // uniform on (0, 2), unit mean
  kUnit,         // every gain equal to one
};

inline const char* to_string(Fading f) {
  switch (f) {
    case Fading::kExponential: return "exponential";
    case Fading::kUniform: return "uniform";
    case Fading::kUnit: return "unit";
  }
  return "?";
}

inline Fading parse_fading(std::string_view s) {
  if (s == "exponential" || s == "rayleigh") return Fading::kExponential;
  if (s == "uniform") return Fading::kUniform;
  if (s == "unit") return Fading::kUnit;
  throw std::invalid_argument("unknown fading law: " + std::string(s));
}

/// A single strictly positive gain.
inline double draw_gain(std::mt19937_64& rng, Fading law) {
  switch (law) {
    case Fading::kExponential: {
      double g = 0.0;
      while (!(g > 0.0)) g = -std::log1p(-uniform01(rng));
      return g;
    }
    case Fading::kUniform: {
      double g = 0.0;
      while (!(g > 0.0)) g = 2.0 * uniform01(rng);
      return g;
    }
    case Fading::kUnit:
      return 1.0;
  }
  throw std::logic_error("unknown fading law");
}

/// Parameters of randomly generated games: equal bandwidths, unit noise and
/// p_max = 10^(snr_db / 10) for every player.
struct GameGenerator {
  std::size_t players = 2;
  std::size_t channels = 2;
  double snr_db = 10.0;
  Fading fading = Fading::kExponential;

  GameSpec draw(std::mt19937_64& rng) const {
    if (players == 0 || channels == 0) {
      throw std::invalid_argument("generator needs players and channels");
    }
    const double p_max = std::pow(10.0, snr_db / 10.0);
    std::vector<double> gains(players * channels);
    for (double& g : gains) g = draw_gain(rng, fading);
    return GameSpec(std::vector<double>(channels, 1.0),
                    std::vector<double>(channels, 1.0),
                    std::vector<double>(players, p_max), std::move(gains));
  }

  /// Game of trial `trial` under master seed `seed`.
  GameSpec draw_trial(std::uint64_t seed, std::uint64_t trial) const {
    std::mt19937_64 rng(trial_seed(seed, trial));
    return draw(rng);
  }
};

}  // namespace chansel

#endif  // CHANSEL_RANDOM_HPP
