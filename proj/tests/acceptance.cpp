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

// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is non-zero if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "chansel/dynamics.hpp"
#include "chansel/equilibrium.hpp"
#include "chansel/game.hpp"
#include "chansel/io.hpp"
#include "chansel/random.hpp"
#include "oracles.hpp"

namespace {

using namespace chansel;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] %2d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

GameSpec game_2x2(double p, double noise, std::vector<double> gains) {
  return GameSpec({1.0, 1.0}, {noise, noise}, {p, p}, std::move(gains));
}

// Games shared by criteria 1 and 4.
std::vector<GameSpec> general_games() {
  oracle::RandomGames gen(1001);
  std::vector<GameSpec> out;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t K = gen.pick(1, 4), S = gen.pick(1, 4);
    out.push_back(gen.general(K, S));
  }
  return out;
}

// Boundary-avoiding symmetric 2x2 games over a spread of SNRs (criteria 3, 4).
std::vector<GameSpec> region_games() {
  oracle::RandomGames gen(3003);
  const std::array<double, 5> snrs{0.1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<GameSpec> out;
  while (out.size() < 10'000) {
    GameSpec g = gen.symmetric_2x2(snrs[out.size() % snrs.size()]);
    if (region_boundary_margin(g) >= 1e-9) out.push_back(std::move(g));
  }
  return out;
}

void exact_potential(const std::vector<GameSpec>& games) {
  const auto start = Clock::now();
  oracle::RandomGames gen(1002);
  double worst = 0.0;
  for (const GameSpec& g : games) {
    const ActionProfile a{gen.profile(g.players(), g.channels())};
    const double phi = potential(g, a);
    for (Player k = 0; k < g.players(); ++k) {
      const double u = utility(g, a, k);
      for (Channel s = 0; s < g.channels(); ++s) {
        ActionProfile b = a;
        b.channels[k] = s;
        worst = std::max(worst, std::abs((utility(g, b, k) - u) - (potential(g, b) - phi)));
      }
    }
  }
  const double secs = seconds_since(start);
  report(1, worst <= 1e-9 && secs < 10.0,
         fmt("exact potential: max |du - dphi| = %.3g over 1000 games (tol 1e-9), %.2f s (limit 10 s)",
             worst, secs));
}

void aggregation_identity() {
  oracle::RandomGames gen(2002);
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const std::size_t K = gen.pick(1, 4), S = gen.pick(1, 4);
    const GameSpec g = gen.general(K, S);
    const ActionProfile a{gen.profile(K, S)};
    const Player k = gen.pick(0, K - 1);
    const auto gamma = aggregate_message(g, a);
    worst = std::max(worst, std::abs(aggregated_utility(g, k, a.channels[k], gamma) -
                                     utility(g, a, k)));
  }
  report(2, worst <= 1e-12,
         fmt("aggregation identity: max error %.3g over 10000 triples (tol 1e-12)", worst));
}

void region_agreement(const std::vector<GameSpec>& games) {
  const auto start = Clock::now();
  std::size_t agree = 0;
  for (const GameSpec& g : games) {
    std::vector<std::vector<Channel>> predicted;
    for (const auto& p : classify_region_2x2(g).profiles()) predicted.push_back(p.channels);
    std::vector<std::vector<Channel>> enumerated;
    for (const auto& p : enumerate_pure_ne(g)) enumerated.push_back(p.channels);
    agree += predicted == enumerated ? 1 : 0;
  }
  const double secs = seconds_since(start);
  report(3, agree == games.size() && secs < 30.0,
         fmt("region classifier vs enumeration: %zu/%zu agree (need all), %.2f s (limit 30 s)",
             agree, games.size(), secs));
}

void ne_count_bound(const std::vector<GameSpec>& a, const std::vector<GameSpec>& b) {
  std::size_t zero = 0, above = 0, total = 0;
  Json findings = Json::array();
  for (const auto* set : {&a, &b}) {
    for (const GameSpec& g : *set) {
      const std::size_t n = enumerate_pure_ne(g).size();
      ++total;
      if (n == 0) ++zero;
      if (n > opponent_profile_count(g)) {
        ++above;
        findings.push_back({{"game", game_to_json(g)}, {"pure_ne_count", n},
                            {"bound", opponent_profile_count(g)}});
      }
    }
  }
  std::string note;
  if (above > 0) {
    const fs::path path = fs::current_path() / "ne_count_findings.json";
    write_text_file(path.string(), findings.dump(2) + "\n");
    note = ", findings in " + path.string();
  }
  report(4, zero == 0,
         fmt("pure NE count: %zu games, %zu with none (need 0), %zu above S^(K-1)%s", total, zero,
             above, note.c_str()));
}

void mixed_equilibrium() {
  oracle::RandomGames gen(5005);
  std::size_t found = 0, bad = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 20'000 && found < 1000; ++i) {
    const GameSpec g = gen.symmetric_2x2(10.0);
    const RegionLabel label = classify_region_2x2(g);
    if (!label.contains(Region::kH1) || !label.contains(Region::kH4)) continue;
    ++found;
    const MixedProfile m = mixed_ne_2x2(g);
    for (Player k = 0; k < 2; ++k) {
      const double x = m.probs[k][0];
      if (!(x > 0.0 && x < 1.0) || std::abs(x + m.probs[k][1] - 1.0) > 1e-12) ++bad;
      worst_gap = std::max(worst_gap, std::abs(expected_utility_product(g, k, 0, m.probs) -
                                               expected_utility_product(g, k, 1, m.probs)));
    }
  }
  const MixedProfile ex = mixed_ne_2x2(game_2x2(1.0, 0.1, {1.0, 0.5, 0.5, 1.0}));
  const double ex_err = std::max({std::abs(ex.probs[0][0] - 0.2861300055513375),
                                  std::abs(ex.probs[1][0] - 0.7138699944486625)});
  report(5, found > 0 && bad == 0 && worst_gap <= 1e-9 && ex_err <= 1e-4,
         fmt("mixed NE: %zu two-equilibrium games, %zu off-interior, max indifference gap %.3g "
             "(tol 1e-9), worked example error %.3g (tol 1e-4)",
             found, bad, worst_gap, ex_err));
}

void fp_convergence() {
  const auto start = Clock::now();
  GameGenerator gen;
  gen.snr_db = 10.0;
  const std::size_t T = 100'000, games = 500;
  std::size_t drift_fail = 0, far = 0;
  double worst_drift = 0.0, worst_distance = 0.0;
  for (std::size_t i = 0; i < games; ++i) {
    const GameSpec g = gen.draw_trial(6006, i);
    const Trajectory traj = run_fp(g, uniform_beliefs(g), T);
    const MixedProfile early = empirical_frequencies(traj, T - T / 10);
    const MixedProfile final = empirical_frequencies(traj);
    double drift = 0.0;
    for (Player k = 0; k < 2; ++k) {
      for (Channel s = 0; s < 2; ++s) {
        drift = std::max(drift, std::abs(final.probs[k][s] - early.probs[k][s]));
      }
    }
    double distance = std::numeric_limits<double>::infinity();
    for (const auto& ne : enumerate_pure_ne(g)) {
      distance = std::min(distance, max_total_variation(final, point_mass(ne, 2)));
    }
    const RegionLabel label = classify_region_2x2(g);
    if (label.contains(Region::kH1) && label.contains(Region::kH4)) {
      distance = std::min(distance, max_total_variation(final, mixed_ne_2x2(g)));
    }
    worst_drift = std::max(worst_drift, drift);
    worst_distance = std::max(worst_distance, distance);
    drift_fail += drift < 1e-3 ? 0 : 1;
    far += distance <= 1e-2 ? 0 : 1;
  }
  const double secs = seconds_since(start);
  report(6, drift_fail == 0 && far == 0 && secs < 120.0,
         fmt("FP convergence: %zu games x %zu steps, max drift %.3g (tol 1e-3), max TV to "
             "nearest NE %.3g (tol 1e-2), %zu/%zu failing, %.1f s (limit 120 s)",
             games, T, worst_drift, worst_distance, drift_fail + far, games, secs));
}

void symmetric_cycle() {
  const GameSpec g = game_2x2(10.0, 1.0, {1.0, 1.0, 1.0, 1.0});
  const std::array<double, 2> xi{0.5, 0.5};
  const std::size_t T = 10'000;
  const Trajectory traj = run_fp(g, xi_beliefs(g, xi), T);
  bool exact = true;
  for (std::size_t t = 0; t < T && exact; ++t) {
    const Channel c = t % 2 == 0 ? 0 : 1;
    exact = traj.action(t, 0) == c && traj.action(t, 1) == c;
  }
  const MixedProfile f = empirical_frequencies(traj);
  double marg = 0.0;
  for (const auto& row : f.probs) {
    for (double x : row) marg = std::max(marg, std::abs(x - 0.5));
  }
  double belief = 0.0;
  for (std::size_t n = 1; n <= 100; ++n) {
    const auto odd = oracle::cycle_beliefs_odd(0.5, static_cast<double>(n));
    const auto even = oracle::cycle_beliefs_even(0.5, static_cast<double>(n));
    for (Player k = 0; k < 2; ++k) {
      belief = std::max({belief, std::abs(traj.snapshot(2 * n - 2, k, 0) - odd.ch1),
                         std::abs(traj.snapshot(2 * n - 2, k, 1) - odd.ch2),
                         std::abs(traj.snapshot(2 * n - 1, k, 0) - even.ch1),
                         std::abs(traj.snapshot(2 * n - 1, k, 1) - even.ch2)});
    }
  }
  report(7, exact && marg <= 1e-3 && belief <= 1e-12,
         fmt("symmetric 2-cycle: exact over %zu steps = %s, marginal error %.3g (tol 1e-3), "
             "closed-form belief error %.3g (tol 1e-12)",
             T, exact ? "yes" : "no", marg, belief));
}

void cycle_pathology() {
  const GameSpec g = game_2x2(10.0, 1.0, {1.0, 1.0, 1.0, 1.0});
  const std::array<double, 2> xi{0.5, 0.5};
  const auto cycle = detect_cycle(run_fp(g, xi_beliefs(g, xi), 10'000), 1000);
  const EquilibriumReport r = analyze_equilibria(g);
  const double cyc = cycle ? cycle->time_avg_utility[0] : NAN;
  const double mixed = r.mixed_utilities.empty() ? NAN : r.mixed_utilities[0];
  double pure = INFINITY;
  for (const auto& u : r.utilities) pure = std::min(pure, u[0]);
  const bool values = std::abs(cyc - 0.4665) <= 1e-3 && std::abs(mixed - 1.098) <= 1e-3 &&
                      std::abs(pure - 1.730) <= 1e-3;
  const bool order = cyc < mixed && mixed < pure;
  report(8, values && order,
         fmt("cycle payoff %.4f (want 0.4665), mixed NE %.4f (want 1.098), pure NE %.4f "
             "(want 1.730), tol 1e-3, strict ordering = %s",
             cyc, mixed, pure, order ? "yes" : "no"));
}

void engine_equivalence() {
  oracle::RandomGames gen(9009);
  std::size_t same = 0;
  for (int i = 0; i < 100; ++i) {
    const GameSpec g = gen.general(2, gen.pick(2, 4));
    const BeliefState init = uniform_beliefs(g);
    const Trajectory a = run_fp(g, init, 1000);
    const Trajectory b = run_aggregation_fp(g, matched_q_state(g, init), 1000);
    same += a.actions == b.actions ? 1 : 0;
  }
  report(9, same == 100,
         fmt("classic vs aggregation engine: %zu/100 games with identical actions over 1000 steps",
             same));
}

void cycle_persistence() {
  const GameSpec flat = game_2x2(10.0, 1.0, {1.0, 1.0, 1.0, 1.0});
  const std::array<double, 2> xi{0.5, 0.5};
  bool always = true;
  for (std::size_t n = 1; n <= 1'000'000 && always; ++n) {
    always = cycle_persistence_2x2(flat, xi, n);
  }
  // Channel 2 is weaker for both users: ratio about 3.
  const GameSpec steep = game_2x2(10.0, 1.0, {1.0, 0.25, 1.0, 0.25});
  const auto ratios = cycle_ratios_2x2(steep);
  const auto [lo, hi] = cycle_ratio_bounds(0.5, 1);
  const bool outside = ratios[0] < lo || ratios[0] > hi;
  const bool predicted_exit = !cycle_persistence_2x2(steep, xi, 1);
  const Trajectory traj = run_fp(steep, xi_beliefs(steep, xi), 1000);
  const auto cycle = detect_cycle(traj, 500);
  const bool left_cycle =
      !(traj.action(1, 0) == 1 && traj.action(1, 1) == 1) &&
      !(cycle && cycle->period == 2 && cycle->cycle_profiles[0].channels[0] ==
                                           cycle->cycle_profiles[0].channels[1]);
  report(10, always && outside && predicted_exit && left_cycle,
         fmt("cycle persistence: R=1 holds for n<=1e6 = %s; R=%.3f outside [%.2f, %.2f] = %s, "
             "predicted exit at n=1 = %s, simulation leaves the cycle = %s",
             always ? "yes" : "no", ratios[0], lo, hi, outside ? "yes" : "no",
             predicted_exit ? "yes" : "no", left_cycle ? "yes" : "no"));
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path other = b / fs::relative(e.path(), a);
    if (!fs::exists(other) || read_text_file(e.path().string()) != read_text_file(other.string())) {
      return false;
    }
    ++files;
  }
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file() ? 1 : 0;
  return count_b == files;
}

void cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "chansel_acceptance";
  fs::remove_all(root);
  const std::string config = std::string(CHANSEL_CONFIG_DIR) + "/montecarlo_2x2_10db.json";
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const std::string cmd = std::string(CHANSEL_CLI_PATH) + " montecarlo " + config +
                            " --out " + (root / std::to_string(i)).string() + " >/dev/null";
    const int status = std::system(cmd.c_str());
    codes[i] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::size_t files = 0;
  const bool same = codes[0] == 0 && codes[1] == 0 && same_tree(root / "0", root / "1", files);
  report(11, same,
         fmt("montecarlo CLI twice with seed 42: exit codes %d/%d, %zu files byte-identical = %s",
             codes[0], codes[1], files, same ? "yes" : "no"));
}

}  // namespace

int main() {
  const auto general = general_games();
  const auto regions = region_games();
  exact_potential(general);
  aggregation_identity();
  region_agreement(regions);
  ne_count_bound(general, regions);
  mixed_equilibrium();
  fp_convergence();
  symmetric_cycle();
  cycle_pathology();
  engine_equivalence();
  cycle_persistence();
  cli_determinism();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
