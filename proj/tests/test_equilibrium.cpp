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

#include "chansel/equilibrium.hpp"

#include <vector>

#include "chansel/dynamics.hpp"
#include "gtest/gtest.h"
#include "oracles.hpp"

namespace chansel {
namespace {

GameSpec game_2x2(double p_max, double noise, std::vector<double> gains) {
  return GameSpec({1.0, 1.0}, {noise, noise}, {p_max, p_max}, std::move(gains));
}

std::vector<std::vector<Channel>> as_vectors(const std::vector<ActionProfile>& ps) {
  std::vector<std::vector<Channel>> out;
  for (const auto& p : ps) out.push_back(p.channels);
  return out;
}

TEST(PureNeTest, single_player_picks_best_channel) {
  const GameSpec g({1.0, 2.0, 1.0}, {1.0, 1.0, 0.5}, {1.0}, {3.0, 1.0, 1.0});
  // rates: 1/4 log2(4) = 0.5, 1/2 log2(2) = 0.5 (tie), 1/4 log2(3)
  EXPECT_EQ(as_vectors(enumerate_pure_ne(g)),
            (std::vector<std::vector<Channel>>{{0}, {1}}));
  const GameSpec h({1.0, 1.0}, {1.0, 1.0}, {1.0}, {1.0, 2.0});
  EXPECT_EQ(as_vectors(enumerate_pure_ne(h)), (std::vector<std::vector<Channel>>{{1}}));
}

TEST(PureNeTest, worked_2x2_examples) {
  EXPECT_EQ(as_vectors(enumerate_pure_ne(game_2x2(1.0, 0.1, {1.0, 0.2, 0.2, 1.0}))),
            (std::vector<std::vector<Channel>>{{0, 1}}));
  EXPECT_EQ(as_vectors(enumerate_pure_ne(game_2x2(1.0, 0.1, {1.0, 1.0, 1.0, 1.0}))),
            (std::vector<std::vector<Channel>>{{0, 1}, {1, 0}}));
}

TEST(PureNeTest, matches_reference_enumeration) {
  oracle::RandomGames gen(42);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t K = gen.pick(1, 4), S = gen.pick(1, 4);
    const GameSpec g = gen.general(K, S);
    EXPECT_EQ(as_vectors(enumerate_pure_ne(g)), oracle::pure_ne(g));
  }
}

TEST(PureNeTest, count_within_bound) {
  oracle::RandomGames gen(43);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t K = gen.pick(2, 3), S = gen.pick(2, 3);
    const GameSpec g = gen.general(K, S);
    const std::size_t n = enumerate_pure_ne(g).size();
    EXPECT_GE(n, 1u);
    EXPECT_LE(n, opponent_profile_count(g));
  }
}

TEST(PureNeTest, enumeration_guard) {
  const std::size_t K = 24, S = 2;
  const GameSpec g(std::vector<double>(S, 1.0), std::vector<double>(S, 1.0),
                   std::vector<double>(K, 1.0), std::vector<double>(K * S, 1.0));
  EXPECT_THROW(enumerate_pure_ne(g), std::length_error);
}

TEST(RegionTest, worked_labels) {
  EXPECT_EQ(classify_region_2x2(game_2x2(1.0, 0.1, {1.0, 0.2, 0.2, 1.0})).to_string(), "H1");
  EXPECT_EQ(classify_region_2x2(game_2x2(1.0, 0.1, {1.0, 1.0, 1.0, 1.0})).to_string(),
            "H1+H4");
  // g11/g12 = 5, g21/g22 = 50, SNR = 10: only player 2 alone on channel 1
  // with player 1 on channel 2 is stable.
  const GameSpec g = game_2x2(1.0, 0.1, {1.0, 0.2, 10.0, 0.2});
  EXPECT_EQ(classify_region_2x2(g).to_string(), "H4");
  EXPECT_EQ(as_vectors(enumerate_pure_ne(g)), (std::vector<std::vector<Channel>>{{1, 0}}));
}

TEST(RegionTest, preconditions) {
  EXPECT_THROW(classify_region_2x2(GameSpec({1.0, 2.0}, {1.0, 1.0}, {1.0, 1.0},
                                            {1.0, 1.0, 1.0, 1.0})),
               std::invalid_argument);
  EXPECT_THROW(classify_region_2x2(GameSpec({1.0, 1.0}, {1.0, 1.0}, {1.0, 2.0},
                                            {1.0, 1.0, 1.0, 1.0})),
               std::invalid_argument);
  EXPECT_THROW(classify_region_2x2(game_2x2(1.0, 1.0, {1.0, 0.0, 1.0, 1.0})),
               std::invalid_argument);
  EXPECT_THROW(classify_region_2x2(GameSpec({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0},
                                            {1.0, 1.0, 1.0, 1.0, 1.0, 1.0})),
               std::invalid_argument);
}

TEST(RegionTest, agrees_with_brute_force) {
  oracle::RandomGames gen(777);
  int checked = 0;
  for (double snr : {0.1, 1.0, 10.0, 100.0}) {
    for (int trial = 0; trial < 2500; ++trial) {
      const GameSpec g = gen.symmetric_2x2(snr);
      if (region_boundary_margin(g) < 1e-9) continue;
      const RegionLabel label = classify_region_2x2(g);
      EXPECT_FALSE(label.empty());
      EXPECT_EQ(as_vectors(label.profiles()), oracle::pure_ne(g));
      ++checked;
    }
  }
  EXPECT_GT(checked, 9000);
}

TEST(RegionTest, boundary_points_of_scatter) {
  // On the curve g21/g22 = psi(g11) the H1 condition holds with equality.
  const double snr = 10.0, g11 = 0.7, g12 = 1.3, g22 = 0.4;
  const double g21 = g22 * (1.0 + snr * g11);
  const GameSpec on_curve = game_2x2(snr, 1.0, {g11, g12, g21, g22});
  EXPECT_LT(region_boundary_margin(on_curve), 1e-12);
  const GameSpec inside = game_2x2(snr, 1.0, {g11, g12, g21 * 0.99, g22});
  const GameSpec outside = game_2x2(snr, 1.0, {g11, g12, g21 * 1.01, g22});
  EXPECT_TRUE(classify_region_2x2(inside).contains(Region::kH1));
  EXPECT_FALSE(classify_region_2x2(outside).contains(Region::kH1));
}

TEST(MixedNeTest, symmetric_game_is_half_half) {
  const MixedProfile m = mixed_ne_2x2(game_2x2(1.0, 0.1, {1.0, 1.0, 1.0, 1.0}));
  for (const auto& row : m.probs) {
    for (double x : row) EXPECT_NEAR(x, 0.5, 1e-12);
  }
}

TEST(MixedNeTest, worked_example) {
  const GameSpec g = game_2x2(1.0, 0.1, {1.0, 0.5, 0.5, 1.0});
  const PotentialTable t = potential_table_2x2(g);
  EXPECT_NEAR(t.at(0, 0), -1.3219280948873622, 1e-12);
  EXPECT_NEAR(t.at(0, 1), 0.13750352374993502, 1e-12);
  EXPECT_NEAR(t.at(1, 0), -0.7369655941662062, 1e-12);
  EXPECT_NEAR(t.at(1, 1), -1.3219280948873622, 1e-12);
  const MixedProfile m = mixed_ne_2x2(g);
  EXPECT_NEAR(m.probs[0][0], 0.2861300055513375, 1e-9);
  EXPECT_NEAR(m.probs[0][1], 0.7138699944486625, 1e-9);
  EXPECT_NEAR(m.probs[1][0], 0.7138699944486625, 1e-9);
  EXPECT_NEAR(m.probs[1][1], 0.2861300055513375, 1e-9);
}

TEST(MixedNeTest, refuses_single_region) {
  EXPECT_THROW(mixed_ne_2x2(game_2x2(1.0, 0.1, {1.0, 0.2, 0.2, 1.0})), std::domain_error);
}

TEST(MixedNeTest, indifference_and_no_profitable_deviation) {
  oracle::RandomGames gen(1234);
  int found = 0;
  for (int trial = 0; trial < 5000 && found < 300; ++trial) {
    const GameSpec g = gen.symmetric_2x2(100.0);
    const RegionLabel label = classify_region_2x2(g);
    if (!label.contains(Region::kH1) || !label.contains(Region::kH4)) continue;
    ++found;
    const MixedProfile m = mixed_ne_2x2(g);
    for (Player k = 0; k < 2; ++k) {
      EXPECT_NEAR(m.probs[k][0] + m.probs[k][1], 1.0, 1e-12);
      EXPECT_GT(m.probs[k][0], 0.0);
      EXPECT_LT(m.probs[k][0], 1.0);
      const double u1 = expected_utility_product(g, k, 0, m.probs);
      const double u2 = expected_utility_product(g, k, 1, m.probs);
      EXPECT_LT(std::abs(u1 - u2), 1e-9);
      EXPECT_LE(std::max(u1, u2), mixed_utility(g, m, k) + 1e-9);
    }
  }
  EXPECT_GT(found, 100);
}

TEST(ReportTest, collects_everything) {
  const EquilibriumReport r = analyze_equilibria(game_2x2(10.0, 1.0, {1.0, 1.0, 1.0, 1.0}));
  ASSERT_EQ(r.pure_ne.size(), 2u);
  ASSERT_TRUE(r.region.has_value());
  EXPECT_EQ(r.region->to_string(), "H1+H4");
  ASSERT_TRUE(r.mixed_ne.has_value());
  EXPECT_NEAR(r.mixed_utilities[0], 1.0980793556946902, 1e-12);
  EXPECT_NEAR(r.utilities[0][0], 1.7297158093186487, 1e-12);

  const EquilibriumReport single = analyze_equilibria(game_2x2(1.0, 0.1, {1.0, 0.2, 0.2, 1.0}));
  EXPECT_FALSE(single.mixed_ne.has_value());

  const EquilibriumReport general =
      analyze_equilibria(GameSpec({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0},
                                  {1.0, 0.5, 0.2, 0.3, 1.0, 0.9}));
  EXPECT_FALSE(general.region.has_value());
  EXPECT_EQ(general.potentials.size(), general.pure_ne.size());
}

}  // namespace
}  // namespace chansel
