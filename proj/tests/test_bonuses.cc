// Copyright 2026 The adv-linmdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "advlin/bonuses.h"
#include "advlin/errors.h"
#include "advlin/estimators.h"
#include "advlin/linalg.h"
#include "test_util.h"

namespace advlin {
namespace {

// Layer-wise empirical inverses of dirichlet features, norm <= 1/gamma.
std::vector<Eigen::MatrixXd> random_cov_inv(int H, int d, double gamma,
                                            RandomStream& rng) {
  std::vector<Eigen::MatrixXd> out;
  for (int h = 0; h < H; ++h) {
    Eigen::MatrixXd s(d, 8);
    for (int i = 0; i < 8; ++i) s.col(i) = rng.dirichlet_flat(d);
    out.push_back(empirical_cov_inverse(s, gamma).matrix);
  }
  return out;
}

Eigen::MatrixXd features_at(const LayeredMdp& mdp, std::size_t s) {
  Eigen::MatrixXd phi(mdp.feature_dim(), mdp.num_actions());
  for (int a = 0; a < mdp.num_actions(); ++a) phi.col(a) = mdp.feature(s, a);
  return phi;
}

TEST(BonusB, ZeroBeta) {
  const Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_EQ(bonus_b(phi, 0, Eigen::Vector2d(0.5, 0.5), phi, 0.0), 0.0);
}

TEST(BonusB, OneHotUniform) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  for (int a = 0; a < 2; ++a) {
    EXPECT_NEAR(bonus_b(I, a, Eigen::Vector2d(0.5, 0.5), I, 0.7), 1.4, 1e-15);
  }
}

TEST(BonusB, ExpectationIsExact) {
  const Eigen::MatrixXd phi = (Eigen::MatrixXd(2, 3) << 1, 0, 0.6, 0, 1, 0.8).finished();
  const Eigen::MatrixXd S = Eigen::Vector2d(2.0, 3.0).asDiagonal();
  const Eigen::VectorXd row = Eigen::Vector3d(0.2, 0.3, 0.5);
  // ||phi_a||_S^2: 2, 3, 0.72 + 1.92 = 2.64.
  const double expect = 0.2 * 2 + 0.3 * 3 + 0.5 * 2.64;
  EXPECT_NEAR(bonus_b(phi, 1, row, S, 1.0), 3.0 + expect, 1e-12);
}

TEST(BonusB, OperatorNormBound) {
  RandomStream rng(1, "bonus");
  for (int t = 0; t < 10000; ++t) {
    const int d = 1 + static_cast<int>(rng.uniform_index(5));
    const int A = 1 + static_cast<int>(rng.uniform_index(4));
    const double gamma = rng.uniform(0.01, 1.0);
    const double beta = rng.uniform(0.0, 3.0);
    Eigen::MatrixXd phi(d, A);
    for (int a = 0; a < A; ++a) phi.col(a) = rng.dirichlet_flat(d) * rng.uniform();
    const Eigen::MatrixXd S = random_cov_inv(1, d, gamma, rng)[0];
    const double b = bonus_b(phi, static_cast<int>(rng.uniform_index(A)),
                             rng.dirichlet_flat(A), S, beta);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 2.0 * beta / gamma + 1e-12);
  }
}

TEST(BonusTable, KnownSetGating) {
  const auto inst = testutil::random_linear({1, 3}, 2, 3, 2);
  RandomStream rng(2, "bonus");
  const auto cov = random_cov_inv(2, 3, 0.2, rng);
  const Policy pi = Policy::uniform(inst.mdp);
  std::vector<bool> known{true, false, true, true};
  const StateActionTable full = bonus_table(inst.mdp, pi, cov, 1.0);
  const StateActionTable gated = bonus_table(inst.mdp, pi, cov, 1.0, known);
  for (std::size_t s = 0; s < 4; ++s) {
    for (int a = 0; a < 2; ++a) {
      EXPECT_EQ(gated(s, a), known[s] ? full(s, a) : 0.0);
      EXPECT_DOUBLE_EQ(full(s, a), bonus_b(features_at(inst.mdp, s), a, pi.row(s),
                                           cov[inst.mdp.layer_of(s) - 1], 1.0));
    }
  }
}

TEST(DilatedExact, SingleLayerIsIdentity) {
  const LayeredMdp mdp = testutil::chain_mdp(1, 3);
  StateActionTable b(1, 3);
  b << 0.1, 0.2, 0.3;
  EXPECT_EQ(dilated_bonus_exact(mdp, Policy::uniform(mdp), b), b);
}

TEST(DilatedExact, ChainExample) {
  const LayeredMdp mdp = testutil::chain_mdp(2, 2);
  const StateActionTable b = StateActionTable::Ones(2, 2);
  const StateActionTable B = dilated_bonus_exact(mdp, Policy::uniform(mdp), b);
  EXPECT_NEAR(B(0, 0), 2.5, 1e-15);
  EXPECT_NEAR(B(0, 1), 2.5, 1e-15);
  EXPECT_NEAR(B(1, 0), 1.0, 1e-15);
}

TEST(DilatedExact, RecursionMagnitudeAndDominance) {
  RandomStream rng(3, "bonus");
  for (int t = 0; t < 100; ++t) {
    const int H = 2 + static_cast<int>(rng.uniform_index(3));
    std::vector<int> sizes(H, 3);
    sizes[0] = 1;
    const auto inst = testutil::random_linear(sizes, 3, 4, 100 + t);
    const double gamma = rng.uniform(0.05, 1.0);
    const double beta = rng.uniform(0.1, 2.0);
    const auto cov = random_cov_inv(H, 4, gamma, rng);
    const Policy pi = testutil::random_policy(inst.mdp, rng);
    const StateActionTable b = bonus_table(inst.mdp, pi, cov, beta);
    const StateActionTable B = dilated_bonus_exact(inst.mdp, pi, b);
    EXPECT_LE(dilated_bonus_residual(inst.mdp, pi, b, B), 1e-12);
    EXPECT_LE(B.maxCoeff(), 6.0 * beta * H / gamma);
    EXPECT_TRUE(((B - b).array() >= -1e-15).all());
  }
}

TEST(DilatedCache, LastLayerNeedsNoCalls) {
  const auto inst = testutil::random_linear({1, 2}, 2, 2, 4);
  Simulator sim(inst.mdp);
  const Policy pi = Policy::uniform(inst.mdp);
  StateActionTable b = StateActionTable::Constant(3, 2, 0.3);
  DilatedBonusCache cache(sim, pi, b, 1);
  RandomStream rng(4, "cache");
  EXPECT_EQ(cache.query(2, 1, rng), 0.3);
  EXPECT_EQ(sim.calls(), 0u);
  EXPECT_EQ(cache.size(), 1u);
}

TEST(DilatedCache, MemoizedQueriesAreFree) {
  const auto inst = testutil::random_linear({1, 3, 3}, 2, 3, 5);
  Simulator sim(inst.mdp);
  const Policy pi = Policy::uniform(inst.mdp);
  RandomStream brng(5, "b");
  const StateActionTable b = bonus_table(inst.mdp, pi, random_cov_inv(3, 3, 0.3, brng), 1.0);
  DilatedBonusCache cache(sim, pi, b, 7);
  RandomStream rng(5, "cache");
  const double first = cache.query(0, 0, rng);
  const std::uint64_t calls = sim.calls();
  EXPECT_EQ(calls, cache.simulator_calls());
  EXPECT_EQ(calls, 2u);  // one per non-terminal layer on the path
  EXPECT_EQ(cache.query(0, 0, rng), first);
  EXPECT_EQ(sim.calls(), calls);
  EXPECT_EQ(cache.episode(), 7);
}

TEST(DilatedCache, BudgetExhaustion) {
  const auto inst = testutil::random_linear({1, 2}, 2, 2, 6);
  Simulator sim(inst.mdp, 0);
  const StateActionTable b = StateActionTable::Ones(3, 2);
  DilatedBonusCache cache(sim, Policy::uniform(inst.mdp), b, 1);
  RandomStream rng(6, "cache");
  EXPECT_THROW(cache.query(0, 0, rng), BudgetError);
}

TEST(DilatedCache, MeanMatchesExact) {
  const auto inst = testutil::random_linear({1, 2, 3}, 2, 3, 7);
  const LayeredMdp& mdp = inst.mdp;
  RandomStream rng(7, "cache");
  const Policy pi = testutil::random_policy(mdp, rng);
  const StateActionTable b = bonus_table(mdp, pi, random_cov_inv(3, 3, 0.3, rng), 0.5);
  const StateActionTable B = dilated_bonus_exact(mdp, pi, b);
  for (int a = 0; a < 2; ++a) {
    std::vector<double> draws;
    for (int n = 0; n < 10000; ++n) {
      Simulator sim(mdp);
      DilatedBonusCache cache(sim, pi, b, n + 1);
      RandomStream r = rng.fork("fresh", static_cast<std::uint64_t>(2 * n + a));
      draws.push_back(cache.query(0, a, r));
    }
    const auto ms = testutil::mean_se(draws);
    EXPECT_NEAR(ms.mean, B(0, a), 3.0 * ms.se);
  }
}

// Two-layer chain with features e_a and a fixed trajectory (a_1 = 0, a_2 = 1).
EpochSample chain_sample(bool explore, int switch_layer) {
  EpochSample e;
  e.explore = explore;
  e.switch_layer = switch_layer;
  e.trajectory.steps = {{0, 0, 0.2}, {1, 1, 0.7}};
  return e;
}

TEST(Kernels, Weights) {
  EXPECT_EQ(kernel_weight(chain_sample(false, 0), 1, 3), 1.0);
  EXPECT_EQ(kernel_weight(chain_sample(true, 2), 2, 3), 3.0);
  EXPECT_EQ(kernel_weight(chain_sample(true, 2), 1, 3), 0.0);
}

TEST(Kernels, BonusKernelExample) {
  const LayeredMdp mdp = testutil::chain_mdp(2, 2);
  StateActionTable b = StateActionTable::Zero(2, 2);
  b(1, 1) = 0.4;
  const Eigen::MatrixXd S = (Eigen::MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
  const std::vector<Eigen::MatrixXd> cov{S, S};
  const auto lambda = estimate_bonus_kernel(mdp, {chain_sample(false, 0)}, b, cov);
  EXPECT_TRUE(lambda[0].isApprox(S * Eigen::Vector2d(1, 0) * 0.6, 1e-14));
  EXPECT_TRUE(lambda[1].isZero(0.0));
  const auto zero = estimate_bonus_kernel(mdp, {chain_sample(false, 0)},
                                          StateActionTable::Zero(2, 2), cov);
  EXPECT_TRUE(zero[0].isZero(0.0));
}

TEST(Kernels, QKernelExample) {
  const LayeredMdp mdp = testutil::chain_mdp(2, 2);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const std::vector<Eigen::MatrixXd> cov{I, I};
  // Second sample explores at layer 2: weight 0 at h = 1, 2 at h = 2.
  const auto theta = estimate_q_kernel(
      mdp, {chain_sample(false, 0), chain_sample(true, 2)}, cov);
  EXPECT_TRUE(theta[0].isApprox(Eigen::Vector2d(0.45, 0.0), 1e-14));
  EXPECT_TRUE(theta[1].isApprox(Eigen::Vector2d(0.0, 1.05), 1e-14));
}

TEST(Kernels, EmptyEpochIsInputError) {
  const LayeredMdp mdp = testutil::chain_mdp(2, 2);
  const std::vector<Eigen::MatrixXd> cov(2, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(estimate_q_kernel(mdp, {}, cov), InputError);
  EXPECT_THROW(estimate_bonus_kernel(mdp, {}, StateActionTable::Zero(2, 2), cov),
               InputError);
}

}  // namespace
}  // namespace advlin
