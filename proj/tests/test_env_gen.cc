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

#include <gtest/gtest.h>

#include "advlin/env_gen.h"
#include "advlin/errors.h"
#include "test_util.h"

namespace advlin {
namespace {

EnvSpec onehot_spec(std::vector<int> sizes, int A) {
  EnvSpec s;
  s.kind = EnvKind::kTabularOnehot;
  s.H = static_cast<int>(sizes.size());
  s.A = A;
  s.layer_sizes = std::move(sizes);
  return s;
}

EnvSpec linear_spec(std::vector<int> sizes, int A, int d) {
  EnvSpec s = onehot_spec(std::move(sizes), A);
  s.kind = EnvKind::kRandomLinearMdp;
  s.d = d;
  return s;
}

TEST(EnvKinds, NamesRoundTrip) {
  EXPECT_EQ(parse_env_kind(to_string(EnvKind::kRandomLinearMdp)),
            EnvKind::kRandomLinearMdp);
  EXPECT_EQ(parse_loss_kind(to_string(LossKind::kSinusoidalDrift)),
            LossKind::kSinusoidalDrift);
  EXPECT_EQ(parse_loss_structure("linear"), LossStructure::kLinear);
  EXPECT_THROW(parse_env_kind("grid"), InputError);
}

TEST(TabularOnehot, SingleStateFeatures) {
  RandomStream rng(1, "env");
  const LayeredMdp mdp = gen_tabular_onehot(onehot_spec({1}, 2), rng);
  EXPECT_EQ(mdp.feature_dim(), 2);
  EXPECT_EQ(mdp.feature(0, 0), Eigen::VectorXd::Unit(2, 0));
  EXPECT_EQ(mdp.feature(0, 1), Eigen::VectorXd::Unit(2, 1));
}

TEST(TabularOnehot, DimensionIsWidestLayerTimesA) {
  RandomStream rng(1, "env");
  const LayeredMdp mdp = gen_tabular_onehot(onehot_spec({1, 3}, 3), rng);
  EXPECT_EQ(mdp.feature_dim(), 9);
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < 3; ++a) EXPECT_DOUBLE_EQ(mdp.feature(s, a).norm(), 1.0);
  }
}

TEST(TabularOnehot, RejectsWideFirstLayer) {
  RandomStream rng(1, "env");
  EXPECT_THROW(gen_tabular_onehot(onehot_spec({2, 2}, 2), rng), InputError);
}

TEST(TabularOnehot, LinearQWitness) {
  RandomStream rng(2, "witness");
  for (int t = 0; t < 50; ++t) {
    RandomStream er = rng.fork("env", t);
    const LayeredMdp mdp = gen_tabular_onehot(onehot_spec({1, 3, 2}, 2), er);
    const LossTable losses = testutil::random_losses(mdp, 1, rng);
    const Policy pi = testutil::random_policy(mdp, rng);
    const auto w = fit_linear_q(mdp, q_values_exact(mdp, losses.episode(0), pi));
    EXPECT_LE(w.max_residual(), 1e-10);
    EXPECT_LE(w.max_theta_norm(),
              std::sqrt(static_cast<double>(mdp.feature_dim())) * mdp.horizon());
  }
}

TEST(RandomLinearMdp, ScalarFeatureSharesNextStateDistribution) {
  RandomStream rng(3, "env");
  const auto inst = gen_random_linear_mdp(linear_spec({1, 3, 2}, 2, 1), rng);
  for (std::size_t s = 0; s < inst.mdp.num_states(); ++s) {
    for (int a = 0; a < 2; ++a) EXPECT_DOUBLE_EQ(inst.mdp.feature(s, a)(0), 1.0);
  }
  EXPECT_TRUE(inst.mdp.transition(1, 0).isApprox(inst.mdp.transition(2, 1)));
}

TEST(RandomLinearMdp, RowsSumToOneAndFactorize) {
  for (int t = 0; t < 100; ++t) {
    RandomStream rng(t, "env");
    const auto inst = gen_random_linear_mdp(linear_spec({1, 3, 4}, 3, 4), rng);
    const LayeredMdp& mdp = inst.mdp;
    for (std::size_t s = 0; s < mdp.layer_end(2); ++s) {
      for (int a = 0; a < 3; ++a) {
        const auto& phi = mdp.feature(s, a);
        EXPECT_GE(phi.minCoeff(), 0.0);
        EXPECT_LE(phi.sum(), 1.0 + 1e-12);
        const Eigen::VectorXd& row = mdp.transition(s, a);
        EXPECT_NEAR(row.sum(), 1.0, 1e-12);
        const Eigen::VectorXd rebuilt = inst.nu[mdp.layer_of(s) - 1].transpose() * phi;
        EXPECT_LE((rebuilt - row).cwiseAbs().maxCoeff(), 1e-14);
      }
    }
  }
}

TEST(RandomLinearMdp, LinearLossesGiveLinearQ) {
  LossSpec ls;
  ls.structure = LossStructure::kLinear;
  for (int t = 0; t < 50; ++t) {
    RandomStream rng(t, "env");
    const auto inst = gen_random_linear_mdp(linear_spec({1, 3, 3}, 2, 3), rng);
    RandomStream lr(t, "loss");
    const auto gl = gen_losses(ls, inst.mdp, 1, lr);
    EXPECT_EQ(gl.clipped, 0u);
    const Policy pi = testutil::random_policy(inst.mdp, rng);
    const auto w =
        fit_linear_q(inst.mdp, q_values_exact(inst.mdp, gl.table.episode(0), pi));
    EXPECT_LE(w.max_residual(), 1e-10);
    EXPECT_LE(w.max_theta_norm(), std::sqrt(3.0) * 3);
  }
}

TEST(RandomLinearMdp, RequiresDimension) {
  RandomStream rng(1, "env");
  EXPECT_THROW(gen_random_linear_mdp(linear_spec({1, 2}, 2, 0), rng), InputError);
}

TEST(Losses, ZeroAmplitudeIsConstant) {
  const LayeredMdp mdp = testutil::random_tabular({1, 3}, 2, 1);
  for (LossKind kind : {LossKind::kIidUniform, LossKind::kPiecewiseConstant,
                        LossKind::kSinusoidalDrift}) {
    LossSpec ls;
    ls.kind = kind;
    ls.amplitude = 0.0;
    RandomStream rng(1, "loss");
    const auto gl = gen_losses(ls, mdp, 10, rng);
    for (int k = 0; k < 10; ++k) {
      for (double v : gl.table.episode(k)) EXPECT_DOUBLE_EQ(v, 0.5);
    }
  }
}

TEST(Losses, PiecewiseWithFullSegmentIsConstantOverEpisodes) {
  const LayeredMdp mdp = testutil::random_tabular({1, 3}, 2, 1);
  LossSpec ls;
  ls.kind = LossKind::kPiecewiseConstant;
  ls.segment_length = 16;
  RandomStream rng(1, "loss");
  const LossTable t = gen_losses(ls, mdp, 16, rng).table;
  for (int k = 1; k < 16; ++k) EXPECT_EQ(t.episode_table(k), t.episode_table(0));
}

TEST(Losses, IidUniformMeanNearHalf) {
  const LayeredMdp mdp = testutil::random_tabular({1, 3}, 3, 1);
  LossSpec ls;
  RandomStream rng(1, "loss");
  const LossTable t = gen_losses(ls, mdp, 1000, rng).table;
  const double n = 1000.0 * mdp.num_states() * 3;
  ASSERT_GE(n, 1e4);
  const double mean = t.total().sum() / n;
  EXPECT_GE(mean, 0.45);
  EXPECT_LE(mean, 0.55);
}

TEST(Losses, AlwaysInUnitInterval) {
  const LayeredMdp mdp = testutil::random_tabular({1, 2, 2}, 2, 1);
  LossSpec ls;
  ls.kind = LossKind::kSinusoidalDrift;
  ls.period = 7;
  RandomStream rng(1, "loss");
  const LossTable t = gen_losses(ls, mdp, 50, rng).table;
  EXPECT_GE(t.total().minCoeff(), 0.0);
  EXPECT_LE(t.total().maxCoeff(), 50.0);
  for (int k = 0; k < 50; ++k) {
    for (double v : t.episode(k)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Losses, DeterministicGivenSeed) {
  const LayeredMdp mdp = testutil::random_tabular({1, 2}, 2, 1);
  LossSpec ls;
  RandomStream a(5, "loss"), b(5, "loss");
  EXPECT_EQ(gen_losses(ls, mdp, 8, a).table.total(),
            gen_losses(ls, mdp, 8, b).table.total());
}

}  // namespace
}  // namespace advlin
