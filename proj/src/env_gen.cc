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

#include "advlin/env_gen.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "advlin/errors.h"

namespace advlin {

namespace {

void check_layers(const EnvSpec& spec) {
  if (spec.H < 1) throw InputError("H must be positive");
  if (spec.A < 1) throw InputError("A must be positive");
  if (static_cast<int>(spec.layer_sizes.size()) != spec.H) {
    throw InputError("layer_sizes must have H entries");
  }
  if (spec.layer_sizes[0] != 1) {
    throw InputError("layer_sizes[0] must be 1");
  }
  for (int n : spec.layer_sizes) {
    if (n < 1) throw InputError("layer sizes must be positive");
  }
}

// Number of free loss entries per episode and how they map onto (s, a).
std::size_t entry_count(const LossSpec& spec, const LayeredMdp& mdp) {
  if (spec.structure == LossStructure::kTabular) {
    return mdp.num_states() * mdp.num_actions();
  }
  return static_cast<std::size_t>(mdp.horizon()) * mdp.feature_dim();
}

}  // namespace

std::string to_string(EnvKind kind) {
  return kind == EnvKind::kTabularOnehot ? "tabular_onehot"
                                         : "random_linear_mdp";
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kIidUniform:
      return "iid_uniform";
    case LossKind::kPiecewiseConstant:
      return "piecewise_constant";
    case LossKind::kSinusoidalDrift:
      return "sinusoidal_drift";
  }
  return "";
}

std::string to_string(LossStructure structure) {
  return structure == LossStructure::kTabular ? "tabular" : "linear";
}

EnvKind parse_env_kind(const std::string& name) {
  if (name == "tabular_onehot") return EnvKind::kTabularOnehot;
  if (name == "random_linear_mdp") return EnvKind::kRandomLinearMdp;
  throw InputError("unknown env kind '" + name + "'");
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "iid_uniform") return LossKind::kIidUniform;
  if (name == "piecewise_constant") return LossKind::kPiecewiseConstant;
  if (name == "sinusoidal_drift") return LossKind::kSinusoidalDrift;
  throw InputError("unknown loss kind '" + name + "'");
}

LossStructure parse_loss_structure(const std::string& name) {
  if (name == "tabular") return LossStructure::kTabular;
  if (name == "linear") return LossStructure::kLinear;
  throw InputError("unknown loss structure '" + name + "'");
}

LayeredMdp gen_tabular_onehot(const EnvSpec& spec, RandomStream& rng) {
  check_layers(spec);
  const int A = spec.A;
  const int widest =
      *std::max_element(spec.layer_sizes.begin(), spec.layer_sizes.end());
  const int d = widest * A;
  if (spec.d != 0 && spec.d != d) {
    throw InputError("tabular_onehot requires d = max layer size * A = " +
                     std::to_string(d));
  }
  std::vector<Eigen::VectorXd> features;
  std::vector<Eigen::VectorXd> transitions;
  for (int h = 1; h <= spec.H; ++h) {
    for (int i = 0; i < spec.layer_sizes[h - 1]; ++i) {
      for (int a = 0; a < A; ++a) {
        features.push_back(Eigen::VectorXd::Unit(d, i * A + a));
        if (h < spec.H) {
          transitions.push_back(rng.dirichlet_flat(spec.layer_sizes[h]));
        }
      }
    }
  }
  return LayeredMdp(spec.H, A, d, spec.layer_sizes, std::move(features),
                    std::move(transitions));
}

LinearMdpInstance gen_random_linear_mdp(const EnvSpec& spec,
                                        RandomStream& rng) {
  check_layers(spec);
  if (spec.d < 1) throw InputError("random_linear_mdp requires d >= 1");
  const int d = spec.d;
  const int A = spec.A;
  std::vector<Eigen::MatrixXd> nu;
  for (int h = 1; h < spec.H; ++h) {
    const int next = spec.layer_sizes[h];
    Eigen::MatrixXd m(d, next);
    for (int j = 0; j < d; ++j) m.row(j) = rng.dirichlet_flat(next).transpose();
    nu.push_back(std::move(m));
  }
  std::vector<Eigen::VectorXd> features;
  std::vector<Eigen::VectorXd> transitions;
  for (int h = 1; h <= spec.H; ++h) {
    for (int i = 0; i < spec.layer_sizes[h - 1]; ++i) {
      for (int a = 0; a < A; ++a) {
        Eigen::VectorXd phi = rng.dirichlet_flat(d);
        if (h < spec.H) transitions.push_back(nu[h - 1].transpose() * phi);
        features.push_back(std::move(phi));
      }
    }
  }
  LayeredMdp mdp(spec.H, A, d, spec.layer_sizes, std::move(features),
                 std::move(transitions));
  return {std::move(mdp), std::move(nu)};
}

GeneratedLosses gen_losses(const LossSpec& spec, const LayeredMdp& mdp,
                           int episodes, RandomStream& rng) {
  if (episodes < 1) throw InputError("need at least one episode");
  if (spec.amplitude < 0.0) throw InputError("amplitude must be nonnegative");
  if (spec.kind == LossKind::kSinusoidalDrift && spec.period < 1) {
    throw InputError("period must be positive");
  }
  if (spec.kind == LossKind::kPiecewiseConstant && spec.segment_length < 1) {
    throw InputError("segment_length must be positive");
  }
  const std::size_t n = entry_count(spec, mdp);
  const double amp = spec.amplitude;
  std::uint64_t clipped = 0;
  auto clip = [&clipped](double v) {
    if (v < 0.0 || v > 1.0) {
      ++clipped;
      return std::clamp(v, 0.0, 1.0);
    }
    return v;
  };

  std::vector<double> phase;
  if (spec.kind == LossKind::kSinusoidalDrift) {
    RandomStream prng = rng.fork("phase");
    phase.resize(n);
    for (auto& p : phase) p = prng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  // Raw per-entry values for episode k (0-based), before mapping onto (s, a).
  Eigen::VectorXd raw(static_cast<Eigen::Index>(n));
  auto fill_uniform = [&](std::uint64_t block) {
    RandomStream r = rng.fork("block", block);
    for (std::size_t i = 0; i < n; ++i) {
      raw[static_cast<Eigen::Index>(i)] =
          clip(0.5 + amp * (2.0 * r.uniform() - 1.0));
    }
  };

  const int A = mdp.num_actions();
  const int d = mdp.feature_dim();
  std::vector<double> values(static_cast<std::size_t>(episodes) *
                             mdp.num_states() * A);
  for (int k = 0; k < episodes; ++k) {
    switch (spec.kind) {
      case LossKind::kIidUniform:
        fill_uniform(static_cast<std::uint64_t>(k));
        break;
      case LossKind::kPiecewiseConstant:
        if (k % spec.segment_length == 0) {
          fill_uniform(static_cast<std::uint64_t>(k / spec.segment_length));
        }
        break;
      case LossKind::kSinusoidalDrift:
        for (std::size_t i = 0; i < n; ++i) {
          const double t = 2.0 * std::numbers::pi * (k + 1) / spec.period;
          raw[static_cast<Eigen::Index>(i)] =
              clip(0.5 + amp * std::sin(t + phase[i]));
        }
        break;
    }
    double* out = values.data() + static_cast<std::size_t>(k) *
                                      mdp.num_states() * A;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
      for (int a = 0; a < A; ++a) {
        double v;
        if (spec.structure == LossStructure::kTabular) {
          v = raw[static_cast<Eigen::Index>(s * A + a)];
        } else {
          const auto g = raw.segment((mdp.layer_of(s) - 1) * d, d);
          v = clip(mdp.feature(s, a).dot(g));
        }
        out[s * A + a] = v;
      }
    }
  }
  return {LossTable(episodes, mdp.num_states(), A, std::move(values)),
          clipped};
}

double LinearQWitness::max_residual() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, r);
  return m;
}

double LinearQWitness::max_theta_norm() const {
  double m = 0.0;
  for (const auto& t : theta) m = std::max(m, t.norm());
  return m;
}

LinearQWitness fit_linear_q(const LayeredMdp& mdp, const StateActionTable& q) {
  if (q.rows() != static_cast<Eigen::Index>(mdp.num_states()) ||
      q.cols() != mdp.num_actions()) {
    throw InputError("Q table shape does not match the MDP");
  }
  const int A = mdp.num_actions();
  LinearQWitness out;
  for (int h = 1; h <= mdp.horizon(); ++h) {
    const std::size_t b = mdp.layer_begin(h);
    const Eigen::Index rows =
        static_cast<Eigen::Index>((mdp.layer_end(h) - b) * A);
    Eigen::MatrixXd phi(rows, mdp.feature_dim());
    Eigen::VectorXd target(rows);
    for (std::size_t s = b; s < mdp.layer_end(h); ++s) {
      for (int a = 0; a < A; ++a) {
        const Eigen::Index r = static_cast<Eigen::Index>((s - b) * A + a);
        phi.row(r) = mdp.feature(s, a).transpose();
        target[r] = q(s, a);
      }
    }
    Eigen::VectorXd theta = phi.completeOrthogonalDecomposition().solve(target);
    out.residual.push_back((phi * theta - target).cwiseAbs().maxCoeff());
    out.theta.push_back(std::move(theta));
  }
  return out;
}

}  // namespace advlin
