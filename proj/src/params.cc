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

#include "advlin/params.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advlin/errors.h"
#include "advlin/estimators.h"

namespace advlin {

using nlohmann::json;

namespace {

constexpr long long kMaxCount = std::numeric_limits<long long>::max();

constexpr long long kDefaultMgrMCap = 8;
constexpr long long kDefaultMgrNCap = 64;
constexpr long long kDefaultMCap = 256;
constexpr long long kDefaultWCap = 1024;
constexpr long long kDefaultM0Cap = 8;
constexpr long long kDefaultN0Cap = 16;

long long ceil_count(double v) {
  if (!(v < 9.0e18)) return kMaxCount;
  return std::max(0LL, static_cast<long long>(std::ceil(v)));
}

void read_double(const json& doc, const char* key, std::optional<double>& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string("params.") + key, "expected a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ConfigError(std::string("params.") + key, "must be finite");
  }
  out = x;
}

template <typename Int>
void read_count(const json& doc, const char* key, std::optional<Int>& out) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("params.") + key,
                      "expected a nonnegative integer");
  }
  out = v.get<Int>();
}

void require_positive(const std::optional<double>& v, const char* key) {
  if (v && !(*v > 0.0)) {
    throw ConfigError(std::string("params.") + key, "must be positive");
  }
}

// Uses the override if present, otherwise the theoretical value capped in
// lenient mode. Records a deficit when the used value is below theory.
long long pick_count(const char* name, const std::optional<long long>& set,
                     long long theory, long long cap, bool strict,
                     std::vector<CountDeficit>& deficits) {
  long long used;
  if (set) {
    used = *set;
    if (strict && used < theory) {
      throw ConfigError(std::string("params.") + name,
                        "below the required value " + std::to_string(theory) +
                            " in strict mode");
    }
  } else {
    used = strict ? theory : std::min(theory, cap);
  }
  if (used < theory) deficits.push_back({name, theory, used});
  return used;
}

bool le(double lhs, double rhs) {
  return lhs <= rhs + kConditionSlack * std::max(std::abs(lhs), std::abs(rhs));
}

void check(std::vector<ConditionViolation>& out, const char* name, double lhs,
           double rhs) {
  if (!le(lhs, rhs)) out.push_back({name, lhs, rhs});
}

}  // namespace

std::string to_string(Algo algo) {
  switch (algo) {
    case Algo::kLogBarrier:
      return "logbarrier";
    case Algo::kMagReduced:
      return "magreduced";
    case Algo::kLinMdp:
      return "linmdp";
    case Algo::kBaseline:
      return "baseline";
  }
  return "";
}

Algo parse_algo(const std::string& name) {
  if (name == "logbarrier") return Algo::kLogBarrier;
  if (name == "magreduced") return Algo::kMagReduced;
  if (name == "linmdp") return Algo::kLinMdp;
  if (name == "baseline") return Algo::kBaseline;
  throw ConfigError("algo", "unknown algorithm '" + name + "'");
}

ParamOverrides parse_param_overrides(const json& doc) {
  ParamOverrides o;
  if (doc.is_null()) return o;
  if (!doc.is_object()) throw ConfigError("params", "expected an object");
  static const char* const kKeys[] = {
      "eta",       "beta",      "gamma", "epsilon", "mgr_M",  "mgr_N",
      "M",         "W",         "delta_e", "alpha", "delta",  "M0",
      "N0",        "strict",    "mgr_M_cap", "mgr_N_cap", "M_cap", "W_cap",
      "M0_cap",    "N0_cap",    "simulator_budget"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ConfigError("params." + key, "unknown parameter");
    }
  }
  read_double(doc, "eta", o.eta);
  read_double(doc, "beta", o.beta);
  read_double(doc, "gamma", o.gamma);
  read_double(doc, "epsilon", o.epsilon);
  read_double(doc, "delta_e", o.delta_e);
  read_double(doc, "alpha", o.alpha);
  read_double(doc, "delta", o.delta);
  read_count(doc, "mgr_M", o.mgr_M);
  read_count(doc, "mgr_N", o.mgr_N);
  read_count(doc, "M", o.M);
  read_count(doc, "W", o.W);
  read_count(doc, "M0", o.M0);
  read_count(doc, "N0", o.N0);
  read_count(doc, "mgr_M_cap", o.mgr_M_cap);
  read_count(doc, "mgr_N_cap", o.mgr_N_cap);
  read_count(doc, "M_cap", o.M_cap);
  read_count(doc, "W_cap", o.W_cap);
  read_count(doc, "M0_cap", o.M0_cap);
  read_count(doc, "N0_cap", o.N0_cap);
  read_count(doc, "simulator_budget", o.simulator_budget);
  if (doc.contains("strict")) {
    if (!doc.at("strict").is_boolean()) {
      throw ConfigError("params.strict", "expected a boolean");
    }
    o.strict = doc.at("strict").get<bool>();
  }
  require_positive(o.eta, "eta");
  require_positive(o.gamma, "gamma");
  require_positive(o.epsilon, "epsilon");
  require_positive(o.alpha, "alpha");
  require_positive(o.delta, "delta");
  if (o.beta && *o.beta < 0.0) {
    throw ConfigError("params.beta", "must be nonnegative");
  }
  if (o.delta_e && !(*o.delta_e >= 0.0 && *o.delta_e <= 1.0)) {
    throw ConfigError("params.delta_e", "must lie in [0, 1]");
  }
  if (o.mgr_M && *o.mgr_M < 1) throw ConfigError("params.mgr_M", "must be >= 1");
  if (o.M && *o.M < 1) throw ConfigError("params.M", "must be >= 1");
  if (o.M0 && *o.M0 < 1) throw ConfigError("params.M0", "must be >= 1");
  if (o.N0 && *o.N0 < 1) throw ConfigError("params.N0", "must be >= 1");
  return o;
}

std::vector<ConditionViolation> check_conditions(const ResolvedParams& p) {
  std::vector<ConditionViolation> v;
  const double H = p.H;
  const double H2 = H * H;
  switch (p.algo) {
    case Algo::kLogBarrier:
      check(v, "12*eta*beta*H^2 <= gamma", 12.0 * p.eta * p.beta * H2, p.gamma);
      check(v, "8*eta*H^2 <= beta", 8.0 * p.eta * H2, p.beta);
      check(v, "epsilon <= 1/(H^2*K)", p.epsilon, 1.0 / (H2 * p.K));
      break;
    case Algo::kMagReduced:
      check(v, "eta*beta/gamma <= 1/(12*H^2)", p.eta * p.beta / p.gamma,
            1.0 / (12.0 * H2));
      check(v, "eta^2/gamma <= 1/(12*H^2)", p.eta * p.eta / p.gamma,
            1.0 / (12.0 * H2));
      check(v, "8*eta*H^2 <= beta", 8.0 * p.eta * H2, p.beta);
      check(v, "epsilon <= 1/(H^2*K)", p.epsilon, 1.0 / (H2 * p.K));
      break;
    case Algo::kBaseline:
      check(v, "2*H*eta <= gamma", 2.0 * H * p.eta, p.gamma);
      break;
    case Algo::kLinMdp: {
      if (p.beta > 0.0) {
        const double a = p.delta_e / (6.0 * p.beta);
        if (std::abs(p.alpha - a) > kConditionSlack * std::max(p.alpha, a)) {
          v.push_back({"alpha = delta_e/(6*beta)", p.alpha, a});
        }
        check(v, "36*beta^2/delta_e^2 <= gamma",
              36.0 * p.beta * p.beta / (p.delta_e * p.delta_e), p.gamma);
      }
      check(v, "100*eta*H^4 <= beta", 100.0 * p.eta * H2 * H2, p.beta);
      if (!(p.gamma < 0.25)) v.push_back({"gamma < 1/4", p.gamma, 0.25});
      break;
    }
  }
  return v;
}

ResolvedParams resolve_params(Algo algo, const ParamOverrides& o, int K, int H,
                              int d, int A) {
  if (K < 1 || H < 1 || d < 1 || A < 1) {
    throw ConfigError("K", "K, H, d and A must be positive");
  }
  ResolvedParams p;
  p.algo = algo;
  p.K = K;
  p.H = H;
  p.d = d;
  p.A = A;
  p.strict = o.strict.value_or(false);
  p.simulator_budget = o.simulator_budget.value_or(0);
  const double k = K, h = H, dd = d, aa = A;
  const double h2 = h * h;

  switch (algo) {
    case Algo::kLogBarrier:
      p.eta = o.eta.value_or(std::sqrt(aa / (dd * h2 * h2 * k)));
      p.beta = o.beta.value_or(8.0 * std::sqrt(aa / (dd * k)));
      p.gamma = o.gamma.value_or(std::min(1.0, 96.0 * aa / (dd * k)));
      p.epsilon = o.epsilon.value_or(1.0 / (h2 * k));
      break;
    case Algo::kMagReduced:
      p.eta = o.eta.value_or(1.0 / std::sqrt(dd * h2 * h2 * k));
      p.beta = o.beta.value_or(8.0 / std::sqrt(dd * k));
      p.gamma = o.gamma.value_or(std::min(1.0, 96.0 / (dd * k)));
      p.epsilon = o.epsilon.value_or(1.0 / (h2 * k));
      break;
    case Algo::kBaseline:
      p.gamma = o.gamma.value_or(std::min(1.0, std::cbrt(1.0 / (dd * k))));
      p.eta = o.eta.value_or(p.gamma / (2.0 * h));
      p.beta = o.beta.value_or(4.0 * p.gamma * h);
      p.epsilon = o.epsilon.value_or(1.0 / (h2 * k));
      break;
    case Algo::kLinMdp: {
      const double k9 = std::pow(k, -1.0 / 9.0);
      p.delta = o.delta.value_or(1.0 / (k * k * k));
      p.delta_e = o.delta_e.value_or(k9);
      p.beta = o.beta.value_or(p.delta_e / 12.0 * k9);
      p.gamma = o.gamma.value_or(
          p.beta > 0.0 && p.delta_e > 0.0
              ? 36.0 * p.beta * p.beta / (p.delta_e * p.delta_e)
              : 0.25 * k9 * k9);
      p.alpha = o.alpha.value_or(p.beta > 0.0 ? p.delta_e / (6.0 * p.beta)
                                              : 2.0 / k9);
      p.eta = o.eta.value_or(p.beta > 0.0 ? p.beta / (100.0 * h2 * h2)
                                          : k9 / (1200.0 * h2 * h2));
      break;
    }
  }
  if (!(p.gamma > 0.0)) throw ConfigError("params.gamma", "must be positive");

  if (algo != Algo::kLinMdp) {
    if (p.gamma > 1.0) {
      throw ConfigError("params.gamma", "must be at most 1 for resampling");
    }
    p.mgr_M = pick_count("mgr_M", o.mgr_M,
                         mgr_strict_M(d, H, K, p.epsilon, p.gamma),
                         o.mgr_M_cap.value_or(kDefaultMgrMCap), p.strict,
                         p.deficits);
    p.mgr_N = pick_count("mgr_N", o.mgr_N, mgr_strict_N(p.epsilon, p.gamma),
                         o.mgr_N_cap.value_or(kDefaultMgrNCap), p.strict,
                         p.deficits);
    if (p.mgr_M < 1) throw ConfigError("params.mgr_M", "must be >= 1");
  }
  if (algo == Algo::kMagReduced) {
    const long long theory = std::max(
        1LL, ceil_count(32.0 / (p.gamma * p.gamma) * std::log(k)));
    p.M = pick_count("M", o.M, theory, o.M_cap.value_or(kDefaultMCap),
                     p.strict, p.deficits);
  }
  if (algo == Algo::kLinMdp) {
    const long long m0_theory =
        std::max(1LL, ceil_count(p.alpha * p.alpha * dd * h2));
    p.M0 = pick_count("M0", o.M0, m0_theory, o.M0_cap.value_or(kDefaultM0Cap),
                      p.strict, p.deficits);
    const double m0 = static_cast<double>(p.M0);
    const long long n0_theory = std::max(
        1LL, ceil_count(100.0 * m0 * m0 * m0 / (p.alpha * p.alpha) *
                        std::log(k / p.delta)));
    p.N0 = pick_count("N0", o.N0, n0_theory, o.N0_cap.value_or(kDefaultN0Cap),
                      p.strict, p.deficits);
    // Derived cover sizes shrink to fit the horizon; explicit ones must fit.
    if (p.M0 * p.N0 > K) {
      if (o.M0 || o.N0 || p.strict) {
        throw ConfigError("params.M0", "cover episodes M0*N0 exceed K");
      }
      p.M0 = std::min<long long>(p.M0, K);
      p.N0 = std::max(1LL, std::min<long long>(p.N0, K / p.M0));
      p.deficits.push_back({"M0*N0 (fit to K)", m0_theory, p.M0 * p.N0});
    }
    p.K0 = p.M0 * p.N0;
    const long long rest = K - p.K0;
    long long w_theory =
        ceil_count(4.0 * dd * std::log(dd / p.delta) / (p.gamma * p.gamma));
    if (w_theory % 2 != 0 && w_theory < kMaxCount) ++w_theory;
    if (o.W) {
      p.W = *o.W;
      if (p.W < 2 || p.W % 2 != 0) {
        throw ConfigError("params.W", "epoch length must be a positive even "
                                      "integer");
      }
      if (rest % p.W != 0) {
        throw ConfigError("params.W", "K - K0 = " + std::to_string(rest) +
                                          " is not divisible by W");
      }
      if (p.strict && p.W < w_theory) {
        throw ConfigError("params.W", "below the required value " +
                                          std::to_string(w_theory) +
                                          " in strict mode");
      }
    } else if (rest > 0) {
      const long long limit =
          p.strict ? w_theory
                   : std::min(w_theory, o.W_cap.value_or(kDefaultWCap));
      p.W = 0;
      for (long long w = std::min(limit, rest); w >= 2; --w) {
        if (w % 2 == 0 && rest % w == 0) {
          p.W = w;
          break;
        }
      }
      if (p.W == 0) {
        throw ConfigError("K", "no even epoch length divides K - K0 = " +
                                   std::to_string(rest));
      }
      if (p.strict && p.W < w_theory) {
        throw ConfigError("params.W", "K - K0 has no even divisor reaching " +
                                          std::to_string(w_theory));
      }
    }
    if (p.W > 0 && p.W < w_theory) p.deficits.push_back({"W", w_theory, p.W});
  }

  p.violations = check_conditions(p);
  if (p.strict && !p.violations.empty()) {
    const auto& v = p.violations.front();
    throw ConfigError("params", "condition " + v.name + " violated (" +
                                    std::to_string(v.lhs) + " vs " +
                                    std::to_string(v.rhs) + ")");
  }
  return p;
}

json ResolvedParams::to_json() const {
  json j;
  j["algo"] = to_string(algo);
  j["K"] = K;
  j["H"] = H;
  j["d"] = d;
  j["A"] = A;
  j["strict"] = strict;
  j["eta"] = eta;
  j["beta"] = beta;
  j["gamma"] = gamma;
  if (algo != Algo::kLinMdp) {
    j["epsilon"] = epsilon;
    j["mgr_M"] = mgr_M;
    j["mgr_N"] = mgr_N;
  }
  if (algo == Algo::kMagReduced) j["M"] = M;
  if (algo == Algo::kLinMdp) {
    j["W"] = W;
    j["K0"] = K0;
    j["M0"] = M0;
    j["N0"] = N0;
    j["delta_e"] = delta_e;
    j["alpha"] = alpha;
    j["delta"] = delta;
  }
  j["simulator_budget"] = simulator_budget;
  json viol = json::array();
  for (const auto& v : violations) {
    viol.push_back({{"condition", v.name}, {"lhs", v.lhs}, {"rhs", v.rhs}});
  }
  j["condition_violations"] = std::move(viol);
  json def = json::array();
  for (const auto& d : deficits) {
    def.push_back(
        {{"count", d.name}, {"theoretical", d.theoretical}, {"used", d.used}});
  }
  j["count_deficits"] = std::move(def);
  return j;
}

}  // namespace advlin
