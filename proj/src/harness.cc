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

#include "advlin/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "advlin/bonuses.h"
#include "advlin/errors.h"
#include "advlin/estimators.h"
#include "advlin/ftrl.h"
#include "advlin/linalg.h"

namespace advlin {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

const json& require_object(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError(path, "expected an object");
  return doc;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

int read_int(const json& v, const std::string& path, long long lo,
             long long hi = std::numeric_limits<int>::max()) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) {
    throw ConfigError(path, "must be in [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

std::uint64_t read_seed(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  throw ConfigError(path, "expected a nonnegative integer");
}

double read_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

std::string read_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

template <typename Parse>
auto read_enum(const json& v, const std::string& path, Parse parse) {
  const std::string name = read_string(v, path);
  try {
    return parse(name);
  } catch (const InputError& e) {
    throw ConfigError(path, e.what());
  }
}

EnvSpec parse_env(const json& doc, const std::string& path) {
  require_object(doc, path);
  check_keys(doc, path, {"kind", "H", "A", "d", "layer_sizes", "seed"});
  EnvSpec env;
  if (doc.contains("kind")) {
    env.kind = read_enum(doc["kind"], join(path, "kind"), parse_env_kind);
  }
  if (!doc.contains("layer_sizes")) {
    throw ConfigError(join(path, "layer_sizes"), "required");
  }
  const json& ls = doc["layer_sizes"];
  if (!ls.is_array() || ls.empty()) {
    throw ConfigError(join(path, "layer_sizes"), "expected a non-empty array");
  }
  env.layer_sizes.clear();
  for (std::size_t i = 0; i < ls.size(); ++i) {
    env.layer_sizes.push_back(read_int(
        ls[i], join(path, "layer_sizes") + "[" + std::to_string(i) + "]", 1));
  }
  if (env.layer_sizes[0] != 1) {
    throw ConfigError(join(path, "layer_sizes") + "[0]",
                      "the first layer must hold exactly one state");
  }
  env.H = static_cast<int>(env.layer_sizes.size());
  if (doc.contains("H")) {
    const int H = read_int(doc["H"], join(path, "H"), 1);
    if (H != env.H) {
      throw ConfigError(join(path, "H"), "does not match layer_sizes");
    }
  }
  if (!doc.contains("A")) throw ConfigError(join(path, "A"), "required");
  env.A = read_int(doc["A"], join(path, "A"), 1);
  if (doc.contains("d")) env.d = read_int(doc["d"], join(path, "d"), 0);
  if (env.kind == EnvKind::kRandomLinearMdp && env.d < 1) {
    throw ConfigError(join(path, "d"), "required for random_linear_mdp");
  }
  if (doc.contains("seed")) env.seed = read_seed(doc["seed"], join(path, "seed"));
  return env;
}

LossSpec parse_loss(const json& doc, const std::string& path) {
  require_object(doc, path);
  check_keys(doc, path,
             {"kind", "structure", "amplitude", "period", "segment_length",
              "seed"});
  LossSpec loss;
  if (doc.contains("kind")) {
    loss.kind = read_enum(doc["kind"], join(path, "kind"), parse_loss_kind);
  }
  if (doc.contains("structure")) {
    loss.structure = read_enum(doc["structure"], join(path, "structure"),
                               parse_loss_structure);
  }
  if (doc.contains("amplitude")) {
    loss.amplitude = read_number(doc["amplitude"], join(path, "amplitude"));
    if (loss.amplitude < 0.0 || loss.amplitude > 0.5) {
      throw ConfigError(join(path, "amplitude"), "must be in [0, 0.5]");
    }
  }
  if (doc.contains("period")) {
    loss.period = read_int(doc["period"], join(path, "period"), 1);
  }
  if (doc.contains("segment_length")) {
    loss.segment_length =
        read_int(doc["segment_length"], join(path, "segment_length"), 1);
  }
  if (doc.contains("seed")) loss.seed = read_seed(doc["seed"], join(path, "seed"));
  return loss;
}

CheckSettings parse_checks(const json& doc, const std::string& path) {
  require_object(doc, path);
  check_keys(doc, path,
             {"trials", "gamma", "epsilon", "delta", "T", "mgr_M", "mgr_N", "W",
              "resamples"});
  CheckSettings c;
  if (doc.contains("trials")) c.trials = read_int(doc["trials"], join(path, "trials"), 1);
  if (doc.contains("gamma")) {
    c.gamma = read_number(doc["gamma"], join(path, "gamma"));
    if (!(c.gamma > 0.0) || c.gamma > 1.0) {
      throw ConfigError(join(path, "gamma"), "must be in (0, 1]");
    }
  }
  if (doc.contains("epsilon")) {
    c.epsilon = read_number(doc["epsilon"], join(path, "epsilon"));
    if (!(c.epsilon > 0.0)) throw ConfigError(join(path, "epsilon"), "must be positive");
  }
  if (doc.contains("delta")) {
    c.delta = read_number(doc["delta"], join(path, "delta"));
    if (!(c.delta > 0.0) || !(c.delta < 1.0)) {
      throw ConfigError(join(path, "delta"), "must be in (0, 1)");
    }
  }
  if (doc.contains("T")) c.T = read_int(doc["T"], join(path, "T"), 1);
  if (doc.contains("mgr_M")) c.mgr_M = read_int(doc["mgr_M"], join(path, "mgr_M"), 1);
  if (doc.contains("mgr_N")) c.mgr_N = read_int(doc["mgr_N"], join(path, "mgr_N"), 0);
  if (doc.contains("W")) c.W = read_int(doc["W"], join(path, "W"), 1);
  if (doc.contains("resamples")) {
    c.resamples = read_int(doc["resamples"], join(path, "resamples"), 1);
  }
  return c;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  require_object(doc, "");
  check_keys(doc, "",
             {"env", "loss", "algo", "K", "params", "seeds", "output",
              "log_realized", "checks"});
  ExperimentConfig c;
  if (!doc.contains("env")) throw ConfigError("env", "required");
  c.env = parse_env(doc["env"], "env");
  if (doc.contains("loss")) c.loss = parse_loss(doc["loss"], "loss");
  if (!doc.contains("algo")) throw ConfigError("algo", "required");
  c.algo = read_enum(doc["algo"], "algo", [](const std::string& s) {
    try {
      return parse_algo(s);
    } catch (const ConfigError& e) {
      throw InputError(e.what());
    }
  });
  if (!doc.contains("K")) throw ConfigError("K", "required");
  c.K = read_int(doc["K"], "K", 1);
  if (doc.contains("params")) c.params = parse_param_overrides(doc["params"]);
  if (!doc.contains("seeds")) throw ConfigError("seeds", "required");
  const json& seeds = doc["seeds"];
  if (!seeds.is_array() || seeds.empty()) {
    throw ConfigError("seeds", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    c.seeds.push_back(read_seed(seeds[i], "seeds[" + std::to_string(i) + "]"));
  }
  if (doc.contains("output")) c.output = read_string(doc["output"], "output");
  if (doc.contains("log_realized")) {
    if (!doc["log_realized"].is_boolean()) {
      throw ConfigError("log_realized", "expected a boolean");
    }
    c.log_realized = doc["log_realized"].get<bool>();
  }
  if (doc.contains("checks")) c.checks = parse_checks(doc["checks"], "checks");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

Instance make_instance(const ExperimentConfig& config, std::uint64_t seed,
                       int K) {
  RandomStream env_rng(config.env.seed.value_or(seed), "env");
  LayeredMdp mdp = config.env.kind == EnvKind::kTabularOnehot
                       ? gen_tabular_onehot(config.env, env_rng)
                       : gen_random_linear_mdp(config.env, env_rng).mdp;
  RandomStream loss_rng(config.loss.seed.value_or(seed), "loss",
                        static_cast<std::uint64_t>(K));
  GeneratedLosses gl = gen_losses(config.loss, mdp, K, loss_rng);
  return Instance{std::move(mdp), std::move(gl.table), gl.clipped};
}

RunResult run_seed(const ExperimentConfig& config, std::uint64_t seed, int K) {
  const Instance inst = make_instance(config, seed, K);
  const ResolvedParams p =
      resolve_params(config.algo, config.params, K, inst.mdp.horizon(),
                     inst.mdp.feature_dim(), inst.mdp.num_actions());
  RandomStream rng(seed, "algo");
  return run_algorithm(inst.mdp, inst.losses, p, rng);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trace_csv(std::ostream& out, const RunResult& result,
                     bool log_realized) {
  out << kTraceHeader;
  if (log_realized) out << ",realized_loss";
  out << '\n';
  for (const auto& r : result.trace) {
    out << r.k << ',' << format_double(r.learner_value) << ','
        << format_double(r.optimal_value) << ','
        << format_double(r.cumulative_regret) << ',' << r.simulator_calls << ','
        << r.retries << ',' << r.flags;
    if (log_realized) out << ',' << format_double(r.realized_loss);
    out << '\n';
  }
}

int worker_count(std::size_t jobs) {
  long long n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("ADV_LINMDP_THREADS")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = v;
  }
  n = std::max(1LL, n);
  return static_cast<int>(std::min<long long>(n, std::max<std::size_t>(jobs, 1)));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = worker_count(n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<SeedOutcome> run_experiment(const ExperimentConfig& config,
                                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  // Resolve once up front so config errors surface before any work.
  const Instance probe = make_instance(config, config.seeds.front(), 1);
  const ResolvedParams p =
      resolve_params(config.algo, config.params, config.K, probe.mdp.horizon(),
                     probe.mdp.feature_dim(), probe.mdp.num_actions());

  std::vector<SeedOutcome> outcomes(config.seeds.size());
  parallel_for(config.seeds.size(), [&](std::size_t i) {
    SeedOutcome& o = outcomes[i];
    o.seed = config.seeds[i];
    o.result = run_seed(config, o.seed, config.K);
    o.final_regret = o.result.trace.empty()
                         ? 0.0
                         : o.result.trace.back().cumulative_regret;
    o.trace_path =
        (fs::path(out_dir) / ("trace_seed" + std::to_string(o.seed) + ".csv"))
            .string();
    std::ofstream f(o.trace_path, std::ios::binary);
    write_trace_csv(f, o.result, config.log_realized);
    if (!f) throw Error("failed to write " + o.trace_path);
  });

  json resolved;
  resolved["env"] = {{"kind", to_string(config.env.kind)},
                     {"H", probe.mdp.horizon()},
                     {"A", probe.mdp.num_actions()},
                     {"d", probe.mdp.feature_dim()},
                     {"layer_sizes", config.env.layer_sizes}};
  if (config.env.seed) resolved["env"]["seed"] = *config.env.seed;
  resolved["loss"] = {{"kind", to_string(config.loss.kind)},
                      {"structure", to_string(config.loss.structure)},
                      {"amplitude", config.loss.amplitude},
                      {"period", config.loss.period},
                      {"segment_length", config.loss.segment_length}};
  if (config.loss.seed) resolved["loss"]["seed"] = *config.loss.seed;
  resolved["algo"] = to_string(config.algo);
  resolved["K"] = config.K;
  resolved["seeds"] = config.seeds;
  resolved["params"] = p.to_json();
  json runs = json::array();
  for (const auto& o : outcomes) {
    runs.push_back({{"seed", o.seed},
                    {"trace", fs::path(o.trace_path).filename().string()},
                    {"final_regret", o.final_regret},
                    {"simulator_calls", o.result.simulator_calls},
                    {"retries", o.result.total_retries},
                    {"hedge_violations", o.result.hedge_violations},
                    {"bonus_violations", o.result.bonus_violations},
                    {"psd_projections", o.result.psd_projections},
                    {"log", o.result.log}});
  }
  resolved["runs"] = runs;
  std::ofstream f(fs::path(out_dir) / "resolved_config.json", std::ios::binary);
  f << resolved.dump(2) << '\n';
  return outcomes;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.K << ',' << r.seed << ',' << format_double(r.final_regret) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) {
    throw InputError("summary CSV must start with '" +
                     std::string(kSummaryHeader) + "'");
  }
  std::vector<SummaryRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string k, seed, regret;
    if (!std::getline(ss, k, ',') || !std::getline(ss, seed, ',') ||
        !std::getline(ss, regret)) {
      throw InputError("malformed summary line " + std::to_string(lineno));
    }
    try {
      rows.push_back({std::stoi(k), std::stoull(seed), std::stod(regret)});
    } catch (const std::exception&) {
      throw InputError("malformed summary line " + std::to_string(lineno));
    }
  }
  return rows;
}

std::vector<SummaryRow> sweep(const ExperimentConfig& config,
                              const std::vector<int>& k_grid,
                              const std::string& out_dir,
                              std::vector<std::string>* diagnostics) {
  namespace fs = std::filesystem;
  if (k_grid.empty()) throw ConfigError("k-grid", "empty grid");
  fs::create_directories(out_dir);
  std::vector<SummaryRow> rows;
  for (int K : k_grid) {
    if (K < 1) throw ConfigError("k-grid", "K must be positive");
    for (auto seed : config.seeds) rows.push_back({K, seed, 0.0});
  }
  parallel_for(rows.size(), [&](std::size_t i) {
    const RunResult r = run_seed(config, rows[i].seed, rows[i].K);
    rows[i].final_regret = r.trace.back().cumulative_regret;
  });
  std::ofstream f(fs::path(out_dir) / "summary.csv", std::ios::binary);
  write_summary_csv(f, rows);

  if (diagnostics != nullptr) {
    std::map<int, std::pair<double, int>> by_k;
    for (const auto& r : rows) {
      by_k[r.K].first += r.final_regret;
      ++by_k[r.K].second;
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [K, acc] : by_k) {
      const double mean = acc.first / acc.second;
      if (mean < prev) {
        diagnostics->push_back("mean final regret decreases at K = " +
                               std::to_string(K));
      }
      prev = mean;
    }
  }
  return rows;
}

ScalingFit fit_scaling_exponent(const std::vector<SummaryRow>& rows) {
  std::map<int, std::pair<double, int>> by_k;
  for (const auto& r : rows) {
    if (r.K < 1) throw DomainError("K must be positive");
    by_k[r.K].first += r.final_regret;
    ++by_k[r.K].second;
  }
  if (by_k.size() < 3) throw DomainError("need at least 3 distinct K values");
  std::vector<double> x, y;
  for (const auto& [K, acc] : by_k) {
    const double mean = acc.first / acc.second;
    if (!(mean > 0.0)) {
      throw DomainError("mean regret at K = " + std::to_string(K) +
                        " is not positive (" + format_double(mean) + ")");
    }
    x.push_back(std::log(static_cast<double>(K)));
    y.push_back(std::log(mean));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::vector<int> parse_k_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("k-grid", "not an integer: '" + item + "'");
    }
    if (used != item.size() || v < 1) {
      throw ConfigError("k-grid", "not a positive integer: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("k-grid", "empty grid");
  return out;
}

void write_check_csv(std::ostream& out, const std::vector<CheckRow>& rows) {
  out << kCheckHeader << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << r.quantity << ',' << format_double(r.bound) << ','
        << format_double(r.observed) << ',' << (r.holds ? 1 : 0) << '\n';
  }
}

std::vector<CheckRow> validate_ftrl(int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("need at least one trial");
  constexpr int kT = 200;
  constexpr int kA = 5;
  std::vector<CheckRow> rows;
  for (int t = 0; t < trials; ++t) {
    RandomStream rng(seed, "validate_ftrl", static_cast<std::uint64_t>(t));
    // Log-barrier: unrestricted signs, smoothed comparator.
    {
      constexpr double eta = 0.01;
      std::vector<Eigen::VectorXd> losses(kT, Eigen::VectorXd(kA));
      for (auto& c : losses) {
        for (int i = 0; i < kA; ++i) c(i) = rng.uniform(-50.0, 50.0);
      }
      const Eigen::VectorXd y =
          ftrl::smooth_comparator(rng.dirichlet_flat(kA), kT);
      const auto a = ftrl::regret_audit(ftrl::Regularizer::kLogBarrier, losses,
                                        eta, y);
      rows.push_back({t, "logbarrier_regret", a.rhs, a.lhs, a.holds});
    }
    // Hedge with eta c >= -1.
    {
      constexpr double eta = 0.1;
      std::vector<Eigen::VectorXd> losses(kT, Eigen::VectorXd(kA));
      for (auto& c : losses) {
        for (int i = 0; i < kA; ++i) c(i) = rng.uniform(-1.0 / eta, 2.0 / eta);
      }
      const auto a = ftrl::regret_audit(ftrl::Regularizer::kNegEntropy, losses,
                                        eta, rng.dirichlet_flat(kA));
      rows.push_back({t, "hedge_regret", a.rhs, a.lhs,
                      a.holds && a.precondition_ok});
    }
  }
  // One sequence outside the Hedge precondition must be flagged.
  {
    constexpr double eta = 0.1;
    std::vector<Eigen::VectorXd> losses(kT, Eigen::VectorXd::Zero(kA));
    losses[0](0) = -2.0 / eta;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(kA);
    y(0) = 1.0;
    const auto a =
        ftrl::regret_audit(ftrl::Regularizer::kNegEntropy, losses, eta, y);
    rows.push_back({trials, "hedge_precondition_flagged", -1.0, -2.0,
                    !a.precondition_ok});
  }
  return rows;
}

namespace {

MgrParams check_mgr_params(const CheckSettings& c, const LayeredMdp& mdp) {
  MgrParams mp;
  mp.gamma = c.gamma;
  mp.epsilon = c.epsilon;
  mp.M = c.mgr_M.value_or(
      mgr_strict_M(mdp.feature_dim(), mdp.horizon(), c.T, c.epsilon, c.gamma));
  mp.N = c.mgr_N.value_or(mgr_strict_N(c.epsilon, c.gamma));
  return mp;
}

}  // namespace

std::vector<CheckRow> check_estimators(const ExperimentConfig& config) {
  const CheckSettings& c = config.checks;
  const std::uint64_t seed = config.seeds.front();
  const Instance inst = make_instance(config, seed, 1);
  const LayeredMdp& mdp = inst.mdp;
  const int H = mdp.horizon();
  const int d = mdp.feature_dim();
  const Policy pi = Policy::uniform(mdp);
  const MgrParams mp = check_mgr_params(c, mdp);
  const auto loss = inst.losses.episode(0);

  std::vector<Eigen::MatrixXd> target(H);
  for (int h = 1; h <= H; ++h) {
    target[h - 1] = linalg::spd_inverse(
        c.gamma * Eigen::MatrixXd::Identity(d, d) + covariance_exact(mdp, pi, h));
  }
  const double q_bound = -std::sqrt(3.0) * H / std::sqrt(c.gamma);
  const double b_bound = 6.0 * H / c.gamma;  // beta = 1

  std::vector<CheckRow> rows;
  for (int t = 0; t < c.trials; ++t) {
    RandomStream rng(seed, "check_estimators", static_cast<std::uint64_t>(t));
    Simulator sim(mdp);
    RandomStream mr = rng.fork("mgr");
    const MgrResult est = mgr_estimate(sim, pi, mp, mr);
    std::vector<Eigen::MatrixXd> cov(H);
    for (int h = 0; h < H; ++h) {
      cov[h] = est.layers[h].matrix;
      const double err = linalg::operator_norm(cov[h] - target[h]);
      rows.push_back({t, "mgr_error_layer" + std::to_string(h + 1), c.epsilon,
                      err, err <= c.epsilon});
    }

    // Resample until the check passes, as the magnitude-reduced learner does.
    std::vector<Eigen::MatrixXd> samples(H, Eigen::MatrixXd(d, c.resamples));
    for (int attempt = 0;; ++attempt) {
      RandomStream sr = rng.fork("samples", static_cast<std::uint64_t>(attempt));
      for (int m = 0; m < c.resamples; ++m) {
        const Trajectory tr = sim.rollout(pi, sr);
        for (int h = 0; h < H; ++h) {
          samples[h].col(m) = mdp.feature(tr.steps[h].state, tr.steps[h].action);
        }
      }
      bool ok = true;
      for (int h = 0; h < H && ok; ++h) {
        ok = resampling_check(cov[h], empirical_covariance(samples[h]));
      }
      if (ok) break;
      if (attempt >= 50) throw BudgetError("resampling check keeps failing");
    }
    RandomStream er = rng.fork("episode");
    const Trajectory traj = simulate_episode(mdp, pi, loss, er, 1);
    const auto suffix = traj.suffix_losses();
    double q_min = std::numeric_limits<double>::infinity();
    for (int h = 1; h <= H; ++h) {
      const Step& st = traj.steps[h - 1];
      const Eigen::VectorXd phi_traj = mdp.feature(st.state, st.action);
      for (std::size_t s = mdp.layer_begin(h); s < mdp.layer_end(h); ++s) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
          const QEstimate q = magnitude_reduced_estimate(
              mdp.feature(s, a), cov[h - 1], phi_traj, suffix[h - 1], H,
              samples[h - 1]);
          q_min = std::min(q_min, q.value);
        }
      }
    }
    rows.push_back({t, "magnitude_reduced_min", q_bound, q_min,
                    q_min >= q_bound - 1e-12});

    const StateActionTable b = bonus_table(mdp, pi, cov, 1.0);
    const double b_max = dilated_bonus_exact(mdp, pi, b).maxCoeff();
    rows.push_back({t, "dilated_bonus_max", b_bound, b_max,
                    b_max <= b_bound + 1e-12});
  }
  return rows;
}

std::vector<CheckRow> check_covariance(const ExperimentConfig& config) {
  const CheckSettings& c = config.checks;
  const std::uint64_t seed = config.seeds.front();
  const Instance inst = make_instance(config, seed, 1);
  const LayeredMdp& mdp = inst.mdp;
  const int H = mdp.horizon();
  const int d = mdp.feature_dim();
  const Policy pi = Policy::uniform(mdp);
  const long long W = c.W.value_or(static_cast<long long>(std::ceil(
      4.0 * d * std::log(d / c.delta) / (c.gamma * c.gamma))));
  std::vector<Eigen::MatrixXd> sigma(H);
  for (int h = 1; h <= H; ++h) sigma[h - 1] = covariance_exact(mdp, pi, h);
  const std::vector<double> zero(mdp.num_states() * mdp.num_actions(), 0.0);

  std::vector<CheckRow> rows;
  for (int t = 0; t < c.trials; ++t) {
    RandomStream rng(seed, "check_covariance", static_cast<std::uint64_t>(t));
    std::vector<Eigen::MatrixXd> feats(H, Eigen::MatrixXd(d, W));
    for (long long n = 0; n < W; ++n) {
      const Trajectory tr = simulate_episode(mdp, pi, zero, rng, 1);
      for (int h = 0; h < H; ++h) {
        feats[h].col(n) = mdp.feature(tr.steps[h].state, tr.steps[h].action);
      }
    }
    for (int h = 0; h < H; ++h) {
      const std::string layer = std::to_string(h + 1);
      const SandwichResult mult =
          multiplicative_check(empirical_covariance(feats[h]), sigma[h], c.gamma);
      rows.push_back({t, "multiplicative_layer" + layer, std::sqrt(c.gamma),
                      std::max(1.0 - mult.min_eigenvalue,
                               mult.max_eigenvalue - 1.0),
                      mult.holds});
      const SandwichResult sw = sandwich_check(
          empirical_cov_inverse(feats[h], c.gamma), sigma[h], c.gamma);
      rows.push_back({t, "sandwich_layer" + layer, 2.0 * std::sqrt(c.gamma),
                      std::max(1.0 - sw.min_eigenvalue, sw.max_eigenvalue - 1.0),
                      sw.holds && sw.precondition_ok});
    }
  }
  return rows;
}

}  // namespace advlin
