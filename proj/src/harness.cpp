// Copyright 2026 The til Authors
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

#include "til/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "til/errors.hpp"

namespace til {

namespace {

// Acceptance thresholds applied per trial.
constexpr double kMarginTolRel = 1e-8;
constexpr double kSupportLeakTol = 1e-10;
constexpr double kFixedPointTol = 1e-9;
constexpr double kStrictAgreementTol = 1e-9;
constexpr double kMonotonicityTol = 1e-9;
constexpr double kRenyiSlackTol = 1e-8;
constexpr double kRenyiOrderTol = 1e-9;
constexpr double kFidelityBridgeTol = 1e-9;
constexpr double kDecompositionTolRel = 1e-8;
constexpr double kTermTol = 1e-9;
constexpr double kThetaTol = 1e-8;
constexpr double kConvergedFloor = 1e-12;

const std::vector<std::pair<Check, const char*>>& check_names() {
  static const std::vector<std::pair<Check, const char*>> names{
      {Check::TraceIneq, "trace_ineq"},   {Check::Monotonicity, "monotonicity"},
      {Check::RenyiBounds, "renyi_bounds"}, {Check::Decomposition, "decomposition"},
      {Check::Equality, "equality"},      {Check::GoldenThompson, "gt"},
      {Check::Lieb, "lieb"},              {Check::Lemmas, "lemmas"},
      {Check::Chain1, "chain1"},          {Check::Chain2, "chain2"},
  };
  return names;
}

std::string rank_policy_name(RankPolicy p) {
  switch (p) {
    case RankPolicy::Full: return "full";
    case RankPolicy::Deficient: return "deficient";
    case RankPolicy::Mixed: return "mixed";
  }
  return "mixed";
}

template <typename T>
std::vector<T> read_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "must be an array");
  std::vector<T> out;
  for (const auto& x : j) {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!x.is_string()) throw ConfigError(field, "entries must be strings");
    } else if constexpr (std::is_integral_v<T>) {
      if (!x.is_number_integer()) throw ConfigError(field, "entries must be integers");
    } else {
      if (!x.is_number()) throw ConfigError(field, "entries must be numbers");
    }
    out.push_back(x.get<T>());
  }
  return out;
}

std::string grid_tag(double eps, double delta) {
  std::ostringstream os;
  os << "eps=" << format_double(eps);
  if (delta > 0.0) os << ",delta=" << format_double(delta);
  return os.str();
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------
// Checks and configuration

std::string to_string(Check c) {
  for (const auto& [k, name] : check_names())
    if (k == c) return name;
  return "unknown";
}

Check check_from_string(const std::string& name) {
  for (const auto& [k, n] : check_names())
    if (name == n) return k;
  throw std::invalid_argument("unknown check \"" + name + "\"");
}

std::set<Check> all_checks() {
  std::set<Check> s;
  for (const auto& [k, name] : check_names()) s.insert(k);
  return s;
}

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

double default_tol_rel() {
  if (const char* env = std::getenv("TIL_TOL_REL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && std::isfinite(v) && v > 0.0) return v;
    throw ConfigError("TIL_TOL_REL", "must be a positive number");
  }
  return kChainTolRel;
}

void validate_grid(const std::vector<double>& grid, const std::string& field) {
  if (grid.empty()) throw ConfigError(field, "must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw ConfigError(field, "entries must be positive");
    }
    if (i > 0 && !(grid[i] < grid[i - 1])) throw ConfigError(field, "must be strictly decreasing");
  }
}

Json CheckParams::to_json() const {
  Json j;
  Json names = Json::array();
  for (Check c : checks) names.push_back(to_string(c));
  j["checks"] = std::move(names);
  j["alphas"] = alphas;
  j["eps_grid"] = eps_grid;
  j["delta_grid"] = delta_grid;
  j["tol_rel"] = tol_rel;
  return j;
}

CheckParams CheckParams::from_json(const Json& j) {
  CheckParams p;
  p.tol_rel = default_tol_rel();
  if (j.contains("checks")) {
    p.checks.clear();
    for (const auto& name : read_list<std::string>(j.at("checks"), "checks")) {
      try {
        p.checks.insert(check_from_string(name));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("checks", e.what());
      }
    }
  }
  if (j.contains("alphas")) p.alphas = read_list<double>(j.at("alphas"), "alphas");
  if (j.contains("eps_grid")) p.eps_grid = read_list<double>(j.at("eps_grid"), "eps_grid");
  if (j.contains("delta_grid")) p.delta_grid = read_list<double>(j.at("delta_grid"), "delta_grid");
  if (j.contains("tol_rel")) {
    if (!j.at("tol_rel").is_number()) throw ConfigError("tol_rel", "must be a number");
    p.tol_rel = j.at("tol_rel").get<double>();
  }
  return p;
}

void SweepConfig::validate() const {
  const auto dims = [](const std::vector<Index>& v, const char* field) {
    if (v.empty()) throw ConfigError(field, "must not be empty");
    for (Index d : v)
      if (d < 2) throw ConfigError(field, "dimensions must be at least 2");
  };
  dims(dims_in, "dims_in");
  dims(dims_out, "dims_out");
  if (kraus_counts.empty()) throw ConfigError("kraus_counts", "must not be empty");
  for (Index k : kraus_counts)
    if (k < 1) throw ConfigError("kraus_counts", "entries must be at least 1");
  if (trials_per_cell < 1) throw ConfigError("trials_per_cell", "must be at least 1");
  if (!(deficient_fraction >= 0.0 && deficient_fraction <= 1.0)) {
    throw ConfigError("deficient_fraction", "must lie in [0, 1]");
  }
  if (params.alphas.empty()) throw ConfigError("alphas", "must not be empty");
  for (double a : params.alphas)
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alphas", "entries must lie in (0, 1]");
  validate_grid(params.eps_grid, "eps_grid");
  validate_grid(params.delta_grid, "delta_grid");
  if (params.delta_grid.front() >= 1.0) throw ConfigError("delta_grid", "entries must be below 1");
  if (!(params.tol_rel > 0.0)) throw ConfigError("tol_rel", "must be positive");
  if (params.checks.empty()) throw ConfigError("checks", "must not be empty");
}

Json SweepConfig::to_json() const {
  Json j;
  j["dims_in"] = dims_in;
  j["dims_out"] = dims_out;
  j["kraus_counts"] = kraus_counts;
  j["trials_per_cell"] = trials_per_cell;
  j["rank_policy"] = rank_policy_name(rank_policy);
  j["deficient_fraction"] = deficient_fraction;
  j["master_seed"] = master_seed;
  j["record_timing"] = record_timing;
  const Json p = params.to_json();
  for (auto it = p.begin(); it != p.end(); ++it) j[it.key()] = *it;
  return j;
}

SweepConfig SweepConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
  static const std::set<std::string> known{
      "dims_in",   "dims_out",      "kraus_counts", "trials_per_cell", "rank_policy",
      "deficient_fraction", "master_seed", "record_timing", "checks", "alphas",
      "eps_grid",  "delta_grid",    "tol_rel"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown field");
  }
  SweepConfig c;
  if (j.contains("dims_in")) c.dims_in = read_list<Index>(j.at("dims_in"), "dims_in");
  if (j.contains("dims_out")) c.dims_out = read_list<Index>(j.at("dims_out"), "dims_out");
  if (j.contains("kraus_counts"))
    c.kraus_counts = read_list<Index>(j.at("kraus_counts"), "kraus_counts");
  if (j.contains("trials_per_cell")) {
    const Json& t = j.at("trials_per_cell");
    if (!t.is_number_integer() || t.get<long long>() < 1) {
      throw ConfigError("trials_per_cell", "must be a positive integer");
    }
    c.trials_per_cell = t.get<std::size_t>();
  }
  if (j.contains("rank_policy")) {
    const Json& r = j.at("rank_policy");
    const std::string name = r.is_string() ? r.get<std::string>() : "";
    if (name == "full")
      c.rank_policy = RankPolicy::Full;
    else if (name == "deficient")
      c.rank_policy = RankPolicy::Deficient;
    else if (name == "mixed")
      c.rank_policy = RankPolicy::Mixed;
    else
      throw ConfigError("rank_policy", "must be \"full\", \"deficient\" or \"mixed\"");
  }
  if (j.contains("deficient_fraction")) {
    if (!j.at("deficient_fraction").is_number()) {
      throw ConfigError("deficient_fraction", "must be a number");
    }
    c.deficient_fraction = j.at("deficient_fraction").get<double>();
  }
  if (j.contains("master_seed")) {
    const Json& s = j.at("master_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("master_seed", "must be a nonnegative 64-bit integer");
    }
    c.master_seed = s.get<std::uint64_t>();
  }
  if (j.contains("record_timing")) {
    if (!j.at("record_timing").is_boolean()) throw ConfigError("record_timing", "must be boolean");
    c.record_timing = j.at("record_timing").get<bool>();
  }
  c.params = CheckParams::from_json(j);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Instance generation

Instance generate_instance(Index dim_in, Index dim_out, Index n_kraus, bool deficient,
                           std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 1));
  Index rank_sigma = dim_in;
  Index rank_tau = dim_in;
  if (deficient) {
    // 0: σ deficient, τ fills supp σ; 1: σ full, τ deficient; 2: both deficient.
    const int mode = std::uniform_int_distribution<int>(0, 2)(rng);
    if (mode != 1) rank_sigma = std::uniform_int_distribution<Index>(1, dim_in - 1)(rng);
    rank_tau = rank_sigma;
    if (mode == 1) rank_tau = std::uniform_int_distribution<Index>(1, dim_in - 1)(rng);
    if (mode == 2) rank_tau = std::uniform_int_distribution<Index>(1, rank_sigma)(rng);
  }
  PsdMatrix sigma = random_state_truncated(dim_in, rank_sigma, derive_seed(seed, 2));
  DensityMatrix tau = random_state_in_support(sigma, rank_tau, derive_seed(seed, 3));
  Channel n = random_channel(dim_in, dim_out, n_kraus, derive_seed(seed, 4));
  return Instance{std::move(sigma), std::move(tau), std::move(n), seed, std::nullopt};
}

// ---------------------------------------------------------------------------
// Single trial

namespace {

class TrialRunner {
 public:
  TrialRunner(const Instance& inst, const CheckParams& params, TrialReport& report)
      : inst_(inst), params_(params), report_(report) {}

  void run();

 private:
  bool enabled(Check c) const { return params_.checks.count(c) > 0; }

  void guarded(Check c, const std::function<void()>& body) {
    if (!enabled(c)) return;
    try {
      body();
    } catch (const std::exception& e) {
      report_.errors.push_back(to_string(c) + ": " + e.what());
    }
  }

  void add(Check c, InequalityVerdict v) { report_.verdicts.push_back({to_string(c), std::move(v)}); }

  void trace_inequality();
  void monotonicity();
  void renyi_bounds();
  void decomposition();
  void equality();
  void golden_thompson_checks();
  void lieb_checks();
  void lemma_checks();
  void chain1();
  void chain2();

  const RuskaiResult& extended() {
    if (!extended_) extended_ = ruskai_map_extended(inst_.sigma, inst_.channel, inst_.tau);
    return *extended_;
  }
  double delta() {
    if (!delta_) delta_ = remainder(inst_.tau, inst_.sigma, inst_.channel).value();
    return *delta_;
  }

  const Instance& inst_;
  const CheckParams& params_;
  TrialReport& report_;
  std::optional<RuskaiResult> extended_;
  std::optional<double> delta_;
  bool n_sigma_positive_ = false;
};

void TrialRunner::run() {
  const PsdMatrix n_sigma = apply_psd(inst_.channel, inst_.sigma);
  const PsdMatrix n_tau = apply_psd(inst_.channel, inst_.tau);
  report_.dim_in = inst_.channel.dim_in();
  report_.dim_out = inst_.channel.dim_out();
  report_.n_kraus = inst_.channel.n_kraus();
  report_.rank_sigma = inst_.sigma.rank();
  report_.rank_tau = inst_.tau.rank();
  report_.rank_n_sigma = n_sigma.rank();
  report_.rank_n_tau = n_tau.rank();
  n_sigma_positive_ = n_sigma.strictly_positive() && n_tau.strictly_positive() &&
                      inst_.sigma.strictly_positive();
  report_.strictly_positive = n_sigma_positive_ && inst_.tau.strictly_positive();

  guarded(Check::TraceIneq, [this] { trace_inequality(); });
  guarded(Check::Monotonicity, [this] { monotonicity(); });
  guarded(Check::RenyiBounds, [this] { renyi_bounds(); });
  guarded(Check::Decomposition, [this] { decomposition(); });
  guarded(Check::Equality, [this] { equality(); });
  guarded(Check::GoldenThompson, [this] { golden_thompson_checks(); });
  guarded(Check::Lieb, [this] { lieb_checks(); });
  guarded(Check::Lemmas, [this] { lemma_checks(); });
  guarded(Check::Chain1, [this] { chain1(); });
  guarded(Check::Chain2, [this] { chain2(); });
}

void TrialRunner::trace_inequality() {
  const Check c = Check::TraceIneq;
  const RuskaiResult& r = extended();
  report_.theta = r.theta;
  report_.margin = r.margin;
  add(c, make_inequality("extended_margin", r.theta, inst_.tau.trace(), kMarginTolRel));

  const Projector perp = support_projector(inst_.tau).complement();
  add(c, make_inequality_abs("support", operator_norm(conjugate(perp.matrix(), r.r_tilde).matrix()),
                             kSupportLeakTol, 0.0));

  const RuskaiResult fixed = ruskai_map_extended(inst_.sigma, inst_.channel, inst_.sigma);
  const double fp = operator_norm(fixed.r_tilde.matrix() - inst_.sigma.matrix());
  report_.fixed_point_residual = fp;
  add(c, make_inequality_abs("fixed_point", fp,
                             kFixedPointTol * (1.0 + operator_norm(inst_.sigma.matrix())), 0.0));

  if (report_.strictly_positive) {
    const RuskaiResult strict = ruskai_map_strict(inst_.sigma, inst_.channel, inst_.tau);
    report_.strict_margin = strict.margin;
    add(c, make_inequality("strict_margin", strict.theta, inst_.tau.trace(), kMarginTolRel));
    const double gap = operator_norm(strict.r_tilde.matrix() - r.r_tilde.matrix());
    report_.strict_extended_gap = gap;
    add(c, make_inequality_abs("strict_vs_extended", gap, kStrictAgreementTol, 0.0));
  }
}

void TrialRunner::monotonicity() {
  const EntropyValue before = relative_entropy(inst_.tau, inst_.sigma);
  const EntropyValue after = relative_entropy(apply_psd(inst_.channel, inst_.tau),
                                              apply_psd(inst_.channel, inst_.sigma));
  if (before.is_infinite() || after.is_infinite()) {
    throw NumericError("relative entropy infinite on a support-compatible instance");
  }
  delta_ = before.value() - after.value();
  report_.delta = *delta_;
  add(Check::Monotonicity,
      make_inequality_abs("data_processing", after.value(), before.value(), kMonotonicityTol));
}

void TrialRunner::renyi_bounds() {
  const Check c = Check::RenyiBounds;
  std::vector<double> alphas = params_.alphas;
  std::sort(alphas.begin(), alphas.end());
  report_.renyi = renyi_lower_bounds(inst_.tau, inst_.sigma, inst_.channel, alphas);
  report_.delta = delta();
  for (const RenyiBound& b : report_.renyi) {
    add(c, make_inequality_abs("slack[alpha=" + format_double(b.alpha) + "]", b.bound, delta(),
                               kRenyiSlackTol));
  }
  for (std::size_t i = 1; i < report_.renyi.size(); ++i) {
    add(c, make_inequality_abs("ordered[alpha=" + format_double(report_.renyi[i].alpha) + "]",
                               report_.renyi[i - 1].bound, report_.renyi[i].bound,
                               kRenyiOrderTol));
  }
  const double fid = fidelity(inst_.tau, extended().r_tilde);
  const double half = renyi_relative_entropy(0.5, inst_.tau, extended().r_tilde).value();
  report_.renyi_half_fidelity_gap = std::abs(half + 2.0 * std::log(fid));
  InequalityVerdict v = make_equality("half_vs_fidelity", half, -2.0 * std::log(fid), 0.0);
  v.tol = kFidelityBridgeTol;
  v.pass = std::abs(v.margin) <= v.tol;
  add(c, v);
}

void TrialRunner::decomposition() {
  const Check c = Check::Decomposition;
  const Decomposition d = decomposition_check(inst_.tau, inst_.sigma, inst_.channel);
  report_.delta = d.delta;
  report_.theta = d.theta;
  report_.decomposition_residual = d.residual;
  report_.term_klein = d.term_klein;
  report_.term_log_theta = d.term_log_theta;
  add(c, make_inequality_abs("residual", std::abs(d.residual),
                             kDecompositionTolRel * std::max(1.0, d.delta), 0.0));
  add(c, make_inequality_abs("klein_term", 0.0, d.term_klein, kTermTol));
  add(c, make_inequality_abs("log_theta_term", 0.0, d.term_log_theta, kTermTol));
  add(c, make_inequality_abs("theta", d.theta, 1.0, kThetaTol));
}

void TrialRunner::equality() {
  const EqualityFlags f = equality_check(inst_.tau, inst_.sigma, inst_.channel);
  report_.equality = f;
  add(Check::Equality, make_equality("delta_zero_iff_fixed_point", f.delta_zero ? 1.0 : 0.0,
                                     f.fixed_point ? 1.0 : 0.0, 0.0));
}

void TrialRunner::golden_thompson_checks() {
  const Index d = inst_.channel.dim_in();
  const HermitianMatrix y = random_hermitian(d, derive_seed(inst_.seed, 10));
  const HermitianMatrix z = random_hermitian(d, derive_seed(inst_.seed, 11));
  add(Check::GoldenThompson, golden_thompson(y, z, NormKind::Trace));
  add(Check::GoldenThompson, golden_thompson(y, z, NormKind::Operator));
}

void TrialRunner::lieb_checks() {
  const Index d = inst_.channel.dim_in();
  const DensityMatrix x = random_state(d, d, derive_seed(inst_.seed, 12));
  const DensityMatrix y = random_state(d, d, derive_seed(inst_.seed, 13));
  const DensityMatrix z = random_state(d, d, derive_seed(inst_.seed, 14));
  add(Check::Lieb, lieb_triple(x, y, z));
}

void TrialRunner::lemma_checks() {
  const Check c = Check::Lemmas;
  const Isometry iso = stinespring(inst_.channel);
  const HermitianMatrix x = random_hermitian(iso.v.rows(), derive_seed(inst_.seed, 15));
  const Projector p_tau = support_projector(inst_.tau);
  for (double delta : {1e-1, 1e-3}) {
    auto [tr, op] = lemma1_check(p_tau, iso.v, x, delta);
    tr.label += "[delta=" + format_double(delta) + "]";
    op.label += "[delta=" + format_double(delta) + "]";
    add(c, tr);
    add(c, op);
  }
  const bool l2 = lemma2_check(inst_.channel, inst_.tau, inst_.sigma);
  add(c, make_equality("support_image", l2 ? 1.0 : 0.0, 1.0, 0.0));
  const Projector kernel = support_projector(apply_psd(inst_.channel, inst_.tau)).complement();
  add(c, lemma3_check(inst_.channel, inst_.tau, kernel));
}

void TrialRunner::chain1() {
  const Check c = Check::Chain1;
  double x_b_norm = 0.0;
  for (double eps : params_.eps_grid) {
    std::optional<double> f;
    for (double delta : params_.delta_grid) {
      const Theorem1Audit a =
          theorem1_chain_audit(inst_.sigma, inst_.channel, inst_.tau, eps, delta, params_.tol_rel);
      const std::string tag = grid_tag(eps, delta) + "/";
      for (const auto& v : a.verdicts) {
        InequalityVerdict copy = v;
        copy.label = tag + v.label;
        add(c, std::move(copy));
      }
      f = a.intermediates.f_eps;
      x_b_norm = operator_norm(a.intermediates.x_b);
    }
    report_.f_eps.emplace_back(eps, *f);
  }
  // f(ε) vanishes identically exactly when X^B does (unitary channel, full-rank σ).
  for (std::size_t i = 1; i < report_.f_eps.size(); ++i) {
    const double prev = report_.f_eps[i - 1].second;
    const double cur = report_.f_eps[i].second;
    InequalityVerdict v = make_inequality_abs(
        "f_decreasing[" + grid_tag(report_.f_eps[i].first, 0.0) + "]", cur, prev, 0.0);
    v.pass = x_b_norm <= kConvergedFloor ? (cur <= kConvergedFloor) : (cur < prev);
    add(c, v);
  }
}

void TrialRunner::chain2() {
  if (!n_sigma_positive_) return;
  for (double eps : params_.eps_grid) {
    const Theorem2Audit a =
        theorem2_chain_audit(inst_.sigma, inst_.channel, inst_.tau, eps, params_.tol_rel);
    for (const auto& v : a.verdicts) {
      InequalityVerdict copy = v;
      copy.label = grid_tag(eps, 0.0) + "/" + v.label;
      add(Check::Chain2, std::move(copy));
    }
  }
}

}  // namespace

TrialReport run_trial(const Instance& inst, const CheckParams& params) {
  TrialReport report;
  report.derived_seed = inst.seed;
  try {
    TrialRunner(inst, params, report).run();
  } catch (const std::exception& e) {
    report.errors.push_back(std::string("setup: ") + e.what());
  }
  report.pass = report.errors.empty() &&
                std::all_of(report.verdicts.begin(), report.verdicts.end(),
                            [](const TrialVerdict& v) { return v.verdict.pass; });
  if (!report.pass) {
    Instance replay = inst;
    replay.params = params.to_json();
    report.instance = instance_to_json(replay);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepReport run_sweep(const SweepConfig& config, unsigned jobs) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  struct Task {
    std::size_t cell;
    std::size_t trial;
    Index dim_in, dim_out, n_kraus;
  };
  SweepReport report;
  report.config = config;
  std::vector<Task> tasks;
  std::size_t cell_index = 0;
  for (Index din : config.dims_in) {
    for (Index dout : config.dims_out) {
      for (Index nk : config.kraus_counts) {
        const std::size_t this_cell = cell_index++;
        if (nk * dout < din) {
          report.skipped.push_back(SkippedCell{
              din, dout, nk, "n_kraus * dim_out < dim_in admits no trace-preserving Kraus family"});
          continue;
        }
        report.cells.push_back(CellAggregate{din, dout, nk, config.trials_per_cell, {}, {}, 0});
        for (std::size_t t = 0; t < config.trials_per_cell; ++t)
          tasks.push_back(Task{this_cell, t, din, dout, nk});
      }
    }
  }

  std::vector<TrialReport> results(tasks.size());
  const auto work = [&](std::size_t i) {
    const Task& t = tasks[i];
    const auto t0 = Clock::now();
    const std::uint64_t seed = derive_seed(config.master_seed, t.cell, t.trial);
    std::mt19937_64 rng(derive_seed(seed, 0));
    bool deficient = false;
    switch (config.rank_policy) {
      case RankPolicy::Full: deficient = false; break;
      case RankPolicy::Deficient: deficient = true; break;
      case RankPolicy::Mixed:
        deficient = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < config.deficient_fraction;
        break;
    }
    TrialReport r;
    try {
      const Instance inst = generate_instance(t.dim_in, t.dim_out, t.n_kraus, deficient, seed);
      r = run_trial(inst, config.params);
    } catch (const std::exception& e) {
      r.derived_seed = seed;
      r.dim_in = t.dim_in;
      r.dim_out = t.dim_out;
      r.n_kraus = t.n_kraus;
      r.errors.push_back(std::string("generation: ") + e.what());
      r.pass = false;
    }
    r.trial_id = i;
    r.cell_index = t.cell;
    if (config.record_timing) {
      r.wall_time_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    }
    results[i] = std::move(r);
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_threads; ++k) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic merge: tasks are already in trial_id order.
  std::size_t agg = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    while (report.cells[agg].dim_in != tasks[i].dim_in || report.cells[agg].dim_out != tasks[i].dim_out ||
           report.cells[agg].n_kraus != tasks[i].n_kraus) {
      ++agg;
    }
    CellAggregate& cell = report.cells[agg];
    const TrialReport& r = results[i];
    if (r.margin) cell.min_margin = cell.min_margin ? std::min(*cell.min_margin, *r.margin) : *r.margin;
    if (r.decomposition_residual) {
      const double a = std::abs(*r.decomposition_residual);
      cell.max_abs_residual = cell.max_abs_residual ? std::max(*cell.max_abs_residual, a) : a;
    }
    if (!r.pass) {
      ++cell.failures;
      ++report.failures;
    }
  }
  report.trials = std::move(results);
  report.pass = report.failures == 0;
  if (config.record_timing) {
    report.total_runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json verdict_json(const TrialVerdict& v) {
  Json j;
  j["check"] = v.check;
  j["label"] = v.verdict.label;
  j["kind"] = to_string(v.verdict.kind);
  j["lhs"] = v.verdict.lhs;
  j["rhs"] = v.verdict.rhs;
  j["margin"] = v.verdict.margin;
  j["tol"] = v.verdict.tol;
  j["pass"] = v.verdict.pass;
  return j;
}

}  // namespace

Json to_json(const TrialReport& t, VerdictDetail detail) {
  Json j;
  j["trial_id"] = t.trial_id;
  j["cell_index"] = t.cell_index;
  j["derived_seed"] = t.derived_seed;
  j["dims"] = {{"in", t.dim_in}, {"out", t.dim_out}, {"kraus", t.n_kraus}};
  j["ranks"] = {{"sigma", t.rank_sigma},
                {"tau", t.rank_tau},
                {"n_sigma", t.rank_n_sigma},
                {"n_tau", t.rank_n_tau}};
  j["strictly_positive"] = t.strictly_positive;
  Json s;
  s["delta"] = optional_number(t.delta);
  s["theta"] = optional_number(t.theta);
  s["margin"] = optional_number(t.margin);
  s["strict_margin"] = optional_number(t.strict_margin);
  s["strict_extended_gap"] = optional_number(t.strict_extended_gap);
  s["fixed_point_residual"] = optional_number(t.fixed_point_residual);
  s["decomposition_residual"] = optional_number(t.decomposition_residual);
  s["term_klein"] = optional_number(t.term_klein);
  s["term_log_theta"] = optional_number(t.term_log_theta);
  if (t.equality) {
    s["equality"] = {{"delta_zero", t.equality->delta_zero},
                     {"fixed_point", t.equality->fixed_point},
                     {"fixed_point_residual", t.equality->fixed_point_residual}};
  }
  if (!t.renyi.empty()) {
    Json rb = Json::array();
    for (const auto& b : t.renyi) rb.push_back({{"alpha", b.alpha}, {"bound", b.bound}, {"slack", b.slack}});
    s["renyi"] = std::move(rb);
  }
  if (!t.f_eps.empty()) {
    Json fs = Json::array();
    for (const auto& [e, f] : t.f_eps) fs.push_back({{"eps", e}, {"f", f}});
    s["f_eps"] = std::move(fs);
  }
  j["scalars"] = std::move(s);
  j["verdict_count"] = t.verdicts.size();
  Json vs = Json::array();
  for (const auto& v : t.verdicts)
    if (detail == VerdictDetail::All || !v.verdict.pass) vs.push_back(verdict_json(v));
  j[detail == VerdictDetail::All ? "verdicts" : "failed_verdicts"] = std::move(vs);
  j["errors"] = t.errors;
  if (t.wall_time_ms > 0.0) j["wall_time_ms"] = t.wall_time_ms;
  j["pass"] = t.pass;
  if (t.instance) j["instance"] = *t.instance;
  return j;
}

Json to_json(const SweepReport& r, VerdictDetail detail) {
  Json j;
  j["tool_version"] = r.tool_version;
  j["config"] = r.config.to_json();
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    Json cj;
    cj["dim_in"] = c.dim_in;
    cj["dim_out"] = c.dim_out;
    cj["n_kraus"] = c.n_kraus;
    cj["trials"] = c.trials;
    cj["min_margin"] = optional_number(c.min_margin);
    cj["max_abs_residual"] = optional_number(c.max_abs_residual);
    cj["failures"] = c.failures;
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  Json skipped = Json::array();
  for (const auto& s : r.skipped) {
    skipped.push_back(
        {{"dim_in", s.dim_in}, {"dim_out", s.dim_out}, {"n_kraus", s.n_kraus}, {"reason", s.reason}});
  }
  j["skipped_cells"] = std::move(skipped);
  Json trials = Json::array();
  for (const auto& t : r.trials) trials.push_back(to_json(t, detail));
  j["trials"] = std::move(trials);
  j["failures"] = r.failures;
  j["pass"] = r.pass;
  if (r.config.record_timing) j["total_runtime_ms"] = r.total_runtime_ms;
  return j;
}

// ---------------------------------------------------------------------------
// Limit study

LimitStudy limit_study(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau,
                       const std::vector<double>& eps_grid, const std::vector<double>& delta_grid,
                       double tol_rel) {
  validate_grid(eps_grid, "eps_grid");
  validate_grid(delta_grid, "delta_grid");
  if (delta_grid.front() >= 1.0) throw ConfigError("delta_grid", "entries must be below 1");
  if (!support_contained(tau, sigma)) {
    throw DomainError("limit_study: supp(tau) is not contained in supp(sigma)");
  }
  const RuskaiResult limit = ruskai_map_extended(sigma, n, tau);
  std::vector<double> trace_r(delta_grid.size());
  std::vector<double> gaps(delta_grid.size());
  for (std::size_t k = 0; k < delta_grid.size(); ++k) {
    const PsdMatrix r = ruskai_map_regularized(sigma, n, tau, delta_grid[k]);
    trace_r[k] = r.trace();
    gaps[k] = operator_norm(r.matrix() - limit.r_tilde.matrix());
  }
  LimitStudy study;
  std::vector<double> f_values;
  double x_b_norm = 0.0;
  for (double eps : eps_grid) {
    double f = 0.0;
    for (std::size_t k = 0; k < delta_grid.size(); ++k) {
      const Theorem1Audit a = theorem1_chain_audit(sigma, n, tau, eps, delta_grid[k], tol_rel);
      double min_margin = 0.0;
      bool first = true;
      for (const auto& v : a.verdicts) {
        if (v.kind != VerdictKind::Inequality) continue;
        min_margin = first ? v.margin : std::min(min_margin, v.margin);
        first = false;
      }
      f = a.intermediates.f_eps;
      x_b_norm = operator_norm(a.intermediates.x_b);
      study.rows.push_back(
          LimitRow{eps, delta_grid[k], f, trace_r[k], gaps[k], min_margin, a.pass()});
    }
    f_values.push_back(f);
  }
  study.f_decreasing = true;
  for (std::size_t i = 1; i < f_values.size(); ++i) {
    const bool ok = x_b_norm <= kConvergedFloor ? f_values[i] <= kConvergedFloor
                                                : f_values[i] < f_values[i - 1];
    study.f_decreasing = study.f_decreasing && ok;
  }
  study.gap_decreasing = true;
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    const bool ok = gaps[k] < gaps[k - 1] || gaps[k] <= kConvergedFloor;
    study.gap_decreasing = study.gap_decreasing && ok;
  }
  return study;
}

std::string LimitStudy::to_csv() const {
  std::ostringstream os;
  os << "eps,delta,f_eps,trace_r_delta,limit_gap,chain_min_margin,chain_pass\r\n";
  for (const auto& r : rows) {
    os << format_double(r.eps) << ',' << format_double(r.delta) << ',' << format_double(r.f_eps)
       << ',' << format_double(r.trace_r_delta) << ',' << format_double(r.limit_gap) << ','
       << format_double(r.chain_min_margin) << ',' << (r.chain_pass ? "true" : "false") << "\r\n";
  }
  return os.str();
}

}  // namespace til
