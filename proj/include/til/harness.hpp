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

#pragma once

// Randomized verification sweeps, instance replay and ε/δ limit studies.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "til/io.hpp"
#include "til/oracles.hpp"
#include "til/ruskai.hpp"

namespace til {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Check {
  TraceIneq,
  Monotonicity,
  RenyiBounds,
  Decomposition,
  Equality,
  GoldenThompson,
  Lieb,
  Lemmas,
  Chain1,
  Chain2,
};

std::string to_string(Check c);
/// Throws std::invalid_argument for unknown names.
Check check_from_string(const std::string& name);
std::set<Check> all_checks();

/// Usage error tied to one configuration field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class RankPolicy { Full, Deficient, Mixed };

/// Parameters shared by sweeps and single-instance verification.
struct CheckParams {
  std::set<Check> checks = all_checks();
  std::vector<double> alphas{0.25, 0.5, 0.75, 1.0};
  std::vector<double> eps_grid{1e-1, 1e-2, 1e-3};
  std::vector<double> delta_grid{1e-1, 1e-2, 1e-3};
  double tol_rel = kChainTolRel;

  Json to_json() const;
  static CheckParams from_json(const Json& j);
};

struct SweepConfig {
  std::vector<Index> dims_in{2, 3, 4};
  std::vector<Index> dims_out{2, 3, 4};
  std::vector<Index> kraus_counts{1, 2, 4};
  std::size_t trials_per_cell = 200;
  RankPolicy rank_policy = RankPolicy::Mixed;
  double deficient_fraction = 0.4;
  std::uint64_t master_seed = 20150101;
  bool record_timing = false;
  CheckParams params;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  Json to_json() const;
  /// Missing fields keep their defaults; unknown fields are rejected.
  static SweepConfig from_json(const Json& j);
};

/// Reads TIL_TOL_REL, if set, as the default chain tolerance.
double default_tol_rel();

struct TrialVerdict {
  std::string check;
  InequalityVerdict verdict;
};

struct TrialReport {
  std::uint64_t trial_id = 0;
  std::size_t cell_index = 0;
  std::uint64_t derived_seed = 0;
  Index dim_in = 0;
  Index dim_out = 0;
  Index n_kraus = 0;
  Index rank_sigma = 0;
  Index rank_tau = 0;
  Index rank_n_sigma = 0;
  Index rank_n_tau = 0;
  bool strictly_positive = false;

  std::optional<double> delta;              // Δ(τ, σ, N)
  std::optional<double> theta;              // Tr R̃(τ)
  std::optional<double> margin;             // Tr τ − Tr R̃(τ)
  std::optional<double> strict_margin;
  std::optional<double> strict_extended_gap;
  std::optional<double> fixed_point_residual;  // ‖R̃(σ) − σ‖
  std::optional<double> decomposition_residual;
  std::optional<double> term_klein;
  std::optional<double> term_log_theta;
  std::optional<EqualityFlags> equality;
  std::vector<RenyiBound> renyi;
  std::optional<double> renyi_half_fidelity_gap;
  std::vector<std::pair<double, double>> f_eps;  // (ε, f(ε))

  std::vector<TrialVerdict> verdicts;
  std::vector<std::string> errors;
  double wall_time_ms = 0.0;
  bool pass = false;
  std::optional<Json> instance;  // embedded on failure
};

struct CellAggregate {
  Index dim_in = 0;
  Index dim_out = 0;
  Index n_kraus = 0;
  std::size_t trials = 0;
  std::optional<double> min_margin;
  std::optional<double> max_abs_residual;
  std::size_t failures = 0;
};

struct SkippedCell {
  Index dim_in;
  Index dim_out;
  Index n_kraus;
  std::string reason;
};

struct SweepReport {
  SweepConfig config;
  std::vector<CellAggregate> cells;
  std::vector<SkippedCell> skipped;
  std::vector<TrialReport> trials;  // sorted by trial_id
  std::size_t failures = 0;
  bool pass = false;
  std::string tool_version = kToolVersion;
  double total_runtime_ms = 0.0;
};

/// Random instance for one trial: rank-deficient σ and/or τ with probability
/// `deficient` (decided by the caller), τ supported inside σ.
Instance generate_instance(Index dim_in, Index dim_out, Index n_kraus, bool deficient,
                           std::uint64_t seed);

/// Runs the enabled checks on one instance. Numerical exceptions become trial
/// failures. `seed` drives the auxiliary random matrices (Golden-Thompson,
/// Lieb and lemma inputs).
TrialReport run_trial(const Instance& inst, const CheckParams& params);

/// Every trial seed is derive_seed(master_seed, cell_index, trial_index).
/// Report contents do not depend on `jobs`.
SweepReport run_sweep(const SweepConfig& config, unsigned jobs = 1);

enum class VerdictDetail { Failures, All };

Json to_json(const TrialReport& t, VerdictDetail detail);
Json to_json(const SweepReport& r, VerdictDetail detail);

struct LimitRow {
  double eps;
  double delta;
  double f_eps;
  double trace_r_delta;
  double limit_gap;  // ‖R̃_δ − R̃‖
  double chain_min_margin;
  bool chain_pass;
};

struct LimitStudy {
  std::vector<LimitRow> rows;
  bool f_decreasing = false;
  bool gap_decreasing = false;
  std::string to_csv() const;
};

/// One row per (ε, δ) pair. f(ε) must decrease strictly along the ε grid
/// (or vanish identically when X^B = 0), and ‖R̃_δ − R̃‖ must decrease along
/// the δ grid (values below 1e-12 count as converged).
LimitStudy limit_study(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau,
                       const std::vector<double>& eps_grid, const std::vector<double>& delta_grid,
                       double tol_rel = kChainTolRel);

/// Throws ConfigError unless the grid is non-empty, positive and strictly
/// decreasing.
void validate_grid(const std::vector<double>& grid, const std::string& field);

}  // namespace til
