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

// til: randomized sweeps, instance replay, limit studies and instance
// generation. Exit status 0 means every check passed, 1 means at least one
// verification failure, 2 means a usage or I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "til/errors.hpp"
#include "til/harness.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_grid(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw til::ConfigError(field, "cannot parse \"" + item + "\" as a number");
    }
  }
  til::validate_grid(out, field);
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    til::write_text_file(path, text);
  }
}

std::string dump(const til::Json& j) { return j.dump(2) + "\n"; }

int cmd_sweep(const std::string& config_path, const std::string& out, unsigned jobs, bool timings,
              const std::string& verdicts) {
  til::SweepConfig config = til::SweepConfig::from_json(til::read_json_file(config_path));
  if (timings) config.record_timing = true;
  const til::VerdictDetail detail =
      verdicts == "all" ? til::VerdictDetail::All : til::VerdictDetail::Failures;
  const til::SweepReport report = til::run_sweep(config, jobs);
  emit(out, dump(til::to_json(report, detail)));
  std::fprintf(stderr, "sweep: %zu trials in %zu cells (%zu skipped), %zu failures: %s\n",
               report.trials.size(), report.cells.size(), report.skipped.size(), report.failures,
               report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitPass : kExitFail;
}

int cmd_verify(const std::string& path, const std::string& out) {
  const til::Json j = til::read_json_file(path);
  const til::Instance inst = til::instance_from_json(j);
  const til::CheckParams params =
      inst.params ? til::CheckParams::from_json(*inst.params) : til::CheckParams::from_json(til::Json::object());
  const til::TrialReport report = til::run_trial(inst, params);
  emit(out, dump(til::to_json(report, til::VerdictDetail::All)));

  std::size_t failed = 0;
  for (const auto& v : report.verdicts) {
    if (v.verdict.pass) continue;
    ++failed;
    std::fprintf(stderr, "  FAIL %s/%s lhs=%s rhs=%s margin=%s tol=%s\n", v.check.c_str(),
                 v.verdict.label.c_str(), til::format_double(v.verdict.lhs).c_str(),
                 til::format_double(v.verdict.rhs).c_str(),
                 til::format_double(v.verdict.margin).c_str(),
                 til::format_double(v.verdict.tol).c_str());
  }
  for (const auto& e : report.errors) std::fprintf(stderr, "  ERROR %s\n", e.c_str());
  std::fprintf(stderr, "verify: dims %td->%td, %td Kraus, ranks sigma=%td tau=%td; %zu verdicts, %zu failed: %s\n",
               report.dim_in, report.dim_out, report.n_kraus, report.rank_sigma, report.rank_tau,
               report.verdicts.size(), failed, report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitPass : kExitFail;
}

int cmd_limits(const std::string& path, const std::string& eps, const std::string& delta,
               const std::string& out) {
  const std::vector<double> eps_grid = parse_grid(eps, "eps_grid");
  const std::vector<double> delta_grid = parse_grid(delta, "delta_grid");
  const til::Instance inst = til::instance_from_json(til::read_json_file(path));
  const til::LimitStudy study = til::limit_study(inst.sigma, inst.channel, inst.tau, eps_grid,
                                                 delta_grid, til::default_tol_rel());
  emit(out, study.to_csv());
  bool chains = true;
  for (const auto& r : study.rows) chains = chains && r.chain_pass;
  std::fprintf(stderr, "limits: f decreasing %s, gap decreasing %s, chains %s\n",
               study.f_decreasing ? "yes" : "no", study.gap_decreasing ? "yes" : "no",
               chains ? "pass" : "fail");
  return study.f_decreasing && study.gap_decreasing && chains ? kExitPass : kExitFail;
}

struct GenOptions {
  std::string kind;
  til::Index dim = 2;
  til::Index dim_out = 0;
  til::Index rank = 0;
  til::Index sigma_rank = 0;
  til::Index kraus = 2;
  std::uint64_t seed = 1;
};

int cmd_gen(const GenOptions& o, const std::string& out) {
  const til::Index dim_out = o.dim_out > 0 ? o.dim_out : o.dim;
  til::Json j;
  if (o.kind == "state") {
    const til::Index rank = o.rank > 0 ? o.rank : o.dim;
    j = til::matrix_to_json(til::random_state(o.dim, rank, o.seed).matrix());
  } else if (o.kind == "channel") {
    j = til::channel_to_json(til::random_channel(o.dim, dim_out, o.kraus, o.seed));
  } else {
    const til::Index sigma_rank = o.sigma_rank > 0 ? o.sigma_rank : o.dim;
    const til::Index rank = o.rank > 0 ? o.rank : sigma_rank;
    til::PsdMatrix sigma =
        til::random_state_truncated(o.dim, sigma_rank, til::derive_seed(o.seed, 2));
    til::DensityMatrix tau = til::random_state_in_support(sigma, rank, til::derive_seed(o.seed, 3));
    til::Channel n = til::random_channel(o.dim, dim_out, o.kraus, til::derive_seed(o.seed, 4));
    j = til::instance_to_json(til::Instance{std::move(sigma), std::move(tau), std::move(n), o.seed, {}});
  }
  emit(out, dump(j));
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of the Ruskai recovery map and its trace inequalities"};
  app.set_version_flag("--version", std::string(til::kToolVersion));
  app.require_subcommand(1);

  std::string out;

  auto* sweep = app.add_subcommand("sweep", "Run a seeded randomized sweep");
  std::string config_path;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool timings = false;
  std::string verdicts = "failures";
  sweep->add_option("--config", config_path, "Sweep configuration (JSON)")->required();
  sweep->add_option("--out", out, "Report path (default stdout)");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("--timings", timings, "Record wall times (breaks byte-reproducibility)");
  sweep->add_option("--verdicts", verdicts, "Per-trial verdicts to include")
      ->check(CLI::IsMember({"failures", "all"}));

  auto* verify = app.add_subcommand("verify", "Run every check on one saved instance");
  std::string instance_path;
  verify->add_option("--instance", instance_path, "Instance file (JSON)")->required();
  verify->add_option("--out", out, "Report path (default stdout)");

  auto* limits = app.add_subcommand("limits", "Tabulate the eps/delta limits of the proof chain");
  std::string eps_grid;
  std::string delta_grid;
  limits->add_option("--instance", instance_path, "Instance file (JSON)")->required();
  limits->add_option("--eps-grid", eps_grid, "Comma-separated, strictly decreasing")->required();
  limits->add_option("--delta-grid", delta_grid, "Comma-separated, strictly decreasing")->required();
  limits->add_option("--out", out, "CSV path (default stdout)");

  auto* gen = app.add_subcommand("gen", "Generate a random state, channel or instance");
  GenOptions g;
  gen->add_option("--kind", g.kind, "state, channel or instance")
      ->required()
      ->check(CLI::IsMember({"state", "channel", "instance"}));
  gen->add_option("--dim", g.dim, "Input dimension")->check(CLI::Range(1, 64));
  gen->add_option("--dim-out", g.dim_out, "Output dimension (default --dim)")->check(CLI::Range(1, 64));
  gen->add_option("--rank", g.rank, "Rank of the state (tau for instances)")->check(CLI::Range(1, 64));
  gen->add_option("--sigma-rank", g.sigma_rank, "Rank of sigma")->check(CLI::Range(1, 64));
  gen->add_option("--kraus", g.kraus, "Number of Kraus operators")->check(CLI::Range(1, 64));
  gen->add_option("--seed", g.seed, "Seed");
  gen->add_option("--out", out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*sweep) return cmd_sweep(config_path, out, jobs, timings, verdicts);
    if (*verify) return cmd_verify(instance_path, out);
    if (*limits) return cmd_limits(instance_path, eps_grid, delta_grid, out);
    if (*gen) return cmd_gen(g, out);
  } catch (const til::InputError& e) {
    std::fprintf(stderr, "error: invalid input\n");
    for (const auto& item : e.items()) std::fprintf(stderr, "  %s\n", item.c_str());
    return kExitUsage;
  } catch (const til::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
