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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "til/errors.hpp"
#include "til/harness.hpp"
#include "til/io.hpp"

using namespace til;

namespace {

SweepConfig small_config() {
  SweepConfig c;
  c.dims_in = {2};
  c.dims_out = {2};
  c.kraus_counts = {2};
  c.trials_per_cell = 10;
  return c;
}

Json parse(const std::string& text) { return Json::parse(text); }

std::string expect_config_error(const std::string& text) {
  try {
    SweepConfig::from_json(parse(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::vector<std::string> expect_input_error(const Json& j) {
  try {
    instance_from_json(j);
  } catch (const InputError& e) {
    return e.items();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& items, const std::string& needle) {
  for (const auto& s : items)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "til_test_harness";
  std::filesystem::create_directories(dir);
  return dir / name;
}

int run(const std::string& args) {
  const std::string cmd = std::string(TIL_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("matrix serialization round trip is exact") {
  const Matrix m = random_gaussian(3, 3, 1);
  CHECK(matrix_from_json(parse(matrix_to_json(m).dump())) == m);
  const Matrix r = random_gaussian(4, 2, 2);
  const Json jr = matrix_to_json(r);
  CHECK(jr.contains("rows"));
  CHECK(jr.contains("cols"));
  CHECK(matrix_from_json(parse(jr.dump())) == r);
  CHECK(matrix_from_json(parse(R"({"dim": 2, "re": [[1, 0], [0, 2]]})")) ==
        HermitianMatrix::diagonal({1, 2}).matrix());
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("instance serialization round trip") {
  const Instance a = generate_instance(3, 2, 2, true, 77);
  const Instance b = instance_from_json(parse(instance_to_json(a).dump()));
  CHECK(b.sigma.matrix() == a.sigma.matrix());
  CHECK(b.tau.matrix() == a.tau.matrix());
  CHECK(b.seed == a.seed);
  REQUIRE(b.channel.n_kraus() == a.channel.n_kraus());
  for (Index k = 0; k < a.channel.n_kraus(); ++k) CHECK(b.channel.kraus()[k] == a.channel.kraus()[k]);
}

TEST_CASE("instance validation collects every error") {
  Json j = instance_to_json(generate_instance(2, 2, 2, false, 3));
  j["sigma"]["re"][0][1] = 5.0;
  j["channel"]["kraus"][0]["re"][0][0] = 3.0;
  j.erase("tau");
  const auto items = expect_input_error(j);
  CHECK(items.size() >= 3);
  CHECK(any_contains(items, "sigma"));
  CHECK(any_contains(items, "channel"));
  CHECK(any_contains(items, "tau: missing"));

  Json bad = instance_to_json(generate_instance(2, 2, 2, false, 3));
  bad["sigma"] = matrix_to_json(HermitianMatrix::diagonal({1, 0}).matrix());
  bad["tau"] = matrix_to_json(HermitianMatrix::diagonal({0, 1}).matrix());
  const auto supp = expect_input_error(bad);
  REQUIRE(supp.size() == 1);
  CHECK(any_contains(supp, "supp(tau) is not contained in supp(sigma)"));

  Json neg = instance_to_json(generate_instance(2, 2, 2, false, 3));
  neg["seed"] = -1;
  CHECK(any_contains(expect_input_error(neg), "seed"));
}

TEST_CASE("sweep configuration parsing") {
  const SweepConfig d = SweepConfig::from_json(parse("{}"));
  CHECK(d.dims_in == std::vector<Index>{2, 3, 4});
  CHECK(d.kraus_counts == std::vector<Index>{1, 2, 4});
  CHECK(d.trials_per_cell == 200);
  CHECK(d.deficient_fraction == 0.4);
  CHECK(d.params.checks == all_checks());

  CHECK(expect_config_error(R"({"bogus": 1})") == "bogus");
  CHECK(expect_config_error(R"({"trials_per_cell": 0})") == "trials_per_cell");
  CHECK(expect_config_error(R"({"eps_grid": [0.1, 0.1]})") == "eps_grid");
  CHECK(expect_config_error(R"({"delta_grid": [0.01, 0.1]})") == "delta_grid");
  CHECK(expect_config_error(R"({"deficient_fraction": 1.5})") == "deficient_fraction");
  CHECK(expect_config_error(R"({"alphas": [0.5, 1.2]})") == "alphas");
  CHECK(expect_config_error(R"({"checks": ["trace_ineq", "nope"]})") == "checks");
  CHECK(expect_config_error(R"({"rank_policy": "some"})") == "rank_policy");
  CHECK(expect_config_error(R"({"dims_in": [1]})") == "dims_in");

  const SweepConfig c = SweepConfig::from_json(parse(
      R"({"dims_in": [2], "checks": ["gt", "lieb"], "rank_policy": "full", "master_seed": 9})"));
  CHECK(c.params.checks == std::set<Check>{Check::GoldenThompson, Check::Lieb});
  CHECK(c.rank_policy == RankPolicy::Full);
  const SweepConfig back = SweepConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());

  for (Check k : all_checks()) CHECK(check_from_string(to_string(k)) == k);
}

TEST_CASE("small sweep passes and aggregates without drift") {
  const SweepReport r = run_sweep(small_config());
  CHECK(r.pass);
  CHECK(r.failures == 0);
  REQUIRE(r.trials.size() == 10);
  REQUIRE(r.cells.size() == 1);
  double min_margin = HUGE_VAL;
  double max_res = 0.0;
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const TrialReport& t = r.trials[i];
    CHECK(t.trial_id == i);
    CHECK(t.pass);
    min_margin = std::min(min_margin, *t.margin);
    max_res = std::max(max_res, std::abs(*t.decomposition_residual));
    std::set<std::string> seen;
    for (const auto& v : t.verdicts) seen.insert(v.check);
    // Chain 2 only applies to strictly positive instances.
    for (Check k : all_checks())
      if (k != Check::Chain2 || t.strictly_positive) CHECK(seen.count(to_string(k)) == 1);
  }
  CHECK(*r.cells[0].min_margin == min_margin);
  CHECK(*r.cells[0].max_abs_residual == max_res);
}

TEST_CASE("skipped cells are reported") {
  SweepConfig c = small_config();
  c.dims_in = {4};
  c.kraus_counts = {1, 2};
  c.trials_per_cell = 2;
  const SweepReport r = run_sweep(c);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].n_kraus == 1);
  CHECK(r.trials.size() == 2);
}

TEST_CASE("sweep reports are byte reproducible") {
  SweepConfig c = small_config();
  c.dims_in = {2, 3};
  c.trials_per_cell = 6;
  const std::string a = to_json(run_sweep(c, 1), VerdictDetail::All).dump(2);
  const std::string b = to_json(run_sweep(c, 1), VerdictDetail::All).dump(2);
  const std::string p = to_json(run_sweep(c, 3), VerdictDetail::All).dump(2);
  CHECK(a == b);
  CHECK(a == p);
  c.master_seed += 1;
  CHECK(to_json(run_sweep(c, 1), VerdictDetail::All).dump(2) != a);
}

TEST_CASE("check filter restricts verdicts") {
  SweepConfig c = small_config();
  c.params.checks = {Check::TraceIneq};
  const SweepReport r = run_sweep(c);
  for (const auto& t : r.trials) {
    CHECK_FALSE(t.verdicts.empty());
    for (const auto& v : t.verdicts) CHECK(v.check == "trace_ineq");
    CHECK_FALSE(t.delta.has_value());
  }
}

TEST_CASE("failures embed a replayable instance") {
  // A relative tolerance far below rounding makes some chain step fail.
  CheckParams params;
  params.tol_rel = 1e-300;
  const Instance inst = generate_instance(3, 2, 2, true, 5);
  const TrialReport first = run_trial(inst, params);
  REQUIRE_FALSE(first.pass);
  REQUIRE(first.instance.has_value());

  const Instance replay = instance_from_json(parse(first.instance->dump()));
  REQUIRE(replay.params.has_value());
  const TrialReport second = run_trial(replay, CheckParams::from_json(*replay.params));
  CHECK(to_json(second, VerdictDetail::All).dump() == to_json(first, VerdictDetail::All).dump());
}

TEST_CASE("report JSON shape") {
  const SweepReport r = run_sweep(small_config());
  const Json j = to_json(r, VerdictDetail::Failures);
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["pass"] == true);
  CHECK(j["trials"][0]["failed_verdicts"].empty());
  CHECK_FALSE(j.contains("total_runtime_ms"));
  CHECK_FALSE(j["trials"][0].contains("wall_time_ms"));
  SweepConfig timed = small_config();
  timed.trials_per_cell = 1;
  timed.record_timing = true;
  const Json t = to_json(run_sweep(timed), VerdictDetail::Failures);
  CHECK(t.contains("total_runtime_ms"));
  CHECK(t["trials"][0].contains("wall_time_ms"));
}

TEST_CASE("equality case instance verifies as equality") {
  const DensityMatrix sigma(PsdMatrix(HermitianMatrix::diagonal({0.2, 0.3, 0.5})));
  const DensityMatrix tau(PsdMatrix(HermitianMatrix::diagonal({0.6, 0.1, 0.3})));
  const Instance inst{sigma, tau, Channel::dephasing(3), 1, std::nullopt};
  const TrialReport r = run_trial(inst, CheckParams{});
  CHECK(r.pass);
  REQUIRE(r.equality.has_value());
  CHECK(r.equality->delta_zero);
  CHECK(r.equality->fixed_point);
}

TEST_CASE("limit study") {
  const Instance full = generate_instance(3, 2, 2, false, 8);
  const LimitStudy a =
      limit_study(full.sigma, full.channel, full.tau, {1e-1, 1e-2, 1e-3}, {1e-2, 1e-4, 1e-6, 1e-8});
  CHECK(a.rows.size() == 12);
  CHECK(a.rows.back().limit_gap < 1e-6);
  CHECK(a.f_decreasing);
  CHECK(a.gap_decreasing);
  for (const auto& row : a.rows) CHECK(row.chain_pass);

  const DensityMatrix sigma = random_state_truncated(4, 3, 3);
  const DensityMatrix tau = random_state_in_support(sigma, 2, 4);
  const Channel n = random_channel(4, 3, 2, 5);
  const LimitStudy b = limit_study(sigma, n, tau, {1e-1, 1e-2, 1e-3}, {1e-2, 1e-4, 1e-6});
  CHECK(b.f_decreasing);
  CHECK(b.gap_decreasing);
  for (std::size_t i = 3; i < b.rows.size(); i += 3) CHECK(b.rows[i].f_eps < b.rows[i - 3].f_eps);

  const LimitStudy c = limit_study(sigma, n, sigma, {1e-1}, {1e-2, 1e-4, 1e-6, 1e-8});
  CHECK(std::abs(c.rows.back().trace_r_delta - sigma.trace()) < 1e-7);

  const std::string csv = a.to_csv();
  CHECK(csv.rfind("eps,delta,f_eps,trace_r_delta,limit_gap,chain_min_margin,chain_pass\r\n", 0) == 0);

  const DensityMatrix e0(PsdMatrix(HermitianMatrix::diagonal({1, 0})));
  const DensityMatrix e1(PsdMatrix(HermitianMatrix::diagonal({0, 1})));
  CHECK_THROWS_AS(limit_study(e0, Channel::identity(2), e1, {1e-1}, {1e-2}), DomainError);
  CHECK_THROWS_AS(limit_study(sigma, n, tau, {1e-2, 1e-1}, {1e-2}), ConfigError);
}

TEST_CASE("command line exit codes") {
  const std::string inst = scratch("inst.json").string();
  const std::string cfg = scratch("cfg.json").string();
  const std::string bad_cfg = scratch("bad.json").string();
  const std::string out1 = scratch("out1.json").string();
  const std::string out2 = scratch("out2.json").string();
  std::ofstream(cfg) << R"({"dims_in": [2], "dims_out": [2], "kraus_counts": [2], "trials_per_cell": 3})";
  std::ofstream(bad_cfg) << R"({"trials_per_cell": 0})";

  CHECK(run("gen --kind instance --dim 3 --dim-out 2 --sigma-rank 2 --rank 1 --seed 4 --out " + inst) == 0);
  CHECK(run("verify --instance " + inst) == 0);
  CHECK(run("limits --instance " + inst + " --eps-grid 0.1,0.01 --delta-grid 1e-2,1e-4") == 0);
  CHECK(run("limits --instance " + inst + " --eps-grid 0.01,0.1 --delta-grid 1e-2") == 2);
  CHECK(run("sweep --config " + cfg + " --out " + out1) == 0);
  CHECK(run("sweep --config " + cfg + " --jobs 2 --out " + out2) == 0);
  std::ifstream a(out1), b(out2);
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK_FALSE(sa.empty());
  CHECK(sa == sb);
  CHECK(run("sweep --config " + bad_cfg) == 2);
  CHECK(run("sweep --config /nonexistent/file.json") == 2);
  CHECK(run("verify") == 2);
  CHECK(run("frobnicate") == 2);

  Json j = read_json_file(inst);
  j["tau"] = matrix_to_json(HermitianMatrix::diagonal({0, 0, 1}).matrix());
  j["sigma"] = matrix_to_json(HermitianMatrix::diagonal({0.5, 0.5, 0}).matrix());
  write_text_file(inst, j.dump());
  CHECK(run("verify --instance " + inst) == 2);
}
