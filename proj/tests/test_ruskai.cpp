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

#include "oracles.hpp"
#include "til/errors.hpp"
#include "til/ruskai.hpp"

using namespace til;

namespace {

double dist(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

DensityMatrix diag_state(const std::vector<double>& d) {
  return DensityMatrix(PsdMatrix(HermitianMatrix::diagonal(d)));
}

struct Case {
  DensityMatrix sigma;
  DensityMatrix tau;
  Channel n;
};

Case random_case(std::uint64_t seed, bool deficient) {
  const Index din = 2 + seed % 3;
  const Index dout = 2 + (seed / 3) % 3;
  const Index nk = 1 + (seed / 9) % 4;
  const Index kraus = nk * dout < din ? din : nk;
  const Index rs = deficient ? 1 + seed % (din - 1) : din;
  DensityMatrix sigma = random_state_truncated(din, rs, derive_seed(seed, 1));
  const Index rt = deficient ? 1 + (seed / 2) % rs : din;
  DensityMatrix tau = random_state_in_support(sigma, rt, derive_seed(seed, 2));
  return {std::move(sigma), std::move(tau), random_channel(din, dout, kraus, derive_seed(seed, 3))};
}

// exp of the unrestricted exponent through Padé matrix functions.
Matrix strict_oracle(const Matrix& sigma, const Channel& n, const Matrix& tau) {
  const Matrix nt = oracle::apply_via_choi(n, tau);
  const Matrix ns = oracle::apply_via_choi(n, sigma);
  const Matrix diff = oracle::logm(nt) - oracle::logm(ns);
  Matrix adj = Matrix::Zero(n.dim_in(), n.dim_in());
  for (const auto& k : n.kraus()) adj += k.adjoint() * diff * k;
  return oracle::expm(oracle::logm(sigma) + adj);
}

}  // namespace

TEST_CASE("exponent special cases") {
  const DensityMatrix sigma = random_state(3, 3, 1);
  const Channel n = random_channel(3, 2, 3, 2);
  CHECK(dist(omega(sigma, n, sigma).matrix(), matrix_log(sigma).matrix()) < 1e-10);

  const DensityMatrix tau = random_state(3, 3, 3);
  CHECK(dist(omega(sigma, Channel::identity(3), tau).matrix(), matrix_log(tau).matrix()) < 1e-10);

  const DensityMatrix e0 = diag_state({1, 0});
  const DensityMatrix half = diag_state({0.5, 0.5});
  // log(1/2) from σ cancels against −log(1/2) from N(σ), leaving 0 on supp τ.
  CHECK(omega(half, Channel::identity(2), e0).matrix().norm() < 1e-14);
}

TEST_CASE("strictly positive map matches Pade evaluation") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Case c = random_case(seed, false);
    const PsdMatrix nt = apply_psd(c.n, c.tau);
    const PsdMatrix ns = apply_psd(c.n, c.sigma);
    if (!nt.strictly_positive() || !ns.strictly_positive()) continue;
    const RuskaiResult r = ruskai_map_strict(c.sigma, c.n, c.tau);
    const Matrix expect = strict_oracle(c.sigma.matrix(), c.n, c.tau.matrix());
    CHECK(dist(r.r_tilde.matrix(), expect) < 1e-9);
    CHECK(r.theta == doctest::Approx(expect.trace().real()).epsilon(1e-10));
    CHECK(r.margin >= -1e-8);
    const RuskaiResult e = ruskai_map_extended(c.sigma, c.n, c.tau);
    CHECK(operator_norm(e.r_tilde.matrix() - r.r_tilde.matrix()) < 1e-9);
  }
}

TEST_CASE("strict map rejects singular arguments") {
  const DensityMatrix sigma = diag_state({0.5, 0.5, 0.0});
  const DensityMatrix tau = diag_state({0.5, 0.5, 0.0});
  CHECK_THROWS_AS(ruskai_map_strict(sigma, Channel::identity(3), tau), DomainError);
  // Depolarizing makes every output full rank but σ is still singular.
  CHECK_THROWS_AS(ruskai_map_strict(sigma, Channel::depolarizing(3, 2), tau), DomainError);
}

TEST_CASE("fixed points") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Case c = random_case(seed, seed % 2 == 0);
    const RuskaiResult r = ruskai_map_extended(c.sigma, c.n, c.sigma);
    CHECK(operator_norm(r.r_tilde.matrix() - c.sigma.matrix()) <= 1e-9 * (1.0 + operator_norm(c.sigma.matrix())));
    CHECK(std::abs(r.margin) < 1e-9);

    const RuskaiResult id = ruskai_map_extended(c.sigma, Channel::identity(c.sigma.dim()), c.tau);
    CHECK(operator_norm(id.r_tilde.matrix() - c.tau.matrix()) < 1e-9);
    CHECK(std::abs(id.margin) < 1e-9);
  }
  const RuskaiResult pure =
      ruskai_map_extended(diag_state({0.5, 0.5}), Channel::identity(2), diag_state({1, 0}));
  CHECK(dist(pure.r_tilde.matrix(), diag_state({1, 0}).matrix()) < 1e-14);
  CHECK(std::abs(pure.margin) < 1e-14);
}

TEST_CASE("pinching with diagonal sigma recovers the pinched input") {
  // N(τ) = diag(τ) and N(σ) = σ, so the exponent is log diag(τ).
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index d = 2 + seed % 3;
    std::vector<double> s(d);
    for (Index i = 0; i < d; ++i) s[i] = 1.0 + static_cast<double>((seed * (i + 3)) % 7);
    double tot = 0.0;
    for (double v : s) tot += v;
    for (double& v : s) v /= tot;
    const DensityMatrix sigma = diag_state(s);
    const DensityMatrix tau = random_state(d, d, seed);
    const RuskaiResult r = ruskai_map_extended(sigma, Channel::dephasing(d), tau);
    const Matrix pinched = tau.matrix().diagonal().asDiagonal();
    CHECK(dist(r.r_tilde.matrix(), pinched) < 1e-10);
    CHECK(std::abs(r.margin) < 1e-12);
  }
}

TEST_CASE("trace inequality on rank-deficient instances") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Case c = random_case(seed, true);
    const RuskaiResult r = ruskai_map_extended(c.sigma, c.n, c.tau);
    CHECK(r.theta <= c.tau.trace() + 1e-8);
    const Projector perp = support_projector(c.tau).complement();
    CHECK((perp.matrix() * r.r_tilde.matrix()).norm() < 1e-12);
  }
}

TEST_CASE("support precondition") {
  const DensityMatrix sigma = diag_state({1, 0});
  const DensityMatrix tau = diag_state({0, 1});
  CHECK_THROWS_AS(omega(sigma, Channel::identity(2), tau), DomainError);
  CHECK_THROWS_AS(ruskai_map_extended(sigma, Channel::identity(2), tau), DomainError);
}

TEST_CASE("regularized map and its delta limit") {
  const DensityMatrix sigma = random_state(3, 3, 4);
  const DensityMatrix tau = random_state(3, 3, 5);
  const Channel n = random_channel(3, 2, 2, 6);
  const RuskaiResult r = ruskai_map_extended(sigma, n, tau);
  CHECK(dist(ruskai_map_regularized(sigma, n, tau, 1.0).matrix(), matrix_exp(r.omega).matrix()) < 1e-12);
  CHECK_THROWS_AS(ruskai_map_regularized(sigma, n, tau, 0.0), DomainError);
  CHECK_THROWS_AS(ruskai_map_regularized(sigma, n, tau, 1.5), DomainError);

  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Case c = random_case(seed, true);
    const RuskaiResult lim = ruskai_map_extended(c.sigma, c.n, c.tau);
    const Projector perp = support_projector(c.tau).complement();
    double prev = HUGE_VAL;
    for (double delta : {1e-1, 1e-2, 1e-4, 1e-6, 1e-8}) {
      const PsdMatrix rd = ruskai_map_regularized(c.sigma, c.n, c.tau, delta);
      // Ω is block diagonal, so the δ-block separates exactly.
      CHECK(dist(rd.matrix(), lim.r_tilde.matrix() + delta * perp.matrix()) < 1e-10);
      // Independent evaluation of exp[Ω + (log δ)Π⊥].
      const Matrix pade = oracle::expm(lim.omega.matrix() + std::log(delta) * perp.matrix());
      CHECK(dist(rd.matrix(), pade) < 1e-9);
      const double gap = operator_norm(rd.matrix() - lim.r_tilde.matrix());
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev < 1e-6);
  }
}

TEST_CASE("commuting regularized map") {
  const DensityMatrix sigma = diag_state({0.2, 0.3, 0.5});
  const DensityMatrix tau = diag_state({0.4, 0.6, 0.0});
  const Channel n = Channel::dephasing(3);
  const RuskaiResult lim = ruskai_map_extended(sigma, n, tau);
  CHECK(dist(lim.r_tilde.matrix(), tau.matrix()) < 1e-14);
  const PsdMatrix rd = ruskai_map_regularized(sigma, n, tau, 1e-3);
  CHECK(dist(rd.matrix(), HermitianMatrix::diagonal({0.4, 0.6, 1e-3}).matrix()) < 1e-14);
}

TEST_CASE("entropy decomposition") {
  const DensityMatrix sigma = random_state(3, 3, 1);
  const DensityMatrix rho = random_state(3, 3, 2);
  const Decomposition id = decomposition_check(rho, sigma, Channel::identity(3));
  CHECK(std::abs(id.delta) < 1e-12);
  CHECK(id.theta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(id.term_klein) < 1e-10);
  CHECK(std::abs(id.term_log_theta) < 1e-12);

  const Decomposition deph = decomposition_check(diag_state({0.1, 0.2, 0.7}), diag_state({0.3, 0.3, 0.4}),
                                                 Channel::dephasing(3));
  CHECK(std::abs(deph.term_klein) < 1e-12);
  CHECK(std::abs(deph.term_log_theta) < 1e-12);

  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Case c = random_case(seed, seed % 3 == 0);
    const Decomposition d = decomposition_check(c.tau, c.sigma, c.n);
    CHECK(std::abs(d.residual) <= 1e-8 * std::max(1.0, d.delta));
    CHECK(d.term_klein >= -1e-9);
    CHECK(d.term_log_theta >= -1e-9);
    CHECK(d.theta <= 1.0 + 1e-8);
  }
}

TEST_CASE("equality detection") {
  const DensityMatrix sigma = random_state(3, 3, 1);
  const DensityMatrix rho = random_state(3, 3, 2);
  const EqualityFlags id = equality_check(rho, sigma, Channel::identity(3));
  CHECK(id.delta_zero);
  CHECK(id.fixed_point);

  const EqualityFlags deph =
      equality_check(diag_state({0.1, 0.2, 0.7}), diag_state({0.3, 0.3, 0.4}), Channel::dephasing(3));
  CHECK(deph.delta_zero);
  CHECK(deph.fixed_point);
  CHECK(std::abs(deph.delta) <= 1e-10);
  CHECK(deph.fixed_point_residual <= 1e-8);

  const EqualityFlags generic = equality_check(rho, sigma, random_channel(3, 2, 2, 3));
  CHECK_FALSE(generic.delta_zero);
  CHECK_FALSE(generic.fixed_point);
  CHECK(generic.delta > 1e-4);
  CHECK(generic.fixed_point_residual > 1e-4);
}

TEST_CASE("Renyi family of lower bounds") {
  const std::vector<double> alphas{0.25, 0.5, 0.75, 1.0};
  const DensityMatrix sigma = random_state(3, 3, 1);
  const DensityMatrix rho = random_state(3, 3, 2);
  for (const RenyiBound& b : renyi_lower_bounds(rho, sigma, Channel::identity(3), alphas)) {
    CHECK(std::abs(b.bound) < 1e-9);
    CHECK(std::abs(b.slack) < 1e-9);
  }
  CHECK_THROWS_AS(renyi_lower_bounds(rho, sigma, Channel::identity(3), {1.5}), DomainError);

  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Case c = random_case(seed, seed % 2 == 0);
    const auto bounds = renyi_lower_bounds(c.tau, c.sigma, c.n, alphas);
    REQUIRE(bounds.size() == alphas.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      CHECK(bounds[i].slack >= -1e-8);
      if (i > 0) CHECK(bounds[i].bound >= bounds[i - 1].bound - 1e-9);
    }
    const RuskaiResult r = ruskai_map_extended(c.sigma, c.n, c.tau);
    CHECK(bounds.back().bound == doctest::Approx(relative_entropy(c.tau, r.r_tilde).value()).epsilon(1e-12));
    CHECK(bounds[1].bound == doctest::Approx(-2.0 * std::log(fidelity(c.tau, r.r_tilde))).epsilon(1e-9));
  }
}
