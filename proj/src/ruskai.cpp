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

#include "til/ruskai.hpp"

#include <cmath>
#include <sstream>

#include "til/errors.hpp"

namespace til {

namespace {

void require_support(const PsdMatrix& sigma, const PsdMatrix& tau, const char* who) {
  if (sigma.dim() != tau.dim()) throw DimensionError(std::string(who) + ": dimension mismatch");
  if (!support_contained(tau, sigma)) {
    throw DomainError(std::string(who) +
                      ": supp(tau) is not contained in supp(sigma); the recovery map is only "
                      "defined when supp(tau) ⊆ supp(sigma)");
  }
}

// Q e^{Q† Ω Q} Q† with Q an orthonormal basis of supp τ.
PsdMatrix exp_on_support(const HermitianMatrix& omega_, const PsdMatrix& tau) {
  const Matrix q = support_basis(tau);
  const Index n = tau.dim();
  if (q.cols() == 0) return PsdMatrix(HermitianMatrix::zero(n));
  const HermitianMatrix block(q.adjoint() * omega_.matrix() * q);
  const PsdMatrix e = matrix_exp(block);
  return PsdMatrix(conjugate(q, e));
}

RuskaiResult make_result(HermitianMatrix om, PsdMatrix r, const PsdMatrix& tau) {
  const double theta = r.trace();
  return RuskaiResult{std::move(om), std::move(r), theta, tau.trace() - theta};
}

}  // namespace

HermitianMatrix omega(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau) {
  require_support(sigma, tau, "omega");
  if (n.dim_in() != sigma.dim()) throw DimensionError("omega: channel input dimension mismatch");
  const PsdMatrix n_tau = apply_psd(n, tau);
  const PsdMatrix n_sigma = apply_psd(n, sigma);
  if (!support_contained(n_tau, n_sigma)) {
    throw NumericError("omega: supp N(tau) not contained in supp N(sigma) at working precision");
  }
  const HermitianMatrix inner = restricted_log(n_tau) - restricted_log(n_sigma);
  const HermitianMatrix bracket = restricted_log(sigma) + adjoint_apply(n, inner);
  const Projector p_tau = support_projector(tau);
  return conjugate(p_tau.matrix(), bracket);
}

RuskaiResult ruskai_map_strict(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau) {
  if (sigma.dim() != tau.dim() || n.dim_in() != sigma.dim()) {
    throw DimensionError("ruskai_map_strict: dimension mismatch");
  }
  const PsdMatrix n_tau = apply_psd(n, tau);
  const PsdMatrix n_sigma = apply_psd(n, sigma);
  const auto check = [](const PsdMatrix& m, const char* name) {
    if (!m.strictly_positive()) {
      std::ostringstream os;
      os << "ruskai_map_strict: " << name << " is not strictly positive (smallest eigenvalue "
         << m.lambda_min() << "); use ruskai_map_extended";
      throw DomainError(os.str());
    }
  };
  check(sigma, "sigma");
  check(n_tau, "N(tau)");
  check(n_sigma, "N(sigma)");
  HermitianMatrix exponent =
      matrix_log(sigma) + adjoint_apply(n, matrix_log(n_tau) - matrix_log(n_sigma));
  PsdMatrix r = matrix_exp(exponent);
  return make_result(std::move(exponent), std::move(r), tau);
}

RuskaiResult ruskai_map_extended(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau) {
  HermitianMatrix om = omega(sigma, n, tau);
  PsdMatrix r = exp_on_support(om, tau);
  return make_result(std::move(om), std::move(r), tau);
}

PsdMatrix ruskai_map_regularized(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau,
                                 double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    std::ostringstream os;
    os << "ruskai_map_regularized: delta = " << delta << " outside (0, 1]";
    throw DomainError(os.str());
  }
  const HermitianMatrix om = omega(sigma, n, tau);
  const Projector perp = support_projector(tau).complement();
  return matrix_exp(om + std::log(delta) * perp);
}

Decomposition decomposition_check(const DensityMatrix& rho, const PsdMatrix& sigma,
                                  const Channel& n) {
  require_support(sigma, rho, "decomposition_check");
  const double delta = remainder(rho, sigma, n).value();
  const RuskaiResult r = ruskai_map_extended(sigma, n, rho);
  if (!(r.theta > 0.0)) throw NumericError("decomposition_check: Tr R(rho) vanished");
  const PsdMatrix normalized((1.0 / r.theta) * static_cast<const HermitianMatrix&>(r.r_tilde));
  const EntropyValue klein = relative_entropy(rho, normalized);
  if (klein.is_infinite()) {
    throw NumericError("decomposition_check: supp R(rho) lost part of supp rho numerically");
  }
  const double log_theta = -std::log(r.theta);
  return Decomposition{delta, r.theta, klein.value(), log_theta,
                       delta - (klein.value() + log_theta)};
}

EqualityFlags equality_check(const DensityMatrix& rho, const PsdMatrix& sigma, const Channel& n,
                             double tol_delta, double tol_fixed_point) {
  require_support(sigma, rho, "equality_check");
  const double delta = remainder(rho, sigma, n).value();
  const RuskaiResult r = ruskai_map_extended(sigma, n, rho);
  const double fp = operator_norm(rho.matrix() - r.r_tilde.matrix());
  return EqualityFlags{std::abs(delta) <= tol_delta, fp <= tol_fixed_point, delta, fp};
}

std::vector<RenyiBound> renyi_lower_bounds(const DensityMatrix& rho, const PsdMatrix& sigma,
                                           const Channel& n, const std::vector<double>& alphas) {
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) {
      std::ostringstream os;
      os << "renyi_lower_bounds: alpha = " << a << " outside (0, 1]";
      throw DomainError(os.str());
    }
  }
  require_support(sigma, rho, "renyi_lower_bounds");
  const double delta = remainder(rho, sigma, n).value();
  const RuskaiResult r = ruskai_map_extended(sigma, n, rho);
  std::vector<RenyiBound> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    const EntropyValue b = renyi_relative_entropy(a, rho, r.r_tilde);
    if (b.is_infinite()) throw NumericError("renyi_lower_bounds: infinite Renyi divergence");
    out.push_back(RenyiBound{a, b.value(), delta - b.value()});
  }
  return out;
}

}  // namespace til
