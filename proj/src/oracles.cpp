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

#include "til/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "til/errors.hpp"
#include "til/ruskai.hpp"

namespace til {

// ---------------------------------------------------------------------------
// Verdicts

namespace {

double scale_of(double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

InequalityVerdict make_inequality(std::string label, double lhs, double rhs, double tol_rel) {
  InequalityVerdict v{std::move(label), VerdictKind::Inequality, lhs, rhs, rhs - lhs,
                      tol_rel * scale_of(lhs, rhs), false};
  v.pass = v.margin >= -v.tol;
  return v;
}

InequalityVerdict make_inequality_abs(std::string label, double lhs, double rhs, double tol_abs) {
  InequalityVerdict v{std::move(label), VerdictKind::Inequality, lhs, rhs, rhs - lhs, tol_abs,
                      false};
  v.pass = v.margin >= -v.tol;
  return v;
}

InequalityVerdict make_equality(std::string label, double lhs, double rhs, double tol_rel) {
  InequalityVerdict v{std::move(label), VerdictKind::Equality, lhs, rhs, rhs - lhs,
                      tol_rel * scale_of(lhs, rhs), false};
  v.pass = std::abs(v.margin) <= v.tol;
  return v;
}

InequalityVerdict make_identity(std::string label, const Matrix& a, const Matrix& b,
                                double tol_rel) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("make_identity: shape mismatch in " + label);
  }
  const double residual = operator_norm(a - b);
  InequalityVerdict v{std::move(label), VerdictKind::Identity, residual, 0.0, -residual,
                      tol_rel * scale_of(operator_norm(a), operator_norm(b)), false};
  v.pass = residual <= v.tol;
  return v;
}

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Inequality: return "inequality";
    case VerdictKind::Equality: return "equality";
    case VerdictKind::Identity: return "identity";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Golden-Thompson and Lieb

namespace {

double norm_of(const Matrix& m, NormKind kind) {
  const Norms n = norms(m);
  return kind == NormKind::Trace ? n.trace_norm : n.operator_norm;
}

}  // namespace

InequalityVerdict golden_thompson(const HermitianMatrix& y, const HermitianMatrix& z,
                                  NormKind norm, double tol_rel) {
  if (y.dim() != z.dim()) throw DimensionError("golden_thompson: dimension mismatch");
  const double lhs = norm_of(matrix_exp(y + z).matrix(), norm);
  const PsdMatrix half = matrix_exp(0.5 * y);
  const double rhs = norm_of(conjugate(half.matrix(), matrix_exp(z)).matrix(), norm);
  return make_inequality(norm == NormKind::Trace ? "golden_thompson.trace"
                                                 : "golden_thompson.operator",
                         lhs, rhs, tol_rel);
}

double log_mean_inverse(double a, double b) {
  const double s = a + b;
  const double u = (a - b) / s;
  if (std::abs(u) < 1e-4) {
    const double u2 = u * u;
    return (2.0 / s) * (1.0 + u2 / 3.0 + u2 * u2 / 5.0);
  }
  // log(a/b) = 2 atanh(u) avoids the cancelling difference of logs.
  return 2.0 * std::atanh(u) / (u * s);
}

double lieb_triple_rhs(const PsdMatrix& x, const PsdMatrix& y, const PsdMatrix& z) {
  if (x.dim() != y.dim() || y.dim() != z.dim()) {
    throw DimensionError("lieb_triple_rhs: dimension mismatch");
  }
  if (!y.strictly_positive()) throw DomainError("lieb_triple_rhs: Y must be strictly positive");
  const Spectrum& s = y.spectrum();
  const Matrix xt = s.eigenvectors.adjoint() * x.matrix() * s.eigenvectors;
  const Matrix zt = s.eigenvectors.adjoint() * z.matrix() * s.eigenvectors;
  double total = 0.0;
  for (Index i = 0; i < s.dim(); ++i) {
    for (Index j = 0; j < s.dim(); ++j) {
      const double c = log_mean_inverse(s.eigenvalues(i), s.eigenvalues(j));
      total += c * (xt(i, j) * zt(j, i)).real();
    }
  }
  return total;
}

InequalityVerdict lieb_triple(const PsdMatrix& x, const PsdMatrix& y, const PsdMatrix& z,
                              double tol_rel) {
  if (!x.strictly_positive() || !y.strictly_positive() || !z.strictly_positive()) {
    throw DomainError("lieb_triple: all three arguments must be strictly positive");
  }
  const double lhs = matrix_exp(matrix_log(x) - matrix_log(y) + matrix_log(z)).trace();
  return make_inequality("lieb_triple", lhs, lieb_triple_rhs(x, y, z), tol_rel);
}

// ---------------------------------------------------------------------------
// Lemmas

namespace {

// (Π V†)·X + (log δ) Π^⊥
HermitianMatrix compressed_exponent(const Projector& p, const Matrix& v, const HermitianMatrix& x,
                                    double delta) {
  const Matrix pv = p.matrix() * v.adjoint();
  return conjugate(pv, x) + std::log(delta) * p.complement();
}

}  // namespace

std::pair<InequalityVerdict, InequalityVerdict> lemma1_check(const Projector& p, const Matrix& v,
                                                             const HermitianMatrix& x,
                                                             double delta, double tol_rel) {
  if (v.rows() != x.dim() || v.cols() != p.dim()) {
    std::ostringstream os;
    os << "lemma1_check: V is " << v.rows() << "x" << v.cols() << ", expected " << x.dim() << "x"
       << p.dim();
    throw DimensionError(os.str());
  }
  if (!(delta > 0.0)) throw DomainError("lemma1_check: delta must be positive");
  if (operator_norm(v.adjoint() * v - Matrix::Identity(v.cols(), v.cols())) > 1e-10) {
    throw DomainError("lemma1_check: V is not an isometry");
  }
  const PsdMatrix lhs_exp = matrix_exp(compressed_exponent(p, v, x, delta));
  const PsdMatrix x_exp = matrix_exp(x);
  const double perp_trace = p.complement().trace();
  auto trace_v = make_inequality("projected_exp.trace", lhs_exp.trace(),
                                 x_exp.trace() + delta * perp_trace, tol_rel);
  auto norm_v = make_inequality("projected_exp.operator", lhs_exp.lambda_max(),
                                std::max(x_exp.lambda_max(), delta), tol_rel);
  return {trace_v, norm_v};
}

bool lemma2_check(const Channel& n, const PsdMatrix& rho, const PsdMatrix& sigma, double tol) {
  if (!support_contained(rho, sigma)) {
    throw DomainError("lemma2_check: requires supp(rho) ⊆ supp(sigma)");
  }
  const PsdMatrix n_sigma = apply_psd(n, sigma);
  const Projector perp = support_projector(n_sigma).complement();
  const HermitianMatrix leak = conjugate(perp.matrix(), apply(n, rho));
  return operator_norm(leak.matrix()) <= tol;
}

InequalityVerdict lemma3_check(const Channel& n, const PsdMatrix& rho, const Projector& p_tilde,
                               double tol) {
  const PsdMatrix n_rho = apply_psd(n, rho);
  if (!is_subprojector(p_tilde, support_projector(n_rho).complement())) {
    throw DomainError("lemma3_check: projector is not below the kernel projector of N(rho)");
  }
  const Projector p_rho = support_projector(rho);
  const HermitianMatrix m = conjugate(p_rho.matrix(), adjoint_apply(n, p_tilde));
  return make_inequality_abs("kernel_adjoint", operator_norm(m.matrix()), tol, 0.0);
}

// ---------------------------------------------------------------------------
// Proof-chain audits

bool Theorem1Audit::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

bool Theorem2Audit::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

namespace {

Matrix tensor_identity(const Matrix& m, Index dim_env) {
  return kron(m, Matrix::Identity(dim_env, dim_env));
}

HermitianMatrix tensor_identity(const HermitianMatrix& m, Index dim_env) {
  return HermitianMatrix(tensor_identity(m.matrix(), dim_env));
}

double trace_product(const Matrix& a, const Matrix& b) { return (a * b).trace().real(); }

}  // namespace

Theorem1Audit theorem1_chain_audit(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau,
                                   double eps, double delta, double tol_rel,
                                   double identity_tol_rel) {
  if (!(eps > 0.0)) throw DomainError("theorem1_chain_audit: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("theorem1_chain_audit: delta must lie in (0, 1)");
  }
  if (sigma.dim() != tau.dim() || n.dim_in() != sigma.dim()) {
    throw DimensionError("theorem1_chain_audit: dimension mismatch");
  }
  if (!support_contained(tau, sigma)) {
    throw DomainError("theorem1_chain_audit: requires supp(tau) ⊆ supp(sigma)");
  }

  const Index dim_b = n.dim_out();
  const Isometry iso = stinespring(n);
  const Index dim_e = iso.dim_env;
  const Matrix& v = iso.v;
  const Projector p_hat = complement_projector(iso);

  const Projector p_sigma = support_projector(sigma);
  const Projector p_sigma_perp = p_sigma.complement();
  const Projector p_tau = support_projector(tau);
  const Projector p_tau_perp = p_tau.complement();
  const PsdMatrix n_tau = apply_psd(n, tau);
  const PsdMatrix n_sigma = apply_psd(n, sigma);
  const Projector p_ntau_perp = support_projector(n_tau).complement();
  const Projector p_nsigma = support_projector(n_sigma);
  const Projector p_nsigma_perp = p_nsigma.complement();
  const double log_eps = std::log(eps);
  const double log_delta = std::log(delta);
  const Matrix& pt = p_tau.matrix();

  // σ_{1,ε}^{BE} = V·σ + ε V·Π_σ^⊥ + ε Π̂ and its B marginal.
  const PsdMatrix sigma1(conjugate(v, sigma) + eps * conjugate(v, p_sigma_perp) + eps * p_hat);
  if (!sigma1.strictly_positive()) {
    throw NumericError("theorem1_chain_audit: sigma_1,eps is not strictly positive");
  }
  const PsdMatrix sigma1_b(partial_trace(sigma1, dim_b, dim_e, Subsystem::Second));
  const HermitianMatrix x_b =
      apply(n, p_sigma_perp) + partial_trace(p_hat, dim_b, dim_e, Subsystem::Second);

  const PsdMatrix z_tau(n_tau + eps * p_ntau_perp);
  const HermitianMatrix log_sigma1_b = matrix_log(sigma1_b);
  const HermitianMatrix upsilon = matrix_log(z_tau) - log_sigma1_b;
  const HermitianMatrix log_nsigma = restricted_log(n_sigma);

  const HermitianMatrix theta1 = conjugate(
      pt, adjoint_apply(n, (-log_eps) * p_ntau_perp + log_sigma1_b - log_nsigma));
  const PsdMatrix b_sigma(n_sigma + std::sqrt(eps) * p_nsigma_perp);
  const HermitianMatrix theta2 =
      conjugate(pt, adjoint_apply(n, log_sigma1_b - matrix_log(b_sigma)));

  const HermitianMatrix log_sigma = restricted_log(sigma);
  const HermitianMatrix om = omega(sigma, n, tau);
  const HermitianMatrix first_exponent =
      conjugate(pt, log_sigma + adjoint_apply(n, upsilon)) + log_delta * p_tau_perp;
  const HermitianMatrix second_exponent = theta1 + log_delta * p_tau_perp;

  Theorem1Audit audit;
  auto& out = audit.verdicts;
  const auto ineq = [&](const char* label, double lhs, double rhs) {
    out.push_back(make_inequality(label, lhs, rhs, tol_rel));
  };
  const auto eq = [&](const char* label, double lhs, double rhs) {
    out.push_back(make_equality(label, lhs, rhs, identity_tol_rel));
  };
  const auto ident = [&](const char* label, const Matrix& a, const Matrix& b) {
    out.push_back(make_identity(label, a, b, identity_tol_rel));
  };

  ident("setup.sigma1_marginal", sigma1_b.matrix(), (n_sigma + eps * x_b).matrix());
  ident("setup.theta_rewrite", theta1.matrix(), theta2.matrix());
  ident("split.exponent", om.matrix(),
        (conjugate(pt, log_sigma + adjoint_apply(n, upsilon)) + theta1).matrix());

  // Tr R̃_{δ²} ≤ Tr e^{A} e^{B} ≤ Tr e^{A} ‖e^{B}‖
  const double tr_reg = ruskai_map_regularized(sigma, n, tau, delta * delta).trace();
  const PsdMatrix e_first = matrix_exp(first_exponent);
  const PsdMatrix e_second = matrix_exp(second_exponent);
  const double gt_rhs = trace_product(e_first.matrix(), e_second.matrix());
  const double first_term = e_first.trace();
  const double second_term = e_second.lambda_max();
  ineq("split.golden_thompson", tr_reg, gt_rhs);
  ineq("split.operator_norm", gt_rhs, first_term * second_term);

  // First term.
  const HermitianMatrix log_sigma1 = matrix_log(sigma1);
  const Matrix ptv = pt * v.adjoint();
  ident("first.dilated_log", conjugate(ptv, log_sigma1).matrix(),
        conjugate(pt, log_sigma).matrix());
  ident("first.stinespring_adjoint", adjoint_apply(n, upsilon).matrix(),
        conjugate(v.adjoint(), tensor_identity(upsilon, dim_e)).matrix());
  const HermitianMatrix x1 = log_sigma1 + tensor_identity(upsilon, dim_e);
  ident("first.dilated_exponent", first_exponent.matrix(),
        (conjugate(ptv, x1) + log_delta * p_tau_perp).matrix());
  const double perp_tau = p_tau_perp.trace();
  const double lemma1_rhs = matrix_exp(x1).trace() + delta * perp_tau;
  ineq("first.projected_exp_trace", first_term, lemma1_rhs);
  const PsdMatrix y_be(tensor_identity(sigma1_b, dim_e));
  const PsdMatrix z_be(tensor_identity(z_tau, dim_e));
  const double lieb_be = lieb_triple_rhs(sigma1, y_be, z_be) + delta * perp_tau;
  ineq("first.lieb", lemma1_rhs, lieb_be);
  const double lieb_b = lieb_triple_rhs(z_tau, sigma1_b, sigma1_b) + delta * perp_tau;
  eq("first.partial_trace", lieb_be, lieb_b);
  const double first_bound = tau.trace() + eps * p_ntau_perp.trace() + delta * perp_tau;
  eq("first.bound", lieb_b, first_bound);

  // Second term.
  const PsdMatrix e_theta2 = matrix_exp(theta2 + log_delta * p_tau_perp);
  eq("second.theta_rewrite", second_term, e_theta2.lambda_max());
  const HermitianMatrix log_ratio = log_sigma1_b - matrix_log(b_sigma);
  const HermitianMatrix x2 = tensor_identity(log_ratio, dim_e);
  ident("second.stinespring_adjoint", theta2.matrix(), conjugate(ptv, x2).matrix());
  const double lemma1_norm = std::max(matrix_exp(x2).lambda_max(), delta);
  ineq("second.projected_exp_operator", e_theta2.lambda_max(), lemma1_norm);

  const HermitianMatrix w = pseudo_inverse_sqrt(n_sigma);
  ident("second.pseudo_inverse", conjugate(w.matrix(), n_sigma).matrix(), p_nsigma.matrix());
  const HermitianMatrix w_shift = w + std::pow(eps, -0.25) * p_nsigma_perp;
  const HermitianMatrix sandwich = conjugate(w_shift.matrix(), sigma1_b);
  const double gt_norm =
      std::max(operator_norm(tensor_identity(sandwich.matrix(), dim_e)), delta);
  ineq("second.golden_thompson", lemma1_norm, gt_norm);

  const Matrix& xb = x_b.matrix();
  const Matrix& wm = w.matrix();
  const Matrix& pp = p_nsigma_perp.matrix();
  const Matrix cross = pp * xb * wm + wm * xb * pp;
  const Matrix expanded = p_nsigma.matrix() + eps * (wm * xb * wm) + std::pow(eps, 0.75) * cross +
                          std::sqrt(eps) * (pp * xb * pp);
  ident("second.expand", sandwich.matrix(), expanded);

  ProofChainIntermediates& im = audit.intermediates;
  im.f_terms = {eps * operator_norm(wm * xb * wm), std::pow(eps, 0.75) * operator_norm(cross),
                std::sqrt(eps) * operator_norm(pp * xb * pp)};
  im.f_eps = im.f_terms[0] + im.f_terms[1] + im.f_terms[2];
  const double second_bound = std::max(1.0 + im.f_eps, delta);
  ineq("second.triangle", std::max(operator_norm(expanded), delta), second_bound);

  // Assembly.
  ineq("assembled.product", first_term * second_term, first_bound * second_bound);
  ineq("assembled.regularized", tr_reg, first_bound * second_bound);
  const double tr_limit = ruskai_map_extended(sigma, n, tau).theta;
  const double limit_bound = (tau.trace() + eps * p_ntau_perp.trace()) * (1.0 + im.f_eps);
  ineq("assembled.limit", tr_limit, limit_bound);

  im.sigma1_eps = sigma1.matrix();
  im.sigma1_b = sigma1_b.matrix();
  im.upsilon_eps = upsilon.matrix();
  im.theta_eps = theta1.matrix();
  im.x_b = xb;
  im.w = wm;
  im.eps = eps;
  im.delta = delta;
  im.trace_r_tilde = tr_limit;
  im.trace_r_delta_sq = tr_reg;
  im.final_bound = limit_bound;
  return audit;
}

Theorem2Audit theorem2_chain_audit(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau,
                                   double eps, double tol_rel, double identity_tol_rel) {
  if (!(eps > 0.0)) throw DomainError("theorem2_chain_audit: eps must be positive");
  if (sigma.dim() != tau.dim() || n.dim_in() != sigma.dim()) {
    throw DimensionError("theorem2_chain_audit: dimension mismatch");
  }
  const PsdMatrix n_tau = apply_psd(n, tau);
  const PsdMatrix n_sigma = apply_psd(n, sigma);
  if (!sigma.strictly_positive() || !n_tau.strictly_positive() || !n_sigma.strictly_positive()) {
    throw DomainError(
        "theorem2_chain_audit: sigma, N(tau) and N(sigma) must be strictly positive");
  }

  const Index dim_b = n.dim_out();
  const Isometry iso = stinespring(n);
  const Index dim_e = iso.dim_env;
  const Matrix& v = iso.v;
  const Projector p_hat = complement_projector(iso);

  const PsdMatrix sigma1(conjugate(v, sigma) + eps * p_hat);
  if (!sigma1.strictly_positive()) {
    throw NumericError("theorem2_chain_audit: sigma_1,eps is not strictly positive");
  }
  const PsdMatrix sigma1_b(partial_trace(sigma1, dim_b, dim_e, Subsystem::Second));
  const HermitianMatrix x_b = partial_trace(p_hat, dim_b, dim_e, Subsystem::Second);
  const HermitianMatrix log_sigma = matrix_log(sigma);
  const HermitianMatrix log_ntau = matrix_log(n_tau);
  const HermitianMatrix log_nsigma = matrix_log(n_sigma);
  const HermitianMatrix log_sigma1_b = matrix_log(sigma1_b);
  const HermitianMatrix upsilon = log_ntau - log_sigma1_b;

  const RuskaiResult r = ruskai_map_strict(sigma, n, tau);
  const HermitianMatrix y = log_sigma + adjoint_apply(n, upsilon);
  const HermitianMatrix z = adjoint_apply(n, log_sigma1_b - log_nsigma);

  Theorem2Audit audit;
  auto& out = audit.verdicts;
  const auto ineq = [&](const char* label, double lhs, double rhs) {
    out.push_back(make_inequality(label, lhs, rhs, tol_rel));
  };
  const auto eq = [&](const char* label, double lhs, double rhs) {
    out.push_back(make_equality(label, lhs, rhs, identity_tol_rel));
  };
  const auto ident = [&](const char* label, const Matrix& a, const Matrix& b) {
    out.push_back(make_identity(label, a, b, identity_tol_rel));
  };

  ident("setup.sigma1_marginal", sigma1_b.matrix(), (n_sigma + eps * x_b).matrix());
  ident("split.exponent", r.omega.matrix(), (y + z).matrix());

  const PsdMatrix e_y = matrix_exp(y);
  const PsdMatrix e_z = matrix_exp(z);
  const double gt_rhs = trace_product(e_y.matrix(), e_z.matrix());
  ineq("split.golden_thompson", r.theta, gt_rhs);
  ineq("split.operator_norm", gt_rhs, e_y.trace() * e_z.lambda_max());

  // First term.
  const HermitianMatrix log_sigma1 = matrix_log(sigma1);
  ident("first.dilated_log", conjugate(v.adjoint(), log_sigma1).matrix(), log_sigma.matrix());
  ident("first.stinespring_adjoint", adjoint_apply(n, upsilon).matrix(),
        conjugate(v.adjoint(), tensor_identity(upsilon, dim_e)).matrix());
  const HermitianMatrix x1 = log_sigma1 + tensor_identity(upsilon, dim_e);
  const double lemma1_rhs = matrix_exp(x1).trace();
  ineq("first.projected_exp_trace", e_y.trace(), lemma1_rhs);
  const PsdMatrix y_be(tensor_identity(sigma1_b, dim_e));
  const PsdMatrix z_be(tensor_identity(n_tau, dim_e));
  const double lieb_be = lieb_triple_rhs(sigma1, y_be, z_be);
  ineq("first.lieb", lemma1_rhs, lieb_be);
  const double lieb_b = lieb_triple_rhs(n_tau, sigma1_b, sigma1_b);
  eq("first.partial_trace", lieb_be, lieb_b);
  out.push_back(make_equality("first.bound", lieb_b, tau.trace(), tol_rel));

  // Second term.
  const HermitianMatrix log_ratio = log_sigma1_b - log_nsigma;
  const HermitianMatrix x2 = tensor_identity(log_ratio, dim_e);
  ident("second.stinespring_adjoint", z.matrix(), conjugate(v.adjoint(), x2).matrix());
  const double lemma1_norm = matrix_exp(x2).lambda_max();
  ineq("second.projected_exp_operator", e_z.lambda_max(), lemma1_norm);
  const HermitianMatrix inv_sqrt = pseudo_inverse_sqrt(n_sigma);
  const HermitianMatrix sandwich = conjugate(inv_sqrt.matrix(), sigma1_b);
  ineq("second.golden_thompson", lemma1_norm,
       operator_norm(tensor_identity(sandwich.matrix(), dim_e)));
  const HermitianMatrix shifted_x = conjugate(inv_sqrt.matrix(), x_b);
  ident("second.expand", sandwich.matrix(),
        (HermitianMatrix::identity(dim_b) + eps * shifted_x).matrix());
  audit.x_b_norm = operator_norm(shifted_x.matrix());
  eq("second.bound", operator_norm(sandwich.matrix()), 1.0 + eps * audit.x_b_norm);

  audit.trace_r_tilde = r.theta;
  audit.trace_tau = tau.trace();
  audit.final_bound = audit.trace_tau * (1.0 + eps * audit.x_b_norm);
  ineq("assembled.product", e_y.trace() * e_z.lambda_max(), audit.final_bound);
  ineq("assembled.bound", r.theta, audit.final_bound);
  return audit;
}

}  // namespace til
