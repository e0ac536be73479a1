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

// Numerical verifiers for the trace inequalities behind the recovery-map
// bounds, and step-by-step audits of the two proof chains (nonnegative and
// strictly positive). Each audit evaluates the chain at a fixed (ε, δ); the
// limits are studied by sweeping grids.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "til/channels.hpp"
#include "til/linalg.hpp"

namespace til {

enum class VerdictKind {
  Inequality,  // lhs ≤ rhs
  Equality,    // lhs = rhs (scalars)
  Identity,    // matrix identity; lhs holds the residual norm, rhs is 0
};

struct InequalityVerdict {
  std::string label;
  VerdictKind kind = VerdictKind::Inequality;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs − lhs
  double tol = 0.0;     // absolute tolerance actually applied
  bool pass = false;
};

/// tol = tol_rel·max(1, |lhs|, |rhs|); pass ⇔ margin ≥ −tol.
InequalityVerdict make_inequality(std::string label, double lhs, double rhs, double tol_rel);
/// pass ⇔ |margin| ≤ tol_rel·max(1, |lhs|, |rhs|).
InequalityVerdict make_equality(std::string label, double lhs, double rhs, double tol_rel);
/// pass ⇔ margin ≥ −tol_abs.
InequalityVerdict make_inequality_abs(std::string label, double lhs, double rhs, double tol_abs);
/// Residual ‖a − b‖ against tol_rel·max(1, ‖a‖, ‖b‖).
InequalityVerdict make_identity(std::string label, const Matrix& a, const Matrix& b,
                                double tol_rel);

enum class NormKind { Trace, Operator };

inline constexpr double kOracleTolRel = 1e-9;
inline constexpr double kChainTolRel = 1e-8;
inline constexpr double kChainIdentityTolRel = 1e-9;
inline constexpr double kLemmaTol = 1e-9;

/// ⦀exp(Y + Z)⦀ ≤ ⦀exp(Y/2)·exp(Z)⦀ where U·W = U W U†.
InequalityVerdict golden_thompson(const HermitianMatrix& y, const HermitianMatrix& z,
                                  NormKind norm, double tol_rel = kOracleTolRel);

/// Tr ∫₀^∞ X (Y + t)⁻¹ Z (Y + t)⁻¹ dt, evaluated exactly in the eigenbasis of Y
/// through logarithmic-mean coefficients. Throws DomainError if Y is singular.
double lieb_triple_rhs(const PsdMatrix& x, const PsdMatrix& y, const PsdMatrix& z);

/// (log a − log b)/(a − b), with the a = b limit 1/a.
double log_mean_inverse(double a, double b);

/// Tr exp(log X − log Y + log Z) ≤ lieb_triple_rhs(X, Y, Z).
InequalityVerdict lieb_triple(const PsdMatrix& x, const PsdMatrix& y, const PsdMatrix& z,
                              double tol_rel = kOracleTolRel);

/// Trace and operator-norm forms: with Z = (Π V†)·X,
///   Tr exp[Z + (log δ)Π^⊥] ≤ Tr exp(X) + δ Tr Π^⊥,
///   ‖exp[Z + (log δ)Π^⊥]‖ ≤ max(‖exp(X)‖, δ).
/// V maps the space of Π into the space of X and must satisfy V†V = 1.
std::pair<InequalityVerdict, InequalityVerdict> lemma1_check(const Projector& p, const Matrix& v,
                                                             const HermitianMatrix& x,
                                                             double delta,
                                                             double tol_rel = kOracleTolRel);

/// ‖Π_{N(σ)}^⊥ N(ρ) Π_{N(σ)}^⊥‖ ≤ tol. Throws DomainError unless supp ρ ⊆ supp σ.
bool lemma2_check(const Channel& n, const PsdMatrix& rho, const PsdMatrix& sigma,
                  double tol = kLemmaTol);

/// lhs = ‖Π_ρ N†(Π̃) Π_ρ‖, rhs = tol. Throws DomainError unless Π̃ ≤ Π_{N(ρ)}^⊥.
InequalityVerdict lemma3_check(const Channel& n, const PsdMatrix& rho, const Projector& p_tilde,
                               double tol = kLemmaTol);

/// Scaffolding of the nonnegative-case chain at one (ε, δ).
struct ProofChainIntermediates {
  Matrix sigma1_eps;   // σ_{1,ε}^{BE}
  Matrix sigma1_b;     // Tr_E σ_{1,ε}^{BE}
  Matrix upsilon_eps;  // Υ_ε on B
  Matrix theta_eps;    // Θ_ε on A
  Matrix x_b;          // X^B = N(Π_σ^⊥) + Tr_E Π̂
  Matrix w;            // square root of the pseudo-inverse of N(σ)
  std::array<double, 3> f_terms{};  // ε‖W·X‖, ε^{3/4}‖Π⊥XW + WXΠ⊥‖, ε^{1/2}‖Π⊥·X‖
  double f_eps = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double trace_r_tilde = 0.0;       // Tr R̃ (δ → 0)
  double trace_r_delta_sq = 0.0;    // Tr R̃_{δ²}
  double final_bound = 0.0;         // [Tr τ + ε Tr Π_{N(τ)}^⊥][1 + f(ε)]
};

struct Theorem1Audit {
  ProofChainIntermediates intermediates;
  std::vector<InequalityVerdict> verdicts;
  bool pass() const;
};

/// Requires supp τ ⊆ supp σ, ε > 0, δ ∈ (0, 1).
Theorem1Audit theorem1_chain_audit(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau,
                                   double eps, double delta, double tol_rel = kChainTolRel,
                                   double identity_tol_rel = kChainIdentityTolRel);

struct Theorem2Audit {
  std::vector<InequalityVerdict> verdicts;
  double trace_r_tilde = 0.0;
  double trace_tau = 0.0;
  double x_b_norm = 0.0;     // ‖N(σ)^{-1/2}·X^B‖
  double final_bound = 0.0;  // Tr τ (1 + ε‖N(σ)^{-1/2}·X^B‖)
  bool pass() const;
};

/// Requires σ, N(τ), N(σ) strictly positive and ε > 0.
Theorem2Audit theorem2_chain_audit(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau,
                                   double eps, double tol_rel = kChainTolRel,
                                   double identity_tol_rel = kChainIdentityTolRel);

std::string to_string(VerdictKind kind);

}  // namespace til
