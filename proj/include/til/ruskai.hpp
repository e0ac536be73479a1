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

// The Ruskai recovery map
//
//   R̃_{σ,N}(τ) = exp{ log σ + N†[ log N(τ) − log N(σ) ] }
//
// for strictly positive σ, N(τ), N(σ), and its extension to nonnegative
// arguments with supp τ ⊆ supp σ:
//
//   Ω_{σ,N}(τ) = Π_τ · { log σ + N†[ Π_{N(τ)}·log N(τ) − Π_{N(σ)}·log N(σ) ] }
//   R̃_{σ,N}(τ) = lim_{δ↓0} exp[ Ω + (log δ) Π_τ^⊥ ] = Π_τ · exp(Ω).
//
// The limit is evaluated in closed form: Ω is block diagonal with respect to
// Π_τ, so the exponential restricted to supp τ is all that survives.

#include <vector>

#include "til/channels.hpp"
#include "til/entropies.hpp"
#include "til/linalg.hpp"

namespace til {

struct RuskaiResult {
  HermitianMatrix omega;  // exponent
  PsdMatrix r_tilde;      // the recovered (sub-normalized) matrix
  double theta;           // Tr R̃
  double margin;          // Tr τ − Tr R̃
};

/// Ω_{σ,N}(τ). Throws DomainError unless supp τ ⊆ supp σ; throws NumericError
/// if supp N(τ) ⊄ supp N(σ) numerically.
HermitianMatrix omega(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau);

/// Unrestricted form; throws DomainError unless σ, N(τ), N(σ) are strictly
/// positive (use ruskai_map_extended otherwise).
RuskaiResult ruskai_map_strict(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau);

/// Π_τ · exp(Ω_{σ,N}(τ)).
RuskaiResult ruskai_map_extended(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau);

/// exp[Ω + (log δ) Π_τ^⊥], δ ∈ (0, 1]. Only used to study the δ ↓ 0 limit.
PsdMatrix ruskai_map_regularized(const PsdMatrix& sigma, const Channel& n, const PsdMatrix& tau,
                                 double delta);

struct Decomposition {
  double delta;           // Δ(ρ, σ, N)
  double theta;           // Tr R̃(ρ)
  double term_klein;      // S[ρ ‖ R̃(ρ)/Θ]
  double term_log_theta;  // −log Θ
  double residual;        // Δ − (term_klein + term_log_theta)
};

/// Δ = S[ρ‖R̃/Θ] − log Θ, evaluated term by term. ρ must have unit trace.
Decomposition decomposition_check(const DensityMatrix& rho, const PsdMatrix& sigma,
                                  const Channel& n);

struct EqualityFlags {
  bool delta_zero;
  bool fixed_point;
  double delta;
  double fixed_point_residual;  // ‖ρ − R̃(ρ)‖
};

inline constexpr double kEqualityDeltaTol = 1e-9;
inline constexpr double kEqualityFixedPointTol = 1e-6;

/// |Δ| ≤ tol_delta and ‖ρ − R̃(ρ)‖ ≤ tol_fixed_point. The two tolerances
/// differ because Δ is second order in ρ − R̃(ρ).
EqualityFlags equality_check(const DensityMatrix& rho, const PsdMatrix& sigma, const Channel& n,
                             double tol_delta = kEqualityDeltaTol,
                             double tol_fixed_point = kEqualityFixedPointTol);

struct RenyiBound {
  double alpha;
  double bound;  // S_α(ρ ‖ R̃(ρ))
  double slack;  // Δ − bound
};

/// One entry per α ∈ (0, 1]; throws DomainError for other α.
std::vector<RenyiBound> renyi_lower_bounds(const DensityMatrix& rho, const PsdMatrix& sigma,
                                           const Channel& n, const std::vector<double>& alphas);

}  // namespace til
