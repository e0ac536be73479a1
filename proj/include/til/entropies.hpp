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

#include <string>

#include "til/channels.hpp"
#include "til/linalg.hpp"

namespace til {

/// Extended real in nats. +∞ is a tag, never a floating point infinity.
class EntropyValue {
 public:
  static EntropyValue finite(double v) { return EntropyValue(false, v); }
  static EntropyValue infinite() { return EntropyValue(true, 0.0); }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  /// Throws DomainError when infinite.
  double value() const;

  std::string to_string() const;

 private:
  EntropyValue(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_;
  double value_;
};

/// Tr ρ(log ρ − log σ) with both logs restricted to their supports; +∞ unless
/// supp ρ ⊆ supp σ. ρ need not be normalized.
EntropyValue relative_entropy(const PsdMatrix& rho, const PsdMatrix& sigma);

/// (1/(α−1)) log Tr (σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α for α ∈ (0, 2] \ {1}, with
/// pseudo-powers of σ; α = 1 falls back to relative_entropy. Throws DomainError
/// for α outside (0, 2].
EntropyValue renyi_relative_entropy(double alpha, const PsdMatrix& rho, const PsdMatrix& sigma);

/// ‖√X √Y‖₁.
double fidelity(const PsdMatrix& x, const PsdMatrix& y);

/// S(ρ‖σ) − S[N(ρ)‖N(σ)]; +∞ whenever S(ρ‖σ) is.
EntropyValue remainder(const PsdMatrix& rho, const PsdMatrix& sigma, const Channel& n);

}  // namespace til
