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

#include <cstdint>
#include <vector>

#include "til/linalg.hpp"

namespace til {

/// Tolerance on ‖Σ K†K − 1‖ and on Choi-matrix negativity.
inline constexpr double kChannelTol = 1e-10;

/// Unit-trace nonnegative matrix.
class DensityMatrix : public PsdMatrix {
 public:
  /// Throws ValidationError if |Tr − 1| > kTraceTol.
  explicit DensityMatrix(const PsdMatrix& p);
  explicit DensityMatrix(const Matrix& m) : DensityMatrix(PsdMatrix(m)) {}

  static constexpr double kTraceTol = 1e-12;

  /// X / Tr X. Throws DomainError for a zero matrix.
  static DensityMatrix normalized(const PsdMatrix& x);
};

/// Isometric extension V: A → B ⊗ E (B is the slow index).
struct Isometry {
  Index dim_in = 0;
  Index dim_out = 0;
  Index dim_env = 0;
  Matrix v;
};

enum class Subsystem { First, Second };

/// CPTP map given by Kraus operators (each dim_out × dim_in).
class Channel {
 public:
  /// Validates shapes, trace preservation and Choi positivity.
  Channel(Index dim_in, Index dim_out, std::vector<Matrix> kraus);

  static Channel identity(Index dim);
  static Channel unitary(const Matrix& u);
  /// Pinching onto the computational basis.
  static Channel dephasing(Index dim);
  /// X ↦ Tr(X) 1/dim_out.
  static Channel depolarizing(Index dim_in, Index dim_out);

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  Index n_kraus() const { return static_cast<Index>(kraus_.size()); }

  /// Σ_{ij} |i⟩⟨j| ⊗ N(|i⟩⟨j|), dimension dim_in·dim_out.
  Matrix choi() const;

 private:
  Index dim_in_;
  Index dim_out_;
  std::vector<Matrix> kraus_;
};

/// Σ_k K_k X K_k†.
HermitianMatrix apply(const Channel& n, const HermitianMatrix& x);
/// Channel output of a nonnegative input, re-validated as nonnegative.
PsdMatrix apply_psd(const Channel& n, const PsdMatrix& x);
/// Σ_k K_k† Y K_k.
HermitianMatrix adjoint_apply(const Channel& n, const HermitianMatrix& y);

/// V = Σ_k K_k ⊗ |k⟩_E, dim_env = number of Kraus operators.
Isometry stinespring(const Channel& n);

/// Partial trace of X on dim_first ⊗ dim_second, tracing out `traced`.
HermitianMatrix partial_trace(const HermitianMatrix& x, Index dim_first, Index dim_second,
                              Subsystem traced);

/// 1^{BE} − V V†.
Projector complement_projector(const Isometry& v);

// ---------------------------------------------------------------------------
// Seeded generation

/// Counter-based seed derivation (splitmix64 finalizer over the words).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Gaussian Kraus family whitened by (M†M)^{-1/2}. Requires
/// n_kraus·dim_out ≥ dim_in (DomainError otherwise).
Channel random_channel(Index dim_in, Index dim_out, Index n_kraus, std::uint64_t seed);

/// G G† / Tr(G G†) with G a dim × rank complex Gaussian matrix.
DensityMatrix random_state(Index dim, Index rank, std::uint64_t seed);

/// Full-rank random state with all but the `rank` largest eigenvalues removed,
/// renormalized.
DensityMatrix random_state_truncated(Index dim, Index rank, std::uint64_t seed);

/// Π_σ ω Π_σ renormalized, for a random ω of the given rank. Throws DomainError
/// when rank exceeds rank(σ).
DensityMatrix random_state_in_support(const PsdMatrix& sigma, Index rank, std::uint64_t seed);

/// Complex Gaussian matrix with unit-variance entries.
Matrix random_gaussian(Index rows, Index cols, std::uint64_t seed);

/// GUE-like Hermitian matrix, entries of order `scale`.
HermitianMatrix random_hermitian(Index dim, std::uint64_t seed, double scale = 1.0);

/// Haar-like unitary (QR of a Gaussian matrix with phase correction).
Matrix random_unitary(Index dim, std::uint64_t seed);

}  // namespace til
