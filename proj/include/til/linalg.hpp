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

// Dense Hermitian matrix foundations. Every matrix function here goes through
// an explicit eigendecomposition; no Padé or Schur based routines are used, so
// spectral thresholds are applied uniformly across the code base.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace til {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative asymmetry ‖A − A†‖ / ‖A‖ tolerated before a matrix is rejected as
/// non-Hermitian.
inline constexpr double kHermiticityTol = 1e-10;

/// Operator-norm tolerance for support containment ‖Π_Y^⊥ Π_X‖.
inline constexpr double kSupportTol = 1e-8;

/// Tolerance on ‖P² − P‖ for a matrix to be accepted as a projector.
inline constexpr double kProjectorTol = 1e-8;

/// Per-dimension rank tolerance. Read once from TIL_RANK_TOL (if set),
/// otherwise 1e-12.
double rank_tol_per_dim();

/// Default relative eigenvalue cutoff for a matrix of dimension `dim`.
inline double default_rank_tol(Index dim) { return static_cast<double>(dim) * rank_tol_per_dim(); }

class HermitianMatrix {
 public:
  /// Symmetrizes (A + A†)/2. Throws ValidationError for non-square input,
  /// non-finite entries, or asymmetry beyond kHermiticityTol·‖A‖.
  explicit HermitianMatrix(const Matrix& entries);

  static HermitianMatrix zero(Index dim);
  static HermitianMatrix identity(Index dim);
  static HermitianMatrix diagonal(const std::vector<double>& diag);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a);

 protected:
  struct Trusted {};
  HermitianMatrix(Matrix entries, Trusted);

 private:
  Matrix m_;
};

/// Eigen-decomposition with ascending real eigenvalues. Eigenvector phases are
/// fixed so that the largest-magnitude component of every column is real and
/// positive (first such index on ties).
struct Spectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;

  Index dim() const { return eigenvalues.size(); }
  double max_abs() const;

  /// U diag(f(λ)) U†, with f evaluated only where `keep(λ)` holds (others map
  /// to zero).
  Matrix apply(const std::function<double(double)>& f,
               const std::function<bool(double)>& keep = {}) const;
};

Spectrum eig_hermitian(const HermitianMatrix& h);

/// Numerically nonnegative Hermitian matrix. Keeps the spectrum computed during
/// validation.
class PsdMatrix : public HermitianMatrix {
 public:
  /// Throws ValidationError if some eigenvalue is below −rank_tol·max(1, λ_max).
  explicit PsdMatrix(const HermitianMatrix& h, std::optional<double> rank_tol = std::nullopt);
  explicit PsdMatrix(const Matrix& m, std::optional<double> rank_tol = std::nullopt)
      : PsdMatrix(HermitianMatrix(m), rank_tol) {}

  double rank_tol() const { return rank_tol_; }
  /// Eigenvalues at or below this value are treated as zero.
  double threshold() const;
  const Spectrum& spectrum() const { return spectrum_; }
  double lambda_max() const;
  double lambda_min() const;
  Index rank() const;
  bool strictly_positive() const { return rank() == dim(); }

 private:
  double rank_tol_;
  Spectrum spectrum_;
};

/// Orthogonal projector.
class Projector : public HermitianMatrix {
 public:
  /// Throws ValidationError unless P² = P within kProjectorTol.
  explicit Projector(const HermitianMatrix& p);

  static Projector zero(Index dim);
  static Projector identity(Index dim);
  /// Σ_j |v_j⟩⟨v_j| over the given (orthonormal) columns.
  static Projector from_columns(const Matrix& columns, Index dim);

  Index rank() const;
  Projector complement() const;

 private:
  Projector(Matrix m, Trusted t) : HermitianMatrix(std::move(m), t) {}
};

/// Σ_{λ_j > θ} |j⟩⟨j|.
Projector support_projector(const PsdMatrix& x);

/// Orthonormal basis (columns) of supp(X), ordered by ascending eigenvalue.
Matrix support_basis(const PsdMatrix& x);

/// P ≤ Q, measured as ‖(1 − Q) P‖ ≤ tol.
bool is_subprojector(const Projector& p, const Projector& q, double tol = kSupportTol);

/// supp(X) ⊆ supp(Y).
bool support_contained(const PsdMatrix& x, const PsdMatrix& y, double tol = kSupportTol);

/// Σ_{λ_j > θ} (log λ_j) P|j⟩⟨j|P. Throws DomainError unless P ≤ Π_Y.
HermitianMatrix restricted_log(const PsdMatrix& y, const Projector& p);

/// Restricted log on the matrix's own support.
HermitianMatrix restricted_log(const PsdMatrix& y);

/// Full logarithm. Throws DomainError if Y is not strictly positive.
HermitianMatrix matrix_log(const PsdMatrix& y);

/// U diag(e^λ) U†. Throws NumericError when the largest eigenvalue would overflow.
PsdMatrix matrix_exp(const HermitianMatrix& h);

/// Σ_{λ_j > θ} λ_j^p |j⟩⟨j| (zero eigenvalues map to zero for any p).
HermitianMatrix pseudo_power(const PsdMatrix& x, double p);

/// Square root of the pseudo-inverse; W X W† = Π_X.
HermitianMatrix pseudo_inverse_sqrt(const PsdMatrix& x);

PsdMatrix sqrt_psd(const PsdMatrix& x);

/// U W U†. U may be rectangular; throws DimensionError when U.cols() ≠ dim(W).
HermitianMatrix conjugate(const Matrix& u, const HermitianMatrix& w);

struct Norms {
  double operator_norm;
  double trace_norm;
};

Norms norms(const Matrix& x);
double operator_norm(const Matrix& x);
double trace_norm(const Matrix& x);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace til
