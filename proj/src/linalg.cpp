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

#include "til/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>

#include "til/errors.hpp"

namespace til {

double rank_tol_per_dim() {
  static const double value = [] {
    if (const char* env = std::getenv("TIL_RANK_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && std::isfinite(v) && v >= 0.0) return v;
    }
    return 1e-12;
  }();
  return value;
}

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    std::ostringstream os;
    os << "HermitianMatrix: expected a non-empty square matrix, got " << entries.rows() << "x"
       << entries.cols();
    throw ValidationError(os.str());
  }
  if (!entries.allFinite()) throw ValidationError("HermitianMatrix: non-finite entry");
  const double scale = entries.norm();
  const double asym = (entries - entries.adjoint()).norm() / 2.0;
  if (asym > kHermiticityTol * scale) {
    std::ostringstream os;
    os << "HermitianMatrix: asymmetry " << asym << " exceeds " << kHermiticityTol << " * " << scale;
    throw ValidationError(os.str());
  }
  m_ = (entries + entries.adjoint()) / 2.0;
}

HermitianMatrix::HermitianMatrix(Matrix entries, Trusted) : m_(std::move(entries)) {}

HermitianMatrix HermitianMatrix::zero(Index dim) {
  return HermitianMatrix(Matrix::Zero(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(Index dim) {
  return HermitianMatrix(Matrix::Identity(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& diag) {
  const auto n = static_cast<Index>(diag.size());
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
  return HermitianMatrix(m);
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("HermitianMatrix +: dimension mismatch");
  return HermitianMatrix(a.m_ + b.m_, HermitianMatrix::Trusted{});
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("HermitianMatrix -: dimension mismatch");
  return HermitianMatrix(a.m_ - b.m_, HermitianMatrix::Trusted{});
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return HermitianMatrix(s * a.m_, HermitianMatrix::Trusted{});
}

// ---------------------------------------------------------------------------
// Spectrum

double Spectrum::max_abs() const {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

Matrix Spectrum::apply(const std::function<double(double)>& f,
                       const std::function<bool(double)>& keep) const {
  const Index n = dim();
  Matrix scaled = eigenvectors;
  for (Index j = 0; j < n; ++j) {
    const double lam = eigenvalues(j);
    const double v = (!keep || keep(lam)) ? f(lam) : 0.0;
    scaled.col(j) *= v;
  }
  Matrix out = scaled * eigenvectors.adjoint();
  return (out + out.adjoint()) / 2.0;
}

Spectrum eig_hermitian(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eig_hermitian: decomposition did not converge (dim " << h.dim()
       << ", Frobenius norm " << h.matrix().norm() << ", max |entry| "
       << h.matrix().cwiseAbs().maxCoeff() << ")";
    throw NumericError(os.str());
  }
  Spectrum s{solver.eigenvalues(), solver.eigenvectors()};
  for (Index j = 0; j < s.dim(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < s.dim(); ++i) {
      const double a = std::abs(s.eigenvectors(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs > 0.0) {
      const Complex phase = s.eigenvectors(best, j) / best_abs;
      s.eigenvectors.col(j) *= std::conj(phase);
      s.eigenvectors(best, j) = best_abs;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// PsdMatrix

PsdMatrix::PsdMatrix(const HermitianMatrix& h, std::optional<double> rank_tol)
    : HermitianMatrix(h),
      rank_tol_(rank_tol.value_or(default_rank_tol(h.dim()))),
      spectrum_(eig_hermitian(h)) {
  if (!(rank_tol_ >= 0.0)) throw ValidationError("PsdMatrix: rank_tol must be nonnegative");
  const double lo = spectrum_.eigenvalues(0);
  if (lo < -threshold()) {
    std::ostringstream os;
    os << "PsdMatrix: eigenvalue " << lo << " below -" << threshold();
    throw ValidationError(os.str());
  }
}

double PsdMatrix::lambda_max() const { return spectrum_.eigenvalues(spectrum_.dim() - 1); }
double PsdMatrix::lambda_min() const { return spectrum_.eigenvalues(0); }

double PsdMatrix::threshold() const { return rank_tol_ * std::max(1.0, lambda_max()); }

Index PsdMatrix::rank() const {
  const double t = threshold();
  return (spectrum_.eigenvalues.array() > t).count();
}

// ---------------------------------------------------------------------------
// Projector

Projector::Projector(const HermitianMatrix& p) : HermitianMatrix(p) {
  const Matrix& m = matrix();
  const double err = operator_norm(m * m - m);
  if (err > kProjectorTol) {
    std::ostringstream os;
    os << "Projector: ||P^2 - P|| = " << err << " exceeds " << kProjectorTol;
    throw ValidationError(os.str());
  }
}

Projector Projector::zero(Index dim) { return Projector(Matrix::Zero(dim, dim), Trusted{}); }

Projector Projector::identity(Index dim) {
  return Projector(Matrix::Identity(dim, dim), Trusted{});
}

Projector Projector::from_columns(const Matrix& columns, Index dim) {
  if (columns.cols() == 0) return zero(dim);
  if (columns.rows() != dim) throw DimensionError("Projector::from_columns: row count mismatch");
  Matrix p = columns * columns.adjoint();
  return Projector(HermitianMatrix((p + p.adjoint()) / 2.0));
}

Index Projector::rank() const { return static_cast<Index>(std::llround(trace())); }

Projector Projector::complement() const {
  return Projector(Matrix::Identity(dim(), dim()) - matrix(), Trusted{});
}

Matrix support_basis(const PsdMatrix& x) {
  const auto& s = x.spectrum();
  const Index r = x.rank();
  return s.eigenvectors.rightCols(r);
}

Projector support_projector(const PsdMatrix& x) {
  const Index r = x.rank();
  if (r == x.dim()) return Projector::identity(x.dim());
  return Projector::from_columns(support_basis(x), x.dim());
}

bool is_subprojector(const Projector& p, const Projector& q, double tol) {
  if (p.dim() != q.dim()) throw DimensionError("is_subprojector: dimension mismatch");
  return operator_norm(q.complement().matrix() * p.matrix()) <= tol;
}

bool support_contained(const PsdMatrix& x, const PsdMatrix& y, double tol) {
  return is_subprojector(support_projector(x), support_projector(y), tol);
}

// ---------------------------------------------------------------------------
// Matrix functions

HermitianMatrix restricted_log(const PsdMatrix& y, const Projector& p) {
  if (p.dim() != y.dim()) throw DimensionError("restricted_log: dimension mismatch");
  const Projector support = support_projector(y);
  if (!is_subprojector(p, support)) {
    throw DomainError("restricted_log: projector is not contained in the support of the argument");
  }
  const double t = y.threshold();
  const Matrix log_y = y.spectrum().apply([](double l) { return std::log(l); },
                                          [t](double l) { return l > t; });
  const Matrix out = p.matrix() * log_y * p.matrix();
  return HermitianMatrix((out + out.adjoint()) / 2.0);
}

HermitianMatrix restricted_log(const PsdMatrix& y) {
  const double t = y.threshold();
  return HermitianMatrix(
      y.spectrum().apply([](double l) { return std::log(l); }, [t](double l) { return l > t; }));
}

HermitianMatrix matrix_log(const PsdMatrix& y) {
  if (!y.strictly_positive()) {
    std::ostringstream os;
    os << "matrix_log: argument is not strictly positive (smallest eigenvalue " << y.lambda_min()
       << ", threshold " << y.threshold() << ")";
    throw DomainError(os.str());
  }
  return HermitianMatrix(y.spectrum().apply([](double l) { return std::log(l); }));
}

PsdMatrix matrix_exp(const HermitianMatrix& h) {
  const Spectrum s = eig_hermitian(h);
  const double top = s.eigenvalues(s.dim() - 1);
  if (top > std::log(std::numeric_limits<double>::max())) {
    std::ostringstream os;
    os << "matrix_exp: eigenvalue " << top << " overflows double precision";
    throw NumericError(os.str());
  }
  return PsdMatrix(HermitianMatrix(s.apply([](double l) { return std::exp(l); })));
}

HermitianMatrix pseudo_power(const PsdMatrix& x, double p) {
  const double t = x.threshold();
  return HermitianMatrix(
      x.spectrum().apply([p](double l) { return std::pow(l, p); }, [t](double l) { return l > t; }));
}

HermitianMatrix pseudo_inverse_sqrt(const PsdMatrix& x) { return pseudo_power(x, -0.5); }

PsdMatrix sqrt_psd(const PsdMatrix& x) {
  const double t = x.threshold();
  return PsdMatrix(HermitianMatrix(x.spectrum().apply([](double l) { return std::sqrt(l); },
                                                      [t](double l) { return l > t; })),
                   x.rank_tol());
}

HermitianMatrix conjugate(const Matrix& u, const HermitianMatrix& w) {
  if (u.cols() != w.dim()) {
    std::ostringstream os;
    os << "conjugate: " << u.rows() << "x" << u.cols() << " cannot act on dimension " << w.dim();
    throw DimensionError(os.str());
  }
  const Matrix out = u * w.matrix() * u.adjoint();
  return HermitianMatrix((out + out.adjoint()) / 2.0);
}

// ---------------------------------------------------------------------------
// Norms

Norms norms(const Matrix& x) {
  if (x.size() == 0) return {0.0, 0.0};
  Eigen::JacobiSVD<Matrix> svd(x);
  const RealVector& sv = svd.singularValues();
  return {sv.maxCoeff(), sv.sum()};
}

double operator_norm(const Matrix& x) { return norms(x).operator_norm; }
double trace_norm(const Matrix& x) { return norms(x).trace_norm; }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace til
