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

#include "til/channels.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "til/errors.hpp"

namespace til {

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const PsdMatrix& p) : PsdMatrix(p) {
  if (std::abs(trace() - 1.0) > kTraceTol) {
    std::ostringstream os;
    os.precision(17);
    os << "DensityMatrix: trace " << trace() << " differs from 1";
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::normalized(const PsdMatrix& x) {
  const double t = x.trace();
  if (!(t > 0.0)) throw DomainError("DensityMatrix::normalized: zero trace");
  return DensityMatrix(PsdMatrix((1.0 / t) * static_cast<const HermitianMatrix&>(x), x.rank_tol()));
}

// ---------------------------------------------------------------------------
// Channel

Channel::Channel(Index dim_in, Index dim_out, std::vector<Matrix> kraus)
    : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)) {
  if (dim_in_ < 1 || dim_out_ < 1) throw ValidationError("Channel: dimensions must be positive");
  if (kraus_.empty()) throw ValidationError("Channel: at least one Kraus operator is required");
  Matrix sum = Matrix::Zero(dim_in_, dim_in_);
  for (std::size_t k = 0; k < kraus_.size(); ++k) {
    const Matrix& op = kraus_[k];
    if (op.rows() != dim_out_ || op.cols() != dim_in_) {
      std::ostringstream os;
      os << "Channel: Kraus operator " << k << " is " << op.rows() << "x" << op.cols()
         << ", expected " << dim_out_ << "x" << dim_in_;
      throw ValidationError(os.str());
    }
    if (!op.allFinite()) throw ValidationError("Channel: non-finite Kraus entry");
    sum += op.adjoint() * op;
  }
  const double tp_err = operator_norm(sum - Matrix::Identity(dim_in_, dim_in_));
  if (tp_err > kChannelTol) {
    std::ostringstream os;
    os << "Channel: not trace preserving, ||sum K^dag K - 1|| = " << tp_err;
    throw ValidationError(os.str());
  }
  const Matrix c = choi();
  Eigen::SelfAdjointEigenSolver<Matrix> solver((c + c.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues()(0);
  const double hi = solver.eigenvalues()(solver.eigenvalues().size() - 1);
  if (lo < -kChannelTol * std::max(1.0, hi)) {
    std::ostringstream os;
    os << "Channel: Choi matrix has negative eigenvalue " << lo;
    throw ValidationError(os.str());
  }
}

Channel Channel::identity(Index dim) {
  return Channel(dim, dim, {Matrix::Identity(dim, dim)});
}

Channel Channel::unitary(const Matrix& u) { return Channel(u.cols(), u.rows(), {u}); }

Channel Channel::dephasing(Index dim) {
  std::vector<Matrix> ops;
  for (Index i = 0; i < dim; ++i) {
    Matrix p = Matrix::Zero(dim, dim);
    p(i, i) = 1.0;
    ops.push_back(std::move(p));
  }
  return Channel(dim, dim, std::move(ops));
}

Channel Channel::depolarizing(Index dim_in, Index dim_out) {
  std::vector<Matrix> ops;
  const double w = 1.0 / std::sqrt(static_cast<double>(dim_out));
  for (Index i = 0; i < dim_out; ++i) {
    for (Index j = 0; j < dim_in; ++j) {
      Matrix k = Matrix::Zero(dim_out, dim_in);
      k(i, j) = w;
      ops.push_back(std::move(k));
    }
  }
  return Channel(dim_in, dim_out, std::move(ops));
}

Matrix Channel::choi() const {
  const Index n = dim_in_ * dim_out_;
  Matrix c = Matrix::Zero(n, n);
  for (const Matrix& op : kraus_) {
    // vec with the input index slow: entry (i, b) = K(b, i).
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < dim_in_; ++i)
      for (Index b = 0; b < dim_out_; ++b) v(i * dim_out_ + b) = op(b, i);
    c += v * v.adjoint();
  }
  return c;
}

// ---------------------------------------------------------------------------
// Channel action

HermitianMatrix apply(const Channel& n, const HermitianMatrix& x) {
  if (x.dim() != n.dim_in()) {
    std::ostringstream os;
    os << "apply: input has dimension " << x.dim() << ", channel expects " << n.dim_in();
    throw DimensionError(os.str());
  }
  Matrix out = Matrix::Zero(n.dim_out(), n.dim_out());
  for (const Matrix& k : n.kraus()) out += k * x.matrix() * k.adjoint();
  return HermitianMatrix((out + out.adjoint()) / 2.0);
}

PsdMatrix apply_psd(const Channel& n, const PsdMatrix& x) { return PsdMatrix(apply(n, x)); }

HermitianMatrix adjoint_apply(const Channel& n, const HermitianMatrix& y) {
  if (y.dim() != n.dim_out()) {
    std::ostringstream os;
    os << "adjoint_apply: input has dimension " << y.dim() << ", channel output is "
       << n.dim_out();
    throw DimensionError(os.str());
  }
  Matrix out = Matrix::Zero(n.dim_in(), n.dim_in());
  for (const Matrix& k : n.kraus()) out += k.adjoint() * y.matrix() * k;
  return HermitianMatrix((out + out.adjoint()) / 2.0);
}

Isometry stinespring(const Channel& n) {
  const Index b = n.dim_out();
  const Index e = n.n_kraus();
  Isometry iso{n.dim_in(), b, e, Matrix::Zero(b * e, n.dim_in())};
  for (Index k = 0; k < e; ++k) {
    const Matrix& op = n.kraus()[static_cast<std::size_t>(k)];
    for (Index r = 0; r < b; ++r) iso.v.row(r * e + k) = op.row(r);
  }
  return iso;
}

HermitianMatrix partial_trace(const HermitianMatrix& x, Index dim_first, Index dim_second,
                              Subsystem traced) {
  if (dim_first < 1 || dim_second < 1 || dim_first * dim_second != x.dim()) {
    std::ostringstream os;
    os << "partial_trace: dimension " << x.dim() << " does not factor as " << dim_first << " x "
       << dim_second;
    throw DimensionError(os.str());
  }
  const Matrix& m = x.matrix();
  if (traced == Subsystem::Second) {
    Matrix out = Matrix::Zero(dim_first, dim_first);
    for (Index i = 0; i < dim_first; ++i)
      for (Index j = 0; j < dim_first; ++j)
        for (Index k = 0; k < dim_second; ++k) out(i, j) += m(i * dim_second + k, j * dim_second + k);
    return HermitianMatrix(out);
  }
  Matrix out = Matrix::Zero(dim_second, dim_second);
  for (Index i = 0; i < dim_second; ++i)
    for (Index j = 0; j < dim_second; ++j)
      for (Index k = 0; k < dim_first; ++k) out(i, j) += m(k * dim_second + i, k * dim_second + j);
  return HermitianMatrix(out);
}

Projector complement_projector(const Isometry& v) {
  const Index n = v.v.rows();
  const Matrix p = Matrix::Identity(n, n) - v.v * v.v.adjoint();
  return Projector(HermitianMatrix((p + p.adjoint()) / 2.0));
}

// ---------------------------------------------------------------------------
// Random generation

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(master) ^ a) ^ (b + 0x632be59bd9b4e019ULL));
}

Matrix random_gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

HermitianMatrix random_hermitian(Index dim, std::uint64_t seed, double scale) {
  const Matrix g = random_gaussian(dim, dim, seed);
  return HermitianMatrix(scale * (g + g.adjoint()) / 2.0);
}

Matrix random_unitary(Index dim, std::uint64_t seed) {
  const Matrix g = random_gaussian(dim, dim, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

Channel random_channel(Index dim_in, Index dim_out, Index n_kraus, std::uint64_t seed) {
  if (dim_in < 1 || dim_out < 1) throw DomainError("random_channel: dimensions must be positive");
  if (n_kraus < 1) throw DomainError("random_channel: n_kraus must be at least 1");
  if (n_kraus * dim_out < dim_in) {
    std::ostringstream os;
    os << "random_channel: " << n_kraus << " Kraus operators of shape " << dim_out << "x" << dim_in
       << " cannot be trace preserving";
    throw DomainError(os.str());
  }
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, attempt, 0x6368616eULL);
    const Matrix m = random_gaussian(n_kraus * dim_out, dim_in, s);
    const Matrix gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Matrix> solver((gram + gram.adjoint()) / 2.0);
    const RealVector& lam = solver.eigenvalues();
    if (solver.info() != Eigen::Success || !(lam(0) > 1e-10 * lam(lam.size() - 1))) continue;
    const Matrix inv_sqrt = solver.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                            solver.eigenvectors().adjoint();
    const Matrix whitened = m * inv_sqrt;
    std::vector<Matrix> ops;
    for (Index k = 0; k < n_kraus; ++k) ops.push_back(whitened.middleRows(k * dim_out, dim_out));
    return Channel(dim_in, dim_out, std::move(ops));
  }
  throw NumericError("random_channel: Gram matrix repeatedly singular");
}

DensityMatrix random_state(Index dim, Index rank, std::uint64_t seed) {
  if (rank < 1 || rank > dim) throw DomainError("random_state: rank must lie in [1, dim]");
  const Matrix g = random_gaussian(dim, rank, seed);
  const Matrix w = g * g.adjoint();
  return DensityMatrix::normalized(PsdMatrix(HermitianMatrix((w + w.adjoint()) / 2.0)));
}

DensityMatrix random_state_truncated(Index dim, Index rank, std::uint64_t seed) {
  if (rank < 1 || rank > dim) throw DomainError("random_state_truncated: rank must lie in [1, dim]");
  const DensityMatrix full = random_state(dim, dim, seed);
  const Spectrum& s = full.spectrum();
  const Matrix kept = s.eigenvectors.rightCols(rank) * s.eigenvalues.tail(rank).asDiagonal() *
                      s.eigenvectors.rightCols(rank).adjoint();
  return DensityMatrix::normalized(PsdMatrix(HermitianMatrix((kept + kept.adjoint()) / 2.0)));
}

DensityMatrix random_state_in_support(const PsdMatrix& sigma, Index rank, std::uint64_t seed) {
  const Index r_sigma = sigma.rank();
  if (rank < 1 || rank > r_sigma) {
    std::ostringstream os;
    os << "random_state_in_support: rank " << rank << " outside [1, rank(sigma) = " << r_sigma
       << "]";
    throw DomainError(os.str());
  }
  const DensityMatrix omega = random_state(sigma.dim(), rank, seed);
  if (r_sigma == sigma.dim()) return omega;
  const Projector p = support_projector(sigma);
  const Matrix w = p.matrix() * omega.matrix() * p.matrix();
  return DensityMatrix::normalized(PsdMatrix(HermitianMatrix((w + w.adjoint()) / 2.0)));
}

}  // namespace til
