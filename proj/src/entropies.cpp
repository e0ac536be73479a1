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

#include "til/entropies.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "til/errors.hpp"

namespace til {

double EntropyValue::value() const {
  if (infinite_) throw DomainError("EntropyValue: value requested from +inf");
  return value_;
}

std::string EntropyValue::to_string() const {
  if (infinite_) return "+inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

namespace {

// Σ λ log λ over the support (0 log 0 = 0).
double trace_x_log_x(const PsdMatrix& x) {
  const double t = x.threshold();
  double s = 0.0;
  for (Index j = 0; j < x.dim(); ++j) {
    const double l = x.spectrum().eigenvalues(j);
    if (l > t) s += l * std::log(l);
  }
  return s;
}

}  // namespace

EntropyValue relative_entropy(const PsdMatrix& rho, const PsdMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("relative_entropy: dimension mismatch");
  if (!support_contained(rho, sigma)) return EntropyValue::infinite();
  const HermitianMatrix log_sigma = restricted_log(sigma);
  const double cross = (rho.matrix() * log_sigma.matrix()).trace().real();
  return EntropyValue::finite(trace_x_log_x(rho) - cross);
}

EntropyValue renyi_relative_entropy(double alpha, const PsdMatrix& rho, const PsdMatrix& sigma) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "renyi_relative_entropy: alpha = " << alpha << " outside (0, 2]";
    throw DomainError(os.str());
  }
  if (rho.dim() != sigma.dim()) throw DimensionError("renyi_relative_entropy: dimension mismatch");
  if (alpha == 1.0) return relative_entropy(rho, sigma);
  if (alpha > 1.0 && !support_contained(rho, sigma)) return EntropyValue::infinite();

  // Tr (s ρ s)^α = Σ σ_k(A)^{2α} with A = s √ρ, taken in the eigenbasis of σ.
  // Forming s ρ s first would square the small eigenvalues and lose them below
  // the rank threshold when α is small.
  const double p = (1.0 - alpha) / (2.0 * alpha);
  const Spectrum& sp = sigma.spectrum();
  const double t = sigma.threshold();
  Index r = 0;
  for (Index j = 0; j < sigma.dim(); ++j)
    if (sp.eigenvalues(j) > t) ++r;
  const Index d = sigma.dim();
  Matrix scaled(r, d);
  const Matrix root = sqrt_psd(rho).matrix();
  for (Index j = d - r, row = 0; j < d; ++j, ++row) {
    scaled.row(row) = std::pow(sp.eigenvalues(j), p) * (sp.eigenvectors.col(j).adjoint() * root);
  }
  const RealVector sv = Eigen::JacobiSVD<Matrix>(scaled).singularValues();
  double q = 0.0;
  for (Index k = 0; k < sv.size(); ++k)
    if (sv(k) > 0.0) q += std::pow(sv(k), 2.0 * alpha);
  // Orthogonal supports for α < 1: log 0 / (α − 1) = +∞.
  if (!(q > 0.0)) return EntropyValue::infinite();
  return EntropyValue::finite(std::log(q) / (alpha - 1.0));
}

double fidelity(const PsdMatrix& x, const PsdMatrix& y) {
  if (x.dim() != y.dim()) throw DimensionError("fidelity: dimension mismatch");
  return trace_norm(sqrt_psd(x).matrix() * sqrt_psd(y).matrix());
}

EntropyValue remainder(const PsdMatrix& rho, const PsdMatrix& sigma, const Channel& n) {
  const EntropyValue before = relative_entropy(rho, sigma);
  if (before.is_infinite()) return before;
  const EntropyValue after = relative_entropy(apply_psd(n, rho), apply_psd(n, sigma));
  if (after.is_infinite()) {
    // Excluded by support monotonicity under CP maps; reaching it means the
    // rank threshold separated the two outputs inconsistently.
    throw NumericError("remainder: channel output support ordering lost numerically");
  }
  return EntropyValue::finite(before.value() - after.value());
}

}  // namespace til
