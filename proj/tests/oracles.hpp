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

// Reference computations used only by the tests. None of them goes through
// the library's spectral routines: matrix functions use Eigen's Padé/Schur
// implementations, channel actions use the Choi matrix, partial traces are
// explicit index loops and the Lieb integral is evaluated by quadrature.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "til/channels.hpp"
#include "til/linalg.hpp"

namespace oracle {

using til::Complex;
using til::Index;
using til::Matrix;

inline Matrix expm(const Matrix& a) { return a.exp(); }
inline Matrix logm(const Matrix& a) { return a.log(); }

/// Σ_ij ⟨i|X|j⟩ Tr_A[(|j⟩⟨i| ⊗ 1) J] read off the Choi matrix J.
inline Matrix apply_via_choi(const til::Channel& n, const Matrix& x) {
  const Matrix j = n.choi();
  const Index din = n.dim_in();
  const Index dout = n.dim_out();
  Matrix out = Matrix::Zero(dout, dout);
  for (Index a = 0; a < din; ++a)
    for (Index b = 0; b < din; ++b) out += x(a, b) * j.block(a * dout, b * dout, dout, dout);
  return out;
}

/// Tr over the second (fast) factor by index loops.
inline Matrix trace_second(const Matrix& x, Index d1, Index d2) {
  Matrix out = Matrix::Zero(d1, d1);
  for (Index i = 0; i < d1; ++i)
    for (Index j = 0; j < d1; ++j)
      for (Index k = 0; k < d2; ++k) out(i, j) += x(i * d2 + k, j * d2 + k);
  return out;
}

inline Matrix trace_first(const Matrix& x, Index d1, Index d2) {
  Matrix out = Matrix::Zero(d2, d2);
  for (Index i = 0; i < d2; ++i)
    for (Index j = 0; j < d2; ++j)
      for (Index k = 0; k < d1; ++k) out(i, j) += x(k * d2 + i, k * d2 + j);
  return out;
}

/// Σ p_i (log p_i − log q_i) for diagonal inputs; +inf encoded as HUGE_VAL.
inline double classical_relative_entropy(const std::vector<double>& p,
                                         const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return HUGE_VAL;
    s += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return s;
}

/// Tr ∫₀^∞ X (Y + t)⁻¹ Z (Y + t)⁻¹ dt with t = s/(1 − s), adaptive
/// Gauss-Kronrod on [0, 1) and explicit inverses.
inline double lieb_quadrature(const Matrix& x, const Matrix& y, const Matrix& z,
                              double* error = nullptr) {
  const Index d = y.rows();
  const Matrix id = Matrix::Identity(d, d);
  auto integrand = [&](double s) {
    const double t = s / (1.0 - s);
    const Matrix inv = (y + t * id).inverse();
    return (x * inv * z * inv).trace().real() / ((1.0 - s) * (1.0 - s));
  };
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 20, 1e-13, &err);
  if (error) *error = err;
  return v;
}

/// Golden-Thompson sides through Padé exponentials and SVD norms.
struct GtSides {
  double lhs;
  double rhs;
};

inline GtSides golden_thompson_pade(const Matrix& y, const Matrix& z, bool trace_norm) {
  const Matrix l = expm(y + z);
  const Matrix h = expm(0.5 * y);
  const Matrix r = h * expm(z) * h.adjoint();
  const auto sv = [](const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues(); };
  if (trace_norm) return {sv(l).sum(), sv(r).sum()};
  return {sv(l)(0), sv(r)(0)};
}

}  // namespace oracle
