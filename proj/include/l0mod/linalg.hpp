// Copyright 2026 The l0mod Authors
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

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <vector>

#include "l0mod/error.hpp"

namespace l0mod {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Singular values below this are treated as zero.
inline double rank_cutoff(double largest_singular_value) {
  return tolerance() * std::max(1.0, largest_singular_value);
}

struct SvdParts {
  Matrix u;
  Vector s;
  Matrix v;
};

inline SvdParts full_svd(const Matrix& a) {
  SvdParts out;
  if (a.rows() == 0 || a.cols() == 0) {
    out.u = Matrix::Identity(a.rows(), a.rows());
    out.v = Matrix::Identity(a.cols(), a.cols());
    out.s = Vector::Zero(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = svd.matrixU();
  out.s = svd.singularValues();
  out.v = svd.matrixV();
  return out;
}

inline std::size_t numeric_rank(const Matrix& a) {
  auto parts = full_svd(a);
  if (parts.s.size() == 0) return 0;
  double cut = rank_cutoff(parts.s(0));
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < parts.s.size(); ++i) {
    if (parts.s(i) > cut) ++r;
  }
  return r;
}

/// Orthonormal basis of the column space (columns of the result).
inline Matrix column_space_basis(const Matrix& a) {
  auto parts = full_svd(a);
  std::size_t r = 0;
  if (parts.s.size() > 0) {
    double cut = rank_cutoff(parts.s(0));
    for (Eigen::Index i = 0; i < parts.s.size(); ++i) {
      if (parts.s(i) > cut) ++r;
    }
  }
  return parts.u.leftCols(static_cast<Eigen::Index>(r));
}

/// Orthonormal basis of the null space (columns of the result).
inline Matrix null_space_basis(const Matrix& a) {
  auto parts = full_svd(a);
  std::size_t r = 0;
  if (parts.s.size() > 0) {
    double cut = rank_cutoff(parts.s(0));
    for (Eigen::Index i = 0; i < parts.s.size(); ++i) {
      if (parts.s(i) > cut) ++r;
    }
  }
  return parts.v.rightCols(a.cols() - static_cast<Eigen::Index>(r));
}

inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/// Minimum-norm least-squares solution of a * x = b.
inline Matrix least_squares(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0) return Matrix::Zero(0, b.cols());
  if (a.rows() == 0) return Matrix::Zero(a.cols(), b.cols());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  cod.setThreshold(tolerance());
  return cod.solve(b);
}

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Row-major flattening, used for Hom fibers.
inline Vector vec_rows(const Matrix& m) {
  Vector out(m.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(k++) = m(r, c);
  }
  return out;
}

inline Matrix unvec_rows(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw Error(ErrorKind::ShapeMismatch, "flattened matrix has wrong length");
  }
  Matrix m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v(k++);
  }
  return m;
}

/// Visits every k-subset of {0, ..., n-1} in lexicographic order. Stops early
/// when the visitor returns false.
template <class Visitor>
void for_each_subset(std::size_t n, std::size_t k, Visitor&& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!visit(static_cast<const std::vector<std::size_t>&>(idx))) return;
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

}  // namespace linalg
}  // namespace l0mod
