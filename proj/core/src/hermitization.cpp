// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/hermitization.hpp"

#include "bandlab/errors.hpp"

namespace bandlab {

Eigen::MatrixXcd shift(const Eigen::MatrixXcd& x, std::complex<double> z) {
  if (x.rows() != x.cols()) {
    throw SpecError("shift requires a square matrix");
  }
  Eigen::MatrixXcd out = x;
  out.diagonal().array() -= z;
  return out;
}

DilationMatrix dilate(const Eigen::MatrixXcd& a, std::complex<double> shift_z) {
  if (a.rows() != a.cols()) {
    throw SpecError("dilate requires a square matrix");
  }
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  y.topRightCorner(n, n) = a;
  y.bottomLeftCorner(n, n) = a.adjoint();
  return DilationMatrix{std::move(y), shift_z, n};
}

DilationMatrix dilate_shifted(const Eigen::MatrixXcd& x,
                              std::complex<double> z) {
  return dilate(shift(x, z), z);
}

LinearizationMatrix linearize_product(
    std::span<const Eigen::MatrixXcd> blocks) {
  if (blocks.empty()) {
    throw SpecError("linearize_product requires at least one factor");
  }
  const int n = static_cast<int>(blocks[0].rows());
  for (const auto& blk : blocks) {
    if (blk.rows() != n || blk.cols() != n) {
      throw SpecError("linearize_product: all factors must be square with "
                      "equal size");
    }
  }
  const int m = static_cast<int>(blocks.size());
  if (m == 1) return LinearizationMatrix{blocks[0], n, 1};

  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n * m, n * m);
  for (int r = 0; r + 1 < m; ++r) {
    l.block(r * n, (r + 1) * n, n, n) = blocks[r + 1];
  }
  l.block((m - 1) * n, 0, n, n) = blocks[0];
  return LinearizationMatrix{std::move(l), n, m};
}

}  // namespace bandlab
