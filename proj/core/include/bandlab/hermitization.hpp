// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>

namespace bandlab {

// X - zI. Square input only.
Eigen::MatrixXcd shift(const Eigen::MatrixXcd& x, std::complex<double> z);

// Hermitian dilation [[0, A], [A*, 0]] of an n x n matrix A, with the
// shift that produced A kept as metadata. Its 2n eigenvalues are the
// singular values of A and their negatives.
struct DilationMatrix {
  Eigen::MatrixXcd values;
  std::complex<double> shift_z{0.0, 0.0};
  int source_dim = 0;
};

DilationMatrix dilate(const Eigen::MatrixXcd& a,
                      std::complex<double> shift_z = {0.0, 0.0});

// dilate(shift(x, z), z).
DilationMatrix dilate_shifted(const Eigen::MatrixXcd& x,
                              std::complex<double> z);

// Block companion matrix of a product: factor k+2 sits at block (k, k+1)
// for k = 0..m-2 and factor 1 at block (m-1, 0). All factors must be
// square with equal size.
struct LinearizationMatrix {
  Eigen::MatrixXcd values;
  int block_size = 0;
  int block_count = 0;
};

LinearizationMatrix linearize_product(std::span<const Eigen::MatrixXcd> blocks);

}  // namespace bandlab
