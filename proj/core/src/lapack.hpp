// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

// Thin wrappers over LAPACKE. Matrices that are exactly real are routed
// to the real d-routines, which run several times faster than their
// complex z-counterparts on the same input. Every wrapper validates
// finiteness up front and turns nonzero LAPACK info into SolveError, so
// callers never see silent NaNs.

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bandlab::detail {

bool is_real(const Eigen::MatrixXcd& m);
void require_finite(const Eigen::MatrixXcd& m, const char* op);

// Singular values only, descending.
std::vector<double> svd_values(const Eigen::MatrixXcd& m);

// Eigenvalues of a general square matrix, unsorted.
Eigen::VectorXcd general_eigenvalues(const Eigen::MatrixXcd& m);

struct GeneralEigenSystem {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd right_vectors;  // unit 2-norm columns
};
GeneralEigenSystem general_eigensystem(const Eigen::MatrixXcd& m);

struct HermitianEigenResult {
  Eigen::VectorXd values;      // ascending
  Eigen::MatrixXcd vectors;    // empty unless requested
};
HermitianEigenResult hermitian_eigen(const Eigen::MatrixXcd& m,
                                     bool want_vectors);

}  // namespace bandlab::detail
