// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bandlab/ensemble.hpp"
#include "bandlab/hermitization.hpp"

namespace bandlab {

// Singular values in decreasing order. Inputs with non-finite entries and
// LAPACK failures raise SolveError, never silent NaN output.
std::vector<double> singular_values(const Eigen::MatrixXcd& m);

// Eigenvalues of a general square matrix, unordered beyond a fixed
// deterministic sort (by real part, then imaginary part).
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& m);

struct HermitianEigenSystem {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors; // columns; empty unless requested
};

// Spectrum of a Hermitian dilation. With `want_vectors` the orthonormal
// eigenbasis is returned as well.
HermitianEigenSystem hermitian_spectrum(const DilationMatrix& y,
                                        bool want_vectors = false);

// (1/N) sum_j 1/(lambda_j - eta) for a Hermitian matrix with spectrum
// lambda. Requires Im eta > 0.
std::complex<double> stieltjes_from_spectrum(std::span<const double> eigs,
                                             std::complex<double> eta);

// Stieltjes transform of the dilation spectrum {+sigma_i, -sigma_i} given
// only the singular values.
std::complex<double> stieltjes_from_singular_values(
    std::span<const double> sigma, std::complex<double> eta);

// Normalized trace of the resolvent (Y - eta)^{-1} of the dilation.
std::complex<double> empirical_stieltjes(const DilationMatrix& y,
                                         std::complex<double> eta);

// Diagonal of the resolvent (H - eta)^{-1} of a Hermitian matrix,
// computed through the eigendecomposition. The imaginary part of every
// entry is positive when Im eta > 0.
std::vector<std::complex<double>> green_diagonal(const Eigen::MatrixXcd& h,
                                                 std::complex<double> eta);
std::vector<std::complex<double>> green_diagonal(const DilationMatrix& y,
                                                 std::complex<double> eta);

struct InfnormResult {
  double value = 0.0;     // max over unit right eigenvectors of the sup norm
  bool degenerate = false; // some eigenvalue gap below 1e-10; value unreliable
  double min_gap = 0.0;
};

// Largest sup-norm coordinate over the unit right eigenvectors of a
// general square matrix. Nearly equal eigenvalues make the eigenbasis
// ill-conditioned, so such results carry the degenerate flag instead of
// failing.
InfnormResult eigenvector_max_infnorm(const Eigen::MatrixXcd& m);

// Number of eigenvalues in the closed interval [a, b]. Requires a <= b.
long interval_count(std::span<const double> eigs, double a, double b);

// One sampled matrix reduced to its spectral statistics. Eigenvalues are
// of the raw sample; singular values are of the shifted sample X - zI.
struct SpectralSample {
  Eigen::VectorXcd eigenvalues;
  std::vector<double> singular_values;                     // decreasing
  std::optional<std::vector<double>> eigenvector_infnorms; // per eigenvector
  std::string ensemble_kind;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::complex<double> shift_z{0.0, 0.0};
  bool degenerate_eigenbasis = false;
};

SpectralSample make_spectral_sample(const SampledMatrix& sample,
                                    std::complex<double> z = {0.0, 0.0},
                                    bool want_infnorms = false);

}  // namespace bandlab
