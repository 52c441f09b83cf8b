// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bandlab {

// Scalar reduction of the matrix Dyson equation for the Hermitian
// dilation of X - z with a doubly stochastic variance profile. The
// solution matrix is [[a, b], [bt, c]] with c = a and bt = (conj(z)/z) b;
// writing D = ac - b bt = a^2 - (conj(z)/z) b^2 for its determinant,
//
//   a + a / D + eta = 0
//   c + c / D + eta = 0
//   b = z D
//
// on the branch with Im a > 0. The resolvent at complex eta is not
// Hermitian, so bt equals conj(b) only when (eta + a)^2 - |z|^2 is real
// (in particular on the imaginary eta axis), where b bt reduces to the
// familiar |b|^2 form. m = (a + c)/2 is the Stieltjes transform of the
// deterministic symmetrized singular value distribution of X - z.
struct FreeStieltjesSolution {
  std::complex<double> a{0.0, 0.0};
  std::complex<double> b{0.0, 0.0};
  std::complex<double> c{0.0, 0.0};
  std::complex<double> m{0.0, 0.0};
  std::complex<double> z{0.0, 0.0};
  std::complex<double> eta{0.0, 0.0};
  int iterations = 0;
  double residual = 0.0;
};

struct DysonOptions {
  double tol = 1e-12;
  int max_iterations = 10000;
  double damping = 0.5;
};

// Damped fixed-point iteration on the 2x2 resolvent identity, started
// from a = c = i, b = 0. Requires Im eta > 0. Non-convergence raises
// SolveError carrying the last residual.
FreeStieltjesSolution solve_free_stieltjes(std::complex<double> z,
                                           std::complex<double> eta,
                                           const DysonOptions& options = {});

// Stieltjes transform of the semicircle distribution,
// (-eta + sqrt(eta^2 - 4)) / 2 on the branch with positive imaginary
// part. Equals the z = 0 reduction of the system above.
std::complex<double> semicircle_reference(std::complex<double> eta);

// Distribution function of the symmetrized singular value law at shift z,
// recovered from the solver by Stieltjes inversion at height tau: the
// density (1/pi) Im m(t + i tau) is integrated by trapezoid over a fixed
// symmetric grid spanning [-(3 + |z|), 3 + |z|].
class FreeMeasureCdf {
 public:
  FreeMeasureCdf(std::complex<double> z, double tau = 1e-3,
                 int grid_points = 4000);

  // Monotone, valued in [0, 1]; linear interpolation between grid nodes.
  double evaluate(double x) const;

  std::complex<double> z() const noexcept { return z_; }
  double tau() const noexcept { return tau_; }
  std::span<const double> grid() const noexcept { return grid_; }
  std::span<const double> cdf() const noexcept { return cdf_; }

 private:
  std::complex<double> z_;
  double tau_;
  std::vector<double> grid_;
  std::vector<double> cdf_;
};

// One-off evaluation of the tabulated distribution function.
double free_measure_cdf(std::complex<double> z, double x, double tau = 1e-3);

}  // namespace bandlab
