// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace bandlab {

// Finite atomic measure on the real line with positive weights summing to
// one. Atoms are stored sorted by position; equal positions may repeat.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(std::vector<double> points, std::vector<double> weights);
  static EmpiricalMeasure uniform_on(std::vector<double> points);

  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

// Uniform measure on the squared singular values.
EmpiricalMeasure squared_singular_value_measure(std::span<const double> sigma);

// sup_x |F_mu(x) - F_nu(x)|, exact: evaluated at every jump point with
// left and right limits. Requires nonnegative supports.
double kolmogorov_distance(const EmpiricalMeasure& mu,
                           const EmpiricalMeasure& nu);

// (1/n) sum_i log sigma_i. Exact zeros raise SingularSampleError;
// positive values below 1e-300 are clamped to 1e-300 before the log.
double log_potential(std::span<const double> sigma);

struct LogSplit {
  double head = 0.0;  // (1/n) sum over sigma_i >  threshold
  double tail = 0.0;  // (1/n) sum over sigma_i <= threshold
  long tail_count = 0;
};

// Splits the log potential at a threshold. head + tail equals the log
// potential of the full list.
LogSplit truncated_log_split(std::span<const double> sigma, double threshold);

struct WindowBoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// For measures restricted to the open window (a, b) with 0 < a < b:
// checks that the difference of log integrals over (a, b) is bounded by
// 2 (|log a| + |log b|) times the sup over x in (a, b) of the
// mass difference |mu((a, x)) - nu((a, x))|. Open intervals on both
// sides; the bound then holds for every pair of atomic measures.
WindowBoundCheck log_window_bound_check(const EmpiricalMeasure& mu,
                                        const EmpiricalMeasure& nu, double a,
                                        double b);

// sup over r in {0.01, 0.02, ..., 1.50} of the gap between the fraction
// of eigenvalues with |lambda| <= r and the uniform disk law min(r^2, 1).
double disk_law_distance(std::span<const std::complex<double>> eigs);

// Mean of lambda / |lambda| over nonzero eigenvalues. A diagnostic of
// angular uniformity; near zero for isotropic spectra.
std::complex<double> angular_phase_mean(
    std::span<const std::complex<double>> eigs);

// log|z| outside the unit disk, (|z|^2 - 1)/2 inside. The logarithmic
// potential of the uniform measure on the unit disk, negated.
double uniform_disk_log_potential(std::complex<double> z);

// |log potential(sigma_x) - log potential(sigma_g)| for two singular
// value lists of equal length.
double replacement_gap(std::span<const double> sigma_x,
                       std::span<const double> sigma_g);

// A lower bound on the smallest singular value, reported in log form.
// `value` is engaged only when exp(log_floor) is a normal double.
struct SingularValueFloor {
  double log_floor = 0.0;
  std::optional<double> value;
};

// (3b)^{-25 n / b} for the block band ensemble.
SingularValueFloor block_band_smin_floor(int n, int b);

// n^{-25 m} for the product linearization of m factors of size n.
SingularValueFloor product_smin_floor(int n, int m);

struct HadamardFloorParams {
  double sigma_star = 0.0; // largest entry standard deviation
  double sigma = 0.0;      // largest row or column L2 norm of the profile
  double r = 0.0;          // radius parameter, > 0
  double kappa = 0.0;      // exponent parameter, in (0, 1/2)
  int n = 0;
  double z_abs = 0.0;      // |z| of the shift
};

// |z| exp(-R^2 n^{3 kappa} (sqrt(n) sigma_star / sigma)^2) in log form.
// Requires |z| > max(sigma_star n^{2 kappa}, sigma / R); violation raises
// SpecError naming the inequality.
SingularValueFloor hadamard_smin_floor(const HadamardFloorParams& params);

// Sup-norm delocalization scale b^{-1/10} n^c for Gaussian atoms and
// b^{-1/16} n^c otherwise, where b is the profile band parameter.
double delocalization_threshold(double b, int n, double c, bool gaussian);

// Default truncation threshold for the split log potential:
// b^{-1/5} n^c on the Gaussian path, b^{-1/8} n^c otherwise, with
// c = 0.05.
double default_truncation_split(double b, int n, bool gaussian);

}  // namespace bandlab
