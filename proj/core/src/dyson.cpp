// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bandlab/errors.hpp"

namespace bandlab {

namespace {

void require_upper_half(std::complex<double> eta, const char* op) {
  if (!(eta.imag() > 0.0)) {
    throw SpecError(std::string(op) + " requires Im eta > 0");
  }
}

// Residual of the scalar system at (a, b). The fixed point of the
// iteration below satisfies both equations exactly, so this measures
// distance to the solution rather than step size. The off-diagonal
// entries multiply to (conj(z)/z) b^2, not |b|^2: the resolvent at
// complex eta is not Hermitian, and the two forms agree only where
// (eta + a)^2 - |z|^2 is real.
double system_residual(std::complex<double> a, std::complex<double> b,
                       std::complex<double> z, std::complex<double> eta) {
  const std::complex<double> pair =
      z == 0.0 ? std::complex<double>{0.0, 0.0} : (std::conj(z) / z) * b * b;
  const std::complex<double> delta = a * a - pair;
  const double r1 = std::abs(a + a / delta + eta);
  const double r2 = std::abs(b - z * delta);
  return std::max(r1, r2);
}

}  // namespace

FreeStieltjesSolution solve_free_stieltjes(std::complex<double> z,
                                           std::complex<double> eta,
                                           const DysonOptions& options) {
  require_upper_half(eta, "solve_free_stieltjes");
  if (!(options.tol > 0.0)) {
    throw SpecError("solve_free_stieltjes requires tol > 0");
  }
  if (options.max_iterations < 1) {
    throw SpecError("solve_free_stieltjes requires max_iterations >= 1");
  }
  if (!(options.damping > 0.0) || options.damping > 1.0) {
    throw SpecError("solve_free_stieltjes requires damping in (0, 1]");
  }

  // The 2x2 self-consistency G = -(eta + Z + S(G))^{-1} with
  // G = [[a, b], [bt, a]], bt = (conj(z)/z) b, and
  // Z = [[0, z], [conj(z), 0]] closes over the pair (a, b):
  //
  //   det    = (eta + a)^2 - |z|^2
  //   a_next = -(eta + a) / det
  //   b_next =  z / det
  //
  // The off-diagonal of the self-energy vanishes for doubly stochastic
  // profiles, which is what makes the diagonal scalar. Damping by 1/2
  // halves the near -1 multiplier the undamped map has in the bulk.
  const double norm_z = std::norm(z);
  std::complex<double> a{0.0, 1.0};
  std::complex<double> b{0.0, 0.0};

  double residual = system_residual(a, b, z, eta);
  int iter = 0;
  for (; iter < options.max_iterations && residual > options.tol; ++iter) {
    const std::complex<double> w = eta + a;
    const std::complex<double> det = w * w - norm_z;
    if (std::abs(det) < 1e-300 || !std::isfinite(std::abs(det))) {
      throw SolveError("solve_free_stieltjes: iteration left the domain",
                       residual);
    }
    const std::complex<double> a_next = -w / det;
    const std::complex<double> b_next = z / det;
    a += options.damping * (a_next - a);
    b += options.damping * (b_next - b);
    // Stay on the Im a > 0 branch.
    if (a.imag() <= 0.0) a = {a.real(), 1e-12};
    residual = system_residual(a, b, z, eta);
    if (!std::isfinite(residual)) {
      throw SolveError("solve_free_stieltjes: residual is not finite",
                       residual);
    }
  }
  if (residual > options.tol) {
    throw SolveError(
        "solve_free_stieltjes did not converge within " +
            std::to_string(options.max_iterations) + " iterations",
        residual);
  }

  FreeStieltjesSolution sol;
  sol.a = a;
  sol.b = b;
  sol.c = a;          // forced by the symmetric system
  sol.m = a;          // (a + c) / 2
  sol.z = z;
  sol.eta = eta;
  sol.iterations = iter;
  sol.residual = residual;
  return sol;
}

std::complex<double> semicircle_reference(std::complex<double> eta) {
  require_upper_half(eta, "semicircle_reference");
  const std::complex<double> root = std::sqrt(eta * eta - 4.0);
  std::complex<double> m = 0.5 * (-eta + root);
  if (m.imag() <= 0.0) m = 0.5 * (-eta - root);
  return m;
}

FreeMeasureCdf::FreeMeasureCdf(std::complex<double> z, double tau,
                               int grid_points)
    : z_(z), tau_(tau) {
  if (!(tau > 0.0)) throw SpecError("FreeMeasureCdf requires tau > 0");
  if (grid_points < 2) {
    throw SpecError("FreeMeasureCdf requires at least 2 grid points");
  }
  const double half_width = 3.0 + std::abs(z);
  grid_.resize(static_cast<std::size_t>(grid_points));
  cdf_.resize(static_cast<std::size_t>(grid_points));
  const double step = 2.0 * half_width / (grid_points - 1);
  for (int k = 0; k < grid_points; ++k) {
    grid_[static_cast<std::size_t>(k)] = -half_width + step * k;
  }

  constexpr double kInvPi = 0.3183098861837907;
  std::vector<double> density(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const auto sol = solve_free_stieltjes(z, {grid_[k], tau});
    density[k] = kInvPi * sol.m.imag();
  }
  double acc = 0.0;
  cdf_[0] = 0.0;
  for (std::size_t k = 1; k < grid_.size(); ++k) {
    acc += 0.5 * (density[k - 1] + density[k]) * step;
    cdf_[k] = std::min(acc, 1.0);
  }
}

double FreeMeasureCdf::evaluate(double x) const {
  if (x <= grid_.front()) return 0.0;
  if (x >= grid_.back()) return cdf_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
  return cdf_[lo] + t * (cdf_[hi] - cdf_[lo]);
}

double free_measure_cdf(std::complex<double> z, double x, double tau) {
  return FreeMeasureCdf(z, tau).evaluate(x);
}

}  // namespace bandlab
