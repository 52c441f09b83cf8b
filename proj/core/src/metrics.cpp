// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bandlab/errors.hpp"

namespace bandlab {

namespace {

constexpr double kLogClamp = 1e-300;

// Neumaier compensated sum; keeps the weight-sum check meaningful for
// large measures.
double stable_sum(std::span<const double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

struct Atom {
  double point;
  double weight;
  int source;  // 0 = mu, 1 = nu
};

// Merged atoms of both measures sorted by position.
std::vector<Atom> merged_atoms(const EmpiricalMeasure& mu,
                               const EmpiricalMeasure& nu) {
  std::vector<Atom> atoms;
  atoms.reserve(mu.size() + nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    atoms.push_back({mu.points()[i], mu.weights()[i], 0});
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    atoms.push_back({nu.points()[i], nu.weights()[i], 1});
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.point < y.point; });
  return atoms;
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> points,
                                   std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty() || points_.size() != weights_.size()) {
    throw SpecError("empirical measure needs matching nonempty point and "
                    "weight lists");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw SpecError("empirical measure weights must be positive and finite");
    }
  }
  for (double p : points_) {
    if (!std::isfinite(p)) {
      throw SpecError("empirical measure points must be finite");
    }
  }
  if (std::abs(stable_sum(weights_) - 1.0) > 1e-12) {
    throw SpecError("empirical measure weights must sum to one");
  }
  // Sort atoms by position, keeping point-weight pairing.
  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return points_[i] < points_[j];
  });
  std::vector<double> p2(points_.size()), w2(points_.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    p2[k] = points_[order[k]];
    w2[k] = weights_[order[k]];
  }
  points_ = std::move(p2);
  weights_ = std::move(w2);
}

EmpiricalMeasure EmpiricalMeasure::uniform_on(std::vector<double> points) {
  if (points.empty()) {
    throw SpecError("empirical measure needs at least one point");
  }
  const std::size_t count = points.size();
  const double w = 1.0 / static_cast<double>(count);
  return EmpiricalMeasure(std::move(points), std::vector<double>(count, w));
}

EmpiricalMeasure squared_singular_value_measure(
    std::span<const double> sigma) {
  std::vector<double> pts(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) pts[i] = sigma[i] * sigma[i];
  return EmpiricalMeasure::uniform_on(std::move(pts));
}

double kolmogorov_distance(const EmpiricalMeasure& mu,
                           const EmpiricalMeasure& nu) {
  for (double p : mu.points()) {
    if (p < 0.0) throw SpecError("kolmogorov_distance: negative support");
  }
  for (double p : nu.points()) {
    if (p < 0.0) throw SpecError("kolmogorov_distance: negative support");
  }
  const auto atoms = merged_atoms(mu, nu);
  // The CDF difference is constant between jump points, so the sup is
  // attained just after some jump (or is zero before the first one).
  // Atoms sharing a position must all land before the comparison.
  double fm = 0.0, fn = 0.0, sup = 0.0;
  std::size_t i = 0;
  while (i < atoms.size()) {
    const double x = atoms[i].point;
    while (i < atoms.size() && atoms[i].point == x) {
      (atoms[i].source == 0 ? fm : fn) += atoms[i].weight;
      ++i;
    }
    sup = std::max(sup, std::abs(fm - fn));
  }
  return sup;
}

double log_potential(std::span<const double> sigma) {
  if (sigma.empty()) {
    throw SpecError("log_potential requires a nonempty list");
  }
  double acc = 0.0;
  for (double s : sigma) {
    if (s == 0.0) {
      throw SingularSampleError(
          "log_potential: sample has an exactly zero singular value");
    }
    if (s < 0.0 || !std::isfinite(s)) {
      throw SpecError("log_potential: singular values must be finite and "
                      "nonnegative");
    }
    acc += std::log(std::max(s, kLogClamp));
  }
  return acc / static_cast<double>(sigma.size());
}

LogSplit truncated_log_split(std::span<const double> sigma, double threshold) {
  if (sigma.empty()) {
    throw SpecError("truncated_log_split requires a nonempty list");
  }
  if (!(threshold >= 0.0)) {
    throw SpecError("truncated_log_split requires threshold >= 0");
  }
  double head = 0.0, tail = 0.0;
  long tail_count = 0;
  for (double s : sigma) {
    if (s == 0.0) {
      throw SingularSampleError(
          "truncated_log_split: sample has an exactly zero singular value");
    }
    if (s < 0.0 || !std::isfinite(s)) {
      throw SpecError("truncated_log_split: singular values must be finite "
                      "and nonnegative");
    }
    const double v = std::log(std::max(s, kLogClamp));
    if (s > threshold) {
      head += v;
    } else {
      tail += v;
      ++tail_count;
    }
  }
  const double n = static_cast<double>(sigma.size());
  return LogSplit{head / n, tail / n, tail_count};
}

WindowBoundCheck log_window_bound_check(const EmpiricalMeasure& mu,
                                        const EmpiricalMeasure& nu, double a,
                                        double b) {
  if (!(0.0 < a && a < b)) {
    throw SpecError("log_window_bound_check requires 0 < a < b");
  }
  // Everything is restricted to the open window (a, b): the integrals,
  // and the partial masses mu((a, x)). With closed endpoints an atom
  // sitting exactly at b could contribute log b to one side while the
  // mass difference never sees it; open intervals on both sides make the
  // bound an identity-level consequence of summation by parts.
  double im = 0.0, in = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double p = mu.points()[i];
    if (p > a && p < b) im += mu.weights()[i] * std::log(p);
  }
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double p = nu.points()[i];
    if (p > a && p < b) in += nu.weights()[i] * std::log(p);
  }

  const auto atoms = merged_atoms(mu, nu);
  double fm = 0.0, fn = 0.0, sup = 0.0;
  std::size_t i = 0;
  while (i < atoms.size()) {
    const double x = atoms[i].point;
    while (i < atoms.size() && atoms[i].point == x) {
      if (x > a && x < b) {
        (atoms[i].source == 0 ? fm : fn) += atoms[i].weight;
      }
      ++i;
    }
    sup = std::max(sup, std::abs(fm - fn));
  }

  WindowBoundCheck out;
  out.lhs = std::abs(im - in);
  out.rhs = 2.0 * (std::abs(std::log(a)) + std::abs(std::log(b))) * sup;
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

double disk_law_distance(std::span<const std::complex<double>> eigs) {
  if (eigs.empty()) {
    throw SpecError("disk_law_distance requires a nonempty spectrum");
  }
  std::vector<double> moduli(eigs.size());
  for (std::size_t i = 0; i < eigs.size(); ++i) moduli[i] = std::abs(eigs[i]);
  std::sort(moduli.begin(), moduli.end());
  const double n = static_cast<double>(moduli.size());
  double sup = 0.0;
  for (int k = 1; k <= 150; ++k) {
    const double r = static_cast<double>(k) / 100.0;
    const auto it = std::upper_bound(moduli.begin(), moduli.end(), r);
    const double frac = static_cast<double>(it - moduli.begin()) / n;
    const double law = std::min(r * r, 1.0);
    sup = std::max(sup, std::abs(frac - law));
  }
  return sup;
}

std::complex<double> angular_phase_mean(
    std::span<const std::complex<double>> eigs) {
  std::complex<double> acc{0.0, 0.0};
  long count = 0;
  for (auto v : eigs) {
    const double r = std::abs(v);
    if (r > 0.0) {
      acc += v / r;
      ++count;
    }
  }
  if (count == 0) return {0.0, 0.0};
  return acc / static_cast<double>(count);
}

double uniform_disk_log_potential(std::complex<double> z) {
  const double r = std::abs(z);
  if (r > 1.0) return std::log(r);
  return 0.5 * (r * r - 1.0);
}

double replacement_gap(std::span<const double> sigma_x,
                       std::span<const double> sigma_g) {
  if (sigma_x.size() != sigma_g.size()) {
    throw SpecError("replacement_gap requires lists of equal length");
  }
  return std::abs(log_potential(sigma_x) - log_potential(sigma_g));
}

namespace {

SingularValueFloor floor_from_log(double log_floor) {
  SingularValueFloor out;
  out.log_floor = log_floor;
  const double v = std::exp(log_floor);
  if (std::isnormal(v)) out.value = v;
  return out;
}

}  // namespace

SingularValueFloor block_band_smin_floor(int n, int b) {
  if (n < 1 || b < 1 || n % b != 0) {
    throw SpecError("block_band_smin_floor requires b >= 1 dividing n");
  }
  const double nb = static_cast<double>(n) / b;
  return floor_from_log(-25.0 * nb * std::log(3.0 * b));
}

SingularValueFloor product_smin_floor(int n, int m) {
  if (n < 1 || m < 1) {
    throw SpecError("product_smin_floor requires n >= 1 and m >= 1");
  }
  return floor_from_log(-25.0 * m * std::log(static_cast<double>(n)));
}

SingularValueFloor hadamard_smin_floor(const HadamardFloorParams& params) {
  if (params.n < 1 || !(params.sigma_star > 0.0) || !(params.sigma > 0.0) ||
      !(params.r > 0.0)) {
    throw SpecError("hadamard_smin_floor requires positive sigma_star, "
                    "sigma, r and n >= 1");
  }
  if (!(params.kappa > 0.0) || !(params.kappa < 0.5)) {
    throw SpecError("hadamard_smin_floor requires kappa in (0, 1/2)");
  }
  const double n = static_cast<double>(params.n);
  const double lower =
      std::max(params.sigma_star * std::pow(n, 2.0 * params.kappa),
               params.sigma / params.r);
  if (!(params.z_abs > lower)) {
    throw SpecError(
        "hadamard_smin_floor requires |z| > max(sigma_star n^{2 kappa}, "
        "sigma / R); got |z| = " +
        std::to_string(params.z_abs) + " <= " + std::to_string(lower));
  }
  const double ratio = std::sqrt(n) * params.sigma_star / params.sigma;
  const double log_floor = std::log(params.z_abs) -
                           params.r * params.r *
                               std::pow(n, 3.0 * params.kappa) * ratio * ratio;
  return floor_from_log(log_floor);
}

double delocalization_threshold(double b, int n, double c, bool gaussian) {
  if (!(b > 0.0) || n < 1) {
    throw SpecError("delocalization_threshold requires b > 0 and n >= 1");
  }
  const double expo = gaussian ? -0.1 : -0.0625;
  return std::pow(b, expo) * std::pow(static_cast<double>(n), c);
}

double default_truncation_split(double b, int n, bool gaussian) {
  if (!(b > 0.0) || n < 1) {
    throw SpecError("default_truncation_split requires b > 0 and n >= 1");
  }
  const double expo = gaussian ? -0.2 : -0.125;
  return std::pow(b, expo) * std::pow(static_cast<double>(n), 0.05);
}

}  // namespace bandlab
