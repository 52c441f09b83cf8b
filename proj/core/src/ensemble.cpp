// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/ensemble.hpp"

#include <cmath>
#include <string>

#include "bandlab/errors.hpp"

namespace bandlab {

namespace {

// Cyclic distance on Z/nZ.
int circ_dist(int i, int j, int n) {
  int d = i - j;
  if (d < 0) d = -d;
  return std::min(d, n - d);
}

struct DimensionVisitor {
  int operator()(const BlockBandParams& p) const { return p.n; }
  int operator()(const PeriodicBandParams& p) const { return p.n; }
  int operator()(const IidParams& p) const { return p.n; }
  int operator()(const GeneralProfileParams& p) const {
    return static_cast<int>(p.entries.rows());
  }
  int operator()(const ProductLinearizationParams& p) const {
    return p.n * p.m;
  }
};

struct NameVisitor {
  std::string operator()(const BlockBandParams&) const { return "block-band"; }
  std::string operator()(const PeriodicBandParams&) const {
    return "periodic-band";
  }
  std::string operator()(const IidParams&) const { return "iid-gaussian"; }
  std::string operator()(const GeneralProfileParams&) const {
    return "general-profile";
  }
  std::string operator()(const ProductLinearizationParams&) const {
    return "product-linearization";
  }
};

struct ValidateVisitor {
  void operator()(const BlockBandParams& p) const {
    if (p.n < 1) throw SpecError("block-band: n must be >= 1");
    if (p.b < 1) throw SpecError("block-band: block size b must be >= 1");
    if (p.n % p.b != 0) {
      throw SpecError("block-band: b must divide n (got n=" +
                      std::to_string(p.n) + ", b=" + std::to_string(p.b) +
                      ")");
    }
    // With m < 3 block columns the cyclic neighbour blocks coincide with
    // the diagonal one and row sums of the squared profile exceed one.
    if (p.n / p.b < 3) {
      throw SpecError(
          "block-band: need at least 3 blocks per row (n/b >= 3), got n/b=" +
          std::to_string(p.n / p.b));
    }
  }
  void operator()(const PeriodicBandParams& p) const {
    if (p.n < 1) throw SpecError("periodic-band: n must be >= 1");
    if (p.d < 1 || p.d > p.n) {
      throw SpecError("periodic-band: width d must satisfy 1 <= d <= n");
    }
    if (p.d % 2 == 0) {
      throw SpecError("periodic-band: width d must be odd, got d=" +
                      std::to_string(p.d));
    }
  }
  void operator()(const IidParams& p) const {
    if (p.n < 1) throw SpecError("iid-gaussian: n must be >= 1");
  }
  void operator()(const GeneralProfileParams& p) const {
    if (p.entries.rows() < 1 || p.entries.rows() != p.entries.cols()) {
      throw SpecError("general-profile: entries must form a nonempty square "
                      "table");
    }
    const int n = static_cast<int>(p.entries.rows());
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double v = p.entries(i, j);
        if (!std::isfinite(v) || v < 0.0) {
          throw SpecError("general-profile: entries must be finite and "
                          "nonnegative");
        }
      }
    }
    VarianceProfile profile{p.entries};
    const auto report = check_doubly_stochastic(profile, 1e-12);
    if (!report.pass) {
      throw SpecError(
          "general-profile: squared entries are not doubly stochastic "
          "(row " +
          std::to_string(report.worst_row) + " deviates by " +
          std::to_string(report.max_row_deviation) + ", col " +
          std::to_string(report.worst_col) + " by " +
          std::to_string(report.max_col_deviation) + ")");
    }
  }
  void operator()(const ProductLinearizationParams& p) const {
    if (p.n < 1) throw SpecError("product-linearization: n must be >= 1");
    if (p.m < 1) {
      throw SpecError("product-linearization: factor count m must be >= 1");
    }
  }
};

}  // namespace

int EnsembleSpec::dimension() const {
  return std::visit(DimensionVisitor{}, kind);
}

std::string EnsembleSpec::kind_name() const {
  return std::visit(NameVisitor{}, kind);
}

void EnsembleSpec::validate() const {
  std::visit(ValidateVisitor{}, kind);
  if (atom.subgaussian_k <= 0.0) {
    throw SpecError("atom: subgaussian constant must be positive");
  }
  if (atom.density_bound && *atom.density_bound <= 0.0) {
    throw SpecError("atom: density bound must be positive when present");
  }
  if (atom.truncation_threshold && *atom.truncation_threshold <= 0.0) {
    throw SpecError("atom: truncation threshold must be positive");
  }
}

double VarianceProfile::band_parameter() const {
  const double peak = entries.maxCoeff();
  if (peak <= 0.0) {
    throw SpecError("variance profile has no positive entries");
  }
  return 1.0 / (peak * peak);
}

VarianceProfile build_variance_profile(const EnsembleSpec& spec) {
  spec.validate();
  const int dim = spec.dimension();
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(dim, dim);

  if (const auto* p = std::get_if<BlockBandParams>(&spec.kind)) {
    const int m = p->n / p->b;
    const double v = 1.0 / std::sqrt(3.0 * p->b);
    for (int i = 0; i < p->n; ++i) {
      for (int j = 0; j < p->n; ++j) {
        const int br = i / p->b, bc = j / p->b;
        const int diff = ((bc - br) % m + m) % m;
        if (diff == 0 || diff == 1 || diff == m - 1) entries(i, j) = v;
      }
    }
  } else if (const auto* p = std::get_if<PeriodicBandParams>(&spec.kind)) {
    const int w = (p->d - 1) / 2;
    const double v = 1.0 / std::sqrt(static_cast<double>(p->d));
    for (int i = 0; i < p->n; ++i) {
      for (int j = 0; j < p->n; ++j) {
        if (circ_dist(i, j, p->n) <= w) entries(i, j) = v;
      }
    }
  } else if (const auto* p = std::get_if<IidParams>(&spec.kind)) {
    entries.setConstant(1.0 / std::sqrt(static_cast<double>(p->n)));
  } else if (const auto* p = std::get_if<GeneralProfileParams>(&spec.kind)) {
    entries = p->entries;
  } else if (const auto* p =
                 std::get_if<ProductLinearizationParams>(&spec.kind)) {
    const double v = 1.0 / std::sqrt(static_cast<double>(p->n));
    if (p->m == 1) {
      entries.setConstant(v);
    } else {
      for (int r = 0; r + 1 < p->m; ++r) {
        entries.block(r * p->n, (r + 1) * p->n, p->n, p->n).setConstant(v);
      }
      entries.block((p->m - 1) * p->n, 0, p->n, p->n).setConstant(v);
    }
  }

  return VarianceProfile{std::move(entries)};
}

DoublyStochasticReport check_doubly_stochastic(const VarianceProfile& profile,
                                               double tol) {
  DoublyStochasticReport report;
  const auto& e = profile.entries;
  const Eigen::MatrixXd sq = e.array().square().matrix();
  const Eigen::VectorXd row_sums = sq.rowwise().sum();
  const Eigen::VectorXd col_sums = sq.colwise().sum();
  for (int i = 0; i < row_sums.size(); ++i) {
    const double dev = std::abs(row_sums(i) - 1.0);
    if (dev > report.max_row_deviation) {
      report.max_row_deviation = dev;
      report.worst_row = i;
    }
  }
  for (int j = 0; j < col_sums.size(); ++j) {
    const double dev = std::abs(col_sums(j) - 1.0);
    if (dev > report.max_col_deviation) {
      report.max_col_deviation = dev;
      report.worst_col = j;
    }
  }
  report.pass = report.max_row_deviation <= tol &&
                report.max_col_deviation <= tol;
  return report;
}

Eigen::MatrixXd random_doubly_stochastic_profile(int n, std::uint64_t seed) {
  if (n < 1) throw SpecError("profile size must be >= 1");
  CounterRng rng(seed, 0x53494e4bull);  // stream tag for Sinkhorn tables
  Eigen::MatrixXd v(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      v(i, j) = 0.5 + rng.uniform(static_cast<std::uint64_t>(i) * n + j);
    }
  }
  // Sinkhorn balancing on the squared-entry table.
  for (int sweep = 0; sweep < 1000; ++sweep) {
    const Eigen::VectorXd rs = v.rowwise().sum();
    v = rs.cwiseInverse().asDiagonal() * v;
    const Eigen::VectorXd cs = v.colwise().sum();
    v = v * cs.cwiseInverse().asDiagonal();
    const Eigen::VectorXd rs2 = v.rowwise().sum();
    const double worst = (rs2.array() - 1.0).abs().maxCoeff();
    if (worst < 1e-14) break;
  }
  return v.array().sqrt().matrix();
}

SampledMatrix sample_matrix(const EnsembleSpec& spec, std::uint64_t seed,
                            std::uint64_t trial) {
  const VarianceProfile profile = build_variance_profile(spec);
  const int dim = profile.dimension();
  const CounterRng rng(seed, trial);

  Eigen::MatrixXcd values = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      const double b = profile.entries(i, j);
      if (b == 0.0) continue;
      // Draw index keyed by position, not by visit order.
      const std::uint64_t k =
          static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(dim) + j;
      values(i, j) = b * sample_atom(spec.atom, rng, k);
    }
  }
  return SampledMatrix{std::move(values), spec, seed, trial};
}

}  // namespace bandlab
