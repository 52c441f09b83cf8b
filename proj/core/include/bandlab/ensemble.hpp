// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <variant>

#include "bandlab/atom.hpp"

namespace bandlab {

// n x n matrix of m = n/b blocks of size b. A block row holds three
// nonzero blocks, the diagonal one and its two cyclic neighbours, each
// filled with entries of standard deviation 1/sqrt(3b). Requires b | n
// and m >= 3; with fewer than three block columns the neighbour blocks
// overlap and the profile cannot be doubly stochastic.
struct BlockBandParams {
  int n = 0;
  int b = 0;
  bool operator==(const BlockBandParams&) const = default;
};

// n x n circulant band of odd width d: entry (i, j) is live when the
// cyclic distance between i and j is at most (d - 1) / 2. Live entries
// have standard deviation 1/sqrt(d).
struct PeriodicBandParams {
  int n = 0;
  int d = 0;
  bool operator==(const PeriodicBandParams&) const = default;
};

// Dense i.i.d. profile, every entry 1/sqrt(n).
struct IidParams {
  int n = 0;
  bool operator==(const IidParams&) const = default;
};

// Explicit table of per-entry standard deviations b_ij >= 0 whose squares
// are doubly stochastic.
struct GeneralProfileParams {
  Eigen::MatrixXd entries;
  bool operator==(const GeneralProfileParams& o) const {
    return entries.rows() == o.entries.rows() &&
           entries.cols() == o.entries.cols() && entries == o.entries;
  }
};

// Block companion layout for a product of m independent n x n i.i.d.
// matrices: block (r, r+1) holds factor r+2 and block (m, 1) holds factor
// 1 (1-based), every live entry with standard deviation 1/sqrt(n). Raising
// the sampled matrix to the m-th power block-diagonalizes into cyclic
// products of the factors.
struct ProductLinearizationParams {
  int n = 0;
  int m = 0;
  bool operator==(const ProductLinearizationParams&) const = default;
};

struct EnsembleSpec {
  using Kind = std::variant<BlockBandParams, PeriodicBandParams, IidParams,
                            GeneralProfileParams, ProductLinearizationParams>;
  Kind kind = IidParams{1};
  AtomSpec atom = AtomSpec::make(AtomFamily::kRealGaussian);

  // Side length of the sampled matrix (n, or n*m for the product layout).
  int dimension() const;
  std::string kind_name() const;

  // Throws SpecError naming the violated constraint.
  void validate() const;

  bool operator==(const EnsembleSpec&) const = default;
};

// Table of per-entry standard deviations. Rows and columns of the squared
// entries sum to one.
struct VarianceProfile {
  Eigen::MatrixXd entries;

  int dimension() const { return static_cast<int>(entries.rows()); }

  // Effective bandwidth 1 / max_ij b_ij^2. Equals 3b for the block band,
  // d for the periodic band, and n for the dense profile.
  double band_parameter() const;
};

struct DoublyStochasticReport {
  double max_row_deviation = 0.0;
  double max_col_deviation = 0.0;
  int worst_row = 0;
  int worst_col = 0;
  bool pass = false;
};

// Builds the profile for a validated spec.
VarianceProfile build_variance_profile(const EnsembleSpec& spec);

// Checks |sum_j b_ij^2 - 1| and |sum_i b_ij^2 - 1| against `tol`.
DoublyStochasticReport check_doubly_stochastic(const VarianceProfile& profile,
                                               double tol = 1e-12);

// A random doubly stochastic variance table: squared entries start
// uniform on [0.5, 1.5] and are Sinkhorn-balanced to row and column sums
// one. Deterministic in `seed`. Useful as a general-profile input.
Eigen::MatrixXd random_doubly_stochastic_profile(int n, std::uint64_t seed);

struct SampledMatrix {
  Eigen::MatrixXcd values;
  EnsembleSpec spec;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

// Entry (i, j) is b_ij times an atom draw keyed by the entry's position,
// with the stream keyed by (seed, trial). Bit-reproducible: the same
// arguments give the same matrix on every run, machine, and thread count.
SampledMatrix sample_matrix(const EnsembleSpec& spec, std::uint64_t seed,
                            std::uint64_t trial);

}  // namespace bandlab
