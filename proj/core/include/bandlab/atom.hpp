// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include "bandlab/rng.hpp"

namespace bandlab {

// Entry distributions. All are centered with unit second moment
// (E|xi|^2 = 1) and subgaussian.
enum class AtomFamily {
  kRealGaussian,       // N(0, 1)
  kComplexGaussian,    // independent N(0, 1/2) real and imaginary parts
  kRademacher,         // +1 or -1 with probability 1/2 each
  kUniformSymmetric,   // uniform on [-sqrt(3), sqrt(3)]
  kBernoulliSymmetric, // +sqrt(2), -sqrt(2), 0 with prob 1/4, 1/4, 1/2
};

const char* atom_family_name(AtomFamily family);
AtomFamily atom_family_from_name(const std::string& name);

// Distribution of a single matrix entry before the variance profile is
// applied. subgaussian_k is a constant K with E exp(|xi|^2 / K^2) <= 2;
// density_bound is a sup bound on the density of each real part, absent
// for discrete families. Both are metadata carried for threshold
// formulas, they do not alter sampling. truncation_threshold D, when
// present, replaces any draw with |xi| > D by zero.
struct AtomSpec {
  AtomFamily family = AtomFamily::kRealGaussian;
  double subgaussian_k = 2.1;
  std::optional<double> density_bound;
  std::optional<double> truncation_threshold;

  // Family defaults for the metadata fields.
  static AtomSpec make(AtomFamily family);

  bool is_complex() const noexcept {
    return family == AtomFamily::kComplexGaussian;
  }
  bool is_gaussian() const noexcept {
    return family == AtomFamily::kRealGaussian ||
           family == AtomFamily::kComplexGaussian;
  }

  bool operator==(const AtomSpec&) const = default;
};

// Copy of `spec` truncated at `threshold`. Throws SpecError when the
// threshold is not positive. Truncation composes: the effective threshold
// is the minimum of the existing one and the new one.
AtomSpec truncate_atom(const AtomSpec& spec, double threshold);

// Draw number `draw_index` of the stream. Consumes the counter block
// [2*draw_index, 2*draw_index + 1], so draws are independent across
// indices and order of evaluation is irrelevant. Real families return a
// zero imaginary part.
std::complex<double> sample_atom(const AtomSpec& spec, const CounterRng& rng,
                                 std::uint64_t draw_index);

}  // namespace bandlab
