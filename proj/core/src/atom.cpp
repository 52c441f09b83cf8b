// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/atom.hpp"

#include <cmath>

#include "bandlab/errors.hpp"

namespace bandlab {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2 = 0.7071067811865476;
}  // namespace

const char* atom_family_name(AtomFamily family) {
  switch (family) {
    case AtomFamily::kRealGaussian: return "real-gaussian";
    case AtomFamily::kComplexGaussian: return "complex-gaussian";
    case AtomFamily::kRademacher: return "rademacher";
    case AtomFamily::kUniformSymmetric: return "uniform-symmetric";
    case AtomFamily::kBernoulliSymmetric: return "bernoulli-symmetric";
  }
  throw SpecError("unknown atom family enumerator");
}

AtomFamily atom_family_from_name(const std::string& name) {
  if (name == "real-gaussian") return AtomFamily::kRealGaussian;
  if (name == "complex-gaussian") return AtomFamily::kComplexGaussian;
  if (name == "rademacher") return AtomFamily::kRademacher;
  if (name == "uniform-symmetric") return AtomFamily::kUniformSymmetric;
  if (name == "bernoulli-symmetric") return AtomFamily::kBernoulliSymmetric;
  throw SpecError("unknown atom family name: " + name);
}

AtomSpec AtomSpec::make(AtomFamily family) {
  AtomSpec spec;
  spec.family = family;
  // Each K satisfies E exp(|xi|^2 / K^2) <= 2 for its family.
  switch (family) {
    case AtomFamily::kRealGaussian:
      spec.subgaussian_k = 2.1;
      spec.density_bound = 0.3989422804014327;  // 1/sqrt(2 pi)
      break;
    case AtomFamily::kComplexGaussian:
      spec.subgaussian_k = 2.1;
      spec.density_bound = 0.5641895835477563;  // peak of N(0, 1/2)
      break;
    case AtomFamily::kRademacher:
      spec.subgaussian_k = 2.1;
      spec.density_bound.reset();
      break;
    case AtomFamily::kUniformSymmetric:
      spec.subgaussian_k = 2.1;
      spec.density_bound = 0.2886751345948129;  // 1/(2 sqrt(3))
      break;
    case AtomFamily::kBernoulliSymmetric:
      spec.subgaussian_k = 2.1;
      spec.density_bound.reset();
      break;
  }
  return spec;
}

AtomSpec truncate_atom(const AtomSpec& spec, double threshold) {
  if (!(threshold > 0.0)) {
    throw SpecError("truncation threshold must be positive");
  }
  AtomSpec out = spec;
  // Composing truncations keeps the tighter threshold.
  out.truncation_threshold =
      spec.truncation_threshold
          ? std::min(*spec.truncation_threshold, threshold)
          : threshold;
  return out;
}

std::complex<double> sample_atom(const AtomSpec& spec, const CounterRng& rng,
                                 std::uint64_t draw_index) {
  std::complex<double> v;
  switch (spec.family) {
    case AtomFamily::kRealGaussian:
      v = rng.normal_pair(draw_index).first;
      break;
    case AtomFamily::kComplexGaussian: {
      auto [g1, g2] = rng.normal_pair(draw_index);
      v = {g1 * kInvSqrt2, g2 * kInvSqrt2};
      break;
    }
    case AtomFamily::kRademacher:
      v = (rng.word(2 * draw_index) & 1ull) ? 1.0 : -1.0;
      break;
    case AtomFamily::kUniformSymmetric:
      v = kSqrt3 * (2.0 * rng.uniform(2 * draw_index) - 1.0);
      break;
    case AtomFamily::kBernoulliSymmetric: {
      const double u = rng.uniform(2 * draw_index);
      v = u < 0.25 ? kSqrt2 : (u < 0.5 ? -kSqrt2 : 0.0);
      break;
    }
  }
  if (spec.truncation_threshold &&
      std::abs(v) > *spec.truncation_threshold) {
    v = 0.0;
  }
  return v;
}

}  // namespace bandlab
