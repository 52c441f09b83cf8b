// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bandlab/errors.hpp"
#include "lapack.hpp"

namespace bandlab {

namespace {

void require_upper_half(std::complex<double> eta, const char* op) {
  if (!(eta.imag() > 0.0)) {
    throw SpecError(std::string(op) + " requires Im eta > 0");
  }
}

void sort_complex(Eigen::VectorXcd& v) {
  std::sort(v.begin(), v.end(), [](std::complex<double> x,
                                   std::complex<double> y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace

std::vector<double> singular_values(const Eigen::MatrixXcd& m) {
  return detail::svd_values(m);
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::VectorXcd w = detail::general_eigenvalues(m);
  sort_complex(w);
  return w;
}

HermitianEigenSystem hermitian_spectrum(const DilationMatrix& y,
                                        bool want_vectors) {
  auto r = detail::hermitian_eigen(y.values, want_vectors);
  return HermitianEigenSystem{std::move(r.values), std::move(r.vectors)};
}

std::complex<double> stieltjes_from_spectrum(std::span<const double> eigs,
                                             std::complex<double> eta) {
  require_upper_half(eta, "stieltjes_from_spectrum");
  if (eigs.empty()) {
    throw SpecError("stieltjes_from_spectrum requires a nonempty spectrum");
  }
  std::complex<double> acc{0.0, 0.0};
  for (double lambda : eigs) acc += 1.0 / (lambda - eta);
  return acc / static_cast<double>(eigs.size());
}

std::complex<double> stieltjes_from_singular_values(
    std::span<const double> sigma, std::complex<double> eta) {
  require_upper_half(eta, "stieltjes_from_singular_values");
  if (sigma.empty()) {
    throw SpecError(
        "stieltjes_from_singular_values requires a nonempty list");
  }
  std::complex<double> acc{0.0, 0.0};
  for (double s : sigma) acc += 1.0 / (s - eta) + 1.0 / (-s - eta);
  return acc / (2.0 * static_cast<double>(sigma.size()));
}

std::complex<double> empirical_stieltjes(const DilationMatrix& y,
                                         std::complex<double> eta) {
  require_upper_half(eta, "empirical_stieltjes");
  const auto sys = hermitian_spectrum(y, false);
  return stieltjes_from_spectrum(
      std::span<const double>(sys.eigenvalues.data(),
                              static_cast<std::size_t>(sys.eigenvalues.size())),
      eta);
}

std::vector<std::complex<double>> green_diagonal(const Eigen::MatrixXcd& h,
                                                 std::complex<double> eta) {
  require_upper_half(eta, "green_diagonal");
  if (h.rows() != h.cols()) {
    throw SpecError("green_diagonal requires a square matrix");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw SpecError("green_diagonal requires a Hermitian matrix");
  }
  const auto sys = detail::hermitian_eigen(h, true);
  const Eigen::Index n = h.rows();
  std::vector<std::complex<double>> diag(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += std::norm(sys.vectors(k, j)) / (sys.values(j) - eta);
    }
    diag[static_cast<std::size_t>(k)] = acc;
  }
  return diag;
}

std::vector<std::complex<double>> green_diagonal(const DilationMatrix& y,
                                                 std::complex<double> eta) {
  return green_diagonal(y.values, eta);
}

InfnormResult eigenvector_max_infnorm(const Eigen::MatrixXcd& m) {
  auto sys = detail::general_eigensystem(m);
  const Eigen::Index n = sys.values.size();
  if (n == 0) throw SpecError("eigenvector_max_infnorm: empty matrix");

  InfnormResult out;
  out.value = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm2 = sys.right_vectors.col(j).norm();
    const double peak = sys.right_vectors.col(j).cwiseAbs().maxCoeff();
    out.value = std::max(out.value, peak / norm2);
  }

  // Nearly coinciding eigenvalues make the basis ill-conditioned; flag,
  // do not fail.
  double min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      min_gap = std::min(min_gap, std::abs(sys.values(i) - sys.values(j)));
    }
  }
  out.min_gap = n > 1 ? min_gap : std::numeric_limits<double>::infinity();
  out.degenerate = n > 1 && min_gap < 1e-10;
  return out;
}

long interval_count(std::span<const double> eigs, double a, double b) {
  if (!(a <= b)) {
    throw SpecError("interval_count requires a <= b");
  }
  long count = 0;
  for (double x : eigs) {
    if (x >= a && x <= b) ++count;
  }
  return count;
}

SpectralSample make_spectral_sample(const SampledMatrix& sample,
                                    std::complex<double> z,
                                    bool want_infnorms) {
  SpectralSample out;
  out.ensemble_kind = sample.spec.kind_name();
  out.seed = sample.seed;
  out.trial = sample.trial;
  out.shift_z = z;
  out.singular_values = singular_values(shift(sample.values, z));

  if (want_infnorms) {
    auto sys = detail::general_eigensystem(sample.values);
    const Eigen::Index n = sys.values.size();
    std::vector<std::pair<std::complex<double>, double>> rows(
        static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      const double norm2 = sys.right_vectors.col(j).norm();
      rows[static_cast<std::size_t>(j)] = {
          sys.values(j), sys.right_vectors.col(j).cwiseAbs().maxCoeff() / norm2};
    }
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
      if (x.first.real() != y.first.real())
        return x.first.real() < y.first.real();
      return x.first.imag() < y.first.imag();
    });
    out.eigenvalues.resize(n);
    std::vector<double> infs(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      out.eigenvalues(j) = rows[static_cast<std::size_t>(j)].first;
      infs[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(j)].second;
    }
    out.eigenvector_infnorms = std::move(infs);
    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        min_gap = std::min(min_gap, std::abs(sys.values(i) - sys.values(j)));
      }
    }
    out.degenerate_eigenbasis = n > 1 && min_gap < 1e-10;
  } else {
    out.eigenvalues = eigenvalues(sample.values);
  }
  return out;
}

}  // namespace bandlab
