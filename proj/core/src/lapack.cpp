// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lapack.hpp"

#include <complex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "bandlab/errors.hpp"

namespace bandlab::detail {

namespace {

[[noreturn]] void raise_info(const char* routine, lapack_int info) {
  throw bandlab::SolveError(std::string(routine) +
                                " failed with info=" + std::to_string(info),
                            static_cast<double>(info));
}

void require_square(const Eigen::MatrixXcd& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw bandlab::SpecError(std::string(op) + " requires a square matrix");
  }
}

}  // namespace

bool is_real(const Eigen::MatrixXcd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j).imag() != 0.0) return false;
    }
  }
  return true;
}

void require_finite(const Eigen::MatrixXcd& m, const char* op) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto v = m(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw bandlab::SolveError(std::string(op) +
                                  ": input has non-finite entries");
      }
    }
  }
}

std::vector<double> svd_values(const Eigen::MatrixXcd& m) {
  require_finite(m, "svd_values");
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  if (rows == 0 || cols == 0) return {};
  std::vector<double> s(static_cast<std::size_t>(std::min(rows, cols)));

  if (is_real(m)) {
    Eigen::MatrixXd a = m.real();
    const lapack_int info =
        LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows,
                       s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) raise_info("dgesdd", info);
  } else {
    Eigen::MatrixXcd a = m;
    const lapack_int info =
        LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows,
                       s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) raise_info("zgesdd", info);
  }
  return s;  // gesdd returns descending order
}

namespace {

// dgeev packs a conjugate pair into two real columns: the pair occupies
// columns (j, j+1) of VR as (re, im) with eigenvalues re +- i*im.
GeneralEigenSystem unpack_real_geev(const Eigen::VectorXd& wr,
                                    const Eigen::VectorXd& wi,
                                    const Eigen::MatrixXd* vr) {
  const Eigen::Index n = wr.size();
  GeneralEigenSystem out;
  out.values.resize(n);
  if (vr != nullptr) out.right_vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = {wr(j), wi(j)};
  }
  if (vr == nullptr) return out;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (wi(j) == 0.0) {
      out.right_vectors.col(j) = vr->col(j).cast<std::complex<double>>();
    } else if (wi(j) > 0.0) {
      out.right_vectors.col(j) =
          vr->col(j).cast<std::complex<double>>() +
          std::complex<double>(0.0, 1.0) *
              vr->col(j + 1).cast<std::complex<double>>();
      out.right_vectors.col(j + 1) =
          vr->col(j).cast<std::complex<double>>() -
          std::complex<double>(0.0, 1.0) *
              vr->col(j + 1).cast<std::complex<double>>();
      ++j;  // the partner column was just written
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXcd general_eigenvalues(const Eigen::MatrixXcd& m) {
  require_square(m, "general_eigenvalues");
  require_finite(m, "general_eigenvalues");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (n == 0) return {};

  if (is_real(m)) {
    Eigen::MatrixXd a = m.real();
    Eigen::VectorXd wr(n), wi(n);
    const lapack_int info =
        LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(),
                      wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0) raise_info("dgeev", info);
    return unpack_real_geev(wr, wi, nullptr).values;
  }
  Eigen::MatrixXcd a = m;
  Eigen::VectorXcd w(n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(),
                    nullptr, 1, nullptr, 1);
  if (info != 0) raise_info("zgeev", info);
  return w;
}

GeneralEigenSystem general_eigensystem(const Eigen::MatrixXcd& m) {
  require_square(m, "general_eigensystem");
  require_finite(m, "general_eigensystem");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (n == 0) return {};

  if (is_real(m)) {
    Eigen::MatrixXd a = m.real();
    Eigen::VectorXd wr(n), wi(n);
    Eigen::MatrixXd vr(n, n);
    const lapack_int info =
        LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, wr.data(),
                      wi.data(), nullptr, 1, vr.data(), n);
    if (info != 0) raise_info("dgeev", info);
    return unpack_real_geev(wr, wi, &vr);
  }
  Eigen::MatrixXcd a = m;
  Eigen::VectorXcd w(n);
  Eigen::MatrixXcd vr(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, w.data(),
                    nullptr, 1, vr.data(), n);
  if (info != 0) raise_info("zgeev", info);
  return GeneralEigenSystem{std::move(w), std::move(vr)};
}

HermitianEigenResult hermitian_eigen(const Eigen::MatrixXcd& m,
                                     bool want_vectors) {
  require_square(m, "hermitian_eigen");
  require_finite(m, "hermitian_eigen");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  HermitianEigenResult out;
  out.values.resize(n);
  if (n == 0) return out;
  const char jobz = want_vectors ? 'V' : 'N';

  if (is_real(m)) {
    Eigen::MatrixXd a = m.real();
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                                           a.data(), n, out.values.data());
    if (info != 0) raise_info("dsyevd", info);
    if (want_vectors) out.vectors = a.cast<std::complex<double>>();
  } else {
    Eigen::MatrixXcd a = m;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                                           a.data(), n, out.values.data());
    if (info != 0) raise_info("zheevd", info);
    if (want_vectors) out.vectors = std::move(a);
  }
  return out;
}

}  // namespace bandlab::detail
