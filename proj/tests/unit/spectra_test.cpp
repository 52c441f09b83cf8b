// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/spectra.hpp"

#include <cmath>
#include <complex>
#include <doctest.h>
#include <limits>
#include <vector>

#include "bandlab/errors.hpp"
#include "oracles.hpp"

using namespace bandlab;
using std::complex;

TEST_SUITE("spectra") {

TEST_CASE("singular values of simple matrices") {
  for (double s : singular_values(Eigen::MatrixXcd::Identity(3, 3))) {
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = complex<double>(0.0, -4.0);
  const auto sv = singular_values(d);
  REQUIRE(sv.size() == 2);
  CHECK(sv[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sv[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("singular values are decreasing and multiply to |det|") {
  const auto m = oracles::random_complex_matrix(5, 3);
  const auto sv = singular_values(m);
  REQUIRE(sv.size() == 5);
  for (std::size_t i = 1; i < sv.size(); ++i) CHECK(sv[i] <= sv[i - 1]);
  double log_prod = 0.0;
  for (double s : sv) log_prod += std::log(s);
  CHECK(log_prod == doctest::Approx(oracles::log_abs_det(m)).epsilon(1e-9));
}

TEST_CASE("singular values agree with the Jacobi oracle on both paths") {
  // Complex path.
  const auto mc = oracles::random_complex_matrix(12, 5);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svdc(mc);
  const auto svc = singular_values(mc);
  for (int i = 0; i < 12; ++i) {
    CHECK(svc[static_cast<std::size_t>(i)] ==
          doctest::Approx(svdc.singularValues()(i)).epsilon(1e-11));
  }
  // Real path (exactly real input takes the faster real routine).
  const Eigen::MatrixXcd mr =
      oracles::random_real_matrix(12, 6).cast<complex<double>>();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svdr(mr);
  const auto svr = singular_values(mr);
  for (int i = 0; i < 12; ++i) {
    CHECK(svr[static_cast<std::size_t>(i)] ==
          doctest::Approx(svdr.singularValues()(i)).epsilon(1e-11));
  }
}

TEST_CASE("eigenvalues: triangular matrices expose their diagonal") {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(3, 3);
  t(0, 0) = complex<double>(1.0, 1.0);
  t(1, 1) = complex<double>(-2.0, 0.5);
  t(2, 2) = complex<double>(0.0, -3.0);
  t(0, 1) = 5.0;
  t(0, 2) = -1.0;
  t(1, 2) = 2.0;
  const auto eigs = eigenvalues(t);
  std::vector<complex<double>> got(eigs.data(), eigs.data() + eigs.size());
  std::vector<complex<double>> expected{t(0, 0), t(1, 1), t(2, 2)};
  CHECK(oracles::multiset_match_distance(got, expected) <= 1e-12);
}

TEST_CASE("eigenvalue sum matches the trace") {
  for (unsigned seed : {10u, 11u}) {
    const auto m = oracles::random_complex_matrix(8, seed);
    const auto eigs = eigenvalues(m);
    complex<double> sum{0.0, 0.0};
    for (int i = 0; i < eigs.size(); ++i) sum += eigs(i);
    CHECK(std::abs(sum - m.trace()) <= 8.0 * 1e-8);
  }
}

TEST_CASE("real path conjugate pairs match the complex path") {
  const Eigen::MatrixXcd m =
      oracles::random_real_matrix(9, 12).cast<complex<double>>();
  const auto real_path = eigenvalues(m);
  // Force the complex routine with a vanishing imaginary perturbation.
  Eigen::MatrixXcd nudged = m;
  nudged(0, 0) += complex<double>(0.0, 1e-300);
  const auto complex_path = eigenvalues(nudged);
  std::vector<complex<double>> a(real_path.data(),
                                 real_path.data() + real_path.size());
  std::vector<complex<double>> b(complex_path.data(),
                                 complex_path.data() + complex_path.size());
  CHECK(oracles::multiset_match_distance(a, b) <= 1e-8);
}

TEST_CASE("eigen pairs satisfy the residual equation") {
  const auto m = oracles::random_complex_matrix(10, 13);
  const auto yd = dilate(m);
  const auto sys = hermitian_spectrum(yd, true);
  REQUIRE(sys.eigenvectors.cols() == 20);
  for (int j = 0; j < 20; ++j) {
    const auto v = sys.eigenvectors.col(j);
    const double res = (yd.values * v - sys.eigenvalues(j) * v).norm();
    CHECK(res <= 1e-10);
    CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
  }
  // Orthonormal basis.
  const Eigen::MatrixXcd gram =
      sys.eigenvectors.adjoint() * sys.eigenvectors;
  CHECK((gram - Eigen::MatrixXcd::Identity(20, 20)).cwiseAbs().maxCoeff() <=
        1e-10);
}

TEST_CASE("empirical stieltjes of the trivial sample") {
  // n = 1, x = [0], z = 0: the dilation is the 2x2 zero matrix and
  // m(eta) = -1/eta. At eta = i this is exactly i.
  const auto y = dilate(Eigen::MatrixXcd::Zero(1, 1));
  const auto m = empirical_stieltjes(y, {0.0, 1.0});
  CHECK(std::abs(m - complex<double>(0.0, 1.0)) <= 1e-15);
}

TEST_CASE("empirical stieltjes equals the normalized resolvent trace") {
  const auto x = oracles::random_complex_matrix(6, 14);
  const auto y = dilate_shifted(x, {0.2, 0.0});
  const complex<double> eta{0.3, 0.7};
  const auto got = empirical_stieltjes(y, eta);
  // Oracle: dense inverse through Eigen LU.
  const Eigen::MatrixXcd res =
      (y.values - eta * Eigen::MatrixXcd::Identity(12, 12)).inverse();
  const auto want = res.trace() / 12.0;
  CHECK(std::abs(got - want) <= 1e-9);
  // Same value through the singular value route.
  const auto sv = singular_values(shift(x, {0.2, 0.0}));
  CHECK(std::abs(stieltjes_from_singular_values(sv, eta) - got) <= 1e-10);
}

TEST_CASE("empirical stieltjes decays like -1/eta at large eta") {
  const auto x = oracles::random_complex_matrix(40, 15);
  const auto y = dilate(x);  // operator norm well under 5
  const auto m = empirical_stieltjes(y, {0.0, 10.0});
  CHECK(std::abs(m - complex<double>(0.0, 0.1)) <= 0.02);
}

TEST_CASE("stieltjes transforms reject the closed lower half plane") {
  const std::vector<double> eigs{0.0, 1.0};
  CHECK_THROWS_AS(stieltjes_from_spectrum(eigs, {1.0, 0.0}), SpecError);
  CHECK_THROWS_AS(stieltjes_from_spectrum(eigs, {1.0, -1.0}), SpecError);
  const auto y = dilate(Eigen::MatrixXcd::Zero(1, 1));
  CHECK_THROWS_AS(empirical_stieltjes(y, {0.0, -1.0}), SpecError);
}

TEST_CASE("green diagonal of diag(1, -1) at eta = i") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  const auto diag = green_diagonal(h, {0.0, 1.0});
  REQUIRE(diag.size() == 2);
  // 1/(1 - i) = (1 + i)/2 and 1/(-1 - i) = (-1 + i)/2.
  CHECK(std::abs(diag[0] - complex<double>(0.5, 0.5)) <= 1e-12);
  CHECK(std::abs(diag[1] - complex<double>(-0.5, 0.5)) <= 1e-12);
}

TEST_CASE("green diagonal has positive imaginary part and averages to the "
          "stieltjes transform") {
  const auto x = oracles::random_complex_matrix(5, 16);
  const auto y = dilate(x);
  const complex<double> eta{0.1, 0.4};
  const auto diag = green_diagonal(y, eta);
  complex<double> mean{0.0, 0.0};
  for (const auto& g : diag) {
    CHECK(g.imag() > 0.0);
    mean += g;
  }
  mean /= static_cast<double>(diag.size());
  CHECK(std::abs(mean - empirical_stieltjes(y, eta)) <= 1e-10);
  // Non-Hermitian input is rejected.
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(green_diagonal(bad, eta), SpecError);
}

TEST_CASE("eigenvector infnorm: identity permutation basis") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  d(2, 2) = 3.0;
  const auto r = eigenvector_max_infnorm(d);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("eigenvector infnorm: cyclic shift has flat eigenvectors") {
  // The 4-cycle permutation matrix has Fourier eigenvectors with all
  // coordinates of modulus 1/2, and eigenvalues at the 4th roots of
  // unity (all gaps of order 1).
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(4, 4);
  p(0, 1) = 1.0;
  p(1, 2) = 1.0;
  p(2, 3) = 1.0;
  p(3, 0) = 1.0;
  const auto r = eigenvector_max_infnorm(p);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("eigenvector infnorm flags degenerate spectra") {
  const auto r = eigenvector_max_infnorm(Eigen::MatrixXcd::Identity(3, 3));
  CHECK(r.degenerate);
  CHECK(r.min_gap <= 1e-10);
  CHECK(r.value == doctest::Approx(1.0));
}

TEST_CASE("eigenvector infnorm stays in [n^{-1/2}, 1]") {
  for (unsigned seed : {21u, 22u, 23u}) {
    const auto m = oracles::random_complex_matrix(16, seed);
    const auto r = eigenvector_max_infnorm(m);
    CHECK(r.value >= 1.0 / 4.0 - 1e-12);
    CHECK(r.value <= 1.0 + 1e-12);
  }
}

TEST_CASE("interval count") {
  const std::vector<double> eigs{-1.0, 0.0, 0.5, 1.0};
  CHECK(interval_count(eigs, -2.0, 2.0) == 4);
  CHECK(interval_count(eigs, 2.0, 3.0) == 0);
  CHECK(interval_count(eigs, -0.5, 0.5) == 2);
  // Closed endpoints.
  CHECK(interval_count(eigs, 0.5, 0.7) == 1);
  CHECK(interval_count(eigs, -1.0, -1.0) == 1);
  CHECK_THROWS_AS(interval_count(eigs, 1.0, 0.0), SpecError);
}

TEST_CASE("interval counts add over a partition") {
  const auto m = oracles::random_complex_matrix(30, 33);
  const auto sys = hermitian_spectrum(dilate(m));
  std::vector<double> eigs(sys.eigenvalues.data(),
                           sys.eigenvalues.data() + sys.eigenvalues.size());
  const double lo = -2.5, hi = 2.5;
  long total = 0;
  const int cells = 7;
  for (int k = 0; k < cells; ++k) {
    const double a = lo + (hi - lo) * k / cells;
    const double b = lo + (hi - lo) * (k + 1) / cells;
    // Half-open cells except the last; continuous spectra miss the seams
    // almost surely, and this seed does.
    total += interval_count(eigs, a, b) -
             (k + 1 < cells ? interval_count(eigs, b, b) : 0);
  }
  CHECK(total == interval_count(eigs, lo, hi));
}

TEST_CASE("non-finite inputs are rejected, not propagated") {
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(3, 3);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(singular_values(bad), SolveError);
  CHECK_THROWS_AS(eigenvalues(bad), SolveError);
  CHECK_THROWS_AS(hermitian_spectrum(dilate(bad)), SolveError);
  Eigen::MatrixXcd inf = Eigen::MatrixXcd::Zero(2, 2);
  inf(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(singular_values(inf), SolveError);
}

TEST_CASE("spectral sample carries provenance and sorted data") {
  EnsembleSpec spec;
  spec.kind = IidParams{8};
  spec.atom = AtomSpec::make(AtomFamily::kRealGaussian);
  const auto sample = sample_matrix(spec, 4242, 3);
  const auto s = make_spectral_sample(sample, {0.5, 0.0}, true);
  CHECK(s.ensemble_kind == "iid-gaussian");
  CHECK(s.seed == 4242);
  CHECK(s.trial == 3);
  CHECK(s.shift_z == complex<double>(0.5, 0.0));
  REQUIRE(s.eigenvalues.size() == 8);
  REQUIRE(s.singular_values.size() == 8);
  REQUIRE(s.eigenvector_infnorms.has_value());
  REQUIRE(s.eigenvector_infnorms->size() == 8);
  for (std::size_t i = 1; i < 8; ++i) {
    CHECK(s.singular_values[i] <= s.singular_values[i - 1]);
  }
  for (int i = 1; i < 8; ++i) {
    CHECK(s.eigenvalues(i - 1).real() <= s.eigenvalues(i).real());
  }
  for (double v : *s.eigenvector_infnorms) {
    CHECK(v >= 1.0 / std::sqrt(8.0) - 1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
  // The eigenvalue sum matches the trace of the raw sample.
  complex<double> sum{0.0, 0.0};
  for (int i = 0; i < 8; ++i) sum += s.eigenvalues(i);
  CHECK(std::abs(sum - sample.values.trace()) <= 1e-9);
}

}  // TEST_SUITE
