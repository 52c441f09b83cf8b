// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/dyson.hpp"

#include <cmath>
#include <complex>
#include <doctest.h>
#include <vector>

#include "bandlab/ensemble.hpp"
#include "bandlab/errors.hpp"
#include "bandlab/hermitization.hpp"
#include "bandlab/spectra.hpp"

using namespace bandlab;
using std::complex;

namespace {

// Residual of the scalar system at the returned point, recomputed here so
// the test does not trust the solver's own bookkeeping. The off-diagonal
// pair multiplies to (conj(z)/z) b^2, reducing to |b|^2 only where the
// determinant is real.
double scalar_system_residual(const FreeStieltjesSolution& s) {
  const complex<double> pair =
      s.z == 0.0 ? complex<double>{0.0, 0.0}
                 : (std::conj(s.z) / s.z) * s.b * s.b;
  const complex<double> delta = s.a * s.c - pair;
  const double r1 = std::abs(s.a + s.a / delta + s.eta);
  const double r2 = std::abs(s.c + s.c / delta + s.eta);
  const double r3 = std::abs(s.b - s.z * delta);
  return std::max(r1, std::max(r2, r3));
}

// Division-free restatement of the same fixed point: with w = eta + a and
// D = w^2 - |z|^2, the solution satisfies a D + w = 0 and b D - z = 0.
double polynomial_residual(const FreeStieltjesSolution& s) {
  const complex<double> w = s.eta + s.a;
  const complex<double> d = w * w - std::norm(s.z);
  return std::max(std::abs(s.a * d + w), std::abs(s.b * d - s.z));
}

}  // namespace

TEST_SUITE("dyson") {

TEST_CASE("z = 0, eta = i recovers the semicircle fixed point") {
  const auto sol = solve_free_stieltjes({0.0, 0.0}, {0.0, 1.0});
  const complex<double> want{0.0, (std::sqrt(5.0) - 1.0) / 2.0};
  CHECK(std::abs(sol.m - want) <= 1e-10);
  CHECK(std::abs(sol.a - want) <= 1e-10);
  CHECK(std::abs(sol.c - want) <= 1e-10);
  // b stays exactly at the origin when z = 0.
  CHECK(std::abs(sol.b) <= 1e-13);
  CHECK(sol.iterations > 0);
}

TEST_CASE("large eta asymptotics: m ~ -1/eta") {
  const auto sol = solve_free_stieltjes({0.7, 0.0}, {0.0, 10.0});
  CHECK(std::abs(sol.m - complex<double>(0.0, 0.1)) <= 2e-3);
}

TEST_CASE("agreement with the frozen Monte Carlo oracle at z = 0.5") {
  // Frozen oracle: mean of empirical_stieltjes over 50 samples of the
  // 2000-dimensional iid real-Gaussian ensemble at z = 0.5, eta = 0.5i,
  // master seed 90210, computed once with an independent driver. The
  // solver must land within 0.02 of that Monte Carlo value.
  const complex<double> frozen{0.0, 0.707181897696608};
  const auto sol = solve_free_stieltjes({0.5, 0.0}, {0.0, 0.5});
  CHECK(sol.m.imag() > 0.0);
  CHECK(std::abs(sol.m - frozen) <= 0.02);
}

TEST_CASE("solution invariants hold across a (z, eta) grid") {
  for (double zr : {0.0, 0.4, 0.9, 1.5}) {
    for (double zi : {0.0, 0.3}) {
      for (double im : {0.05, 0.3, 1.0, 4.0}) {
        for (double re : {0.0, -0.7, 1.2}) {
          const complex<double> z{zr, zi};
          const complex<double> eta{re, im};
          CAPTURE(zr);
          CAPTURE(zi);
          CAPTURE(re);
          CAPTURE(im);
          const auto sol = solve_free_stieltjes(z, eta);
          CHECK(sol.a.imag() > 0.0);
          CHECK(sol.c.imag() > 0.0);
          CHECK(sol.m.imag() > 0.0);
          CHECK(std::abs(sol.a - sol.c) <= 1e-10);
          CHECK(std::abs(sol.m - 0.5 * (sol.a + sol.c)) <= 1e-12);
          CHECK(sol.residual <= 1e-12);
          CHECK(scalar_system_residual(sol) <= 1e-11);
          CHECK(polynomial_residual(sol) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("semicircle reference closed forms") {
  const auto at_i = semicircle_reference({0.0, 1.0});
  CHECK(std::abs(at_i - complex<double>(0.0, (std::sqrt(5.0) - 1.0) / 2.0)) <=
        1e-14);
  const auto at_2i = semicircle_reference({0.0, 2.0});
  CHECK(std::abs(at_2i - complex<double>(0.0, std::sqrt(2.0) - 1.0)) <= 1e-14);
  const auto far = semicircle_reference({0.0, 100.0});
  CHECK(std::abs(far - complex<double>(0.0, 0.01)) <= 1e-3);
}

TEST_CASE("semicircle reference solves its quadratic on the upper branch") {
  for (double re : {-3.0, -0.5, 0.0, 1.0, 2.5}) {
    for (double im : {0.01, 0.2, 1.0, 7.0}) {
      const complex<double> eta{re, im};
      const auto m = semicircle_reference(eta);
      CHECK(m.imag() > 0.0);
      CHECK(std::abs(m * m + eta * m + 1.0) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(semicircle_reference({1.0, 0.0}), SpecError);
}

TEST_CASE("z = 0 reduction matches the semicircle across the eta range") {
  for (int k = 0; k < 20; ++k) {
    // Log-spaced imaginary parts covering [0.05, 10].
    const double im = 0.05 * std::pow(200.0, k / 19.0);
    for (double re : {0.0, 0.8}) {
      const complex<double> eta{re, im};
      CAPTURE(re);
      CAPTURE(im);
      const auto sol = solve_free_stieltjes({0.0, 0.0}, eta);
      CHECK(std::abs(sol.m - semicircle_reference(eta)) <= 1e-8);
    }
  }
}

TEST_CASE("solution path is continuous in descending eta") {
  const complex<double> z{0.8, 0.0};
  complex<double> prev{0.0, 0.0};
  bool first = true;
  for (double im = 1.0; im >= 0.05 - 1e-12; im -= 0.01) {
    const auto sol = solve_free_stieltjes(z, {0.0, im});
    if (!first) CHECK(std::abs(sol.m - prev) <= 0.1);
    prev = sol.m;
    first = false;
  }
}

TEST_CASE("domain and option validation") {
  CHECK_THROWS_AS(solve_free_stieltjes({0.0, 0.0}, {1.0, 0.0}), SpecError);
  CHECK_THROWS_AS(solve_free_stieltjes({0.0, 0.0}, {1.0, -0.5}), SpecError);
  DysonOptions bad_tol;
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(solve_free_stieltjes({0.0, 0.0}, {0.0, 1.0}, bad_tol),
                  SpecError);
  DysonOptions bad_iters;
  bad_iters.max_iterations = 0;
  CHECK_THROWS_AS(solve_free_stieltjes({0.0, 0.0}, {0.0, 1.0}, bad_iters),
                  SpecError);
  DysonOptions bad_damping;
  bad_damping.damping = 1.5;
  CHECK_THROWS_AS(solve_free_stieltjes({0.0, 0.0}, {0.0, 1.0}, bad_damping),
                  SpecError);
}

TEST_CASE("non-convergence raises an error carrying the last residual") {
  DysonOptions tight;
  tight.max_iterations = 1;
  try {
    solve_free_stieltjes({0.5, 0.0}, {0.0, 0.2}, tight);
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("free measure cdf has full symmetric mass") {
  for (double zr : {0.0, 0.7}) {
    const FreeMeasureCdf cdf(complex<double>(zr, 0.0));
    CAPTURE(zr);
    // Beyond the support all mass is collected.
    CHECK(std::abs(cdf.evaluate(10.0) - 1.0) <= 2e-3);
    // The dilation spectrum is symmetric about 0.
    CHECK(std::abs(cdf.evaluate(0.0) - 0.5) <= 2e-3);
    CHECK(cdf.evaluate(-10.0) == 0.0);
    // Monotone, valued in [0, 1].
    double last = -1.0;
    for (double x = -4.0; x <= 4.0; x += 0.05) {
      const double v = cdf.evaluate(x);
      CHECK(v >= last - 1e-15);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      last = v;
    }
  }
}

TEST_CASE("free measure cdf is lipschitz with constant one") {
  const FreeMeasureCdf cdf(complex<double>(0.5, 0.0));
  const auto grid = cdf.grid();
  const double tau = cdf.tau();
  for (double y : {0.01, 0.1, 0.5}) {
    for (std::size_t k = 0; k < grid.size(); k += 7) {
      const double x = grid[k];
      CHECK(cdf.evaluate(x + y) - cdf.evaluate(x) <= y + 4.0 * tau);
    }
  }
}

TEST_CASE("one-off cdf evaluation matches the tabulated object") {
  const FreeMeasureCdf cdf({0.3, 0.4}, 2e-3);
  for (double x : {-1.5, 0.0, 0.9, 2.4}) {
    CHECK(free_measure_cdf({0.3, 0.4}, x, 2e-3) ==
          doctest::Approx(cdf.evaluate(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(FreeMeasureCdf({0.0, 0.0}, 0.0), SpecError);
}

TEST_CASE("block band monte carlo means approach the free limit") {
  // Statistical check at desk scale: n = 1000, b = 250 block band with
  // real Gaussian atoms, four trials. The deviation of the Monte Carlo
  // mean from the deterministic solution must stay below the coarse
  // high-probability bound (log n)^3 / (sqrt(b_n) eta^2) + 10 / (b_n
  // eta^5) with b_n = 3b, and below an absolute sanity ceiling that keeps
  // the test meaningful at this scale.
  EnsembleSpec spec;
  spec.kind = BlockBandParams{1000, 250};
  spec.atom = AtomSpec::make(AtomFamily::kRealGaussian);
  const double bn = 750.0;
  const double logn3 = std::pow(std::log(1000.0), 3.0);
  const std::vector<complex<double>> shifts{{0.0, 0.0}, {0.5, 0.0}};
  const std::vector<double> etas{0.5, 1.0};

  std::vector<std::vector<complex<double>>> sums(
      shifts.size(), std::vector<complex<double>>(etas.size()));
  const int trials = 4;
  for (int t = 0; t < trials; ++t) {
    const auto sample = sample_matrix(spec, 555, static_cast<std::uint64_t>(t));
    for (std::size_t si = 0; si < shifts.size(); ++si) {
      const auto sv = singular_values(shift(sample.values, shifts[si]));
      for (std::size_t ei = 0; ei < etas.size(); ++ei) {
        sums[si][ei] += stieltjes_from_singular_values(sv, {0.0, etas[ei]});
      }
    }
  }
  for (std::size_t si = 0; si < shifts.size(); ++si) {
    for (std::size_t ei = 0; ei < etas.size(); ++ei) {
      const auto mean = sums[si][ei] / static_cast<double>(trials);
      const auto sol = solve_free_stieltjes(shifts[si], {0.0, etas[ei]});
      const double dev = std::abs(mean - sol.m);
      const double eta = etas[ei];
      const double bound = logn3 / (std::sqrt(bn) * eta * eta) +
                           10.0 / (bn * std::pow(eta, 5.0));
      CAPTURE(si);
      CAPTURE(eta);
      CHECK(dev <= bound);
      CHECK(dev <= 0.05);
    }
  }
}

}  // TEST_SUITE
