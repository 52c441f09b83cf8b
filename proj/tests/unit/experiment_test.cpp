// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <doctest.h>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "bandlab/dyson.hpp"
#include "bandlab/ensemble.hpp"
#include "bandlab/errors.hpp"
#include "bandlab/io.hpp"
#include "bandlab/rng.hpp"

using namespace bandlab;
using std::complex;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
  const auto dir = fs::temp_directory_path() / "bandlab_experiment_test" / leaf;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.ensemble.kind = IidParams{32};
  config.ensemble.atom = AtomSpec::make(AtomFamily::kRealGaussian);
  config.shifts = {{0.3, 0.0}, {1.5, 0.0}};
  config.eta_grid = {{0.0, 1.0}};
  config.trials = 3;
  config.master_seed = 4711;
  config.metrics = registered_metrics();  // everything
  config.save_spectra = true;
  return config;
}

// 1x1 Rademacher sample shifted by z = 1: the +1 draw makes X - z exactly
// singular, the -1 draw is regular. Counts how many of `trials` trials
// would fail for this master seed.
EnsembleSpec coin_ensemble() {
  EnsembleSpec spec;
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  spec.kind = GeneralProfileParams{one};
  spec.atom = AtomSpec::make(AtomFamily::kRademacher);
  return spec;
}

int count_singular_trials(std::uint64_t seed, int trials) {
  const auto spec = coin_ensemble();
  int bad = 0;
  for (int t = 0; t < trials; ++t) {
    const auto x = sample_matrix(spec, seed, static_cast<std::uint64_t>(t));
    if (x.values(0, 0).real() > 0.0) ++bad;
  }
  return bad;
}

std::uint64_t find_seed_with_failures(int want, int trials) {
  for (std::uint64_t seed = 0; seed < 4096; ++seed) {
    if (count_singular_trials(seed, trials) == want) return seed;
  }
  FAIL("no seed with the requested failure count");
  return 0;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("metric registry") {
  const auto names = registered_metrics();
  REQUIRE(names.size() == 11);
  CHECK(std::find(names.begin(), names.end(), "disk_law") != names.end());
  CHECK(std::find(names.begin(), names.end(), "stieltjes_dev") != names.end());
  CHECK(std::find(names.begin(), names.end(), "rigidity_ratio") !=
        names.end());
}

TEST_CASE("config validation rejects bad inputs before sampling") {
  auto config = small_config();
  config.metrics = {"no_such_metric"};
  CHECK_THROWS_WITH_AS(config.validate(),
                       doctest::Contains("unknown metric"), SpecError);

  config = small_config();
  config.metrics = {"log_potential"};
  config.shifts.clear();
  CHECK_THROWS_WITH_AS(config.validate(),
                       doctest::Contains("shift list"), SpecError);

  config = small_config();
  config.metrics = {"stieltjes_dev"};
  config.eta_grid.clear();
  CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("eta grid"),
                       SpecError);

  config = small_config();
  config.eta_grid = {{1.0, 0.0}};
  CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("Im eta"),
                       SpecError);

  config = small_config();
  config.trials = 0;
  CHECK_THROWS_AS(config.validate(), SpecError);

  config = small_config();
  config.thresholds["stieltjes_dev"] = 0.5;
  config.metrics = {"disk_law"};
  CHECK_THROWS_WITH_AS(config.validate(),
                       doctest::Contains("not in the metric list"), SpecError);

  config = small_config();
  config.thresholds["disk_law"] =
      std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("finite"),
                       SpecError);

  CHECK_NOTHROW(small_config().validate());

  // Runs need an output directory.
  config = small_config();
  config.output_dir.clear();
  CHECK_THROWS_WITH_AS(run_experiment(config, 1),
                       doctest::Contains("output_dir"), SpecError);
}

TEST_CASE("a full run persists outputs, is reproducible, and is "
          "worker-count independent") {
  auto config = small_config();
  config.thresholds["disk_law"] = 1.0;
  config.thresholds["eigvec_infnorm"] = 1.0 + 1e-12;

  const auto dir1 = fresh_dir("run1");
  const auto dir2 = fresh_dir("run2");
  config.output_dir = dir1;
  const auto rec1 = run_experiment(config, 1);
  config.output_dir = dir2;
  const auto rec2 = run_experiment(config, 4);

  CHECK(fs::exists(dir1 / "manifest.json"));
  CHECK(fs::exists(dir1 / "metrics.csv"));
  CHECK(rec1.total_trials == 3);
  CHECK(rec1.failed_trials == 0);
  CHECK(rec1.pass);
  REQUIRE(rec1.trial_seeds.size() == 3);
  for (int t = 0; t < 3; ++t) {
    CHECK(rec1.trial_seeds[static_cast<std::size_t>(t)] ==
          stream_key(config.master_seed, static_cast<std::uint64_t>(t)));
  }

  // Identical rows regardless of scheduling.
  const auto csv1 = read_text_file(dir1 / "metrics.csv");
  const auto csv2 = read_text_file(dir2 / "metrics.csv");
  CHECK(csv1 == csv2);
  CHECK(csv1.rfind("trial,z_re,z_im,metric,value,status\n", 0) == 0);

  // Aggregates agree bit for bit after the JSON round trip.
  const auto back1 = load_run_record(dir1);
  const auto back2 = load_run_record(dir2);
  REQUIRE(back1.aggregates.size() == back2.aggregates.size());
  for (std::size_t i = 0; i < back1.aggregates.size(); ++i) {
    CHECK(back1.aggregates[i].metric == back2.aggregates[i].metric);
    CHECK(back1.aggregates[i].mean == back2.aggregates[i].mean);
    CHECK(back1.aggregates[i].stddev == back2.aggregates[i].stddev);
    CHECK(back1.aggregates[i].min == back2.aggregates[i].min);
    CHECK(back1.aggregates[i].max == back2.aggregates[i].max);
  }

  // The loaded record mirrors the in-memory one.
  CHECK(back1.config_digest == rec1.config_digest);
  CHECK(back1.config_digest == config_digest([&] {
          auto c = config;
          c.output_dir = dir1;
          return c;
        }()));
  CHECK(back1.total_trials == rec1.total_trials);
  CHECK(back1.failed_trials == 0);
  CHECK(back1.pass == rec1.pass);
  CHECK(back1.trial_seeds == rec1.trial_seeds);
  CHECK(back1.thresholds.at("disk_law").pass);

  // Plan order: per-trial metrics once, per-shift metrics per z, the
  // stieltjes deviation per (z, eta), in registry order.
  REQUIRE(rec1.aggregates.size() == 3 + 7 * 2 + 2);
  CHECK(rec1.aggregates[0].metric == "disk_law");
  CHECK(rec1.aggregates[3].metric == "log_potential");
  CHECK(rec1.aggregates[4].metric == "log_potential");
  CHECK(rec1.aggregates[4].z == complex<double>(1.5, 0.0));
  CHECK(rec1.aggregates.back().metric == "stieltjes_dev@eta=0+1i");

  // The iid profile floor precondition fails at z = 0.3 (needs |z| >
  // 0.5) and holds at z = 1.5, so the margin aggregate counts 0 and 3.
  for (const auto& a : rec1.aggregates) {
    if (a.metric == "smin_floor_margin") {
      if (a.z == complex<double>(0.3, 0.0)) {
        CHECK(a.count == 0);
      } else {
        CHECK(a.count == 3);
        CHECK(a.min > 0.0);  // observed smin above the theoretical floor
      }
    } else {
      CHECK(a.count == 3);
    }
  }

  // Saved spectra, one per surviving trial.
  for (int t = 0; t < 3; ++t) {
    const auto f = dir1 / "trials" / std::to_string(t) / "spectra.csv";
    REQUIRE(fs::exists(f));
    const auto text = read_text_file(f);
    CHECK(text.rfind("index,eig_re,eig_im,sigma,infnorm\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 33);
  }

  // Precondition rows are marked, never silently dropped.
  CHECK(csv1.find(",smin_floor_margin,nan,precondition") != std::string::npos);

  const auto summary = summarize(back1);
  CHECK(summary.pass);
  CHECK(summary.table.find("overall: PASS") != std::string::npos);
  CHECK(summary.table.find("disk_law") != std::string::npos);
  CHECK(summary.table.find("stieltjes_dev@eta=0+1i") != std::string::npos);

  fs::remove_all(fs::temp_directory_path() / "bandlab_experiment_test");
}

TEST_CASE("threshold violations flip the verdict without failing the run") {
  ExperimentConfig config;
  config.ensemble.kind = IidParams{16};
  config.ensemble.atom = AtomSpec::make(AtomFamily::kRealGaussian);
  config.shifts = {{0.5, 0.0}};
  config.trials = 2;
  config.master_seed = 7;
  config.metrics = {"disk_law"};
  config.thresholds["disk_law"] = 1e-9;  // unattainably strict
  config.output_dir = fresh_dir("thresholds");
  const auto record = run_experiment(config, 1);
  CHECK_FALSE(record.pass);
  CHECK_FALSE(record.thresholds.at("disk_law").pass);
  CHECK(record.failed_trials == 0);
  const auto summary = summarize(record);
  CHECK_FALSE(summary.pass);
  CHECK(summary.table.find("overall: FAIL") != std::string::npos);
  fs::remove_all(config.output_dir);
}

TEST_CASE("singular samples fail their trial but keep their rows") {
  const int trials = 4;
  const auto seed = find_seed_with_failures(1, trials);
  ExperimentConfig config;
  config.ensemble = coin_ensemble();
  config.shifts = {{1.0, 0.0}};
  config.trials = trials;
  config.master_seed = seed;
  config.metrics = {"log_potential", "smin_log"};
  config.output_dir = fresh_dir("singular");

  const auto record = run_experiment(config, 1);
  CHECK(record.failed_trials == 1);
  REQUIRE(record.failures.size() == 1);
  CHECK(record.failures.begin()->second.find("zero") != std::string::npos);

  // Failed rows stay in the CSV with their status; aggregates skip them.
  const auto csv = read_text_file(config.output_dir / "metrics.csv");
  CHECK(csv.find(",singular") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        1 + trials * 2);  // header + 2 metrics x 4 trials
  for (const auto& a : record.aggregates) CHECK(a.count == trials - 1);

  const auto back = load_run_record(config.output_dir);
  CHECK(back.failed_trials == 1);
  CHECK(back.failures == record.failures);
  fs::remove_all(config.output_dir);
}

TEST_CASE("majority failure raises after outputs are written") {
  const int trials = 4;
  const auto seed = find_seed_with_failures(3, trials);
  ExperimentConfig config;
  config.ensemble = coin_ensemble();
  config.shifts = {{1.0, 0.0}};
  config.trials = trials;
  config.master_seed = seed;
  config.metrics = {"smin_log"};
  config.output_dir = fresh_dir("majority");

  CHECK_THROWS_WITH_AS(run_experiment(config, 1),
                       doctest::Contains("trials failed"), RunError);
  // Outputs were persisted before the throw.
  REQUIRE(fs::exists(config.output_dir / "manifest.json"));
  const auto back = load_run_record(config.output_dir);
  CHECK(back.total_trials == trials);
  CHECK(back.failed_trials == 3);
  fs::remove_all(config.output_dir);
}

TEST_CASE("compare_to_free matches the semicircle at z = 0") {
  EnsembleSpec spec;
  spec.kind = IidParams{500};
  spec.atom = AtomSpec::make(AtomFamily::kRealGaussian);
  const std::vector<complex<double>> shifts{{0.0, 0.0}};
  const std::vector<complex<double>> etas{{0.0, 1.0}, {0.0, 10.0}};
  const auto rows = compare_to_free(spec, shifts, etas, 10, 2718, 2);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[0].free_value -
                 semicircle_reference({0.0, 1.0})) <= 1e-8);
  CHECK(rows[0].deviation <= 0.02);
  CHECK(rows[1].deviation <= 0.005);
  // Deterministic in the worker count.
  const auto again = compare_to_free(spec, shifts, etas, 10, 2718, 1);
  CHECK(again[0].mean_empirical == rows[0].mean_empirical);
  CHECK(again[1].mean_empirical == rows[1].mean_empirical);
}

TEST_CASE("compare_to_free handles the smallest dimension and rejects bad "
          "arguments") {
  EnsembleSpec spec;
  spec.kind = IidParams{1};
  spec.atom = AtomSpec::make(AtomFamily::kComplexGaussian);
  const std::vector<complex<double>> shifts{{0.5, 0.0}};
  const std::vector<complex<double>> etas{{0.0, 1.0}};
  const auto rows = compare_to_free(spec, shifts, etas, 2, 1, 1);
  REQUIRE(rows.size() == 1);
  CHECK(std::isfinite(rows[0].deviation));

  CHECK_THROWS_AS(compare_to_free(spec, shifts, etas, 0, 1, 1), SpecError);
  CHECK_THROWS_AS(compare_to_free(spec, {}, etas, 1, 1, 1), SpecError);
  const std::vector<complex<double>> bad_eta{{1.0, 0.0}};
  CHECK_THROWS_AS(compare_to_free(spec, shifts, bad_eta, 1, 1, 1), SpecError);
}

}  // TEST_SUITE
