// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bandlab/ensemble.hpp"

namespace bandlab {

// Registered per-trial metrics:
//
//   disk_law               sup gap to the uniform disk radial law
//   angular_mean_abs       |mean of lambda/|lambda||, diagnostic
//   eigvec_infnorm         largest eigenvector sup norm
//   log_potential          (1/n) sum log sigma_i(X - z)
//   smin_log               log of the smallest singular value of X - z
//   smin_floor_margin      smin_log minus the ensemble's theoretical floor
//   kolmogorov_vs_gaussian distance of squared singular value laws,
//                          sample vs a paired i.i.d. Gaussian sample
//   replacement_gap        |log potential gap| to the paired Gaussian
//   gaussian_logpot_error  paired Gaussian log potential vs the uniform
//                          disk prediction at z
//   rigidity_ratio         max sliding-window eigenvalue count of the
//                          dilation over n |I|, windows of length 0.2
//   stieltjes_dev          |empirical m - free m| per (z, eta)
//
// The first three ignore the shift list; the middle group is evaluated
// per shift z; stieltjes_dev per (z, eta) pair.
std::vector<std::string> registered_metrics();

struct ExperimentConfig {
  EnsembleSpec ensemble;
  std::vector<std::complex<double>> shifts;    // z values
  std::vector<std::complex<double>> eta_grid;  // spectral parameters
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::vector<std::string> metrics;
  std::map<std::string, double> thresholds;    // metric -> max allowed value
  std::filesystem::path output_dir;
  bool save_spectra = false;

  // Rejects unknown metric or threshold names, non-positive trial counts,
  // eta with nonpositive imaginary part, and invalid ensembles, all
  // before any sampling happens.
  void validate() const;
};

struct MetricAggregate {
  std::string metric;           // expanded label, e.g. stieltjes_dev@eta=...
  std::complex<double> z{0.0, 0.0};
  long count = 0;               // ok rows entering the statistics
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

struct ThresholdVerdict {
  double limit = 0.0;
  bool pass = false;
};

struct RunRecord {
  std::string config_digest;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<MetricAggregate> aggregates;
  std::map<std::string, ThresholdVerdict> thresholds;
  std::map<int, std::string> failures;  // trial -> reason
  int total_trials = 0;
  int failed_trials = 0;
  bool pass = true;                     // all thresholds met
  double wall_seconds = 0.0;
  std::filesystem::path output_dir;
};

// Runs all trials, writes <output_dir>/manifest.json and metrics.csv
// (plus trials/<t>/spectra.csv when configured), and returns the record.
// Trials run on `workers` threads (0 = hardware concurrency); results are
// identical for every worker count. Raises RunError when fewer than half
// of the trials succeed, after writing the outputs.
RunRecord run_experiment(const ExperimentConfig& config, int workers = 0);

// Reloads the record of a completed run from its output directory.
RunRecord load_run_record(const std::filesystem::path& dir);

struct SummaryReport {
  std::string table;
  bool pass = true;
};

SummaryReport summarize(const RunRecord& record);

// Mean empirical Stieltjes transform against the free limit on a grid.
struct FreeDeviationRow {
  std::complex<double> z{0.0, 0.0};
  std::complex<double> eta{0.0, 0.0};
  std::complex<double> mean_empirical{0.0, 0.0};
  std::complex<double> free_value{0.0, 0.0};
  double deviation = 0.0;
};

std::vector<FreeDeviationRow> compare_to_free(
    const EnsembleSpec& ensemble,
    std::span<const std::complex<double>> shifts,
    std::span<const std::complex<double>> eta_grid, int trials,
    std::uint64_t master_seed, int workers = 0);

}  // namespace bandlab
