// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end. Exit codes: 0 success, 1 threshold failure,
// 2 configuration error, 3 runtime failure.

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bandlab/dyson.hpp"
#include "bandlab/ensemble.hpp"
#include "bandlab/errors.hpp"
#include "bandlab/experiment.hpp"
#include "bandlab/hermitization.hpp"
#include "bandlab/io.hpp"
#include "bandlab/metrics.hpp"
#include "bandlab/spectra.hpp"

namespace {

using std::complex;

// "re" or "re,im".
complex<double> parse_complex_arg(const std::string& text) {
  std::size_t comma = text.find(',');
  try {
    if (comma == std::string::npos) {
      return {std::stod(text), 0.0};
    }
    return {std::stod(text.substr(0, comma)),
            std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw bandlab::SpecError("cannot parse complex number: " + text);
  }
}

// A path, or inline JSON when the value starts with '{'.
std::string slurp_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return arg;
  return bandlab::read_text_file(arg);
}

bandlab::WeightedValues read_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bandlab::SpecError("cannot open file: " + path);
  return bandlab::read_values_csv(in);
}

std::vector<complex<double>> read_complex_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bandlab::SpecError("cannot open file: " + path);
  return bandlab::read_complex_csv(in);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  bandlab::write_text_file(out_path, content);
}

// Prints the metric value; exits 1 later when a --max bound is violated.
struct MetricOutput {
  double value = 0.0;
  std::optional<double> max;

  int finish() const {
    std::cout << bandlab::format_double(value) << "\n";
    return max && value > *max ? 1 : 0;
  }
};

int run_cli(int argc, char** argv) {
  CLI::App app{"spectral statistics laboratory for band matrix ensembles"};
  app.require_subcommand(1);
  int exit_code = 0;

  // sample: one matrix as CSV.
  auto* sample_cmd = app.add_subcommand("sample", "sample one matrix");
  std::string sample_ensemble;
  std::uint64_t sample_seed = 0, sample_trial = 0;
  std::string sample_out;
  sample_cmd->add_option("--ensemble", sample_ensemble,
                         "ensemble spec JSON (path or inline)")
      ->required();
  sample_cmd->add_option("--seed", sample_seed, "master seed");
  sample_cmd->add_option("--trial", sample_trial, "trial index");
  sample_cmd->add_option("--out", sample_out, "output path (default stdout)");
  sample_cmd->callback([&] {
    const auto spec =
        bandlab::parse_ensemble_spec(slurp_json_arg(sample_ensemble));
    const auto sample = bandlab::sample_matrix(spec, sample_seed, sample_trial);
    std::ostringstream out;
    bandlab::write_matrix_csv(out, sample.values);
    emit(sample_out, out.str());
  });

  // spectrum: eigenvalues, singular values, optional sup norms.
  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "spectral sample of one matrix");
  std::string spectrum_ensemble, spectrum_z = "0", spectrum_out;
  std::uint64_t spectrum_seed = 0, spectrum_trial = 0;
  bool spectrum_infnorms = false;
  spectrum_cmd
      ->add_option("--ensemble", spectrum_ensemble,
                   "ensemble spec JSON (path or inline)")
      ->required();
  spectrum_cmd->add_option("--seed", spectrum_seed, "master seed");
  spectrum_cmd->add_option("--trial", spectrum_trial, "trial index");
  spectrum_cmd->add_option("--z", spectrum_z, "shift, 're' or 're,im'");
  spectrum_cmd->add_flag("--infnorms", spectrum_infnorms,
                         "also compute eigenvector sup norms");
  spectrum_cmd->add_option("--out", spectrum_out,
                           "output path (default stdout)");
  spectrum_cmd->callback([&] {
    const auto spec =
        bandlab::parse_ensemble_spec(slurp_json_arg(spectrum_ensemble));
    const auto sample =
        bandlab::sample_matrix(spec, spectrum_seed, spectrum_trial);
    const auto spectral = bandlab::make_spectral_sample(
        sample, parse_complex_arg(spectrum_z), spectrum_infnorms);
    std::ostringstream out;
    bandlab::write_spectral_sample_csv(out, spectral);
    emit(spectrum_out, out.str());
  });

  // dyson: tabulate the free solution over an eta grid.
  auto* dyson_cmd =
      app.add_subcommand("dyson", "tabulate the free Stieltjes solution");
  std::string dyson_z = "0", dyson_out;
  std::vector<std::string> dyson_etas;
  double dyson_im_min = 0.05, dyson_im_max = 10.0, dyson_re = 0.0;
  int dyson_points = 100;
  dyson_cmd->add_option("--z", dyson_z, "shift, 're' or 're,im'");
  dyson_cmd->add_option("--eta", dyson_etas,
                        "explicit eta values 're,im' (overrides the grid)");
  dyson_cmd->add_option("--im-min", dyson_im_min, "grid: smallest Im eta");
  dyson_cmd->add_option("--im-max", dyson_im_max, "grid: largest Im eta");
  dyson_cmd->add_option("--re", dyson_re, "grid: Re eta");
  dyson_cmd->add_option("--points", dyson_points, "grid: point count");
  dyson_cmd->add_option("--out", dyson_out, "output path (default stdout)");
  dyson_cmd->callback([&] {
    const auto z = parse_complex_arg(dyson_z);
    std::vector<complex<double>> etas;
    if (!dyson_etas.empty()) {
      for (const auto& text : dyson_etas) etas.push_back(parse_complex_arg(text));
    } else {
      if (dyson_points < 1) {
        throw bandlab::SpecError("dyson grid needs at least one point");
      }
      for (int k = 0; k < dyson_points; ++k) {
        const double im =
            dyson_points == 1
                ? dyson_im_min
                : dyson_im_min + (dyson_im_max - dyson_im_min) * k /
                                     (dyson_points - 1);
        etas.push_back({dyson_re, im});
      }
    }
    std::vector<bandlab::FreeStieltjesSolution> rows;
    for (const auto eta : etas) {
      rows.push_back(bandlab::solve_free_stieltjes(z, eta));
    }
    std::ostringstream out;
    bandlab::write_dyson_csv(out, rows);
    emit(dyson_out, out.str());
  });

  // metric: one-shot metrics on input files.
  auto* metric_cmd = app.add_subcommand("metric", "one-shot metric");
  metric_cmd->require_subcommand(1);
  MetricOutput metric_output;
  bool metric_used = false;

  auto add_max = [&](CLI::App* cmd) {
    cmd->add_option("--max", metric_output.max,
                    "exit 1 when the value exceeds this bound");
  };

  auto* ks_cmd = metric_cmd->add_subcommand(
      "kolmogorov", "distance of squared singular value laws");
  std::string ks_a, ks_b;
  ks_cmd->add_option("--a", ks_a, "first singular value CSV")->required();
  ks_cmd->add_option("--b", ks_b, "second singular value CSV")->required();
  add_max(ks_cmd);
  ks_cmd->callback([&] {
    const auto a = read_values_file(ks_a);
    const auto b = read_values_file(ks_b);
    metric_output.value = bandlab::kolmogorov_distance(
        bandlab::squared_singular_value_measure(a.values),
        bandlab::squared_singular_value_measure(b.values));
    metric_used = true;
  });

  auto* disk_cmd = metric_cmd->add_subcommand(
      "disk-law", "sup gap to the uniform disk radial law");
  std::string disk_eigs;
  disk_cmd->add_option("--eigs", disk_eigs, "eigenvalue CSV, 're,im' rows")
      ->required();
  add_max(disk_cmd);
  disk_cmd->callback([&] {
    const auto eigs = read_complex_file(disk_eigs);
    metric_output.value = bandlab::disk_law_distance(eigs);
    metric_used = true;
  });

  auto* logpot_cmd = metric_cmd->add_subcommand(
      "log-potential", "mean log singular value, optionally vs the disk law");
  std::string logpot_sigma, logpot_vs_disk;
  logpot_cmd->add_option("--sigma", logpot_sigma, "singular value CSV")
      ->required();
  logpot_cmd->add_option(
      "--vs-disk", logpot_vs_disk,
      "shift 're,im': report |log potential - disk prediction| instead");
  add_max(logpot_cmd);
  logpot_cmd->callback([&] {
    const auto sigma = read_values_file(logpot_sigma);
    const double value = bandlab::log_potential(sigma.values);
    metric_output.value =
        logpot_vs_disk.empty()
            ? value
            : std::abs(value - bandlab::uniform_disk_log_potential(
                                   parse_complex_arg(logpot_vs_disk)));
    metric_used = true;
  });

  auto* gap_cmd = metric_cmd->add_subcommand(
      "replacement-gap", "absolute log potential gap of two samples");
  std::string gap_a, gap_b;
  gap_cmd->add_option("--a", gap_a, "first singular value CSV")->required();
  gap_cmd->add_option("--b", gap_b, "second singular value CSV")->required();
  add_max(gap_cmd);
  gap_cmd->callback([&] {
    const auto a = read_values_file(gap_a);
    const auto b = read_values_file(gap_b);
    metric_output.value = bandlab::replacement_gap(a.values, b.values);
    metric_used = true;
  });

  auto* floor_cmd = metric_cmd->add_subcommand(
      "smin-floor", "theoretical log floor for the smallest singular value");
  std::string floor_kind;
  int floor_n = 0, floor_b = 0, floor_m = 0;
  double floor_sigma_star = 0.0, floor_sigma = 0.0, floor_r = 2.0;
  double floor_kappa = 0.1, floor_z_abs = 0.0;
  floor_cmd->add_option("--kind", floor_kind, "block | product | hadamard")
      ->required()
      ->check(CLI::IsMember({"block", "product", "hadamard"}));
  floor_cmd->add_option("--n", floor_n, "matrix size");
  floor_cmd->add_option("--b", floor_b, "block size (block)");
  floor_cmd->add_option("--m", floor_m, "factor count (product)");
  floor_cmd->add_option("--sigma-star", floor_sigma_star,
                        "largest entry deviation (hadamard)");
  floor_cmd->add_option("--sigma", floor_sigma,
                        "largest row or column norm (hadamard)");
  floor_cmd->add_option("--r", floor_r, "radius parameter (hadamard)");
  floor_cmd->add_option("--kappa", floor_kappa, "exponent (hadamard)");
  floor_cmd->add_option("--z-abs", floor_z_abs, "|z| of the shift (hadamard)");
  floor_cmd->callback([&] {
    bandlab::SingularValueFloor floor;
    if (floor_kind == "block") {
      floor = bandlab::block_band_smin_floor(floor_n, floor_b);
    } else if (floor_kind == "product") {
      floor = bandlab::product_smin_floor(floor_n, floor_m);
    } else {
      bandlab::HadamardFloorParams params;
      params.sigma_star = floor_sigma_star;
      params.sigma = floor_sigma;
      params.r = floor_r;
      params.kappa = floor_kappa;
      params.n = floor_n;
      params.z_abs = floor_z_abs;
      floor = bandlab::hadamard_smin_floor(params);
    }
    metric_output.value = floor.log_floor;
    metric_used = true;
  });

  auto* deloc_cmd = metric_cmd->add_subcommand(
      "deloc-threshold", "eigenvector sup norm delocalization scale");
  double deloc_band = 0.0, deloc_c = 0.1;
  int deloc_n = 0;
  bool deloc_gaussian = false;
  deloc_cmd->add_option("--band", deloc_band, "profile band parameter")
      ->required();
  deloc_cmd->add_option("--n", deloc_n, "matrix size")->required();
  deloc_cmd->add_option("--c", deloc_c, "exponent c");
  deloc_cmd->add_flag("--gaussian", deloc_gaussian,
                      "use the Gaussian-atom exponent");
  deloc_cmd->callback([&] {
    metric_output.value = bandlab::delocalization_threshold(
        deloc_band, deloc_n, deloc_c, deloc_gaussian);
    metric_used = true;
  });

  // experiment: run and summarize.
  auto* experiment_cmd = app.add_subcommand("experiment", "trial batches");
  experiment_cmd->require_subcommand(1);

  auto* run_cmd = experiment_cmd->add_subcommand("run", "run a config");
  std::string run_config;
  int run_workers = 0;
  run_cmd->add_option("config", run_config, "experiment config JSON path")
      ->required();
  run_cmd->add_option("--workers", run_workers,
                      "worker threads (0 = hardware concurrency)");
  run_cmd->callback([&] {
    const auto config =
        bandlab::parse_experiment_config(slurp_json_arg(run_config));
    const auto record = bandlab::run_experiment(config, run_workers);
    const auto report = bandlab::summarize(record);
    std::cout << report.table;
    if (!report.pass) exit_code = 1;
  });

  auto* summarize_cmd =
      experiment_cmd->add_subcommand("summarize", "summarize a finished run");
  std::string summarize_dir;
  summarize_cmd
      ->add_option("dir", summarize_dir, "output directory of a finished run")
      ->required();
  summarize_cmd->callback([&] {
    const auto record = bandlab::load_run_record(summarize_dir);
    const auto report = bandlab::summarize(record);
    std::cout << report.table;
    if (!report.pass) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (metric_used) {
    const int metric_code = metric_output.finish();
    if (metric_code != 0) exit_code = metric_code;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);
  try {
    return run_cli(argc, argv);
  } catch (const bandlab::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bandlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
