// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bandlab/dyson.hpp"
#include "bandlab/errors.hpp"
#include "bandlab/hermitization.hpp"
#include "bandlab/io.hpp"
#include "bandlab/metrics.hpp"
#include "bandlab/spectra.hpp"

namespace bandlab {

namespace {

using nlohmann::json;

// Stream salt for the paired Gaussian comparison sample ("GAUSSIAN").
constexpr std::uint64_t kGaussianSalt = 0x474155535349414Eull;

enum class MetricKind { kPerTrial, kPerShift, kPerShiftEta };

struct MetricDef {
  const char* name;
  MetricKind kind;
};

constexpr MetricDef kRegistry[] = {
    {"disk_law", MetricKind::kPerTrial},
    {"angular_mean_abs", MetricKind::kPerTrial},
    {"eigvec_infnorm", MetricKind::kPerTrial},
    {"log_potential", MetricKind::kPerShift},
    {"smin_log", MetricKind::kPerShift},
    {"smin_floor_margin", MetricKind::kPerShift},
    {"kolmogorov_vs_gaussian", MetricKind::kPerShift},
    {"replacement_gap", MetricKind::kPerShift},
    {"gaussian_logpot_error", MetricKind::kPerShift},
    {"rigidity_ratio", MetricKind::kPerShift},
    {"stieltjes_dev", MetricKind::kPerShiftEta},
};

const MetricDef* find_metric(const std::string& name) {
  for (const auto& def : kRegistry) {
    if (name == def.name) return &def;
  }
  return nullptr;
}

struct MetricRow {
  int trial = 0;
  std::complex<double> z{0.0, 0.0};
  std::string label;
  std::string base;
  double value = 0.0;
  std::string status;  // ok, singular, degenerate, precondition, error
};

// One slot in the fixed evaluation order shared by rows, aggregates, and
// the CSV layout.
struct PlanSlot {
  std::string label;
  std::string base;
  MetricKind kind = MetricKind::kPerTrial;
  int shift_index = -1;  // into config.shifts
  int eta_index = -1;    // into config.eta_grid
};

// Theoretical smallest-singular-value floor for the configured ensemble
// at one shift, in log form. Kinds without a sharper bound use the
// profile-driven one with R = 2, kappa = 0.1; shifts that sit below its
// validity range are marked unavailable.
std::optional<double> floor_log_for(const EnsembleSpec& spec,
                                    const VarianceProfile& profile,
                                    std::complex<double> z) {
  if (const auto* p = std::get_if<BlockBandParams>(&spec.kind)) {
    return block_band_smin_floor(p->n, p->b).log_floor;
  }
  if (const auto* p = std::get_if<ProductLinearizationParams>(&spec.kind)) {
    return product_smin_floor(p->n, p->m).log_floor;
  }
  HadamardFloorParams params;
  params.sigma_star = profile.entries.maxCoeff();
  double sigma = 0.0;
  for (Eigen::Index j = 0; j < profile.entries.cols(); ++j) {
    sigma = std::max(sigma, profile.entries.col(j).norm());
  }
  for (Eigen::Index i = 0; i < profile.entries.rows(); ++i) {
    sigma = std::max(sigma, profile.entries.row(i).norm());
  }
  params.sigma = sigma;
  params.r = 2.0;
  params.kappa = 0.1;
  params.n = profile.dimension();
  params.z_abs = std::abs(z);
  try {
    return hadamard_smin_floor(params).log_floor;
  } catch (const SpecError&) {
    return std::nullopt;  // |z| below the validity range
  }
}

// Lazily evaluated per-trial state. Each ensure_* call computes one
// expensive decomposition at most once per trial.
struct TrialState {
  const ExperimentConfig* config = nullptr;
  int trial = 0;
  bool want_infnorms = false;

  std::optional<SampledMatrix> x;
  std::optional<Eigen::VectorXcd> eigs;
  std::optional<InfnormResult> infnorm;
  std::map<int, std::vector<double>> sigma;
  std::map<int, std::vector<double>> sigma_g;
  std::optional<SampledMatrix> companion;

  const SampledMatrix& sample() {
    if (!x) {
      x = sample_matrix(config->ensemble, config->master_seed,
                        static_cast<std::uint64_t>(trial));
    }
    return *x;
  }

  const SampledMatrix& gaussian_companion() {
    if (!companion) {
      EnsembleSpec g;
      g.kind = IidParams{config->ensemble.dimension()};
      g.atom = AtomSpec::make(AtomFamily::kRealGaussian);
      companion = sample_matrix(g, config->master_seed ^ kGaussianSalt,
                                static_cast<std::uint64_t>(trial));
    }
    return *companion;
  }

  void ensure_eigen_data() {
    if (want_infnorms) {
      if (!infnorm) {
        infnorm = eigenvector_max_infnorm(sample().values);
      }
      if (!eigs) eigs = eigenvalues(sample().values);
    } else if (!eigs) {
      eigs = eigenvalues(sample().values);
    }
  }

  const std::vector<double>& sigma_at(int zi) {
    auto it = sigma.find(zi);
    if (it == sigma.end()) {
      it = sigma
               .emplace(zi, singular_values(shift(sample().values,
                                                  config->shifts[zi])))
               .first;
    }
    return it->second;
  }

  const std::vector<double>& gaussian_sigma_at(int zi) {
    auto it = sigma_g.find(zi);
    if (it == sigma_g.end()) {
      it = sigma_g
               .emplace(zi,
                        singular_values(shift(gaussian_companion().values,
                                              config->shifts[zi])))
               .first;
    }
    return it->second;
  }
};

double rigidity_ratio_from_sigma(const std::vector<double>& sigma, int dim) {
  // Dilation spectrum {+sigma, -sigma}, scanned by sliding windows of
  // length 0.2 stepped by 0.05 across [-5, 5].
  std::vector<double> eigs;
  eigs.reserve(2 * sigma.size());
  for (double s : sigma) {
    eigs.push_back(s);
    eigs.push_back(-s);
  }
  std::sort(eigs.begin(), eigs.end());
  double worst = 0.0;
  for (int k = 0;; ++k) {
    const double a = -5.0 + 0.05 * k;
    const double b = a + 0.2;
    if (b > 5.0 + 1e-9) break;
    const auto lo = std::lower_bound(eigs.begin(), eigs.end(), a);
    const auto hi = std::upper_bound(eigs.begin(), eigs.end(), b);
    const double ratio =
        static_cast<double>(hi - lo) / (static_cast<double>(dim) * 0.2);
    worst = std::max(worst, ratio);
  }
  return worst;
}

struct TrialOutput {
  std::vector<MetricRow> rows;
  bool failed = false;
  std::string failure_reason;
  std::optional<SpectralSample> spectra;
};

struct RunPlan {
  std::vector<PlanSlot> slots;
  std::map<std::pair<int, int>, std::complex<double>> free_values;
  std::map<int, std::optional<double>> floor_logs;
  double band_parameter = 0.0;
};

TrialOutput run_trial(const ExperimentConfig& config, const RunPlan& plan,
                      int trial) {
  TrialOutput out;
  TrialState state;
  state.config = &config;
  state.trial = trial;
  for (const auto& m : config.metrics) {
    state.want_infnorms = state.want_infnorms || m == "eigvec_infnorm";
  }

  for (const auto& slot : plan.slots) {
    MetricRow row;
    row.trial = trial;
    row.label = slot.label;
    row.base = slot.base;
    row.z = slot.shift_index >= 0 ? config.shifts[slot.shift_index]
                                  : std::complex<double>{0.0, 0.0};
    try {
      if (slot.base == "disk_law") {
        state.ensure_eigen_data();
        std::span<const std::complex<double>> sp(state.eigs->data(),
                                                 state.eigs->size());
        row.value = disk_law_distance(sp);
        row.status = "ok";
      } else if (slot.base == "angular_mean_abs") {
        state.ensure_eigen_data();
        std::span<const std::complex<double>> sp(state.eigs->data(),
                                                 state.eigs->size());
        row.value = std::abs(angular_phase_mean(sp));
        row.status = "ok";
      } else if (slot.base == "eigvec_infnorm") {
        state.ensure_eigen_data();
        row.value = state.infnorm->value;
        row.status = state.infnorm->degenerate ? "degenerate" : "ok";
      } else if (slot.base == "log_potential") {
        row.value = log_potential(state.sigma_at(slot.shift_index));
        row.status = "ok";
      } else if (slot.base == "smin_log") {
        const auto& sv = state.sigma_at(slot.shift_index);
        const double smin = sv.back();
        if (smin == 0.0) {
          throw SingularSampleError("smallest singular value is zero");
        }
        row.value = std::log(std::max(smin, 1e-300));
        row.status = "ok";
      } else if (slot.base == "smin_floor_margin") {
        const auto& floor_log = plan.floor_logs.at(slot.shift_index);
        if (!floor_log) {
          row.value = std::numeric_limits<double>::quiet_NaN();
          row.status = "precondition";
        } else {
          const auto& sv = state.sigma_at(slot.shift_index);
          const double smin = sv.back();
          if (smin == 0.0) {
            throw SingularSampleError("smallest singular value is zero");
          }
          row.value = std::log(std::max(smin, 1e-300)) - *floor_log;
          row.status = "ok";
        }
      } else if (slot.base == "kolmogorov_vs_gaussian") {
        const auto mu = squared_singular_value_measure(
            state.sigma_at(slot.shift_index));
        const auto nu = squared_singular_value_measure(
            state.gaussian_sigma_at(slot.shift_index));
        row.value = kolmogorov_distance(mu, nu);
        row.status = "ok";
      } else if (slot.base == "replacement_gap") {
        row.value = replacement_gap(state.sigma_at(slot.shift_index),
                                    state.gaussian_sigma_at(slot.shift_index));
        row.status = "ok";
      } else if (slot.base == "gaussian_logpot_error") {
        const double lp =
            log_potential(state.gaussian_sigma_at(slot.shift_index));
        row.value =
            std::abs(lp - uniform_disk_log_potential(
                              config.shifts[slot.shift_index]));
        row.status = "ok";
      } else if (slot.base == "rigidity_ratio") {
        row.value = rigidity_ratio_from_sigma(
            state.sigma_at(slot.shift_index), config.ensemble.dimension());
        row.status = "ok";
      } else if (slot.base == "stieltjes_dev") {
        const auto m_hat = stieltjes_from_singular_values(
            state.sigma_at(slot.shift_index),
            config.eta_grid[slot.eta_index]);
        const auto m_free =
            plan.free_values.at({slot.shift_index, slot.eta_index});
        row.value = std::abs(m_hat - m_free);
        row.status = "ok";
      } else {
        throw SpecError("unknown metric in plan: " + slot.base);
      }
    } catch (const SingularSampleError& e) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.status = "singular";
      out.failed = true;
      if (out.failure_reason.empty()) out.failure_reason = e.what();
    } catch (const SolveError& e) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.status = "error";
      out.failed = true;
      if (out.failure_reason.empty()) out.failure_reason = e.what();
    }
    out.rows.push_back(std::move(row));
  }

  if (config.save_spectra && !out.failed) {
    const std::complex<double> z0 =
        config.shifts.empty() ? std::complex<double>{0.0, 0.0}
                              : config.shifts[0];
    out.spectra =
        make_spectral_sample(state.sample(), z0, state.want_infnorms);
  }
  return out;
}

double quantile(std::vector<double> sorted, double q) {
  const std::size_t k = sorted.size();
  if (k == 1) return sorted[0];
  const double pos = q * static_cast<double>(k - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, k - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

std::string csv_rows(const ExperimentConfig& config,
                     const std::vector<TrialOutput>& outputs) {
  std::ostringstream out;
  out << "trial,z_re,z_im,metric,value,status\n";
  for (int t = 0; t < config.trials; ++t) {
    for (const auto& row : outputs[static_cast<std::size_t>(t)].rows) {
      out << t << "," << format_double(row.z.real()) << ","
          << format_double(row.z.imag()) << "," << row.label << ","
          << format_double(row.value) << "," << row.status << "\n";
    }
  }
  return out.str();
}

}  // namespace

std::vector<std::string> registered_metrics() {
  std::vector<std::string> names;
  for (const auto& def : kRegistry) names.emplace_back(def.name);
  return names;
}

void ExperimentConfig::validate() const {
  ensemble.validate();
  if (trials < 1) throw SpecError("config: trials must be >= 1");
  for (auto eta : eta_grid) {
    if (!(eta.imag() > 0.0)) {
      throw SpecError("config: every eta must have Im eta > 0");
    }
  }
  for (const auto& name : metrics) {
    const auto* def = find_metric(name);
    if (def == nullptr) {
      throw SpecError("config: unknown metric '" + name + "'");
    }
    if (def->kind != MetricKind::kPerTrial && shifts.empty()) {
      throw SpecError("config: metric '" + name +
                      "' needs a nonempty shift list");
    }
    if (def->kind == MetricKind::kPerShiftEta && eta_grid.empty()) {
      throw SpecError("config: metric '" + name +
                      "' needs a nonempty eta grid");
    }
  }
  for (const auto& [name, limit] : thresholds) {
    if (std::find(metrics.begin(), metrics.end(), name) == metrics.end()) {
      throw SpecError("config: threshold on '" + name +
                      "', which is not in the metric list");
    }
    if (!std::isfinite(limit)) {
      throw SpecError("config: threshold for '" + name + "' must be finite");
    }
  }
}

RunRecord run_experiment(const ExperimentConfig& config, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  if (config.output_dir.empty()) {
    throw SpecError("config: output_dir must be set for a run");
  }

  RunPlan plan;
  {
    const VarianceProfile profile = build_variance_profile(config.ensemble);
    plan.band_parameter = profile.band_parameter();
    bool need_floor = false;
    bool need_free = false;
    for (const auto& name : config.metrics) {
      need_floor = need_floor || name == "smin_floor_margin";
      need_free = need_free || name == "stieltjes_dev";
    }
    for (const auto& name : config.metrics) {
      const auto* def = find_metric(name);
      switch (def->kind) {
        case MetricKind::kPerTrial:
          plan.slots.push_back(PlanSlot{name, name, def->kind, -1, -1});
          break;
        case MetricKind::kPerShift:
          for (int zi = 0; zi < static_cast<int>(config.shifts.size()); ++zi) {
            plan.slots.push_back(PlanSlot{name, name, def->kind, zi, -1});
          }
          break;
        case MetricKind::kPerShiftEta:
          for (int zi = 0; zi < static_cast<int>(config.shifts.size()); ++zi) {
            for (int ei = 0; ei < static_cast<int>(config.eta_grid.size());
                 ++ei) {
              plan.slots.push_back(
                  PlanSlot{name + "@eta=" + format_complex(config.eta_grid[ei]),
                           name, def->kind, zi, ei});
            }
          }
          break;
      }
    }
    if (need_floor) {
      for (int zi = 0; zi < static_cast<int>(config.shifts.size()); ++zi) {
        plan.floor_logs[zi] =
            floor_log_for(config.ensemble, profile, config.shifts[zi]);
      }
    }
    if (need_free) {
      for (int zi = 0; zi < static_cast<int>(config.shifts.size()); ++zi) {
        for (int ei = 0; ei < static_cast<int>(config.eta_grid.size()); ++ei) {
          plan.free_values[{zi, ei}] =
              solve_free_stieltjes(config.shifts[zi], config.eta_grid[ei]).m;
        }
      }
    }
  }

  // Trials are independent; distribute them over a small pool. Results
  // land in slots indexed by trial, so scheduling cannot reorder them.
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(config.trials));
  {
    int pool = workers > 0
                   ? workers
                   : static_cast<int>(std::thread::hardware_concurrency());
    pool = std::max(1, std::min(pool, config.trials));
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    auto body = [&]() {
      for (int t = next.fetch_add(1); t < config.trials;
           t = next.fetch_add(1)) {
        outputs[static_cast<std::size_t>(t)] = run_trial(config, plan, t);
      }
    };
    threads.reserve(static_cast<std::size_t>(pool - 1));
    for (int w = 1; w < pool; ++w) threads.emplace_back(body);
    body();
    for (auto& th : threads) th.join();
  }

  RunRecord record;
  record.config_digest = config_digest(config);
  record.output_dir = config.output_dir;
  record.total_trials = config.trials;
  for (int t = 0; t < config.trials; ++t) {
    record.trial_seeds.push_back(
        stream_key(config.master_seed, static_cast<std::uint64_t>(t)));
    const auto& out = outputs[static_cast<std::size_t>(t)];
    if (out.failed) {
      ++record.failed_trials;
      record.failures[t] = out.failure_reason;
    }
  }

  // Aggregates in plan order over ok rows of surviving trials.
  for (std::size_t s = 0; s < plan.slots.size(); ++s) {
    const auto& slot = plan.slots[s];
    std::vector<double> values;
    for (int t = 0; t < config.trials; ++t) {
      const auto& out = outputs[static_cast<std::size_t>(t)];
      if (out.failed) continue;
      const auto& row = out.rows[s];
      if (row.status == "ok") values.push_back(row.value);
    }
    MetricAggregate agg;
    agg.metric = slot.label;
    agg.z = slot.shift_index >= 0 ? config.shifts[slot.shift_index]
                                  : std::complex<double>{0.0, 0.0};
    agg.count = static_cast<long>(values.size());
    if (!values.empty()) {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var = values.size() > 1
                ? var / static_cast<double>(values.size() - 1)
                : 0.0;
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      agg.mean = mean;
      agg.stddev = std::sqrt(var);
      agg.min = sorted.front();
      agg.max = sorted.back();
      agg.q05 = quantile(sorted, 0.05);
      agg.q50 = quantile(sorted, 0.50);
      agg.q95 = quantile(sorted, 0.95);
    }
    record.aggregates.push_back(std::move(agg));
  }

  // Thresholds gate the maximum ok value of every row sharing the base
  // metric name.
  record.pass = true;
  for (const auto& [name, limit] : config.thresholds) {
    ThresholdVerdict verdict;
    verdict.limit = limit;
    verdict.pass = true;
    for (std::size_t s = 0; s < plan.slots.size(); ++s) {
      if (plan.slots[s].base != name) continue;
      for (int t = 0; t < config.trials; ++t) {
        const auto& out = outputs[static_cast<std::size_t>(t)];
        if (out.failed) continue;
        const auto& row = out.rows[s];
        if (row.status == "ok" && !(row.value <= limit)) {
          verdict.pass = false;
        }
      }
    }
    record.pass = record.pass && verdict.pass;
    record.thresholds[name] = verdict;
  }

  const auto t1 = std::chrono::steady_clock::now();
  record.wall_seconds =
      std::chrono::duration<double>(t1 - t0).count();

  // Persist: metrics.csv (byte-stable given config), manifest.json, and
  // optional per-trial spectra.
  std::filesystem::create_directories(config.output_dir);
  write_text_file(config.output_dir / "metrics.csv",
                  csv_rows(config, outputs));

  json manifest;
  manifest["digest"] = record.config_digest;
  manifest["config"] = json::parse(dump_experiment_config(config));
  manifest["seed_derivation"] =
      "trial stream key = mix64(mix64(master_seed) ^ mix64(trial ^ "
      "0x9E3779B97F4A7C15)); entry (i, j) uses counters (2k, 2k+1) with "
      "k = i*dim + j; paired Gaussian sample reuses the trial index with "
      "master_seed ^ 0x474155535349414E";
  manifest["trial_seeds"] = record.trial_seeds;
  manifest["trials"] = {{"total", record.total_trials},
                        {"failed", record.failed_trials}};
  json failures = json::object();
  for (const auto& [t, reason] : record.failures) {
    failures[std::to_string(t)] = reason;
  }
  manifest["trials"]["failures"] = std::move(failures);
  json aggs = json::array();
  for (const auto& a : record.aggregates) {
    aggs.push_back({{"metric", a.metric},
                    {"z_re", a.z.real()},
                    {"z_im", a.z.imag()},
                    {"count", a.count},
                    {"mean", a.mean},
                    {"stddev", a.stddev},
                    {"min", a.min},
                    {"max", a.max},
                    {"q05", a.q05},
                    {"q50", a.q50},
                    {"q95", a.q95}});
  }
  manifest["aggregates"] = std::move(aggs);
  json th = json::object();
  for (const auto& [name, verdict] : record.thresholds) {
    th[name] = {{"limit", verdict.limit}, {"pass", verdict.pass}};
  }
  manifest["thresholds"] = std::move(th);
  manifest["pass"] = record.pass;
  manifest["wall_seconds"] = record.wall_seconds;
  write_text_file(config.output_dir / "manifest.json", manifest.dump(2) + "\n");

  if (config.save_spectra) {
    for (int t = 0; t < config.trials; ++t) {
      const auto& out = outputs[static_cast<std::size_t>(t)];
      if (!out.spectra) continue;
      const auto dir = config.output_dir / "trials" / std::to_string(t);
      std::filesystem::create_directories(dir);
      std::ostringstream ss;
      write_spectral_sample_csv(ss, *out.spectra);
      write_text_file(dir / "spectra.csv", ss.str());
    }
  }

  if (2 * record.failed_trials > record.total_trials) {
    throw RunError("run failed: " + std::to_string(record.failed_trials) +
                   " of " + std::to_string(record.total_trials) +
                   " trials failed; outputs kept at " +
                   config.output_dir.string());
  }
  return record;
}

RunRecord load_run_record(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw SpecError("manifest: invalid JSON in " + manifest_path.string() +
                    ": " + e.what());
  }
  RunRecord record;
  record.output_dir = dir;
  try {
    record.config_digest = manifest.at("digest").get<std::string>();
    record.trial_seeds =
        manifest.at("trial_seeds").get<std::vector<std::uint64_t>>();
    record.total_trials = manifest.at("trials").at("total").get<int>();
    record.failed_trials = manifest.at("trials").at("failed").get<int>();
    for (const auto& [t, reason] :
         manifest.at("trials").at("failures").items()) {
      record.failures[std::stoi(t)] = reason.get<std::string>();
    }
    for (const auto& a : manifest.at("aggregates")) {
      MetricAggregate agg;
      agg.metric = a.at("metric").get<std::string>();
      agg.z = {a.at("z_re").get<double>(), a.at("z_im").get<double>()};
      agg.count = a.at("count").get<long>();
      agg.mean = a.at("mean").get<double>();
      agg.stddev = a.at("stddev").get<double>();
      agg.min = a.at("min").get<double>();
      agg.max = a.at("max").get<double>();
      agg.q05 = a.at("q05").get<double>();
      agg.q50 = a.at("q50").get<double>();
      agg.q95 = a.at("q95").get<double>();
      record.aggregates.push_back(std::move(agg));
    }
    for (const auto& [name, verdict] : manifest.at("thresholds").items()) {
      record.thresholds[name] = ThresholdVerdict{
          verdict.at("limit").get<double>(), verdict.at("pass").get<bool>()};
    }
    record.pass = manifest.at("pass").get<bool>();
    record.wall_seconds = manifest.at("wall_seconds").get<double>();
  } catch (const json::exception& e) {
    throw SpecError("manifest: missing or malformed field: " +
                    std::string(e.what()));
  }
  return record;
}

SummaryReport summarize(const RunRecord& record) {
  std::ostringstream out;
  out << "run " << record.config_digest << "\n";
  out << "trials: " << record.total_trials - record.failed_trials << " ok, "
      << record.failed_trials << " failed, " << record.total_trials
      << " total\n\n";

  char line[256];
  std::snprintf(line, sizeof(line), "%-34s %-14s %5s %12s %12s %12s %12s %12s\n",
                "metric", "z", "count", "mean", "stddev", "q05", "q50", "q95");
  out << line;
  for (const auto& a : record.aggregates) {
    std::snprintf(line, sizeof(line),
                  "%-34s %-14s %5ld %12.5g %12.5g %12.5g %12.5g %12.5g\n",
                  a.metric.c_str(), format_complex(a.z).c_str(), a.count,
                  a.mean, a.stddev, a.q05, a.q50, a.q95);
    out << line;
  }

  if (!record.thresholds.empty()) {
    out << "\nthresholds:\n";
    for (const auto& [name, verdict] : record.thresholds) {
      std::snprintf(line, sizeof(line), "  %-32s <= %-12.5g %s\n",
                    name.c_str(), verdict.limit,
                    verdict.pass ? "PASS" : "FAIL");
      out << line;
    }
  }
  out << "\noverall: " << (record.pass ? "PASS" : "FAIL") << "\n";
  return SummaryReport{out.str(), record.pass};
}

std::vector<FreeDeviationRow> compare_to_free(
    const EnsembleSpec& ensemble,
    std::span<const std::complex<double>> shifts,
    std::span<const std::complex<double>> eta_grid, int trials,
    std::uint64_t master_seed, int workers) {
  ensemble.validate();
  if (trials < 1) throw SpecError("compare_to_free requires trials >= 1");
  if (shifts.empty() || eta_grid.empty()) {
    throw SpecError("compare_to_free requires nonempty shift and eta lists");
  }
  for (auto eta : eta_grid) {
    if (!(eta.imag() > 0.0)) {
      throw SpecError("compare_to_free requires Im eta > 0");
    }
  }

  // Per-trial Stieltjes values on the (z, eta) grid, then a sequential
  // mean in trial order so the result is worker-count independent.
  const std::size_t cells = shifts.size() * eta_grid.size();
  std::vector<std::vector<std::complex<double>>> per_trial(
      static_cast<std::size_t>(trials));
  {
    int pool = workers > 0
                   ? workers
                   : static_cast<int>(std::thread::hardware_concurrency());
    pool = std::max(1, std::min(pool, trials));
    std::atomic<int> next{0};
    auto body = [&]() {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
        auto& cell = per_trial[static_cast<std::size_t>(t)];
        cell.resize(cells);
        const auto x =
            sample_matrix(ensemble, master_seed, static_cast<std::uint64_t>(t));
        for (std::size_t zi = 0; zi < shifts.size(); ++zi) {
          const auto sv = singular_values(shift(x.values, shifts[zi]));
          for (std::size_t ei = 0; ei < eta_grid.size(); ++ei) {
            cell[zi * eta_grid.size() + ei] =
                stieltjes_from_singular_values(sv, eta_grid[ei]);
          }
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(pool - 1));
    for (int w = 1; w < pool; ++w) threads.emplace_back(body);
    body();
    for (auto& th : threads) th.join();
  }

  std::vector<FreeDeviationRow> rows;
  rows.reserve(cells);
  for (std::size_t zi = 0; zi < shifts.size(); ++zi) {
    for (std::size_t ei = 0; ei < eta_grid.size(); ++ei) {
      std::complex<double> mean{0.0, 0.0};
      for (int t = 0; t < trials; ++t) {
        mean += per_trial[static_cast<std::size_t>(t)][zi * eta_grid.size() + ei];
      }
      mean /= static_cast<double>(trials);
      FreeDeviationRow row;
      row.z = shifts[zi];
      row.eta = eta_grid[ei];
      row.mean_empirical = mean;
      row.free_value = solve_free_stieltjes(shifts[zi], eta_grid[ei]).m;
      row.deviation = std::abs(mean - row.free_value);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace bandlab
