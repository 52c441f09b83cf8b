// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "bandlab/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "bandlab/errors.hpp"

namespace bandlab {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_complex(std::complex<double> v) {
  std::string s = format_double(v.real());
  if (!(v.imag() < 0.0)) s += "+";
  s += format_double(v.imag());
  s += "i";
  return s;
}

namespace {

double parse_double_token(const std::string& tok, const char* context) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' ||
                          *(last - 1) == '\r')) {
    --last;
  }
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw SpecError(std::string(context) + ": cannot parse number '" + tok +
                    "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

bool is_skippable(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;  // blank
}

json atom_to_json(const AtomSpec& spec) {
  json j;
  j["family"] = atom_family_name(spec.family);
  j["subgaussian_k"] = spec.subgaussian_k;
  if (spec.density_bound) j["density_bound"] = *spec.density_bound;
  if (spec.truncation_threshold) {
    j["truncation_threshold"] = *spec.truncation_threshold;
  }
  return j;
}

AtomSpec atom_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("atom: expected a JSON object");
  if (!j.contains("family")) throw SpecError("atom: missing key 'family'");
  AtomSpec spec = AtomSpec::make(
      atom_family_from_name(j.at("family").get<std::string>()));
  if (j.contains("subgaussian_k")) {
    spec.subgaussian_k = j.at("subgaussian_k").get<double>();
  }
  if (j.contains("density_bound")) {
    spec.density_bound = j.at("density_bound").get<double>();
  }
  if (j.contains("truncation_threshold")) {
    spec.truncation_threshold = j.at("truncation_threshold").get<double>();
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "family" && key != "subgaussian_k" && key != "density_bound" &&
        key != "truncation_threshold") {
      throw SpecError("atom: unknown key '" + key + "'");
    }
  }
  return spec;
}

json ensemble_to_json(const EnsembleSpec& spec) {
  json j;
  j["kind"] = spec.kind_name();
  if (const auto* p = std::get_if<BlockBandParams>(&spec.kind)) {
    j["n"] = p->n;
    j["b"] = p->b;
  } else if (const auto* p = std::get_if<PeriodicBandParams>(&spec.kind)) {
    j["n"] = p->n;
    j["d"] = p->d;
  } else if (const auto* p = std::get_if<IidParams>(&spec.kind)) {
    j["n"] = p->n;
  } else if (const auto* p = std::get_if<GeneralProfileParams>(&spec.kind)) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < p->entries.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < p->entries.cols(); ++c) {
        row.push_back(p->entries(i, c));
      }
      rows.push_back(std::move(row));
    }
    j["entries"] = std::move(rows);
  } else if (const auto* p =
                 std::get_if<ProductLinearizationParams>(&spec.kind)) {
    j["n"] = p->n;
    j["m"] = p->m;
  }
  j["atom"] = atom_to_json(spec.atom);
  return j;
}

int require_int(const json& j, const char* key, const char* context) {
  if (!j.contains(key)) {
    throw SpecError(std::string(context) + ": missing key '" + key + "'");
  }
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    throw SpecError(std::string(context) + ": key '" + key +
                    "' must be an integer");
  }
  return v.get<int>();
}

EnsembleSpec ensemble_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("ensemble: expected a JSON object");
  if (!j.contains("kind")) throw SpecError("ensemble: missing key 'kind'");
  const std::string kind = j.at("kind").get<std::string>();

  EnsembleSpec spec;
  if (kind == "block-band") {
    spec.kind = BlockBandParams{require_int(j, "n", "ensemble"),
                                require_int(j, "b", "ensemble")};
  } else if (kind == "periodic-band") {
    spec.kind = PeriodicBandParams{require_int(j, "n", "ensemble"),
                                   require_int(j, "d", "ensemble")};
  } else if (kind == "iid-gaussian") {
    spec.kind = IidParams{require_int(j, "n", "ensemble")};
  } else if (kind == "general-profile") {
    if (!j.contains("entries") || !j.at("entries").is_array()) {
      throw SpecError("ensemble: general-profile needs an 'entries' array");
    }
    const auto& rows = j.at("entries");
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd entries(n, n);
    for (int i = 0; i < n; ++i) {
      const auto& row = rows.at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        throw SpecError("ensemble: 'entries' must be a square table");
      }
      for (int c = 0; c < n; ++c) {
        entries(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
      }
    }
    spec.kind = GeneralProfileParams{std::move(entries)};
  } else if (kind == "product-linearization") {
    spec.kind = ProductLinearizationParams{require_int(j, "n", "ensemble"),
                                           require_int(j, "m", "ensemble")};
  } else {
    throw SpecError("ensemble: unknown kind '" + kind + "'");
  }
  if (!j.contains("atom")) throw SpecError("ensemble: missing key 'atom'");
  spec.atom = atom_from_json(j.at("atom"));
  spec.validate();
  return spec;
}

std::vector<std::complex<double>> complex_list_from_json(const json& j,
                                                         const char* key) {
  if (!j.is_array()) {
    throw SpecError(std::string("config: '") + key +
                    "' must be an array of [re, im] pairs");
  }
  std::vector<std::complex<double>> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2) {
      throw SpecError(std::string("config: each entry of '") + key +
                      "' must be an [re, im] pair");
    }
    out.emplace_back(item.at(0).get<double>(), item.at(1).get<double>());
  }
  return out;
}

json complex_list_to_json(std::span<const std::complex<double>> xs) {
  json j = json::array();
  for (auto x : xs) j.push_back(json::array({x.real(), x.imag()}));
  return j;
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["ensemble"] = ensemble_to_json(config.ensemble);
  j["shifts"] = complex_list_to_json(config.shifts);
  j["eta_grid"] = complex_list_to_json(config.eta_grid);
  j["trials"] = config.trials;
  j["master_seed"] = config.master_seed;
  j["metrics"] = config.metrics;
  json th = json::object();
  for (const auto& [name, limit] : config.thresholds) th[name] = limit;
  j["thresholds"] = std::move(th);
  j["output_dir"] = config.output_dir.string();
  j["save_spectra"] = config.save_spectra;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("config: expected a JSON object");
  constexpr const char* known[] = {"ensemble",    "shifts",     "eta_grid",
                                   "trials",      "master_seed", "metrics",
                                   "thresholds",  "output_dir", "save_spectra"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw SpecError("config: unknown key '" + key + "'");
  }
  ExperimentConfig config;
  if (!j.contains("ensemble")) throw SpecError("config: missing 'ensemble'");
  config.ensemble = ensemble_from_json(j.at("ensemble"));
  if (j.contains("shifts")) {
    config.shifts = complex_list_from_json(j.at("shifts"), "shifts");
  }
  if (j.contains("eta_grid")) {
    config.eta_grid = complex_list_from_json(j.at("eta_grid"), "eta_grid");
  }
  config.trials = require_int(j, "trials", "config");
  if (!j.contains("master_seed")) {
    throw SpecError("config: missing 'master_seed'");
  }
  config.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (!j.contains("metrics") || !j.at("metrics").is_array()) {
    throw SpecError("config: missing 'metrics' array");
  }
  config.metrics = j.at("metrics").get<std::vector<std::string>>();
  if (j.contains("thresholds")) {
    if (!j.at("thresholds").is_object()) {
      throw SpecError("config: 'thresholds' must be an object");
    }
    for (const auto& [name, limit] : j.at("thresholds").items()) {
      config.thresholds[name] = limit.get<double>();
    }
  }
  if (j.contains("output_dir")) {
    config.output_dir = j.at("output_dir").get<std::string>();
  }
  if (j.contains("save_spectra")) {
    config.save_spectra = j.at("save_spectra").get<bool>();
  }
  return config;
}

json parse_json_text(const std::string& text, const char* context) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string(context) + ": invalid JSON: " + e.what());
  }
}

}  // namespace

std::string dump_atom_spec(const AtomSpec& spec) {
  return atom_to_json(spec).dump(2);
}

AtomSpec parse_atom_spec(const std::string& json_text) {
  try {
    return atom_from_json(parse_json_text(json_text, "atom"));
  } catch (const json::exception& e) {
    throw SpecError(std::string("atom: ") + e.what());
  }
}

std::string dump_ensemble_spec(const EnsembleSpec& spec) {
  return ensemble_to_json(spec).dump(2);
}

EnsembleSpec parse_ensemble_spec(const std::string& json_text) {
  try {
    return ensemble_from_json(parse_json_text(json_text, "ensemble"));
  } catch (const json::exception& e) {
    throw SpecError(std::string("ensemble: ") + e.what());
  }
}

std::string dump_experiment_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2);
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  try {
    return config_from_json(parse_json_text(json_text, "config"));
  } catch (const json::exception& e) {
    throw SpecError(std::string("config: ") + e.what());
  }
}

std::string config_digest(const ExperimentConfig& config) {
  // Canonical form: nlohmann objects iterate keys in sorted order, and
  // dump() renders doubles as shortest round-trip strings.
  const std::string canonical = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string("fnv1a64:") + buf;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXcd& m) {
  out << "# complex matrix, row-major, cells as re,im pairs; " << m.rows()
      << "x" << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ",";
      out << format_double(m(i, j).real()) << ","
          << format_double(m(i, j).imag());
    }
    out << "\n";
  }
}

Eigen::MatrixXcd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<std::complex<double>>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (is_skippable(line)) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() % 2 != 0) {
      throw SpecError("matrix csv: each row needs an even number of fields");
    }
    std::vector<std::complex<double>> row;
    row.reserve(fields.size() / 2);
    for (std::size_t k = 0; k + 1 < fields.size(); k += 2) {
      row.emplace_back(parse_double_token(fields[k], "matrix csv"),
                       parse_double_token(fields[k + 1], "matrix csv"));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw SpecError("matrix csv: rows have inconsistent lengths");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SpecError("matrix csv: no data rows");
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_spectral_sample_csv(std::ostream& out, const SpectralSample& s) {
  out << "index,eig_re,eig_im,sigma,infnorm\n";
  const Eigen::Index n = s.eigenvalues.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    out << i << "," << format_double(s.eigenvalues(i).real()) << ","
        << format_double(s.eigenvalues(i).imag()) << ","
        << format_double(s.singular_values[static_cast<std::size_t>(i)]);
    out << ",";
    if (s.eigenvector_infnorms) {
      out << format_double((*s.eigenvector_infnorms)[static_cast<std::size_t>(i)]);
    }
    out << "\n";
  }
}

void write_dyson_csv(std::ostream& out,
                     std::span<const FreeStieltjesSolution> rows) {
  out << "z_re,z_im,eta_re,eta_im,a_re,a_im,b_re,b_im,c_re,c_im,m_re,m_im\n";
  for (const auto& r : rows) {
    out << format_double(r.z.real()) << "," << format_double(r.z.imag()) << ","
        << format_double(r.eta.real()) << "," << format_double(r.eta.imag())
        << "," << format_double(r.a.real()) << "," << format_double(r.a.imag())
        << "," << format_double(r.b.real()) << "," << format_double(r.b.imag())
        << "," << format_double(r.c.real()) << "," << format_double(r.c.imag())
        << "," << format_double(r.m.real()) << "," << format_double(r.m.imag())
        << "\n";
  }
}

WeightedValues read_values_csv(std::istream& in) {
  WeightedValues out;
  bool any_weight = false;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() > 2) {
      throw SpecError("values csv: line " + std::to_string(line_no) +
                      " has more than two fields");
    }
    out.values.push_back(parse_double_token(fields[0], "values csv"));
    if (fields.size() == 2) {
      any_weight = true;
      out.weights.push_back(parse_double_token(fields[1], "values csv"));
    } else if (any_weight) {
      throw SpecError("values csv: weights must be given on every line or "
                      "none");
    }
  }
  if (out.values.empty()) throw SpecError("values csv: no data rows");
  if (any_weight && out.weights.size() != out.values.size()) {
    throw SpecError("values csv: weights must be given on every line or none");
  }
  return out;
}

std::vector<std::complex<double>> read_complex_csv(std::istream& in) {
  std::vector<std::complex<double>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_skippable(line)) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw SpecError("complex csv: each line needs exactly re,im");
    }
    out.emplace_back(parse_double_token(fields[0], "complex csv"),
                     parse_double_token(fields[1], "complex csv"));
  }
  if (out.empty()) throw SpecError("complex csv: no data rows");
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write file: " + path.string());
  out << content;
  if (!out) throw SpecError("write failed: " + path.string());
}

}  // namespace bandlab
