// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bandlab/dyson.hpp"
#include "bandlab/ensemble.hpp"
#include "bandlab/experiment.hpp"
#include "bandlab/spectra.hpp"

namespace bandlab {

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);
std::string format_complex(std::complex<double> v);  // "re+imi" / "re-imi"

// JSON round trips. Parsing validates the result; errors raise SpecError
// with the offending key in the message.
std::string dump_atom_spec(const AtomSpec& spec);
AtomSpec parse_atom_spec(const std::string& json_text);

std::string dump_ensemble_spec(const EnsembleSpec& spec);
EnsembleSpec parse_ensemble_spec(const std::string& json_text);

std::string dump_experiment_config(const ExperimentConfig& config);
ExperimentConfig parse_experiment_config(const std::string& json_text);

// FNV-1a 64 digest of the canonical (sorted-key) JSON encoding, rendered
// as "fnv1a64:<16 hex digits>". Any semantic change to the config changes
// the digest.
std::string config_digest(const ExperimentConfig& config);

// Complex matrix as CSV, row major, each entry as a "re,im" cell pair.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_matrix_csv(std::istream& in);

// Columns: index,eig_re,eig_im,sigma,infnorm. The infnorm cell is empty
// when sup norms were not computed.
void write_spectral_sample_csv(std::ostream& out, const SpectralSample& s);

// Columns: z_re,z_im,eta_re,eta_im,a_re,a_im,b_re,b_im,c_re,c_im,m_re,m_im.
void write_dyson_csv(std::ostream& out,
                     std::span<const FreeStieltjesSolution> rows);

// Real values, one per line ("#" comments and blank lines are skipped).
// An optional second column holds a weight.
struct WeightedValues {
  std::vector<double> values;
  std::vector<double> weights;  // empty when no weights were given
};
WeightedValues read_values_csv(std::istream& in);

// Complex values, one "re,im" pair per line.
std::vector<std::complex<double>> read_complex_csv(std::istream& in);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace bandlab
