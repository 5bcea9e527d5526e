#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "dapien/bootstrap.hpp"
#include "dapien/distributions.hpp"
#include "dapien/metrics.hpp"
#include "dapien/regressor.hpp"
#include "dapien/types.hpp"

namespace dapien {

struct ExperimentSeeds {
  std::uint64_t data = 42;
  std::uint64_t split = 42;
  std::uint64_t train = 42;
};

/// One DAPIEN-vs-Bootstrap comparison. `dataset` is "A", "B", "C" or a CSV
/// path; relative paths (dataset and output_dir) resolve against base_dir.
struct ExperimentConfig {
  std::string dataset = "A";
  DistFamily family = DistFamily::Gaussian;
  double confidence = 0.95;
  int bootstrap_b = 20;
  BootstrapSigma bootstrap_sigma = BootstrapSigma::SummedVariance;
  ExperimentSeeds seeds;
  double cwc_mu = 0.95;
  double cwc_eta = 50.0;
  double test_fraction = 0.2;
  int d = 10;
  int replicates = 20;
  TrainConfig train;
  std::string output_dir = "out";
  std::filesystem::path base_dir;  // not serialized

  std::filesystem::path resolved_output_dir() const;
};

/// Builds a config from JSON, filling defaults. The family defaults to gamma
/// for dataset C and Gaussian otherwise; cwc_mu defaults to confidence.
/// Unknown keys and out-of-range values throw ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

struct ExperimentResult {
  EvaluationReport dapien;
  EvaluationReport bootstrap;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<BitVector> dropped_groups;
};

/// Loads or generates the data, splits it by input, fits both methods,
/// evaluates them on the test split and writes report.json, intervals.csv,
/// config.json, dapien_model.json and bootstrap_model.json to the output
/// directory. Warnings go to `log`. Nothing is written unless every step
/// succeeds; files already written are removed if a later write fails.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Process exit status for an error raised by run_experiment or config
/// loading: 1 for configuration/input problems, 2 for runtime failures.
int exit_code_for(const std::exception& error);

struct SuiteEntry {
  std::string name;
  ExperimentConfig config;
};

struct SuiteRow {
  std::string name;
  bool ok = false;
  std::string error;
  ExperimentResult result;
};

struct SuiteResult {
  std::vector<SuiteRow> rows;
  bool any_failed() const;
};

SuiteResult run_suite(const std::vector<SuiteEntry>& entries, std::ostream& log);

/// Every *.json file in `dir`, sorted by file name; the name is the stem.
std::vector<SuiteEntry> load_suite(const std::filesystem::path& dir);

/// Methods as rows, one PICP/MPIW column pair per experiment.
std::string format_suite_markdown(const SuiteResult& suite);
std::string format_suite_csv(const SuiteResult& suite);

}  // namespace dapien
