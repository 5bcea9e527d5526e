#include "dapien/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "dapien/bootstrap.hpp"
#include "dapien/dapien.hpp"
#include "dapien/error.hpp"
#include "dapien/serialization.hpp"
#include "dapien/synthdata.hpp"

namespace dapien {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

bool is_builtin(const std::string& dataset) {
  return dataset == "A" || dataset == "B" || dataset == "C";
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
T get_field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::ConfigError, std::string("field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.contains(key)) throw Error(ErrorKind::ConfigError, "unknown key '" + key + "' in " + where);
  }
}

std::vector<Sample> load_samples(const ExperimentConfig& config) {
  if (is_builtin(config.dataset)) {
    GeneratorSpec spec = dataset_spec(config.dataset[0], config.seeds.data);
    spec.d = config.d;
    spec.replicates = config.replicates;
    return generate(spec);
  }
  fs::path path = config.dataset;
  if (path.is_relative()) path = config.base_dir / path;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open dataset '" + path.string() + "'");
  return read_csv(in);
}

std::string render_intervals(const std::vector<Sample>& test, const std::vector<PredictionInterval>& dap,
                             const std::vector<double>& dap_point, const std::vector<PredictionInterval>& boot,
                             const std::vector<double>& boot_point) {
  std::ostringstream out;
  const std::size_t d = test.empty() ? 0 : test.front().x.size();
  for (std::size_t j = 0; j < d; ++j) out << "x_" << j << ',';
  out << "y,dapien_lower,dapien_point,dapien_upper,bootstrap_lower,bootstrap_point,bootstrap_upper\n";
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (auto bit : test[i].x) out << static_cast<int>(bit) << ',';
    out << format_double(test[i].y) << ',' << format_double(dap[i].lower) << ',' << format_double(dap_point[i])
        << ',' << format_double(dap[i].upper) << ',' << format_double(boot[i].lower) << ','
        << format_double(boot_point[i]) << ',' << format_double(boot[i].upper) << '\n';
  }
  return out.str();
}

void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::DomainError, "cannot create output directory '" + dir.string() + "'");
  std::vector<fs::path> written;
  for (const auto& [name, content] : files) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
      for (const auto& p : written) fs::remove(p, ec);
      fs::remove(path, ec);
      throw Error(ErrorKind::DomainError, "failed writing '" + path.string() + "'");
    }
    written.push_back(path);
  }
}

std::string percent(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << 100.0 * v << '%';
  return out.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

}  // namespace

fs::path ExperimentConfig::resolved_output_dir() const {
  fs::path out = output_dir;
  return out.is_relative() ? base_dir / out : out;
}

ExperimentConfig parse_experiment_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  reject_unknown(doc,
                 {"dataset", "family", "confidence", "bootstrap_b", "bootstrap_sigma", "seeds", "cwc_mu",
                  "cwc_eta", "test_fraction", "d", "replicates", "train", "output_dir"},
                 "config");
  ExperimentConfig config;
  config.base_dir = base_dir;
  config.dataset = get_field<std::string>(doc, "dataset", config.dataset);
  if (config.dataset.empty()) throw Error(ErrorKind::ConfigError, "dataset must not be empty");
  const std::string default_family = config.dataset == "C" ? "gamma" : "gaussian";
  config.family = parse_family(get_field<std::string>(doc, "family", default_family));
  config.confidence = get_field<double>(doc, "confidence", config.confidence);
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    throw Error(ErrorKind::ConfigError, "confidence must lie in (0, 1)");
  }
  config.bootstrap_b = get_field<int>(doc, "bootstrap_b", config.bootstrap_b);
  if (config.bootstrap_b < 2) throw Error(ErrorKind::ConfigError, "bootstrap_b must be at least 2");
  config.bootstrap_sigma =
      parse_bootstrap_sigma(get_field<std::string>(doc, "bootstrap_sigma", "summed_variance"));
  if (doc.contains("seeds")) {
    const json& seeds = doc.at("seeds");
    if (!seeds.is_object()) throw Error(ErrorKind::ConfigError, "seeds must be an object");
    reject_unknown(seeds, {"data", "split", "train"}, "seeds");
    config.seeds.data = get_field<std::uint64_t>(seeds, "data", config.seeds.data);
    config.seeds.split = get_field<std::uint64_t>(seeds, "split", config.seeds.split);
    config.seeds.train = get_field<std::uint64_t>(seeds, "train", config.seeds.train);
  }
  config.cwc_mu = get_field<double>(doc, "cwc_mu", config.confidence);
  config.cwc_eta = get_field<double>(doc, "cwc_eta", config.cwc_eta);
  if (!(config.cwc_mu > 0.0 && config.cwc_mu < 1.0) || !(config.cwc_eta >= 0.0)) {
    throw Error(ErrorKind::ConfigError, "cwc_mu must lie in (0, 1) and cwc_eta must be nonnegative");
  }
  config.test_fraction = get_field<double>(doc, "test_fraction", config.test_fraction);
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw Error(ErrorKind::ConfigError, "test_fraction must lie in (0, 1)");
  }
  config.d = get_field<int>(doc, "d", config.d);
  config.replicates = get_field<int>(doc, "replicates", config.replicates);
  if (config.d < 1 || config.d > 24 || config.replicates < 1) {
    throw Error(ErrorKind::ConfigError, "d must lie in [1, 24] and replicates must be positive");
  }
  if (doc.contains("train")) {
    const json& t = doc.at("train");
    if (!t.is_object()) throw Error(ErrorKind::ConfigError, "train must be an object");
    reject_unknown(t, {"max_iterations", "gradient_tolerance", "folds", "l2_penalty"}, "train");
    config.train.max_iterations = get_field<int>(t, "max_iterations", config.train.max_iterations);
    config.train.gradient_tolerance = get_field<double>(t, "gradient_tolerance", config.train.gradient_tolerance);
    config.train.folds = get_field<int>(t, "folds", config.train.folds);
    config.train.l2_penalty = get_field<double>(t, "l2_penalty", config.train.l2_penalty);
    if (config.train.max_iterations < 1 || !(config.train.gradient_tolerance > 0.0) ||
        !(config.train.l2_penalty >= 0.0)) {
      throw Error(ErrorKind::ConfigError, "invalid training settings");
    }
  }
  config.train.seed = config.seeds.train;
  config.output_dir = get_field<std::string>(doc, "output_dir", config.output_dir);
  return config;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, "invalid JSON in '" + path.string() + "': " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

json to_json(const ExperimentConfig& config) {
  return {{"dataset", config.dataset},
          {"family", to_string(config.family)},
          {"confidence", config.confidence},
          {"bootstrap_b", config.bootstrap_b},
          {"bootstrap_sigma", to_string(config.bootstrap_sigma)},
          {"seeds", {{"data", config.seeds.data}, {"split", config.seeds.split}, {"train", config.seeds.train}}},
          {"cwc_mu", config.cwc_mu},
          {"cwc_eta", config.cwc_eta},
          {"test_fraction", config.test_fraction},
          {"d", config.d},
          {"replicates", config.replicates},
          {"train",
           {{"max_iterations", config.train.max_iterations},
            {"gradient_tolerance", config.train.gradient_tolerance},
            {"folds", config.train.folds},
            {"l2_penalty", config.train.l2_penalty}}},
          {"output_dir", config.output_dir}};
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const std::vector<Sample> samples = load_samples(config);
  const Split split = group_split(samples, {config.test_fraction, config.seeds.split});

  ExperimentResult result;
  result.n_train = split.train.size();
  result.n_test = split.test.size();

  DegenerateFilter filtered = drop_degenerate_groups(split.train, config.family);
  if (!filtered.dropped.empty()) {
    log << "warning: dropped " << filtered.dropped.size() << " training group(s) that cannot be fitted with the "
        << to_string(config.family) << " family:";
    for (const auto& x : filtered.dropped) log << ' ' << bit_key(x);
    log << '\n';
  }
  result.dropped_groups = filtered.dropped;
  if (filtered.kept.empty()) {
    throw Error(ErrorKind::EmptyDataset, "no fittable training groups remain");
  }

  const DapienModel dapien_model = dapien_fit(filtered.kept, config.family, config.train);
  const BootstrapModel boot_model = bootstrap_fit(split.train, config.bootstrap_b, config.train);

  std::vector<PredictionInterval> dap_pi;
  std::vector<PredictionInterval> boot_pi;
  std::vector<double> dap_point;
  std::vector<double> boot_point;
  std::vector<double> targets;
  for (const Sample& s : split.test) {
    dap_pi.push_back(dapien_predict_interval(dapien_model, s.x, config.confidence));
    dap_point.push_back(dapien_predict_point(dapien_model, s.x));
    boot_pi.push_back(bootstrap_predict_interval(boot_model, s.x, config.confidence, config.bootstrap_sigma));
    boot_point.push_back(bootstrap_predict_point(boot_model, s.x));
    targets.push_back(s.y);
  }
  result.dapien = evaluate(dap_pi, targets, config.confidence, config.cwc_mu, config.cwc_eta);
  result.bootstrap = evaluate(boot_pi, targets, config.confidence, config.cwc_mu, config.cwc_eta);

  const json report = {{"dapien", to_json(result.dapien)}, {"bootstrap", to_json(result.bootstrap)}};
  write_outputs(config.resolved_output_dir(),
                {{"config.json", to_json(config).dump(2) + "\n"},
                 {"dapien_model.json", to_json(dapien_model).dump(2) + "\n"},
                 {"bootstrap_model.json", to_json(boot_model).dump(2) + "\n"},
                 {"intervals.csv", render_intervals(split.test, dap_pi, dap_point, boot_pi, boot_point)},
                 {"report.json", report.dump(2) + "\n"}});
  return result;
}

int exit_code_for(const std::exception& error) {
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    if (e->kind() == ErrorKind::ConfigError || e->kind() == ErrorKind::ParseError) return 1;
  }
  return 2;
}

bool SuiteResult::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return !r.ok; });
}

SuiteResult run_suite(const std::vector<SuiteEntry>& entries, std::ostream& log) {
  SuiteResult suite;
  for (const SuiteEntry& entry : entries) {
    SuiteRow row;
    row.name = entry.name;
    try {
      row.result = run_experiment(entry.config, log);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      log << "experiment '" << entry.name << "' failed: " << e.what() << '\n';
    }
    suite.rows.push_back(std::move(row));
  }
  return suite;
}

std::vector<SuiteEntry> load_suite(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::ConfigError, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".json") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SuiteEntry> entries;
  for (const auto& file : files) entries.push_back({file.stem().string(), load_experiment_config(file)});
  return entries;
}

std::string format_suite_markdown(const SuiteResult& suite) {
  std::ostringstream out;
  out << "| Method |";
  for (const auto& row : suite.rows) out << ' ' << row.name << " PICP | " << row.name << " MPIW |";
  out << "\n|---|";
  for (std::size_t i = 0; i < suite.rows.size(); ++i) out << "---|---|";
  out << '\n';
  for (const char* method : {"DAPIEN", "Bootstrap"}) {
    out << "| " << method << " |";
    for (const auto& row : suite.rows) {
      if (!row.ok) {
        out << " FAILED | FAILED |";
        continue;
      }
      const EvaluationReport& r = std::string(method) == "DAPIEN" ? row.result.dapien : row.result.bootstrap;
      out << ' ' << percent(r.picp) << " | " << fixed(r.mpiw, 3) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string format_suite_csv(const SuiteResult& suite) {
  std::ostringstream out;
  out << "experiment,method,status,picp,mpiw,nmpiw,cwc\n";
  for (const auto& row : suite.rows) {
    for (const char* method : {"dapien", "bootstrap"}) {
      out << row.name << ',' << method << ',';
      if (!row.ok) {
        out << "FAILED,,,,\n";
        continue;
      }
      const EvaluationReport& r = std::string(method) == "dapien" ? row.result.dapien : row.result.bootstrap;
      out << "ok," << format_double(r.picp) << ',' << format_double(r.mpiw) << ',' << format_double(r.nmpiw)
          << ',' << format_double(r.cwc) << '\n';
    }
  }
  return out.str();
}

}  // namespace dapien
