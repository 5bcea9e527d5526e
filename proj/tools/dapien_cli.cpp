// Command-line front end: dataset generation, single experiments, suites,
// and model fit/predict round trips.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dapien/bootstrap.hpp"
#include "dapien/dapien.hpp"
#include "dapien/error.hpp"
#include "dapien/experiment.hpp"
#include "dapien/serialization.hpp"
#include "dapien/synthdata.hpp"

namespace {

using nlohmann::json;

std::vector<dapien::Sample> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dapien::Error(dapien::ErrorKind::ConfigError, "cannot open '" + path + "'");
  return dapien::read_csv(in);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dapien::Error(dapien::ErrorKind::ConfigError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw dapien::Error(dapien::ErrorKind::ParseError, e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw dapien::Error(dapien::ErrorKind::DomainError, "failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prediction intervals for regression on nominal inputs"};
  app.require_subcommand(1);

  std::string dataset = "A";
  std::uint64_t seed = 42;
  std::string out_path;
  int d = 10;
  int replicates = 20;
  auto* generate = app.add_subcommand("generate", "Write a synthetic benchmark dataset as CSV");
  generate->add_option("--dataset", dataset, "A, B or C")->check(CLI::IsMember({"A", "B", "C"}));
  generate->add_option("--seed", seed, "Generator seed");
  generate->add_option("--d", d, "Number of binary features")->check(CLI::Range(1, 24));
  generate->add_option("--replicates", replicates, "Samples per distinct input")->check(CLI::PositiveNumber);
  generate->add_option("--out", out_path, "Output CSV path")->required();

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one DAPIEN vs Bootstrap experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();

  std::string configs_dir;
  std::string summary_dir;
  auto* suite = app.add_subcommand("suite", "Run every experiment config in a directory");
  suite->add_option("--configs", configs_dir, "Directory of *.json configs")->required();
  suite->add_option("--out", summary_dir, "Directory for summary.md and summary.csv");

  std::string data_path;
  std::string method = "dapien";
  std::string family = "gaussian";
  int bootstrap_b = 20;
  dapien::TrainConfig train_config;
  auto* fit = app.add_subcommand("fit", "Fit a model on a CSV dataset and save it as JSON");
  fit->add_option("--data", data_path, "Training CSV")->required();
  fit->add_option("--method", method, "dapien or bootstrap")->check(CLI::IsMember({"dapien", "bootstrap"}));
  fit->add_option("--family", family, "gaussian or gamma (dapien only)")
      ->check(CLI::IsMember({"gaussian", "gamma"}));
  fit->add_option("--b", bootstrap_b, "Bootstrap ensemble size")->check(CLI::Range(2, 100000));
  fit->add_option("--seed", train_config.seed, "Training seed");
  fit->add_option("--folds", train_config.folds, "Cross-validation folds (<2 disables selection)");
  fit->add_option("--out", out_path, "Model JSON path")->required();

  std::string model_path;
  double confidence = 0.95;
  std::string sigma_rule = "std_dev";
  auto* predict = app.add_subcommand("predict", "Predict intervals for a CSV dataset with a saved model");
  predict->add_option("--model", model_path, "Model JSON")->required();
  predict->add_option("--data", data_path, "Input CSV (x_* and y columns)")->required();
  predict->add_option("--confidence", confidence, "Confidence level")->check(CLI::Range(0.0, 1.0));
  predict->add_option("--sigma", sigma_rule, "Bootstrap sigma rule")
      ->check(CLI::IsMember({"std_dev", "summed_variance"}));
  predict->add_option("--out", out_path, "Output CSV (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      dapien::GeneratorSpec spec = dapien::dataset_spec(dataset[0], seed);
      spec.d = d;
      spec.replicates = replicates;
      const auto samples = dapien::generate(spec);
      std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
      dapien::write_csv(out, samples);
      if (!out) throw dapien::Error(dapien::ErrorKind::DomainError, "failed writing '" + out_path + "'");
      return 0;
    }

    if (*run) {
      const auto config = dapien::load_experiment_config(config_path);
      const auto result = dapien::run_experiment(config, std::cerr);
      std::cout << "DAPIEN     PICP " << result.dapien.picp << "  MPIW " << result.dapien.mpiw << '\n'
                << "Bootstrap  PICP " << result.bootstrap.picp << "  MPIW " << result.bootstrap.mpiw << '\n'
                << "outputs in " << config.resolved_output_dir().string() << '\n';
      return 0;
    }

    if (*suite) {
      const auto entries = dapien::load_suite(configs_dir);
      const auto result = dapien::run_suite(entries, std::cerr);
      const std::string table = dapien::format_suite_markdown(result);
      std::cout << table;
      if (!summary_dir.empty()) {
        std::filesystem::create_directories(summary_dir);
        write_file(summary_dir + "/summary.md", table);
        write_file(summary_dir + "/summary.csv", dapien::format_suite_csv(result));
      }
      return result.any_failed() ? 2 : 0;
    }

    if (*fit) {
      const auto samples = read_samples(data_path);
      json doc;
      if (method == "dapien") {
        const auto fam = dapien::parse_family(family);
        const auto filtered = dapien::drop_degenerate_groups(samples, fam);
        if (!filtered.dropped.empty()) {
          std::cerr << "warning: dropped " << filtered.dropped.size() << " degenerate group(s)\n";
        }
        doc = dapien::to_json(dapien::dapien_fit(filtered.kept, fam, train_config));
      } else {
        doc = dapien::to_json(dapien::bootstrap_fit(samples, bootstrap_b, train_config));
      }
      write_file(out_path, doc.dump(2) + "\n");
      return 0;
    }

    if (*predict) {
      const json doc = read_json(model_path);
      const auto samples = read_samples(data_path);
      std::ostringstream out;
      const std::size_t dim = samples.front().x.size();
      for (std::size_t j = 0; j < dim; ++j) out << "x_" << j << ',';
      out << "y,lower,point,upper\n";
      out.precision(17);
      const bool is_bootstrap = doc.value("method", "") == "bootstrap";
      const auto rule = dapien::parse_bootstrap_sigma(sigma_rule);
      dapien::DapienModel dmodel;
      dapien::BootstrapModel bmodel;
      if (is_bootstrap) {
        bmodel = dapien::bootstrap_model_from_json(doc);
      } else {
        dmodel = dapien::dapien_model_from_json(doc);
      }
      for (const auto& s : samples) {
        const auto pi = is_bootstrap ? dapien::bootstrap_predict_interval(bmodel, s.x, confidence, rule)
                                     : dapien::dapien_predict_interval(dmodel, s.x, confidence);
        const double point = is_bootstrap ? dapien::bootstrap_predict_point(bmodel, s.x)
                                          : dapien::dapien_predict_point(dmodel, s.x);
        for (auto bit : s.x) out << static_cast<int>(bit) << ',';
        out << s.y << ',' << pi.lower << ',' << point << ',' << pi.upper << '\n';
      }
      if (out_path.empty()) {
        std::cout << out.str();
      } else {
        write_file(out_path, out.str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dapien::exit_code_for(e);
  }
  return 0;
}
