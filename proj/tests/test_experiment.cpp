#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "dapien/error.hpp"
#include "dapien/experiment.hpp"

namespace fs = std::filesystem;
using namespace dapien;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("dapien_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

ExperimentConfig small_config(const fs::path& out, const std::string& dataset = "B") {
  ExperimentConfig config = parse_experiment_config(
      json{{"dataset", dataset}, {"d", 6}, {"replicates", 12}, {"bootstrap_b", 5}, {"output_dir", out.string()}},
      fs::path());
  return config;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(DAPIEN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const auto config = parse_experiment_config(json::object(), "/base");
    CHECK(config.dataset == "A");
    CHECK(config.family == DistFamily::Gaussian);
    CHECK(config.confidence == 0.95);
    CHECK(config.bootstrap_b == 20);
    CHECK(config.cwc_mu == 0.95);
    CHECK(config.cwc_eta == 50.0);
    CHECK(config.seeds.data == 42);
    CHECK(config.resolved_output_dir() == fs::path("/base/out"));
  }
  SUBCASE("dataset C defaults to gamma and cwc_mu follows confidence") {
    const auto config = parse_experiment_config(json{{"dataset", "C"}, {"confidence", 0.9}}, "");
    CHECK(config.family == DistFamily::Gamma);
    CHECK(config.cwc_mu == 0.9);
  }
  SUBCASE("family is a free choice") {
    CHECK(parse_experiment_config(json{{"dataset", "C"}, {"family", "gaussian"}}, "").family ==
          DistFamily::Gaussian);
  }
  SUBCASE("round trip") {
    const auto config = parse_experiment_config(json{{"dataset", "B"}, {"seeds", {{"train", 7}}}}, "");
    const auto again = parse_experiment_config(to_json(config), "");
    CHECK(to_json(again) == to_json(config));
    CHECK(again.train.seed == 7);
  }
  SUBCASE("errors") {
    const std::vector<json> bad{json{{"confidence", 1.0}},
                                json{{"bootstrap_b", 1}},
                                json{{"family", "weibull"}},
                                json{{"colour", "red"}},
                                json{{"seeds", {{"noise", 1}}}},
                                json{{"d", 0}},
                                json{{"dataset", 3}},
                                json::array()};
    for (const auto& doc : bad) {
      CAPTURE(doc.dump());
      try {
        parse_experiment_config(doc, "");
        FAIL("expected ConfigError");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
        CHECK(exit_code_for(e) == 1);
      }
    }
  }
}

TEST_CASE("experiment outputs") {
  TempDir tmp;
  std::ostringstream log;
  const auto result = run_experiment(small_config(tmp.path / "run"), log);
  for (const char* name : {"report.json", "intervals.csv", "config.json", "dapien_model.json", "bootstrap_model.json"}) {
    CHECK(fs::exists(tmp.path / "run" / name));
  }
  const json report = json::parse(slurp(tmp.path / "run" / "report.json"));
  for (const char* method : {"dapien", "bootstrap"}) {
    for (const char* key : {"picp", "mpiw", "nmpiw", "cwc", "n", "confidence"}) {
      CHECK(report.at(method).contains(key));
    }
    CHECK(report.at(method).at("n") == result.n_test);
  }

  const auto rows = read_rows(tmp.path / "run" / "intervals.csv");
  REQUIRE(rows.size() == result.n_test + 1);
  const auto& header = rows.front();
  REQUIRE(header.size() == 6 + 7);
  CHECK(header[6] == "y");
  CHECK(header[7] == "dapien_lower");
  CHECK(header[12] == "bootstrap_upper");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == header.size());
    for (int base : {7, 10}) {
      const double lo = std::stod(rows[i][base]);
      const double point = std::stod(rows[i][base + 1]);
      const double hi = std::stod(rows[i][base + 2]);
      CHECK(lo <= point);
      CHECK(point <= hi);
    }
  }
}

TEST_CASE("repeated runs give byte-identical reports") {
  TempDir tmp;
  std::ostringstream log;
  run_experiment(small_config(tmp.path / "one", "C"), log);
  run_experiment(small_config(tmp.path / "two", "C"), log);
  CHECK(slurp(tmp.path / "one" / "report.json") == slurp(tmp.path / "two" / "report.json"));
  CHECK(slurp(tmp.path / "one" / "intervals.csv") == slurp(tmp.path / "two" / "intervals.csv"));
}

TEST_CASE("a ragged csv fails without writing a report") {
  TempDir tmp;
  spit(tmp.path / "bad.csv", "x_0,x_1,y\n0,1,2.5\n1,0\n1,1,3.0\n");
  auto config = parse_experiment_config(json{{"dataset", "bad.csv"}, {"output_dir", "out"}}, tmp.path);
  std::ostringstream log;
  try {
    run_experiment(config, log);
    FAIL("expected a parse failure");
  } catch (const Error& e) {
    CHECK(exit_code_for(e) != 0);
  }
  CHECK_FALSE(fs::exists(tmp.path / "out" / "report.json"));
}

TEST_CASE("csv datasets run end to end") {
  TempDir tmp;
  REQUIRE(run_cli("generate --dataset B --d 5 --replicates 10 --seed 3 --out " + (tmp.path / "b.csv").string()) == 0);
  spit(tmp.path / "config.json", R"({"dataset": "b.csv", "bootstrap_b": 4, "output_dir": "res"})");
  CHECK(run_cli("run --config " + (tmp.path / "config.json").string()) == 0);
  CHECK(fs::exists(tmp.path / "res" / "report.json"));
}

TEST_CASE("suites") {
  SUBCASE("empty suite") {
    TempDir tmp;
    const auto entries = load_suite(tmp.path);
    CHECK(entries.empty());
    std::ostringstream log;
    const auto suite = run_suite(entries, log);
    CHECK(suite.rows.empty());
    CHECK_FALSE(suite.any_failed());
    CHECK(run_cli("suite --configs " + tmp.path.string()) == 0);
  }
  SUBCASE("failures are marked and continue") {
    TempDir tmp;
    spit(tmp.path / "a_good.json", json{{"dataset", "A"}, {"d", 5}, {"replicates", 8}, {"bootstrap_b", 3}, {"output_dir", "good"}}.dump());
    spit(tmp.path / "b_bad.json", json{{"dataset", "missing.csv"}, {"output_dir", "bad"}}.dump());
    const auto entries = load_suite(tmp.path);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].name == "a_good");
    std::ostringstream log;
    const auto suite = run_suite(entries, log);
    CHECK(suite.any_failed());
    CHECK(suite.rows[0].ok);
    CHECK_FALSE(suite.rows[1].ok);
    const auto table = format_suite_markdown(suite);
    CHECK(table.find("FAILED") != std::string::npos);
    CHECK(table.find("a_good PICP") != std::string::npos);
    CHECK(format_suite_csv(suite).find("b_bad,dapien,FAILED") != std::string::npos);
    CHECK(run_cli("suite --configs " + tmp.path.string() + " --out " + (tmp.path / "summary").string()) == 2);
    CHECK(fs::exists(tmp.path / "summary" / "summary.md"));
  }
}

TEST_CASE("symmetric intervals misfit the skewed dataset") {
  TempDir tmp;
  std::ostringstream log;
  auto gamma = parse_experiment_config(json{{"dataset", "C"}, {"output_dir", "gamma"}}, tmp.path);
  auto gaussian = parse_experiment_config(json{{"dataset", "C"}, {"family", "gaussian"}, {"output_dir", "gaussian"}},
                                          tmp.path);
  const auto with_gamma = run_experiment(gamma, log);
  const auto with_gaussian = run_experiment(gaussian, log);
  CHECK(with_gamma.dropped_groups.size() == 1);
  CHECK(with_gaussian.dropped_groups.empty());

  // mean +- c * sd on exponential noise covers P(E <= 1 + c), a little above
  // nominal, so the misfit shows in the width and the lower bound rather than
  // in coverage.
  const double c = t_quantile(0.95, 20.0);
  CHECK(std::abs(with_gaussian.dapien.picp - (1.0 - std::exp(-(1.0 + c)))) < 0.02);
  CHECK(with_gaussian.dapien.mpiw > with_gamma.dapien.mpiw);
  auto share_below_support = [&](const char* dir) {
    const auto rows = read_rows(tmp.path / dir / "intervals.csv");
    int below = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      int f = 0;
      for (int j = 0; j < 10; ++j) f += std::stoi(rows[i][j]);
      below += std::stod(rows[i][11]) < f;
    }
    return static_cast<double>(below) / static_cast<double>(rows.size() - 1);
  };
  CHECK(share_below_support("gaussian") > 0.9);
  CHECK(share_below_support("gamma") < 0.1);
}

TEST_CASE("command line") {
  TempDir tmp;
  const auto csv = (tmp.path / "a.csv").string();
  CHECK(run_cli("generate --dataset A --d 4 --replicates 6 --out " + csv) == 0);
  CHECK(run_cli("fit --data " + csv + " --method dapien --out " + (tmp.path / "m.json").string()) == 0);
  CHECK(run_cli("fit --data " + csv + " --method bootstrap --b 3 --out " + (tmp.path / "bm.json").string()) == 0);
  CHECK(run_cli("predict --model " + (tmp.path / "m.json").string() + " --data " + csv + " --out " +
                (tmp.path / "p.csv").string()) == 0);
  CHECK(run_cli("predict --model " + (tmp.path / "bm.json").string() + " --data " + csv +
                " --sigma summed_variance --out " + (tmp.path / "bp.csv").string()) == 0);
  CHECK(read_rows(tmp.path / "p.csv").size() == 16 * 6 + 1);
  CHECK(run_cli("run --config " + (tmp.path / "nope.json").string()) == 1);
  spit(tmp.path / "bad.json", "{\"dataset\": \"A\", \"confidence\": 2}");
  CHECK(run_cli("run --config " + (tmp.path / "bad.json").string()) == 1);
  CHECK(run_cli("predict --model " + csv + " --data " + csv) != 0);
}
