#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rodian/bench.hpp"

using namespace rodian;
using namespace rodian::bench;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rodian_bench_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("estimator tokens parse and print back") {
  REQUIRE(parse_estimator("rodian").kind == EstimatorSpec::Kind::rodian);
  REQUIRE(parse_estimator("median").id() == "median");
  REQUIRE(parse_estimator("lmeds").id() == "lmeds");
  const EstimatorSpec fixed = parse_estimator("fixed_histogram(20)");
  REQUIRE(fixed.bins == 20);
  REQUIRE(fixed.id() == "fixed_histogram(20)");
  const EstimatorSpec trimmed = parse_estimator("alpha_trimmed(0.5)");
  REQUIRE(trimmed.alpha == 0.5);
  REQUIRE_THROWS_AS(parse_estimator("mode"), config_error);
  REQUIRE_THROWS_AS(parse_estimator("fixed_histogram(x)"), config_error);
  REQUIRE_THROWS_AS(parse_estimator("fixed_histogram(0)"), config_error);
  REQUIRE_THROWS_AS(parse_estimator("alpha_trimmed(1.5)"), config_error);
}

TEST_CASE("sweep config file round-trips through the parser") {
  std::istringstream in(
      "# comment line\n"
      "n = 100, 300\n"
      "sigma = 2, 4\n"
      "outlier_ratio = 0, 0.5, 0.9  # trailing comment\n"
      "outlier_model = gaussian\n"
      "outlier_sigma = 4\n"
      "estimators = rodian, median, fixed_histogram(5)\n"
      "trials = 250\n"
      "seed = 99\n"
      "out = results.csv\n");
  const SweepConfig config = parse_sweep_config(in);
  REQUIRE(config.n_values == std::vector<std::size_t>{100, 300});
  REQUIRE(config.sigma_values == std::vector<double>{2.0, 4.0});
  REQUIRE(config.outlier_ratios == std::vector<double>{0.0, 0.5, 0.9});
  REQUIRE(config.outlier_model == OutlierModel::gaussian);
  REQUIRE(config.outlier_sigma == 4.0);
  REQUIRE(config.estimators.size() == 3);
  REQUIRE(config.estimators[2].id() == "fixed_histogram(5)");
  REQUIRE(config.trials == 250);
  REQUIRE(config.base_seed == 99);
  REQUIRE(config.output_path == "results.csv");
}

TEST_CASE("sweep config parser rejects junk with the key named") {
  std::istringstream unknown("frobnicate = 3\n");
  REQUIRE_THROWS_WITH(parse_sweep_config(unknown),
                      Catch::Matchers::ContainsSubstring("frobnicate"));
  std::istringstream bad_number("trials = soon\n");
  REQUIRE_THROWS_WITH(parse_sweep_config(bad_number),
                      Catch::Matchers::ContainsSubstring("trials"));
  std::istringstream no_eq("just words\n");
  REQUIRE_THROWS_AS(parse_sweep_config(no_eq), config_error);
}

TEST_CASE("sweep config validation names the offending field") {
  SweepConfig config;
  config.estimators = {parse_estimator("median")};
  config.trials = 0;
  REQUIRE_THROWS_WITH(run_sweep(config),
                      Catch::Matchers::ContainsSubstring("trials"));
  config.trials = 1;
  config.estimators.clear();
  REQUIRE_THROWS_WITH(run_sweep(config),
                      Catch::Matchers::ContainsSubstring("estimators"));
  config.estimators = {parse_estimator("median")};
  config.outlier_ratios = {1.5};
  REQUIRE_THROWS_WITH(run_sweep(config),
                      Catch::Matchers::ContainsSubstring("outlier_ratio"));
}

TEST_CASE("single-cell sweep with a clean sample") {
  SweepConfig config;
  config.estimators = {parse_estimator("median")};
  config.trials = 1;
  config.base_seed = 5;
  const auto records = run_sweep(config);
  REQUIRE(records.size() == 1);
  REQUIRE(records[0].estimator == "median");
  REQUIRE(records[0].n == 100);
  REQUIRE(records[0].trials == 1);
  REQUIRE(records[0].outlier_model == "uniform");
  REQUIRE(records[0].mean_abs_error >= 0.0);
  REQUIRE(records[0].mean_abs_error < 2.0);
}

TEST_CASE("zero-outlier cells agree across outlier models given equal seeds") {
  SweepConfig uniform;
  uniform.outlier_ratios = {0.0};
  uniform.estimators = {parse_estimator("rodian"), parse_estimator("median")};
  uniform.trials = 50;
  uniform.base_seed = 77;

  SweepConfig mixed = uniform;
  mixed.outlier_model = OutlierModel::uniform_plus_gaussian;
  mixed.outlier_sigma = 8.0;

  const auto a = run_sweep(uniform);
  const auto b = run_sweep(mixed);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].mean_abs_error == b[i].mean_abs_error);
  }
}

TEST_CASE("errors degrade monotonically with the outlier ratio") {
  SweepConfig config;
  config.outlier_ratios = {0.1, 0.3, 0.5};
  config.estimators = {parse_estimator("rodian"), parse_estimator("median"),
                       parse_estimator("lmeds"),
                       parse_estimator("fixed_histogram(20)")};
  config.trials = 1000;
  config.base_seed = 1;
  const auto records = run_sweep(config);
  for (const auto& est : config.estimators) {
    std::vector<double> errors;
    for (const auto& rec : records) {
      if (rec.estimator == est.id()) errors.push_back(rec.mean_abs_error);
    }
    REQUIRE(errors.size() == 3);
    REQUIRE(errors[1] >= 0.9 * errors[0]);  // 10% slack
    REQUIRE(errors[2] >= 0.9 * errors[1]);
  }
}

TEST_CASE("timing runs produce one record per estimator and size") {
  TimingConfig config;
  config.n_values = {200};
  config.trials = 3;
  config.warmup = 1;
  const auto records = run_timing(config);
  REQUIRE(records.size() == 3);
  for (const auto& rec : records) {
    REQUIRE(rec.median_runtime_ms >= 0.0);
    REQUIRE(rec.trials == 3);
    REQUIRE(rec.n == 200);
  }
}

TEST_CASE("timing skips lmeds above its size cap") {
  TimingConfig config;
  config.n_values = {512};
  config.trials = 2;
  config.warmup = 0;
  config.lmeds_max_n = 100;
  const auto records = run_timing(config);
  REQUIRE(records.size() == 2);
  for (const auto& rec : records) REQUIRE(rec.estimator != "lmeds");
}

TEST_CASE("csv emission and parsing round-trip") {
  TempDir tmp;
  SweepConfig config;
  config.outlier_ratios = {0.0, 0.2};
  config.estimators = {parse_estimator("rodian"),
                       parse_estimator("alpha_trimmed(0.5)")};
  config.trials = 20;
  const auto records = run_sweep(config);
  const std::string path = tmp.file("out.csv");
  emit_csv(records, path);

  const std::string text = slurp(path);
  REQUIRE(text.starts_with(std::string(csv_header) + "\n"));
  REQUIRE(text.ends_with("\n"));

  const auto parsed = read_csv(path);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    REQUIRE(parsed[i] == records[i]);
  }
}

TEST_CASE("csv has exactly header plus one line per record") {
  TempDir tmp;
  ExperimentRecord rec;
  rec.estimator = "median";
  rec.n = 10;
  rec.sigma = 2.0;
  rec.outlier_model = "uniform";
  rec.trials = 1;
  rec.mean_abs_error = 0.125;
  const std::string path = tmp.file("single.csv");
  emit_csv(std::vector<ExperimentRecord>{rec}, path);
  const std::string text = slurp(path);
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("csv emission refuses an empty record list and leaves no file") {
  TempDir tmp;
  const std::string path = tmp.file("empty.csv");
  REQUIRE_THROWS_AS(emit_csv(std::vector<ExperimentRecord>{}, path),
                    config_error);
  REQUIRE_FALSE(std::filesystem::exists(path));
}

TEST_CASE("csv emission reports unwritable paths") {
  REQUIRE_THROWS_AS(
      emit_csv(std::vector<ExperimentRecord>{ExperimentRecord{}},
               "/nonexistent_dir/x.csv"),
      io_error);
}

TEST_CASE("sweep reruns are byte-identical apart from runtimes") {
  TempDir tmp;
  SweepConfig config;
  config.outlier_ratios = {0.3};
  config.estimators = {parse_estimator("rodian"), parse_estimator("median")};
  config.trials = 40;
  auto first = run_sweep(config);
  auto second = run_sweep(config);
  for (auto* records : {&first, &second}) {
    for (auto& rec : *records) rec.median_runtime_ms = 0.0;
  }
  const std::string path_a = tmp.file("a.csv");
  const std::string path_b = tmp.file("b.csv");
  emit_csv(first, path_a);
  emit_csv(second, path_b);
  REQUIRE(slurp(path_a) == slurp(path_b));
}
