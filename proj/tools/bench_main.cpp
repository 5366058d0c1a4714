// bench: Monte-Carlo accuracy sweeps and timing runs for the rodian
// estimators, emitting CSV. Progress goes to stderr; stdout stays clean.
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rodian/bench.hpp"

namespace {

using rodian::bench::SweepConfig;
using rodian::bench::TimingConfig;

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : rodian::bench::detail::split(text, ',')) {
    out.push_back(static_cast<std::size_t>(
        rodian::bench::detail::parse_uint(item, "n")));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  for (const auto& item : rodian::bench::detail::split(text, ',')) {
    out.push_back(rodian::bench::detail::parse_double(item, what));
  }
  return out;
}

std::vector<rodian::bench::EstimatorSpec> parse_estimator_list(
    const std::string& text) {
  std::vector<rodian::bench::EstimatorSpec> out;
  for (const auto& item : rodian::bench::detail::split(text, ',')) {
    out.push_back(
        rodian::bench::parse_estimator(rodian::bench::detail::trim(item)));
  }
  return out;
}

void run_and_emit(const SweepConfig& config, const std::string& out_path) {
  SweepConfig final_config = config;
  if (!out_path.empty()) final_config.output_path = out_path;
  if (final_config.output_path.empty()) {
    throw rodian::bench::config_error(
        "out: no output path given (config 'out' key or --out flag)");
  }
  const auto records = rodian::bench::run_sweep(final_config, &std::cerr);
  rodian::bench::emit_csv(records, final_config.output_path);
  std::cerr << records.size() << " records -> " << final_config.output_path
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo benchmark harness for robust averaging"};
  app.require_subcommand(1);

  // sweep
  std::string sweep_config_path;
  std::string sweep_out;
  std::string sweep_n, sweep_sigma, sweep_ratio, sweep_model, sweep_estimators;
  std::int64_t sweep_trials = -1;
  std::int64_t sweep_seed = -1;
  double sweep_outlier_sigma = -1.0;
  auto* sweep = app.add_subcommand("sweep", "run a sweep described by a config file");
  sweep->add_option("--config", sweep_config_path, "key = value config file")
      ->required();
  sweep->add_option("--trials", sweep_trials, "override trial count");
  sweep->add_option("--seed", sweep_seed, "override base seed");
  sweep->add_option("--out", sweep_out, "override output CSV path");
  sweep->add_option("--n", sweep_n, "override n list, e.g. 100,300");
  sweep->add_option("--sigma", sweep_sigma, "override sigma list");
  sweep->add_option("--ratio", sweep_ratio, "override outlier-ratio list");
  sweep->add_option("--model", sweep_model,
                    "override outlier model "
                    "(uniform|uniform_plus_gaussian|gaussian)");
  sweep->add_option("--outlier-sigma", sweep_outlier_sigma,
                    "override outlier sigma");
  sweep->add_option("--estimators", sweep_estimators,
                    "override estimator list, e.g. rodian,median,"
                    "fixed_histogram(20)");

  // timing
  std::string timing_n = "100,1000,10000";
  std::string timing_out = "timing.csv";
  std::uint64_t timing_trials = 1000;
  std::uint64_t timing_seed = 1;
  std::uint64_t timing_lmeds_max_n = 20000;
  auto* timing = app.add_subcommand(
      "timing", "median per-call runtimes of median, lmeds and rodian");
  timing->add_option("--n", timing_n, "comma-separated input sizes");
  timing->add_option("--trials", timing_trials, "timed calls per estimator");
  timing->add_option("--seed", timing_seed, "base seed");
  timing->add_option("--out", timing_out, "output CSV path");
  timing->add_option("--lmeds-max-n", timing_lmeds_max_n,
                     "skip lmeds above this n (it is O(n^2))");

  // presets
  struct Preset {
    CLI::App* cmd;
    std::uint64_t trials;
    std::uint64_t seed = 1;
    std::string out;
  };
  Preset table1{app.add_subcommand(
                    "table1", "accuracy of rodian vs fixed histograms, "
                              "uniform and gaussian outliers, ratios 0-50%"),
                10000, 1, "table1.csv"};
  Preset fig3{app.add_subcommand(
                  "fig3", "robustness sweep of four estimators under "
                          "uniform outliers"),
              1000, 1, "fig3.csv"};
  Preset fig4{app.add_subcommand(
                  "fig4", "robustness sweep with half the outliers gaussian"),
              1000, 1, "fig4.csv"};
  for (Preset* preset : {&table1, &fig3, &fig4}) {
    preset->cmd->add_option("--trials", preset->trials, "trials per cell");
    preset->cmd->add_option("--seed", preset->seed, "base seed");
    preset->cmd->add_option("--out", preset->out, "output CSV path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sweep) {
      SweepConfig config =
          rodian::bench::parse_sweep_config_file(sweep_config_path);
      if (sweep_trials >= 0) config.trials = static_cast<std::size_t>(sweep_trials);
      if (sweep_seed >= 0) config.base_seed = static_cast<std::uint64_t>(sweep_seed);
      if (!sweep_n.empty()) config.n_values = parse_n_list(sweep_n);
      if (!sweep_sigma.empty()) {
        config.sigma_values = parse_double_list(sweep_sigma, "sigma");
      }
      if (!sweep_ratio.empty()) {
        config.outlier_ratios = parse_double_list(sweep_ratio, "outlier_ratio");
      }
      if (!sweep_model.empty()) {
        config.outlier_model = rodian::outlier_model_from_string(sweep_model);
      }
      if (sweep_outlier_sigma >= 0.0) config.outlier_sigma = sweep_outlier_sigma;
      if (!sweep_estimators.empty()) {
        config.estimators = parse_estimator_list(sweep_estimators);
      }
      run_and_emit(config, sweep_out);
    } else if (*timing) {
      TimingConfig config;
      config.n_values = parse_n_list(timing_n);
      config.trials = timing_trials;
      config.base_seed = timing_seed;
      config.lmeds_max_n = timing_lmeds_max_n;
      const auto records = rodian::bench::run_timing(config, &std::cerr);
      rodian::bench::emit_csv(records, timing_out);
      std::cerr << records.size() << " records -> " << timing_out << '\n';
    } else if (*table1.cmd) {
      auto records = rodian::bench::run_sweep(
          rodian::bench::presets::table1_uniform(table1.trials, table1.seed),
          &std::cerr);
      const auto gaussian = rodian::bench::run_sweep(
          rodian::bench::presets::table1_gaussian(table1.trials, table1.seed),
          &std::cerr);
      records.insert(records.end(), gaussian.begin(), gaussian.end());
      rodian::bench::emit_csv(records, table1.out);
      std::cerr << records.size() << " records -> " << table1.out << '\n';
    } else if (*fig3.cmd) {
      const auto records = rodian::bench::run_sweep(
          rodian::bench::presets::fig3(fig3.trials, fig3.seed), &std::cerr);
      rodian::bench::emit_csv(records, fig3.out);
      std::cerr << records.size() << " records -> " << fig3.out << '\n';
    } else if (*fig4.cmd) {
      const auto records = rodian::bench::run_sweep(
          rodian::bench::presets::fig4(fig4.trials, fig4.seed), &std::cerr);
      rodian::bench::emit_csv(records, fig4.out);
      std::cerr << records.size() << " records -> " << fig4.out << '\n';
    }
  } catch (const rodian::bench::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
