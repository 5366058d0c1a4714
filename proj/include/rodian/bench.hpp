#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rodian/datagen.hpp"
#include "rodian/estimators.hpp"

namespace rodian::bench {

struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One estimator under test. fixed_histogram carries its bin count,
/// alpha_trimmed its alpha; the others need no parameter.
struct EstimatorSpec {
  enum class Kind { rodian, median, lmeds, fixed_histogram, alpha_trimmed };

  Kind kind = Kind::rodian;
  int bins = 0;
  double alpha = 0.0;

  std::string id() const {
    switch (kind) {
      case Kind::rodian: return "rodian";
      case Kind::median: return "median";
      case Kind::lmeds: return "lmeds";
      case Kind::fixed_histogram:
        return "fixed_histogram(" + std::to_string(bins) + ")";
      case Kind::alpha_trimmed: {
        std::ostringstream os;
        os << "alpha_trimmed(" << alpha << ")";
        return os.str();
      }
    }
    throw config_error("unknown estimator kind");
  }

  double evaluate(std::span<const double> data) const {
    switch (kind) {
      case Kind::rodian: return rodian::rodian(data).estimate;
      case Kind::median: return rodian::median(data);
      case Kind::lmeds: return rodian::lmeds(data);
      case Kind::fixed_histogram: return fixed_histogram_median(data, bins);
      case Kind::alpha_trimmed: return alpha_trimmed_mean(data, alpha);
    }
    throw config_error("unknown estimator kind");
  }
};

/// Accepts "rodian", "median", "lmeds", "fixed_histogram(B)" and
/// "alpha_trimmed(A)".
inline EstimatorSpec parse_estimator(std::string_view token) {
  auto parenthesized = [&](std::string_view prefix,
                           std::string& arg) -> bool {
    if (token.size() < prefix.size() + 2) return false;
    if (token.substr(0, prefix.size()) != prefix) return false;
    if (token[prefix.size()] != '(' || token.back() != ')') return false;
    arg = std::string(
        token.substr(prefix.size() + 1, token.size() - prefix.size() - 2));
    return true;
  };

  EstimatorSpec spec;
  std::string arg;
  if (token == "rodian") {
    spec.kind = EstimatorSpec::Kind::rodian;
  } else if (token == "median") {
    spec.kind = EstimatorSpec::Kind::median;
  } else if (token == "lmeds") {
    spec.kind = EstimatorSpec::Kind::lmeds;
  } else if (parenthesized("fixed_histogram", arg)) {
    spec.kind = EstimatorSpec::Kind::fixed_histogram;
    try {
      spec.bins = std::stoi(arg);
    } catch (const std::exception&) {
      throw config_error("estimators: bad bin count in '" + std::string(token) + "'");
    }
    if (spec.bins < 1) throw config_error("estimators: bin count must be >= 1");
  } else if (parenthesized("alpha_trimmed", arg)) {
    spec.kind = EstimatorSpec::Kind::alpha_trimmed;
    try {
      spec.alpha = std::stod(arg);
    } catch (const std::exception&) {
      throw config_error("estimators: bad alpha in '" + std::string(token) + "'");
    }
    if (!(spec.alpha >= 0.0 && spec.alpha < 1.0)) {
      throw config_error("estimators: alpha must be in [0, 1)");
    }
  } else {
    throw config_error("estimators: unknown estimator '" + std::string(token) + "'");
  }
  return spec;
}

/// A Monte-Carlo sweep: the cartesian product of the n, sigma and
/// outlier-ratio axes, each cell repeated `trials` times with per-trial
/// seeds base_seed + trial.
struct SweepConfig {
  std::vector<std::size_t> n_values{100};
  std::vector<double> sigma_values{2.0};
  std::vector<double> outlier_ratios{0.0};
  OutlierModel outlier_model = OutlierModel::uniform;
  double outlier_sigma = 4.0;  // used by the gaussian-family models
  std::vector<EstimatorSpec> estimators;
  std::size_t trials = 1000;
  std::uint64_t base_seed = 1;
  std::string output_path;
  double range_lo = 0.0;
  double range_hi = 100.0;
};

struct ExperimentRecord {
  std::string estimator;
  std::size_t n = 0;
  double sigma = 0.0;
  double outlier_ratio = 0.0;
  std::string outlier_model;
  std::size_t trials = 0;
  double mean_abs_error = 0.0;
  double median_runtime_ms = 0.0;

  friend bool operator==(const ExperimentRecord&,
                         const ExperimentRecord&) = default;
};

inline void validate(const SweepConfig& config) {
  if (config.trials < 1) throw config_error("trials must be >= 1");
  if (config.estimators.empty()) {
    throw config_error("estimators must not be empty");
  }
  if (config.n_values.empty()) throw config_error("n list must not be empty");
  if (config.sigma_values.empty()) {
    throw config_error("sigma list must not be empty");
  }
  if (config.outlier_ratios.empty()) {
    throw config_error("outlier_ratio list must not be empty");
  }
  for (auto n : config.n_values) {
    if (n < 1) throw config_error("n must be >= 1");
  }
  for (auto s : config.sigma_values) {
    if (!(s > 0.0)) throw config_error("sigma must be > 0");
  }
  for (auto r : config.outlier_ratios) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw config_error("outlier_ratio must be in [0, 1]");
    }
  }
  if (!(config.range_lo < config.range_hi)) {
    throw config_error("range_lo must be < range_hi");
  }
  if (config.outlier_model != OutlierModel::uniform &&
      !(config.outlier_sigma > 0.0)) {
    throw config_error("outlier_sigma must be > 0");
  }
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0,
                         std::chrono::steady_clock::time_point t1) {
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

// Scenario for one trial. The means are drawn from a substream separate
// from the data stream, so configs that consume different numbers of mean
// draws still generate identical data for identical seeds.
inline ScenarioSpec trial_scenario(std::size_t n, double sigma, double ratio,
                                   OutlierModel model, double outlier_sigma,
                                   double range_lo, double range_hi,
                                   std::uint64_t seed) {
  Xoshiro256pp mean_rng(seed, 1);
  ScenarioSpec spec;
  spec.n = n;
  spec.inlier_sigma = sigma;
  spec.outlier_ratio = ratio;
  spec.outlier_model = model;
  spec.range_lo = range_lo;
  spec.range_hi = range_hi;
  spec.seed = seed;
  spec.inlier_mean = draw_scenario_mean(mean_rng, range_lo, range_hi);
  if (model != OutlierModel::uniform) {
    spec.outlier_mean = draw_scenario_mean(mean_rng, range_lo, range_hi);
    spec.outlier_sigma = outlier_sigma;
  }
  return spec;
}

}  // namespace detail

/// Runs every cell of the sweep and reports the mean absolute error
/// |estimate - true_mean| plus the median per-call runtime. Deterministic
/// given base_seed (runtimes excepted). Progress goes to `progress`,
/// typically stderr, never stdout.
inline std::vector<ExperimentRecord> run_sweep(const SweepConfig& config,
                                               std::ostream* progress = nullptr) {
  validate(config);
  std::vector<ExperimentRecord> records;
  const std::size_t ne = config.estimators.size();

  for (std::size_t n : config.n_values) {
    for (double sigma : config.sigma_values) {
      for (double ratio : config.outlier_ratios) {
        std::vector<std::vector<double>> errors(
            ne, std::vector<double>(config.trials));
        std::vector<std::vector<double>> times(
            ne, std::vector<double>(config.trials));

        for (std::size_t trial = 0; trial < config.trials; ++trial) {
          const std::uint64_t seed = config.base_seed + trial;
          const ScenarioSpec spec = detail::trial_scenario(
              n, sigma, ratio, config.outlier_model, config.outlier_sigma,
              config.range_lo, config.range_hi, seed);
          const GeneratedData data = generate(spec);
          for (std::size_t e = 0; e < ne; ++e) {
            const auto t0 = std::chrono::steady_clock::now();
            const double estimate = config.estimators[e].evaluate(data.values);
            const auto t1 = std::chrono::steady_clock::now();
            errors[e][trial] = std::fabs(estimate - data.true_mean);
            times[e][trial] = detail::elapsed_ms(t0, t1);
          }
        }

        for (std::size_t e = 0; e < ne; ++e) {
          double sum = 0.0;
          for (double err : errors[e]) sum += err;
          ExperimentRecord rec;
          rec.estimator = config.estimators[e].id();
          rec.n = n;
          rec.sigma = sigma;
          rec.outlier_ratio = ratio;
          rec.outlier_model = to_string(config.outlier_model);
          rec.trials = config.trials;
          rec.mean_abs_error = sum / static_cast<double>(config.trials);
          rec.median_runtime_ms = median(times[e]);
          records.push_back(std::move(rec));
        }
        if (progress) {
          *progress << "cell n=" << n << " sigma=" << sigma
                    << " ratio=" << ratio << " model="
                    << to_string(config.outlier_model) << " done ("
                    << config.trials << " trials)\n";
        }
      }
    }
  }
  return records;
}

/// Timing benchmark over median, lmeds and rodian on identical seeded
/// inputs. Strictly single-threaded; data generation happens outside the
/// timed window; `warmup` untimed calls precede the `trials` timed ones.
struct TimingConfig {
  std::vector<std::size_t> n_values;
  std::size_t trials = 1000;
  std::uint64_t base_seed = 1;
  std::size_t warmup = 10;
  std::size_t lmeds_max_n = 20000;  // lmeds is O(n^2); skip larger n
  double sigma = 2.0;
  double outlier_ratio = 0.5;
};

inline std::vector<ExperimentRecord> run_timing(const TimingConfig& config,
                                                std::ostream* progress = nullptr) {
  if (config.n_values.empty()) throw config_error("n list must not be empty");
  if (config.trials < 1) throw config_error("trials must be >= 1");
  for (auto n : config.n_values) {
    if (n < 2) throw config_error("n must be >= 2");
  }

  const std::vector<EstimatorSpec> estimators = {
      {EstimatorSpec::Kind::median},
      {EstimatorSpec::Kind::lmeds},
      {EstimatorSpec::Kind::rodian},
  };

  std::vector<ExperimentRecord> records;
  for (std::size_t n : config.n_values) {
    for (const auto& est : estimators) {
      if (est.kind == EstimatorSpec::Kind::lmeds && n > config.lmeds_max_n) {
        if (progress) {
          *progress << "timing: skipping lmeds at n=" << n << " (> lmeds_max_n="
                    << config.lmeds_max_n << ")\n";
        }
        continue;
      }
      std::vector<double> times;
      times.reserve(config.trials);
      double error_sum = 0.0;
      for (std::size_t call = 0; call < config.warmup + config.trials; ++call) {
        const std::uint64_t seed = config.base_seed + call;
        const ScenarioSpec spec = detail::trial_scenario(
            n, config.sigma, config.outlier_ratio, OutlierModel::uniform, 0.0,
            0.0, 100.0, seed);
        const GeneratedData data = generate(spec);
        const auto t0 = std::chrono::steady_clock::now();
        const double estimate = est.evaluate(data.values);
        const auto t1 = std::chrono::steady_clock::now();
        if (call >= config.warmup) {
          times.push_back(detail::elapsed_ms(t0, t1));
          error_sum += std::fabs(estimate - data.true_mean);
        }
      }
      ExperimentRecord rec;
      rec.estimator = est.id();
      rec.n = n;
      rec.sigma = config.sigma;
      rec.outlier_ratio = config.outlier_ratio;
      rec.outlier_model = to_string(OutlierModel::uniform);
      rec.trials = config.trials;
      rec.mean_abs_error = error_sum / static_cast<double>(config.trials);
      rec.median_runtime_ms = median(times);
      records.push_back(std::move(rec));
      if (progress) {
        *progress << "timing: " << rec.estimator << " n=" << n << " median "
                  << rec.median_runtime_ms << " ms\n";
      }
    }
  }
  return records;
}

inline constexpr std::string_view csv_header =
    "estimator,n,sigma,outlier_ratio,outlier_model,trials,mean_abs_error,"
    "median_runtime_ms";

/// Shortest decimal string that round-trips the exact double.
inline std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw io_error("failed to format a double");
  return std::string(buf, ptr);
}

inline void emit_csv(std::span<const ExperimentRecord> records,
                     const std::string& path) {
  if (records.empty()) throw config_error("no records to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open output file: " + path);
  out << csv_header << '\n';
  for (const auto& rec : records) {
    out << rec.estimator << ',' << rec.n << ',' << format_double(rec.sigma)
        << ',' << format_double(rec.outlier_ratio) << ',' << rec.outlier_model
        << ',' << rec.trials << ',' << format_double(rec.mean_abs_error) << ','
        << format_double(rec.median_runtime_ms) << '\n';
  }
  out.flush();
  if (!out) throw io_error("write failed: " + path);
}

namespace detail {

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw config_error(what + ": bad number '" + t + "'");
  }
  return value;
}

inline std::uint64_t parse_uint(const std::string& text,
                                const std::string& what) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw config_error(what + ": bad integer '" + t + "'");
  }
  return value;
}

}  // namespace detail

/// Inverse of emit_csv; field values are reproduced exactly.
inline std::vector<ExperimentRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open input file: " + path);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != csv_header) {
    throw io_error("unexpected CSV header in " + path);
  }
  std::vector<ExperimentRecord> records;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 8) throw io_error("malformed CSV row in " + path);
    ExperimentRecord rec;
    rec.estimator = fields[0];
    rec.n = static_cast<std::size_t>(detail::parse_uint(fields[1], "n"));
    rec.sigma = detail::parse_double(fields[2], "sigma");
    rec.outlier_ratio = detail::parse_double(fields[3], "outlier_ratio");
    rec.outlier_model = fields[4];
    rec.trials = static_cast<std::size_t>(detail::parse_uint(fields[5], "trials"));
    rec.mean_abs_error = detail::parse_double(fields[6], "mean_abs_error");
    rec.median_runtime_ms =
        detail::parse_double(fields[7], "median_runtime_ms");
    records.push_back(std::move(rec));
  }
  return records;
}

/// Flat key = value config for sweeps. Lists are comma separated; '#'
/// starts a comment. Keys: n, sigma, outlier_ratio, outlier_model,
/// outlier_sigma, estimators, trials, seed, out, range_lo, range_hi.
inline SweepConfig parse_sweep_config(std::istream& in) {
  SweepConfig config;
  config.estimators.clear();
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw config_error("config: expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key == "n") {
      config.n_values.clear();
      for (const auto& item : detail::split(value, ',')) {
        config.n_values.push_back(
            static_cast<std::size_t>(detail::parse_uint(item, "n")));
      }
    } else if (key == "sigma") {
      config.sigma_values.clear();
      for (const auto& item : detail::split(value, ',')) {
        config.sigma_values.push_back(detail::parse_double(item, "sigma"));
      }
    } else if (key == "outlier_ratio") {
      config.outlier_ratios.clear();
      for (const auto& item : detail::split(value, ',')) {
        config.outlier_ratios.push_back(
            detail::parse_double(item, "outlier_ratio"));
      }
    } else if (key == "outlier_model") {
      try {
        config.outlier_model = outlier_model_from_string(value);
      } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
      }
    } else if (key == "outlier_sigma") {
      config.outlier_sigma = detail::parse_double(value, "outlier_sigma");
    } else if (key == "estimators") {
      for (const auto& item : detail::split(value, ',')) {
        config.estimators.push_back(parse_estimator(detail::trim(item)));
      }
    } else if (key == "trials") {
      config.trials = static_cast<std::size_t>(detail::parse_uint(value, "trials"));
    } else if (key == "seed") {
      config.base_seed = detail::parse_uint(value, "seed");
    } else if (key == "out") {
      config.output_path = value;
    } else if (key == "range_lo") {
      config.range_lo = detail::parse_double(value, "range_lo");
    } else if (key == "range_hi") {
      config.range_hi = detail::parse_double(value, "range_hi");
    } else {
      throw config_error("config: unknown key '" + key + "'");
    }
  }
  return config;
}

inline SweepConfig parse_sweep_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  return parse_sweep_config(in);
}

/// Canned sweeps matching the benchmark protocols shipped with the CLI.
namespace presets {

inline std::vector<EstimatorSpec> rodian_vs_fixed() {
  std::vector<EstimatorSpec> out{{EstimatorSpec::Kind::rodian}};
  for (int b : {5, 10, 20, 30, 50}) {
    out.push_back({EstimatorSpec::Kind::fixed_histogram, b});
  }
  return out;
}

inline std::vector<EstimatorSpec> four_method_comparison() {
  return {{EstimatorSpec::Kind::rodian},
          {EstimatorSpec::Kind::median},
          {EstimatorSpec::Kind::lmeds},
          {EstimatorSpec::Kind::fixed_histogram, 20}};
}

// rodian vs fixed histograms, uniform outliers, ratios 0..50%.
inline SweepConfig table1_uniform(std::size_t trials = 10000,
                                  std::uint64_t seed = 1) {
  SweepConfig config;
  config.n_values = {100};
  config.sigma_values = {2.0};
  config.outlier_ratios = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  config.outlier_model = OutlierModel::uniform;
  config.estimators = rodian_vs_fixed();
  config.trials = trials;
  config.base_seed = seed;
  return config;
}

// Same comparison with Gaussian outliers, N(mu2, 4^2).
inline SweepConfig table1_gaussian(std::size_t trials = 10000,
                                   std::uint64_t seed = 1) {
  SweepConfig config = table1_uniform(trials, seed);
  config.outlier_model = OutlierModel::gaussian;
  config.outlier_sigma = 4.0;
  return config;
}

// Four-method robustness sweep under uniform outliers.
inline SweepConfig fig3(std::size_t trials = 1000, std::uint64_t seed = 1) {
  SweepConfig config;
  config.n_values = {100, 300};
  config.sigma_values = {2.0, 4.0, 8.0, 16.0};
  config.outlier_ratios = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  config.outlier_model = OutlierModel::uniform;
  config.estimators = four_method_comparison();
  config.trials = trials;
  config.base_seed = seed;
  return config;
}

// Same sweep with half the outliers drawn from N(mu_outlier, 8^2).
inline SweepConfig fig4(std::size_t trials = 1000, std::uint64_t seed = 1) {
  SweepConfig config = fig3(trials, seed);
  config.n_values = {100};
  config.outlier_model = OutlierModel::uniform_plus_gaussian;
  config.outlier_sigma = 8.0;
  return config;
}

}  // namespace presets

}  // namespace rodian::bench
