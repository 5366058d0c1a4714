#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rodian/rng.hpp"

namespace rodian {

enum class OutlierModel { uniform, uniform_plus_gaussian, gaussian };

inline std::string to_string(OutlierModel model) {
  switch (model) {
    case OutlierModel::uniform: return "uniform";
    case OutlierModel::uniform_plus_gaussian: return "uniform_plus_gaussian";
    case OutlierModel::gaussian: return "gaussian";
  }
  throw std::invalid_argument("unknown outlier model");
}

inline OutlierModel outlier_model_from_string(const std::string& name) {
  if (name == "uniform") return OutlierModel::uniform;
  if (name == "uniform_plus_gaussian") return OutlierModel::uniform_plus_gaussian;
  if (name == "gaussian") return OutlierModel::gaussian;
  throw std::invalid_argument("unknown outlier model: " + name);
}

/// One synthetic-data scenario: n values in [range_lo, range_hi], a Gaussian
/// inlier cloud plus outliers drawn from the chosen model. Draws that land
/// outside the range are rejected and redrawn, never clipped.
struct ScenarioSpec {
  std::size_t n = 100;
  double inlier_mean = 50.0;
  double inlier_sigma = 2.0;
  double outlier_ratio = 0.0;
  OutlierModel outlier_model = OutlierModel::uniform;
  std::optional<double> outlier_mean;   // gaussian-family models only
  std::optional<double> outlier_sigma;  // gaussian-family models only
  double range_lo = 0.0;
  double range_hi = 100.0;
  std::uint64_t seed = 0;
};

inline std::size_t outlier_count(const ScenarioSpec& spec) {
  // round-half-up of ratio*n
  return static_cast<std::size_t>(
      std::floor(spec.outlier_ratio * static_cast<double>(spec.n) + 0.5));
}

inline void validate(const ScenarioSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(spec.inlier_sigma > 0.0)) {
    throw std::invalid_argument("inlier_sigma must be > 0");
  }
  if (!(spec.outlier_ratio >= 0.0 && spec.outlier_ratio <= 1.0)) {
    throw std::invalid_argument("outlier_ratio must be in [0, 1]");
  }
  if (!(spec.range_lo < spec.range_hi)) {
    throw std::invalid_argument("range_lo must be < range_hi");
  }
  if (!(spec.inlier_mean > spec.range_lo && spec.inlier_mean < spec.range_hi)) {
    throw std::invalid_argument("inlier_mean must lie inside the range");
  }
  const bool needs_gaussian = spec.outlier_model != OutlierModel::uniform;
  if (needs_gaussian) {
    if (!spec.outlier_mean.has_value()) {
      throw std::invalid_argument("outlier_mean required by outlier_model");
    }
    if (!spec.outlier_sigma.has_value()) {
      throw std::invalid_argument("outlier_sigma required by outlier_model");
    }
    if (!(*spec.outlier_sigma > 0.0)) {
      throw std::invalid_argument("outlier_sigma must be > 0");
    }
    if (!(*spec.outlier_mean > spec.range_lo &&
          *spec.outlier_mean < spec.range_hi)) {
      throw std::invalid_argument("outlier_mean must lie inside the range");
    }
  } else {
    if (spec.outlier_mean.has_value() || spec.outlier_sigma.has_value()) {
      throw std::invalid_argument(
          "outlier_mean/outlier_sigma must be unset for uniform outliers");
    }
  }
}

struct GeneratedData {
  std::vector<double> values;  // shuffled
  double true_mean = 0.0;      // the inlier mean the estimators should find
};

/// Draws round(ratio*n) outliers and n minus that many inliers, rejecting
/// and redrawing anything outside [range_lo, range_hi], then shuffles.
/// A fixed seed reproduces the output bit for bit.
inline GeneratedData generate(const ScenarioSpec& spec) {
  validate(spec);
  Xoshiro256pp rng(spec.seed);

  const std::size_t n_out = outlier_count(spec);
  const std::size_t n_in = spec.n - n_out;

  auto normal_in_range = [&](double mean, double sigma) {
    double x;
    do {
      x = rng.normal(mean, sigma);
    } while (x < spec.range_lo || x > spec.range_hi);
    return x;
  };

  std::vector<double> values;
  values.reserve(spec.n);
  for (std::size_t i = 0; i < n_in; ++i) {
    values.push_back(normal_in_range(spec.inlier_mean, spec.inlier_sigma));
  }
  switch (spec.outlier_model) {
    case OutlierModel::uniform:
      for (std::size_t i = 0; i < n_out; ++i) {
        values.push_back(rng.uniform(spec.range_lo, spec.range_hi));
      }
      break;
    case OutlierModel::uniform_plus_gaussian: {
      const std::size_t n_gauss = n_out / 2;
      const std::size_t n_unif = n_out - n_gauss;
      for (std::size_t i = 0; i < n_unif; ++i) {
        values.push_back(rng.uniform(spec.range_lo, spec.range_hi));
      }
      for (std::size_t i = 0; i < n_gauss; ++i) {
        values.push_back(normal_in_range(*spec.outlier_mean, *spec.outlier_sigma));
      }
      break;
    }
    case OutlierModel::gaussian:
      for (std::size_t i = 0; i < n_out; ++i) {
        values.push_back(normal_in_range(*spec.outlier_mean, *spec.outlier_sigma));
      }
      break;
  }
  shuffle(values, rng);
  return {std::move(values), spec.inlier_mean};
}

/// Per-trial scenario mean, uniform over the open interval
/// (range_lo, range_hi). Clouds centred near an edge get densified by the
/// rejection loop; that is part of the protocol, not an artifact.
inline double draw_scenario_mean(Xoshiro256pp& rng, double range_lo = 0.0,
                                 double range_hi = 100.0) {
  double mean;
  do {
    mean = rng.uniform(range_lo, range_hi);
  } while (mean == range_lo);
  return mean;
}

}  // namespace rodian
