#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rodian/histogram_engine.hpp"

namespace rodian {

inline const std::vector<int>& default_bin_counts() {
  static const std::vector<int> counts = {2, 3, 4, 5, 7, 9, 11, 14, 17, 20};
  return counts;
}

/// Lookup table for the default bin set, built once and shared.
inline const BinLookupTable& default_lookup_table() {
  static const BinLookupTable table = build_lookup_table(default_bin_counts());
  return table;
}

struct RodianConfig {
  std::vector<int> bin_counts = default_bin_counts();
  // Two histograms whose scores differ by less than this (relative, in the
  // log domain) count as tied; the smaller bin count wins the tie.
  double log_p_tie_tolerance = 1e-12;
};

struct EstimatorOutcome {
  double estimate = 0.0;
  std::optional<int> chosen_b;
  std::optional<std::pair<double, double>> chosen_bin_bounds;  // input units
  bool fell_back_to_median = false;
  bool degenerate_range = false;
};

namespace detail {

inline double median_of_sorted(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  const std::size_t mid = n / 2;
  if (n % 2 == 1) return sorted[mid];
  return std::midpoint(sorted[mid - 1], sorted[mid]);
}

// Median by selection; scrambles the buffer.
inline double median_inplace(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return std::midpoint(lower, upper);
}

inline void validate_rodian_config(const RodianConfig& config) {
  if (config.bin_counts.empty()) {
    throw std::invalid_argument("rodian: bin set must not be empty");
  }
  for (std::size_t i = 0; i < config.bin_counts.size(); ++i) {
    if (config.bin_counts[i] < 2) {
      throw std::invalid_argument("rodian: bin counts must be >= 2");
    }
    if (i > 0 && config.bin_counts[i] <= config.bin_counts[i - 1]) {
      throw std::invalid_argument(
          "rodian: bin counts must be distinct and ascending");
    }
  }
  if (!(config.log_p_tie_tolerance >= 0.0)) {
    throw std::invalid_argument("rodian: tie tolerance must be >= 0");
  }
}

}  // namespace detail

/// Median of the data inside the histogram bin whose height is least
/// probable under a uniform null model.
///
/// Sorts and normalizes the input, bins it into one histogram per entry of
/// config.bin_counts via the shared lookup table, discards histograms whose
/// maximum bin height is shared by several bins, scores the rest with
/// log_probability_of_randomness, and returns the median of the values in
/// the winning bin. If every histogram is discarded the plain median of the
/// input is returned with fell_back_to_median set. Runs in O(n log n).
inline EstimatorOutcome rodian(std::span<const double> data,
                               const RodianConfig& config = {}) {
  detail::validate_rodian_config(config);
  if (data.empty()) throw std::invalid_argument("empty data");
  require_finite(data);

  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());

  EstimatorOutcome out;
  if (sorted.front() == sorted.back()) {
    out.estimate = sorted.front();
    out.degenerate_range = true;
    return out;
  }

  const NormalizedSample sample =
      normalized_from_sorted(std::vector<double>(sorted));

  BinLookupTable local_table;
  const BinLookupTable* table = &default_lookup_table();
  if (config.bin_counts != default_bin_counts()) {
    local_table = build_lookup_table(config.bin_counts);
    table = &local_table;
  }

  const std::size_t nb = config.bin_counts.size();
  std::vector<std::vector<std::int64_t>> counts(nb);
  for (std::size_t p = 0; p < nb; ++p) {
    counts[p].assign(static_cast<std::size_t>(config.bin_counts[p]), 0);
  }
  for (double v : sample.values) {
    const auto row = table->indices_in_region(table->region_of(v));
    for (std::size_t p = 0; p < nb; ++p) {
      ++counts[p][static_cast<std::size_t>(row[p])];
    }
  }

  struct Candidate {
    double log_p;
    std::size_t b_pos;
    int bin;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(nb);
  for (std::size_t p = 0; p < nb; ++p) {
    HistogramSummary s = summarize_counts(std::move(counts[p]));
    if (!s.tie) candidates.push_back({s.log_p, p, s.tallest_index});
  }

  if (candidates.empty()) {
    out.estimate = detail::median_of_sorted(sorted);
    out.fell_back_to_median = true;
    return out;
  }

  double best = candidates.front().log_p;
  for (const auto& c : candidates) best = std::min(best, c.log_p);
  // Smallest bin count whose score ties the minimum; candidates are already
  // in ascending-b order.
  const Candidate* winner = nullptr;
  for (const auto& c : candidates) {
    const double slack = config.log_p_tie_tolerance *
                         std::max(std::fabs(c.log_p), std::fabs(best));
    if (c.log_p - best <= slack) {
      winner = &c;
      break;
    }
  }

  const int b = config.bin_counts[winner->b_pos];
  const int bin = winner->bin;

  // The winning bin covers a contiguous run of regions, hence a contiguous
  // run of the sorted values.
  std::size_t first_region = 0;
  std::size_t last_region = 0;
  bool seen = false;
  for (std::size_t r = 0; r < table->region_count(); ++r) {
    if (table->bin_index(r, winner->b_pos) == bin) {
      if (!seen) first_region = r;
      last_region = r;
      seen = true;
    }
  }

  const auto& norm = sample.values;
  const auto lower = std::partition_point(
      norm.begin(), norm.end(),
      [&](double v) { return table->region_of(v) < first_region; });
  const auto upper = std::partition_point(
      lower, norm.end(),
      [&](double v) { return table->region_of(v) <= last_region; });
  const std::size_t first = static_cast<std::size_t>(lower - norm.begin());
  const std::size_t count = static_cast<std::size_t>(upper - lower);

  out.estimate = detail::median_of_sorted(
      std::span<const double>(sorted).subspan(first, count));
  out.chosen_b = b;
  out.chosen_bin_bounds = {
      unnormalize(static_cast<double>(bin) / b, sample.record),
      unnormalize(static_cast<double>(bin + 1) / b, sample.record)};
  return out;
}

/// Middle order statistic; mean of the two middle ones for even length.
inline double median(std::span<const double> data) {
  if (data.empty()) throw std::invalid_argument("empty data");
  require_finite(data);
  std::vector<double> v(data.begin(), data.end());
  return detail::median_inplace(v);
}

/// Least median of squares: the data point with the smallest median squared
/// distance to the rest. Ties go to the smallest such point. O(n^2) overall.
inline double lmeds(std::span<const double> data) {
  if (data.size() < 2) {
    throw std::invalid_argument("lmeds: need at least 2 elements");
  }
  require_finite(data);
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  std::vector<double> sq(n - 1);
  double best_objective = std::numeric_limits<double>::infinity();
  double best_value = sorted.front();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = sorted[i] - sorted[j];
      sq[w++] = d * d;
    }
    const double objective = detail::median_inplace(sq);
    if (objective < best_objective) {
      best_objective = objective;
      best_value = sorted[i];
    }
  }
  return best_value;
}

/// Median of the values in the tallest bin of a single equal-width
/// histogram over [min, max]; the lowest-indexed bin wins a height tie.
inline double fixed_histogram_median(std::span<const double> data, int b) {
  if (data.empty()) throw std::invalid_argument("empty data");
  if (b < 1) throw std::invalid_argument("bin count must be >= 1");
  require_finite(data);
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());

  const double lo = sorted.front();
  const double hi = sorted.back();
  if (lo == hi) return lo;

  std::vector<std::int64_t> counts(static_cast<std::size_t>(b), 0);
  for (double v : sorted) {
    const double y = (v - lo) / (hi - lo);
    const int idx = std::min(static_cast<int>(y * b), b - 1);
    ++counts[static_cast<std::size_t>(idx)];
  }
  std::size_t tallest = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[tallest]) tallest = i;
  }
  // Bin index is non-decreasing along the sorted values, so the tallest
  // bin's members form a contiguous run starting at the prefix sum.
  std::size_t first = 0;
  for (std::size_t i = 0; i < tallest; ++i) {
    first += static_cast<std::size_t>(counts[i]);
  }
  const auto count = static_cast<std::size_t>(counts[tallest]);
  return detail::median_of_sorted(
      std::span<const double>(sorted).subspan(first, count));
}

/// Arithmetic mean after dropping floor(alpha*n/2) values from each end.
inline double alpha_trimmed_mean(std::span<const double> data, double alpha) {
  if (data.empty()) throw std::invalid_argument("empty data");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1)");
  }
  require_finite(data);
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const auto trim =
      static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) / 2.0));
  if (2 * trim >= n) {
    throw std::invalid_argument("alpha trim would remove every element");
  }
  const std::size_t kept = n - 2 * trim;
  const double sum = std::accumulate(sorted.begin() + static_cast<std::ptrdiff_t>(trim),
                                     sorted.end() - static_cast<std::ptrdiff_t>(trim), 0.0);
  return sum / static_cast<double>(kept);
}

}  // namespace rodian
