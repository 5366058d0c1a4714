#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace rodian {

inline void require_finite(std::span<const double> data) {
  for (double x : data) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("non-finite value in data");
    }
  }
}

/// Affine map of the input range onto [0,1]: y = (x - x_min) / (x_max - x_min).
struct NormalizationRecord {
  double x_min = 0.0;
  double x_max = 0.0;

  // All values identical; the forward map sends everything to 0.
  bool degenerate() const { return x_min == x_max; }
};

/// Sorted input mapped onto [0,1], together with the record that undoes it.
struct NormalizedSample {
  std::vector<double> values;  // ascending, each in [0,1]
  NormalizationRecord record;

  std::size_t size() const { return values.size(); }
};

/// Normalizes an already ascending vector (consumed in place).
inline NormalizedSample normalized_from_sorted(std::vector<double> sorted) {
  if (sorted.empty()) throw std::invalid_argument("empty data");
  NormalizedSample out;
  out.record = {sorted.front(), sorted.back()};
  if (out.record.degenerate()) {
    std::fill(sorted.begin(), sorted.end(), 0.0);
  } else {
    const double lo = out.record.x_min;
    const double range = out.record.x_max - lo;
    for (auto& v : sorted) v = (v - lo) / range;
  }
  out.values = std::move(sorted);
  return out;
}

inline NormalizedSample normalize(std::span<const double> data) {
  if (data.empty()) throw std::invalid_argument("empty data");
  require_finite(data);
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  return normalized_from_sorted(std::move(sorted));
}

inline double unnormalize(double y, const NormalizationRecord& record) {
  return record.x_min + y * (record.x_max - record.x_min);
}

/// Precomputed union of the bin edges of every histogram in a bin set,
/// with the per-histogram bin index of each region between successive
/// edges. Immutable after construction and shareable across threads.
///
/// Bins are half-open [lo, hi) except the last bin of each histogram,
/// which is closed so that the normalized maximum 1.0 is counted. A value
/// equal to an interior edge belongs to the upper bin.
class BinLookupTable {
 public:
  BinLookupTable() = default;

  const std::vector<int>& bin_counts() const { return bin_counts_; }
  const std::vector<double>& edges() const { return edges_; }
  std::size_t region_count() const { return edges_.size() - 1; }

  /// Region holding a normalized value; throws if x is outside [0,1].
  std::size_t region_of(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::domain_error("bin lookup: value outside [0,1]");
    }
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    std::size_t pos = static_cast<std::size_t>(it - edges_.begin());
    if (pos >= edges_.size()) pos = edges_.size() - 1;  // x == 1.0
    return pos - 1;
  }

  /// Bin index of `region` in each histogram, ordered as bin_counts().
  std::span<const std::int32_t> indices_in_region(std::size_t region) const {
    return {indices_.data() + region * bin_counts_.size(), bin_counts_.size()};
  }

  std::int32_t bin_index(std::size_t region, std::size_t b_pos) const {
    return indices_[region * bin_counts_.size() + b_pos];
  }

 private:
  friend BinLookupTable build_lookup_table(const std::vector<int>& bin_counts);

  std::vector<int> bin_counts_;
  std::vector<double> edges_;       // ascending, distinct, spans [0,1]
  std::vector<std::int32_t> indices_;  // region-major, one entry per bin count
};

/// Builds the edge/index table for a strictly ascending set of bin counts.
///
/// The edges are the de-duplicated sorted union of {j/b : 0 <= j <= b} over
/// all b. No histogram edge falls strictly inside a region, so each region's
/// midpoint determines the bin index for every histogram.
inline BinLookupTable build_lookup_table(const std::vector<int>& bin_counts) {
  if (bin_counts.empty()) {
    throw std::invalid_argument("bin set must not be empty");
  }
  for (std::size_t i = 0; i < bin_counts.size(); ++i) {
    if (bin_counts[i] < 1) {
      throw std::invalid_argument("bin counts must be >= 1");
    }
    if (i > 0 && bin_counts[i] <= bin_counts[i - 1]) {
      throw std::invalid_argument("bin counts must be distinct and ascending");
    }
  }

  BinLookupTable table;
  table.bin_counts_ = bin_counts;
  for (int b : bin_counts) {
    for (int j = 0; j <= b; ++j) {
      table.edges_.push_back(static_cast<double>(j) / static_cast<double>(b));
    }
  }
  std::sort(table.edges_.begin(), table.edges_.end());
  table.edges_.erase(std::unique(table.edges_.begin(), table.edges_.end()),
                     table.edges_.end());

  const std::size_t regions = table.edges_.size() - 1;
  table.indices_.resize(regions * bin_counts.size());
  for (std::size_t r = 0; r < regions; ++r) {
    const double mid = 0.5 * (table.edges_[r] + table.edges_[r + 1]);
    for (std::size_t p = 0; p < bin_counts.size(); ++p) {
      const int b = bin_counts[p];
      const auto idx = static_cast<std::int32_t>(mid * b);
      table.indices_[r * bin_counts.size() + p] =
          std::min(idx, static_cast<std::int32_t>(b - 1));
    }
  }
  return table;
}

/// Bin index of every value in every histogram, as one vector per bin count
/// (result[b_pos][i] pairs with bin_counts()[b_pos] and sample.values[i]).
inline std::vector<std::vector<std::int32_t>> assign_bins(
    const NormalizedSample& sample, const BinLookupTable& table) {
  const std::size_t nb = table.bin_counts().size();
  std::vector<std::vector<std::int32_t>> out(
      nb, std::vector<std::int32_t>(sample.values.size()));
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    const auto row = table.indices_in_region(table.region_of(sample.values[i]));
    for (std::size_t p = 0; p < nb; ++p) out[p][i] = row[p];
  }
  return out;
}

/// ln of the binomial probability that a bin holds exactly k of n points
/// when all points are uniform over b equal bins:
///
///   P(k) = C(n,k) (1/b)^k (1 - 1/b)^(n-k)
///
/// Evaluated in log space via lgamma, so it stays finite and accurate for
/// n well beyond 10^7 where the direct form underflows.
inline double log_probability_of_randomness(std::int64_t n, std::int64_t k,
                                            int b) {
  if (k < 1 || k > n || b < 1) {
    throw std::invalid_argument(
        "log_probability_of_randomness: need 1 <= k <= n and b >= 1");
  }
  if (b == 1) {
    return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double log_choose =
      std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
  const double log_p = log_choose - kd * std::log(static_cast<double>(b)) +
                       (nd - kd) * std::log1p(-1.0 / b);
  return std::min(log_p, 0.0);
}

/// One histogram reduced to what the estimator needs: its bin counts, the
/// tallest bin, whether the maximum height is shared, and the randomness
/// score of that height.
struct HistogramSummary {
  int b = 0;
  std::vector<std::int64_t> counts;
  std::int64_t k = 0;       // frequency of the tallest bin
  int tallest_index = 0;    // lowest-indexed maximal bin
  bool tie = false;         // maximum frequency occurs in >= 2 bins
  double log_p = 0.0;
};

inline HistogramSummary summarize_counts(std::vector<std::int64_t> counts) {
  if (counts.empty()) throw std::invalid_argument("empty histogram");
  HistogramSummary s;
  s.b = static_cast<int>(counts.size());
  std::int64_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    n += counts[i];
    if (counts[i] > s.k) {
      s.k = counts[i];
      s.tallest_index = static_cast<int>(i);
    }
  }
  if (n == 0) throw std::invalid_argument("histogram has no observations");
  s.tie = std::count(counts.begin(), counts.end(), s.k) >= 2;
  s.log_p = log_probability_of_randomness(n, s.k, s.b);
  s.counts = std::move(counts);
  return s;
}

inline HistogramSummary summarize_histogram(
    std::span<const std::int32_t> bin_indices, int b) {
  if (b < 1) throw std::invalid_argument("bin count must be >= 1");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(b), 0);
  for (auto idx : bin_indices) {
    if (idx < 0 || idx >= b) {
      throw std::out_of_range("bin index outside [0, b)");
    }
    ++counts[static_cast<std::size_t>(idx)];
  }
  return summarize_counts(std::move(counts));
}

}  // namespace rodian
