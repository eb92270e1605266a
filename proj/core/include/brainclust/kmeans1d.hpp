#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "brainclust/volume.hpp"

namespace brainclust {

/// Distinct sorted intensities with integer multiplicities. A whole volume
/// is clustered through its histogram, so DP size is bounded by the number
/// of distinct (quantized) values instead of the voxel count.
struct WeightedValues {
  std::vector<double> values;          // strictly increasing
  std::vector<std::uint64_t> weights;  // >= 1, same length as values

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] bool empty() const noexcept { return values.empty(); }

  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;
};

/// Optimal partition of a WeightedValues into contiguous intervals.
/// Cluster c covers values[starts[c] .. starts[c+1]) and clusters are
/// indexed by increasing mean.
struct Clustering {
  std::size_t requested_k = 0;
  std::size_t k = 0;  // effective k = min(requested_k, distinct values)
  std::vector<std::size_t> starts;
  std::vector<double> lower;  // smallest value in each cluster
  std::vector<double> upper;  // largest value in each cluster
  std::vector<double> means;  // weighted means
  std::vector<std::uint64_t> weights;
  double cost = 0.0;  // total weighted within-cluster sum of squares

  /// The k-1 split positions (starts[1..k)), i.e. the first value index of
  /// every cluster but the first.
  [[nodiscard]] std::vector<std::size_t> boundaries() const;

  /// Index of the cluster whose [lower, upper] interval contains `value`,
  /// or -1 if none does.
  [[nodiscard]] std::int32_t cluster_of(double value) const noexcept;
};

/// Exact 1D k-means. Runs the O(k n^2) dynamic program with the
/// divide-and-conquer argmin speed-up (O(k n log n)); among equal-cost
/// optima the lexicographically smallest boundary vector wins.
/// k is clamped to the number of distinct values. Throws on empty input or
/// k == 0.
Clustering cluster_1d(const WeightedValues& wv, std::size_t k);

/// Total weighted SSE of the given contiguous partition, computed directly
/// from the values (no prefix sums).
double partition_cost(const WeightedValues& wv, const std::vector<std::size_t>& starts);

// Normalized intensities are quantized onto a fixed grid of 2^16 cells over
// [0, 1]. The representative of a cell is its lower edge, bin / 2^16.
inline constexpr std::uint32_t kQuantizationBins = 1u << 16;

[[nodiscard]] std::uint32_t quantize(double x) noexcept;
[[nodiscard]] double dequantize(std::uint32_t bin) noexcept;

/// Histogram of the quantized in-mask intensities of `v`.
WeightedValues intensity_histogram(const Volume& v, const Mask& m);

/// Labels every in-mask voxel with the cluster containing its quantized
/// value; other voxels get LabelMap::kBackground.
LabelMap assign_labels(const Volume& v, const Mask& m, const Clustering& c);

}  // namespace brainclust
