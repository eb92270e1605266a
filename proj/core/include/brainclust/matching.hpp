#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "brainclust/volume.hpp"

namespace brainclust {

/// counts(i, j) = voxels labelled i in the first map and j in the second.
class OverlapMatrix {
 public:
  OverlapMatrix() = default;
  explicit OverlapMatrix(std::size_t k) : k_(k), counts_(k * k, 0) {}
  OverlapMatrix(std::size_t k, std::vector<std::int64_t> counts);

  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::int64_t operator()(std::size_t i, std::size_t j) const noexcept { return counts_[i * k_ + j]; }
  std::int64_t& operator()(std::size_t i, std::size_t j) noexcept { return counts_[i * k_ + j]; }
  [[nodiscard]] std::int64_t total() const noexcept;

  friend bool operator==(const OverlapMatrix&, const OverlapMatrix&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::int64_t> counts_;
};

struct Assignment {
  std::vector<std::size_t> perm;  // perm[i] = column matched to row i
  std::int64_t weight = 0;
};

/// Counts label co-occurrence over voxels inside `m`. Throws
/// DimensionMismatch, or std::out_of_range for an in-mask label outside
/// [0, k).
OverlapMatrix overlap_matrix(const LabelMap& a, const LabelMap& b, const Mask& m, std::size_t k);

/// Maximum-weight perfect matching (Hungarian method with potentials, on the
/// negated weights). Among all optimal permutations the lexicographically
/// smallest is returned: every optimal assignment is a perfect matching of
/// the equality subgraph of the optimal dual, and that subgraph is searched
/// greedily row by row.
Assignment max_weight_matching(const OverlapMatrix& om);

}  // namespace brainclust
