#include "brainclust/matching.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace brainclust {

OverlapMatrix::OverlapMatrix(std::size_t k, std::vector<std::int64_t> counts) : k_(k), counts_(std::move(counts)) {
  if (counts_.size() != k_ * k_) throw std::invalid_argument("overlap matrix must be k x k");
  if (std::any_of(counts_.begin(), counts_.end(), [](std::int64_t c) { return c < 0; })) {
    throw std::invalid_argument("overlap counts must be nonnegative");
  }
}

std::int64_t OverlapMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

OverlapMatrix overlap_matrix(const LabelMap& a, const LabelMap& b, const Mask& m, std::size_t k) {
  require_same_dims(a.dims(), b.dims());
  require_same_dims(a.dims(), m.dims());
  OverlapMatrix om(k);
  const auto in_range = [k](std::int32_t l) { return l >= 0 && static_cast<std::size_t>(l) < k; };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!m[i]) continue;
    if (!in_range(a[i]) || !in_range(b[i])) {
      throw std::out_of_range("overlap_matrix: label out of range [0," + std::to_string(k) + ") at voxel " +
                              std::to_string(i));
    }
    ++om(static_cast<std::size_t>(a[i]), static_cast<std::size_t>(b[i]));
  }
  return om;
}

namespace {

// Minimum-cost assignment with row/column potentials. Rows and columns are
// 1-based inside; row_pot/col_pot end up as an optimal dual.
struct Hungarian {
  std::size_t n;
  std::vector<std::int64_t> cost;  // n x n, 0-based
  std::vector<std::int64_t> row_pot, col_pot;
  std::vector<std::size_t> col_owner;  // col -> row (1-based, 0 = none)

  std::int64_t c(std::size_t i, std::size_t j) const { return cost[(i - 1) * n + (j - 1)]; }

  void run() {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    row_pot.assign(n + 1, 0);
    col_pot.assign(n + 1, 0);
    col_owner.assign(n + 1, 0);
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
      col_owner[0] = i;
      std::size_t j0 = 0;
      std::vector<std::int64_t> minv(n + 1, kInf);
      std::vector<char> used(n + 1, 0);
      do {
        used[j0] = 1;
        const std::size_t i0 = col_owner[j0];
        std::int64_t delta = kInf;
        std::size_t j1 = 0;
        for (std::size_t j = 1; j <= n; ++j) {
          if (used[j]) continue;
          const std::int64_t cur = c(i0, j) - row_pot[i0] - col_pot[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
        for (std::size_t j = 0; j <= n; ++j) {
          if (used[j]) {
            row_pot[col_owner[j]] += delta;
            col_pot[j] -= delta;
          } else {
            minv[j] -= delta;
          }
        }
        j0 = j1;
      } while (col_owner[j0] != 0);
      do {
        const std::size_t j1 = way[j0];
        col_owner[j0] = col_owner[j1];
        j0 = j1;
      } while (j0 != 0);
    }
  }
};

// Lexicographically smallest perfect matching in a bipartite graph that is
// known to have one (`row_match` holds it on entry).
class LexMatcher {
 public:
  LexMatcher(std::vector<std::vector<std::size_t>> adj, std::vector<std::size_t> row_match)
      : adj_(std::move(adj)), row_match_(std::move(row_match)), col_match_(row_match_.size()), fixed_(row_match_.size(), 0) {
    for (std::size_t r = 0; r < row_match_.size(); ++r) col_match_[row_match_[r]] = r;
  }

  std::vector<std::size_t> solve() {
    const std::size_t n = row_match_.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j : adj_[i]) {  // adjacency lists are sorted
        if (fixed_[col_match_[j]]) continue;
        if (row_match_[i] == j || try_force(i, j)) break;
      }
      fixed_[i] = 1;
    }
    return row_match_;
  }

 private:
  // Reassign row i to column j, rematching j's current owner along an
  // alternating path that ends at i's old column.
  bool try_force(std::size_t i, std::size_t j) {
    const std::size_t freed = row_match_[i];
    const std::size_t owner = col_match_[j];
    visited_.assign(row_match_.size(), 0);
    visited_[j] = 1;  // j goes to row i
    path_.clear();
    fixed_[i] = 1;  // row i is no longer available for rematching
    const bool ok = augment(owner, freed);
    fixed_[i] = 0;
    if (!ok) return false;
    // path_ holds (row, new column) pairs from the owner onwards.
    for (const auto& [r, c] : path_) {
      row_match_[r] = c;
      col_match_[c] = r;
    }
    row_match_[i] = j;
    col_match_[j] = i;
    return true;
  }

  bool augment(std::size_t row, std::size_t target) {
    for (std::size_t c : adj_[row]) {
      if (visited_[c]) continue;
      visited_[c] = 1;
      if (c == target) {
        path_.emplace_back(row, c);
        return true;
      }
      const std::size_t o = col_match_[c];
      if (fixed_[o] || o == row) continue;
      path_.emplace_back(row, c);
      if (augment(o, target)) return true;
      path_.pop_back();
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> row_match_, col_match_;
  std::vector<char> fixed_;
  std::vector<char> visited_;
  std::vector<std::pair<std::size_t, std::size_t>> path_;
};

}  // namespace

Assignment max_weight_matching(const OverlapMatrix& om) {
  const std::size_t n = om.k();
  if (n == 0) throw std::invalid_argument("max_weight_matching: empty matrix");

  std::int64_t max_w = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) max_w = std::max(max_w, om(i, j));

  Hungarian h{n, std::vector<std::int64_t>(n * n), {}, {}, {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h.cost[i * n + j] = max_w - om(i, j);
  h.run();

  std::vector<std::size_t> row_match(n);
  for (std::size_t j = 1; j <= n; ++j) row_match[h.col_owner[j] - 1] = j - 1;

  // Tight edges of the optimal dual: by complementary slackness these carry
  // every optimal assignment.
  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (h.row_pot[i + 1] + h.col_pot[j + 1] == h.cost[i * n + j]) tight[i].push_back(j);
    }
  }

  Assignment out;
  out.perm = LexMatcher(std::move(tight), std::move(row_match)).solve();
  for (std::size_t i = 0; i < n; ++i) out.weight += om(i, out.perm[i]);
  return out;
}

}  // namespace brainclust
