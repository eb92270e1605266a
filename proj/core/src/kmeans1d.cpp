#include "brainclust/kmeans1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace brainclust {

void WeightedValues::validate() const {
  if (values.size() != weights.size()) throw std::invalid_argument("values and weights differ in length");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument("non-finite value in weighted values");
    if (weights[i] == 0) throw std::invalid_argument("weights must be >= 1");
    if (i > 0 && !(values[i - 1] < values[i])) throw std::invalid_argument("values must be strictly increasing");
  }
}

std::vector<std::size_t> Clustering::boundaries() const {
  if (starts.size() <= 1) return {};
  return {starts.begin() + 1, starts.end()};
}

std::int32_t Clustering::cluster_of(double value) const noexcept {
  const auto it = std::upper_bound(lower.begin(), lower.end(), value);
  if (it == lower.begin()) return -1;
  const auto c = static_cast<std::size_t>(std::distance(lower.begin(), it) - 1);
  if (value > upper[c]) return -1;
  return static_cast<std::int32_t>(c);
}

namespace {

// Prefix sums over values shifted by their weighted mean; long double keeps
// the cancellation in S2 - S1^2/W well below the tie tolerance.
class IntervalCost {
 public:
  explicit IntervalCost(const WeightedValues& wv) : w_(wv.size() + 1), s1_(wv.size() + 1), s2_(wv.size() + 1) {
    long double total_w = 0, total_s = 0;
    for (std::size_t i = 0; i < wv.size(); ++i) {
      total_w += static_cast<long double>(wv.weights[i]);
      total_s += static_cast<long double>(wv.weights[i]) * wv.values[i];
    }
    const long double shift = total_s / total_w;
    for (std::size_t i = 0; i < wv.size(); ++i) {
      const long double w = static_cast<long double>(wv.weights[i]);
      const long double x = static_cast<long double>(wv.values[i]) - shift;
      w_[i + 1] = w_[i] + w;
      s1_[i + 1] = s1_[i] + w * x;
      s2_[i + 1] = s2_[i] + w * x * x;
    }
  }

  /// SSE of values [i, j), j > i.
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
    const long double w = w_[j] - w_[i];
    const long double s1 = s1_[j] - s1_[i];
    const long double s2 = s2_[j] - s2_[i];
    const long double c = s2 - s1 * s1 / w;
    return c > 0 ? static_cast<double>(c) : 0.0;
  }

 private:
  std::vector<long double> w_, s1_, s2_;
};

bool strictly_better(double candidate, double best) noexcept {
  if (std::isinf(best)) return candidate < best;
  return candidate < best - 1e-12 * std::abs(best);
}

// One DP layer over suffixes: next[i] = min_{m in (i, limit]} cost(i, m) + prev[m],
// evaluated for i in [lo, hi]. argmin is the leftmost (tolerant) minimiser.
struct LayerSolver {
  const IntervalCost& cost;
  const std::vector<double>& prev;
  std::vector<double>& next;
  std::vector<std::uint32_t>& argmin;
  std::size_t limit;

  void solve(std::ptrdiff_t lo, std::ptrdiff_t hi, std::size_t opt_lo, std::size_t opt_hi) {
    if (lo > hi) return;
    const auto mid = static_cast<std::size_t>((lo + hi) / 2);
    const std::size_t first = std::max(mid + 1, opt_lo);
    const std::size_t last = std::min(limit, opt_hi);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_m = first;
    for (std::size_t m = first; m <= last; ++m) {
      const double v = cost(mid, m) + prev[m];
      if (strictly_better(v, best)) {
        best = v;
        best_m = m;
      }
    }
    next[mid] = best;
    argmin[mid] = static_cast<std::uint32_t>(best_m);
    solve(lo, static_cast<std::ptrdiff_t>(mid) - 1, opt_lo, best_m);
    solve(static_cast<std::ptrdiff_t>(mid) + 1, hi, best_m, opt_hi);
  }
};

Clustering summarize(const WeightedValues& wv, std::size_t requested_k, std::vector<std::size_t> starts) {
  Clustering c;
  c.requested_k = requested_k;
  c.k = starts.size();
  c.starts = std::move(starts);
  const std::size_t n = wv.size();
  for (std::size_t ci = 0; ci < c.k; ++ci) {
    const std::size_t b = c.starts[ci];
    const std::size_t e = ci + 1 < c.k ? c.starts[ci + 1] : n;
    long double w = 0, s = 0;
    for (std::size_t i = b; i < e; ++i) {
      w += static_cast<long double>(wv.weights[i]);
      s += static_cast<long double>(wv.weights[i]) * wv.values[i];
    }
    const double mean = (e - b == 1) ? wv.values[b] : static_cast<double>(s / w);
    c.lower.push_back(wv.values[b]);
    c.upper.push_back(wv.values[e - 1]);
    c.means.push_back(mean);
    c.weights.push_back(static_cast<std::uint64_t>(w));
  }
  c.cost = partition_cost(wv, c.starts);
  return c;
}

}  // namespace

double partition_cost(const WeightedValues& wv, const std::vector<std::size_t>& starts) {
  const std::size_t n = wv.size();
  long double total = 0;
  for (std::size_t ci = 0; ci < starts.size(); ++ci) {
    const std::size_t b = starts[ci];
    const std::size_t e = ci + 1 < starts.size() ? starts[ci + 1] : n;
    if (e - b <= 1) continue;
    long double w = 0, s = 0;
    for (std::size_t i = b; i < e; ++i) {
      w += static_cast<long double>(wv.weights[i]);
      s += static_cast<long double>(wv.weights[i]) * wv.values[i];
    }
    const long double mean = s / w;
    for (std::size_t i = b; i < e; ++i) {
      const long double dx = wv.values[i] - mean;
      total += static_cast<long double>(wv.weights[i]) * dx * dx;
    }
  }
  return static_cast<double>(total);
}

Clustering cluster_1d(const WeightedValues& wv, std::size_t k) {
  wv.validate();
  if (wv.empty()) throw std::invalid_argument("cluster_1d: empty input");
  if (k == 0) throw std::invalid_argument("cluster_1d: k must be >= 1");
  const std::size_t n = wv.size();
  const std::size_t kk = std::min(k, n);

  if (kk == 1) return summarize(wv, k, {0});
  if (kk == n) {
    std::vector<std::size_t> starts(n);
    for (std::size_t i = 0; i < n; ++i) starts[i] = i;
    return summarize(wv, k, std::move(starts));
  }

  const IntervalCost cost(wv);
  // layer j holds the best cost of splitting suffix [i, n) into j clusters.
  std::vector<double> prev(n + 1, std::numeric_limits<double>::infinity());
  std::vector<double> next(n + 1, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) prev[i] = cost(i, n);
  std::vector<std::vector<std::uint32_t>> argmin(kk + 1);

  for (std::size_t j = 2; j <= kk; ++j) {
    // Only suffixes reachable from position 0 with kk - j clusters in front.
    const std::size_t lo = (j == kk) ? 0 : kk - j;
    const std::size_t hi = (j == kk) ? 0 : n - j;
    std::fill(next.begin(), next.end(), std::numeric_limits<double>::infinity());
    argmin[j].assign(n, 0);
    LayerSolver solver{cost, prev, next, argmin[j], n - j + 1};
    solver.solve(static_cast<std::ptrdiff_t>(lo), static_cast<std::ptrdiff_t>(hi), lo + 1, n - j + 1);
    std::swap(prev, next);
  }

  std::vector<std::size_t> starts{0};
  std::size_t pos = 0;
  for (std::size_t j = kk; j >= 2; --j) {
    pos = argmin[j][pos];
    starts.push_back(pos);
  }
  return summarize(wv, k, std::move(starts));
}

std::uint32_t quantize(double x) noexcept {
  if (!(x > 0.0)) return 0;  // also maps NaN to 0
  const double scaled = std::floor(x * static_cast<double>(kQuantizationBins));
  if (scaled >= static_cast<double>(kQuantizationBins - 1)) return kQuantizationBins - 1;
  return static_cast<std::uint32_t>(scaled);
}

double dequantize(std::uint32_t bin) noexcept {
  return static_cast<double>(bin) / static_cast<double>(kQuantizationBins);
}

WeightedValues intensity_histogram(const Volume& v, const Mask& m) {
  require_same_dims(v.dims(), m.dims());
  std::vector<std::uint64_t> counts(kQuantizationBins, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) ++counts[quantize(v[i])];
  }
  WeightedValues wv;
  for (std::uint32_t b = 0; b < kQuantizationBins; ++b) {
    if (counts[b] == 0) continue;
    wv.values.push_back(dequantize(b));
    wv.weights.push_back(counts[b]);
  }
  return wv;
}

LabelMap assign_labels(const Volume& v, const Mask& m, const Clustering& c) {
  require_same_dims(v.dims(), m.dims());
  // Per-bin lookup: every voxel in the same cell gets the same label.
  std::vector<std::int32_t> bin_label(kQuantizationBins, LabelMap::kBackground - 1);
  LabelMap labels(v.dims());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!m[i]) continue;
    const std::uint32_t b = quantize(v[i]);
    if (bin_label[b] == LabelMap::kBackground - 1) {
      bin_label[b] = c.cluster_of(dequantize(b));
      if (bin_label[b] < 0) {
        throw std::logic_error("assign_labels: intensity " + std::to_string(dequantize(b)) +
                               " lies outside every cluster interval");
      }
    }
    labels[i] = bin_label[b];
  }
  return labels;
}

}  // namespace brainclust
