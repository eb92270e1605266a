#include "brainclust/preprocess.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "brainclust/random.hpp"

namespace brainclust {

Volume normalize(const Volume& v, const Mask& m) {
  require_same_dims(v.dims(), m.dims());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!m[i]) continue;
    lo = std::min(lo, static_cast<double>(v[i]));
    hi = std::max(hi, static_cast<double>(v[i]));
  }
  Volume out(v.dims(), v.spacing());
  if (!(hi > lo)) return out;  // empty mask or constant image
  const double range = hi - lo;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) out[i] = static_cast<float>((static_cast<double>(v[i]) - lo) / range);
  }
  return out;
}

Volume complement(const Volume& v) {
  Volume out(v.dims(), v.spacing());
  if (v.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(v.data().begin(), v.data().end());
  const double sum = static_cast<double>(*lo_it) + static_cast<double>(*hi_it);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0f) out[i] = static_cast<float>(sum - static_cast<double>(v[i]));
  }
  return out;
}

Volume random_fill(const Volume& v, std::uint64_t seed) {
  Xorshift64Star rng(seed);
  Volume out(v.dims(), v.spacing());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0f) out[i] = rng.uniform_float();
  }
  return out;
}

Volume median_filter_3x3(const Volume& v, const Mask& m) {
  require_same_dims(v.dims(), m.dims());
  const Dims& d = v.dims();
  Volume out = v;
  std::array<float, 9> window{};
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        const std::size_t idx = d.index(x, y, z);
        if (!m[idx]) continue;
        std::size_t n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          const auto yy = static_cast<std::size_t>(std::clamp<long long>(static_cast<long long>(y) + dy, 0, static_cast<long long>(d.ny) - 1));
          for (int dx = -1; dx <= 1; ++dx) {
            const auto xx = static_cast<std::size_t>(std::clamp<long long>(static_cast<long long>(x) + dx, 0, static_cast<long long>(d.nx) - 1));
            window[n++] = v.at(xx, yy, z);
          }
        }
        std::nth_element(window.begin(), window.begin() + 4, window.end());
        out[idx] = window[4];
      }
    }
  }
  return out;
}

Volume rescale(const Volume& v, const Mask& m, double lo, double hi) {
  require_same_dims(v.dims(), m.dims());
  Volume out(v.dims(), v.spacing());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) out[i] = static_cast<float>(lo + (hi - lo) * static_cast<double>(v[i]));
  }
  return out;
}

}  // namespace brainclust
