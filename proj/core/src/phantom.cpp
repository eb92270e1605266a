#include "brainclust/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "brainclust/random.hpp"

namespace brainclust {

Band phantom_band(std::size_t tissue, std::size_t tissue_count) {
  const auto t = static_cast<double>(tissue);
  const auto n = static_cast<double>(tissue_count);
  return {(t + 0.2) / n, (t + 0.8) / n};
}

std::vector<AffineTransfer> identity_transfer(std::size_t tissue_count) {
  return std::vector<AffineTransfer>(tissue_count, AffineTransfer{1.0, 0.0});
}

std::vector<AffineTransfer> phantom_transfer_family(std::size_t tissue_count, std::uint64_t family_seed) {
  Xorshift64Star rng(family_seed);
  std::vector<std::size_t> target(tissue_count);
  for (std::size_t i = 0; i < tissue_count; ++i) target[i] = i;
  for (std::size_t i = tissue_count; i > 1; --i) {
    std::swap(target[i - 1], target[rng.next() % i]);
  }
  std::vector<AffineTransfer> out(tissue_count);
  for (std::size_t t = 0; t < tissue_count; ++t) {
    const Band from = phantom_band(t, tissue_count);
    const Band to = phantom_band(target[t], tissue_count);
    if (rng.next() & 1U) {
      out[t] = {-1.0, from.lo + to.hi};
    } else {
      out[t] = {1.0, to.lo - from.lo};
    }
  }
  return out;
}

namespace {

struct Wave {
  std::array<double, 3> freq{};
  double phase = 0.0;
};

// Sum of a few low-frequency plane waves; frequencies are in cycles per
// grid extent so the field looks the same at every resolution.
std::vector<Wave> random_waves(Xorshift64Star& rng, std::size_t count, double lo, double hi) {
  std::vector<Wave> waves(count);
  for (auto& w : waves) {
    for (auto& f : w.freq) {
      const double mag = lo + (hi - lo) * rng.uniform_double();
      f = (rng.next() & 1U) ? mag : -mag;
    }
    w.phase = 2.0 * std::numbers::pi * rng.uniform_double();
  }
  return waves;
}

double field(const std::vector<Wave>& waves, double u, double v, double w) {
  double s = 0.0;
  for (const auto& wave : waves) {
    s += std::sin(2.0 * std::numbers::pi * (wave.freq[0] * u + wave.freq[1] * v + wave.freq[2] * w) + wave.phase);
  }
  return s;
}

void validate_transfer(const std::vector<AffineTransfer>& transfer, std::size_t tissue_count) {
  if (transfer.size() != tissue_count) {
    throw std::invalid_argument("phantom: transfer has " + std::to_string(transfer.size()) + " entries for " +
                                std::to_string(tissue_count) + " tissues");
  }
  for (std::size_t t = 0; t < tissue_count; ++t) {
    const AffineTransfer& a = transfer[t];
    if (!std::isfinite(a.slope) || !std::isfinite(a.offset) || a.slope == 0.0) {
      throw std::invalid_argument("phantom: invalid transfer coefficients for tissue " + std::to_string(t));
    }
    const Band b = phantom_band(t, tissue_count);
    const double y0 = a.slope * b.lo + a.offset;
    const double y1 = a.slope * b.hi + a.offset;
    if (std::min(y0, y1) <= 0.0 || std::max(y0, y1) > 1.0) {
      throw std::invalid_argument("phantom: transfer maps tissue " + std::to_string(t) + " outside (0, 1]");
    }
  }
}

}  // namespace

Phantom make_phantom(std::uint64_t seed, Dims dims, std::size_t tissue_count,
                     const std::vector<AffineTransfer>& transfer, double noise_sd, PhantomShape shape) {
  if (tissue_count < 2 || tissue_count > 6) throw std::invalid_argument("phantom: tissue_count must be in [2, 6]");
  if (dims.nx < 8 || dims.ny < 8 || dims.nz < 8) throw std::invalid_argument("phantom: dims must be >= 8 per axis");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw std::invalid_argument("phantom: noise_sd must be >= 0");
  validate_transfer(transfer, tissue_count);

  Xorshift64Star rng(seed);
  const std::vector<Wave> layout = random_waves(rng, 3, 0.25, 1.0);
  const std::vector<Wave> shading = random_waves(rng, 2, 0.5, 1.5);

  const std::array<double, 3> n{static_cast<double>(dims.nx), static_cast<double>(dims.ny),
                                static_cast<double>(dims.nz)};
  const std::array<double, 3> centre{(n[0] - 1) / 2, (n[1] - 1) / 2, (n[2] - 1) / 2};
  const std::array<double, 3> radius{0.45 * n[0], 0.45 * n[1], 0.45 * n[2]};

  // Tumor centre within half the brain radius, size relative to the grid.
  std::array<double, 3> tumor{};
  for (int a = 0; a < 3; ++a) tumor[a] = centre[a] + (rng.uniform_double() - 0.5) * radius[a];
  const double tumor_r = 0.15 * std::min({n[0], n[1], n[2]});

  const std::size_t margin = std::max<std::size_t>(1, dims.nz / 8);
  const std::size_t count = dims.count();
  Mask brain(dims);
  std::vector<double> f(count, 0.0), g(count, 0.0);
  for (std::size_t z = 0; z < dims.nz; ++z) {
    for (std::size_t y = 0; y < dims.ny; ++y) {
      for (std::size_t x = 0; x < dims.nx; ++x) {
        if (shape == PhantomShape::kEllipsoid) {
          const double dx = (static_cast<double>(x) - centre[0]) / radius[0];
          const double dy = (static_cast<double>(y) - centre[1]) / radius[1];
          const double dz = (static_cast<double>(z) - centre[2]) / radius[2];
          if (dx * dx + dy * dy + dz * dz > 1.0) continue;
        } else if (z < margin || z >= dims.nz - margin) {
          continue;
        }
        const std::size_t i = dims.index(x, y, z);
        brain.set(i, true);
        const double u = static_cast<double>(x) / n[0];
        const double v = static_cast<double>(y) / n[1];
        const double w = static_cast<double>(z) / n[2];
        f[i] = field(layout, u, v, w);
        g[i] = field(shading, u, v, w);
      }
    }
  }

  // Equal-volume tissues from quantiles of f.
  std::vector<double> sorted;
  sorted.reserve(brain.count());
  for (std::size_t i = 0; i < count; ++i) {
    if (brain[i]) sorted.push_back(f[i]);
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> thresholds;
  for (std::size_t t = 1; t < tissue_count; ++t) thresholds.push_back(sorted[t * sorted.size() / tissue_count]);

  LabelMap tissues(dims);
  std::vector<double> gmin(tissue_count, HUGE_VAL), gmax(tissue_count, -HUGE_VAL);
  for (std::size_t i = 0; i < count; ++i) {
    if (!brain[i]) continue;
    const auto t = static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), f[i]) -
                                            thresholds.begin());
    tissues[i] = static_cast<std::int32_t>(t);
    gmin[t] = std::min(gmin[t], g[i]);
    gmax[t] = std::max(gmax[t], g[i]);
  }

  Volume t1(dims, Spacing{});
  Volume t2(dims, Spacing{});
  Volume seg(dims, Spacing{});
  for (std::size_t z = 0; z < dims.nz; ++z) {
    for (std::size_t y = 0; y < dims.ny; ++y) {
      for (std::size_t x = 0; x < dims.nx; ++x) {
        const std::size_t i = dims.index(x, y, z);
        if (!brain[i]) continue;
        const auto t = static_cast<std::size_t>(tissues[i]);
        const Band b = phantom_band(t, tissue_count);
        const double span = gmax[t] - gmin[t];
        const double s = span > 0.0 ? (g[i] - gmin[t]) / span : 0.5;
        const auto v1 = static_cast<float>(b.lo + (b.hi - b.lo) * s);
        t1[i] = v1;
        t2[i] = static_cast<float>(transfer[t].slope * static_cast<double>(v1) + transfer[t].offset);

        const double ex = static_cast<double>(x) - tumor[0];
        const double ey = static_cast<double>(y) - tumor[1];
        const double ez = static_cast<double>(z) - tumor[2];
        const double d = std::sqrt(ex * ex + ey * ey + ez * ez);
        if (d < 0.4 * tumor_r) {
          seg[i] = 1.0f;
        } else if (d < 0.7 * tumor_r) {
          seg[i] = 4.0f;
        } else if (d < tumor_r) {
          seg[i] = 2.0f;
        }
      }
    }
  }

  if (noise_sd > 0.0) {
    for (std::size_t i = 0; i < count; ++i) {
      if (!brain[i]) continue;
      const double v = static_cast<double>(t2[i]) + noise_sd * rng.normal();
      t2[i] = static_cast<float>(std::clamp(v, 1e-3, 1.0));
    }
  }

  Phantom p;
  p.pair.id = "phantom_" + std::to_string(seed);
  p.pair.t1 = std::move(t1);
  p.pair.t2 = std::move(t2);
  p.pair.seg = std::move(seg);
  p.tissues = std::move(tissues);
  return p;
}

PatientPair make_phantom_pair(std::uint64_t seed, Dims dims, std::size_t tissue_count,
                              const std::vector<AffineTransfer>& transfer, double noise_sd, PhantomShape shape) {
  return make_phantom(seed, dims, tissue_count, transfer, noise_sd, shape).pair;
}

}  // namespace brainclust
