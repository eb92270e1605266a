#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "brainclust/preprocess.hpp"
#include "brainclust/random.hpp"
#include "support.hpp"

namespace brainclust {
namespace {

Volume line(std::vector<float> values) {
  const std::size_t n = values.size();
  return Volume(Dims{n, 1, 1}, Spacing{}, std::move(values));
}

TEST(Random, RecurrenceMatchesDefinition) {
  // Reference state walk, written out independently of the class.
  std::uint64_t z = 42 + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  std::uint64_t x = z ^ (z >> 31);
  EXPECT_EQ(splitmix64(42), x);

  Xorshift64Star rng(42);
  for (int i = 0; i < 100; ++i) {
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    EXPECT_EQ(rng.next(), x * 0x2545F4914F6CDD1DULL);
  }
}

TEST(Random, UniformFloatRange) {
  Xorshift64Star rng(7);
  for (int i = 0; i < 100000; ++i) {
    const float u = rng.uniform_float();
    EXPECT_GT(u, 0.0f);
    EXPECT_LT(u, 1.0f);
  }
}

TEST(Random, NormalMoments) {
  Xorshift64Star rng(9);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Normalize, MinMaxDefinition) {
  const Volume v = line({10, 20, 30, 0});
  const Volume n = normalize(v, brain_mask(v));
  EXPECT_FLOAT_EQ(n[0], 0.0f);
  EXPECT_FLOAT_EQ(n[1], 0.5f);
  EXPECT_FLOAT_EQ(n[2], 1.0f);
  EXPECT_EQ(n[3], 0.0f);
}

TEST(Normalize, ConstantInMaskIsZero) {
  const Volume v = line({5, 5, 5, 0});
  const Volume n = normalize(v, brain_mask(v));
  for (std::size_t i = 0; i < n.size(); ++i) EXPECT_EQ(n[i], 0.0f);
}

TEST(Normalize, EmptyMaskIsAllZero) {
  const Volume v = line({5, 6, 7});
  const Volume n = normalize(v, Mask(v.dims()));
  for (std::size_t i = 0; i < n.size(); ++i) EXPECT_EQ(n[i], 0.0f);
}

TEST(Normalize, OutsideMaskBecomesZero) {
  const Volume v = line({4, 8, 12});
  Mask m(v.dims(), true);
  m.set(1, false);
  const Volume n = normalize(v, m);
  EXPECT_EQ(n[0], 0.0f);
  EXPECT_EQ(n[1], 0.0f);
  EXPECT_EQ(n[2], 1.0f);
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Volume v = testing::random_volume(rng, Dims{6, 5, 4}, 1.0, 500.0, 0.3);
    const Mask m = brain_mask(v);
    const Volume once = normalize(v, m);
    const Volume twice = normalize(once, m);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(once[i], twice[i], 1e-6);
  }
}

TEST(Complement, DirectFormula) {
  const Volume a = line({0.0f, 0.3f, 1.0f});
  EXPECT_FLOAT_EQ(complement(a)[1], 0.7f);

  const Volume b = line({10.0f, 25.0f, 90.0f});
  const Volume cb = complement(b);
  EXPECT_EQ(cb[1], 75.0f);
  EXPECT_EQ(cb[0], 90.0f);  // p = min -> max
  EXPECT_EQ(cb[2], 10.0f);
}

TEST(Complement, BackgroundStaysZero) {
  const Volume v = line({0.0f, 2.0f, 5.0f});
  const Volume c = complement(v);
  EXPECT_EQ(c[0], 0.0f);
  EXPECT_EQ(c[1], 3.0f);  // min 0 over all voxels, max 5
  EXPECT_EQ(c[2], 0.0f);  // 0 + 5 - 5 is a legitimate 0
}

TEST(Complement, InvolutionWhenExtremesSurvive) {
  // Integer-valued volumes without background keep min and max, and the
  // arithmetic is exact.
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> u(1, 1000);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> data(60);
    for (auto& x : data) x = static_cast<float>(u(rng));
    const Volume v(Dims{5, 4, 3}, Spacing{}, data);
    EXPECT_EQ(complement(complement(v)), v);
  }
}

TEST(RandomFill, BackgroundRangeAndDeterminism) {
  std::mt19937_64 rng(23);
  const Volume v = testing::random_volume(rng, Dims{8, 8, 4}, 0.5, 2.0, 0.5);
  const Volume a = random_fill(v, 99);
  const Volume b = random_fill(v, 99);
  const Volume c = random_fill(v, 100);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0f) {
      EXPECT_EQ(a[i], 0.0f);
    } else {
      EXPECT_GE(a[i], 0.0f);
      EXPECT_LT(a[i], 1.0f);
      EXPECT_NE(a[i], 0.0f);
    }
  }
}

TEST(RandomFill, MatchesGeneratorInLinearOrder) {
  const Volume v = line({1.0f, 0.0f, 3.0f, 4.0f});
  const Volume r = random_fill(v, 5);
  Xorshift64Star rng(5);
  EXPECT_EQ(r[0], rng.uniform_float());
  EXPECT_EQ(r[1], 0.0f);
  EXPECT_EQ(r[2], rng.uniform_float());
  EXPECT_EQ(r[3], rng.uniform_float());
}

TEST(RandomFill, MseAgainstSignalIsReproducible) {
  std::mt19937_64 rng(29);
  const Volume v = testing::random_volume(rng, Dims{10, 10, 3}, 0.1, 1.0, 0.2);
  auto err = [&](std::uint64_t seed) {
    const Volume r = random_fill(v, seed);
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += (r[i] - v[i]) * (r[i] - v[i]);
    return s;
  };
  EXPECT_EQ(err(1234), err(1234));
}

TEST(MedianFilter, ConstantSliceUnchanged) {
  const Volume v(Dims{5, 5, 2}, Spacing{}, std::vector<float>(50, 0.4f));
  EXPECT_EQ(median_filter_3x3(v, Mask(v.dims(), true)), v);
}

TEST(MedianFilter, IsolatedSpikeRemoved) {
  std::vector<float> data(9, 0.0f);
  data[4] = 1.0f;
  const Volume v(Dims{3, 3, 1}, Spacing{}, data);
  const Volume f = median_filter_3x3(v, Mask(v.dims(), true));
  EXPECT_EQ(f.at(1, 1, 0), 0.0f);
}

TEST(MedianFilter, EdgeReplication) {
  // Corner (0,0) sees itself four times, (1,0) and (0,1) twice and (1,1)
  // once. With (0,0) = (1,0) = 9 the window holds six 9s -> median 9.
  std::vector<float> data(9, 1.0f);
  data[0] = 9.0f;
  data[1] = 9.0f;
  const Volume v(Dims{3, 3, 1}, Spacing{}, data);
  Mask m(v.dims());
  m.set(0, true);
  EXPECT_EQ(median_filter_3x3(v, m)[0], 9.0f);
}

TEST(MedianFilter, SliceWiseOnly) {
  // A spike surrounded by zeros in-slice but with ones above and below stays 0.
  std::vector<float> data(27, 0.0f);
  for (std::size_t i = 0; i < 9; ++i) {
    data[i] = 1.0f;
    data[18 + i] = 1.0f;
  }
  data[13] = 1.0f;
  const Volume v(Dims{3, 3, 3}, Spacing{}, data);
  const Volume f = median_filter_3x3(v, Mask(v.dims(), true));
  EXPECT_EQ(f.at(1, 1, 1), 0.0f);
  EXPECT_EQ(f.at(1, 1, 0), 1.0f);
}

TEST(MedianFilter, OutsideMaskKeepsExactValue) {
  std::mt19937_64 rng(31);
  const Volume v = testing::random_volume(rng, Dims{7, 6, 3});
  const Mask m = testing::random_mask(rng, v.dims(), 0.5);
  const Volume f = median_filter_3x3(v, m);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!m[i]) EXPECT_EQ(f[i], v[i]);
  }
}

TEST(MedianFilter, MatchesBruteForce) {
  std::mt19937_64 rng(37);
  const Dims d{6, 5, 2};
  const Volume v = testing::random_volume(rng, d);
  const Mask m(d, true);
  const Volume f = median_filter_3x3(v, m);
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        std::vector<float> w;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const auto xx = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(x) + dx, 0, 5));
            const auto yy = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(y) + dy, 0, 4));
            w.push_back(v.at(xx, yy, z));
          }
        }
        std::sort(w.begin(), w.end());
        EXPECT_EQ(f.at(x, y, z), w[4]);
      }
    }
  }
}

TEST(MedianFilter, IdempotentOnLargeConstantRegions) {
  // Slabs of width 4 along x; every window straddles at most one step edge.
  const Dims d{12, 8, 2};
  std::vector<float> data(d.count());
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        data[d.index(x, y, z)] = static_cast<float>(1 + (x / 4) + 3 * z);
      }
    }
  }
  const Volume v(d, Spacing{}, data);
  const Mask m(d, true);
  const Volume once = median_filter_3x3(v, m);
  EXPECT_EQ(once, v);
  EXPECT_EQ(median_filter_3x3(once, m), once);
}

TEST(Rescale, MapsUnitRangeInsideMask) {
  const Volume v = line({0.0f, 0.5f, 1.0f, 0.25f});
  Mask m(v.dims(), true);
  m.set(3, false);
  const Volume r = rescale(v, m, 100.0, 300.0);
  EXPECT_EQ(r[0], 100.0f);
  EXPECT_EQ(r[1], 200.0f);
  EXPECT_EQ(r[2], 300.0f);
  EXPECT_EQ(r[3], 0.0f);
}

}  // namespace
}  // namespace brainclust
