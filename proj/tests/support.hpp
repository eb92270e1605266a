#pragma once

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "brainclust/volume.hpp"

namespace brainclust::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("brainclust_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

// Volume with values drawn uniformly from [lo, hi]; a fraction of voxels
// set to 0 as background.
inline Volume random_volume(std::mt19937_64& rng, Dims d, double lo = 0.0, double hi = 1.0, double background = 0.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<float> data(d.count());
  for (auto& v : data) v = coin(rng) < background ? 0.0f : static_cast<float>(u(rng));
  return Volume(d, Spacing{}, std::move(data));
}

inline Mask random_mask(std::mt19937_64& rng, Dims d, double p) {
  std::bernoulli_distribution b(p);
  Mask m(d);
  for (std::size_t i = 0; i < m.size(); ++i) m.set(i, b(rng));
  return m;
}

// Hand-assembled NIfTI-1 header, optionally big-endian.
class NiftiFixture {
 public:
  NiftiFixture(std::int16_t nx, std::int16_t ny, std::int16_t nz, std::int16_t datatype, std::int16_t bitpix,
               bool big_endian = false)
      : bytes_(352, 0), big_(big_endian) {
    put<std::int32_t>(0, 348);
    put<std::int16_t>(40, 3);
    put<std::int16_t>(42, nx);
    put<std::int16_t>(44, ny);
    put<std::int16_t>(46, nz);
    for (int i = 4; i < 8; ++i) put<std::int16_t>(40 + 2 * static_cast<std::size_t>(i), 1);
    put<std::int16_t>(70, datatype);
    put<std::int16_t>(72, bitpix);
    for (int i = 0; i < 4; ++i) put<float>(76 + 4 * static_cast<std::size_t>(i), 1.0f);
    put<float>(108, 352.0f);
    std::memcpy(bytes_.data() + 344, "n+1\0", 4);
  }

  template <typename T>
  void put(std::size_t off, T v) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    if (big_) std::reverse(raw, raw + sizeof(T));
    if (bytes_.size() < off + sizeof(T)) bytes_.resize(off + sizeof(T), 0);
    std::memcpy(bytes_.data() + off, raw, sizeof(T));
  }

  template <typename T>
  void append(T v) {
    put<T>(bytes_.size(), v);
  }

  void set_pixdim(float sx, float sy, float sz) {
    put<float>(80, sx);
    put<float>(84, sy);
    put<float>(88, sz);
  }
  void set_scaling(float slope, float inter) {
    put<float>(112, slope);
    put<float>(116, inter);
  }

  std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }
  void write(const std::filesystem::path& p) const { write_bytes(p, bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  bool big_;
};

}  // namespace brainclust::testing
