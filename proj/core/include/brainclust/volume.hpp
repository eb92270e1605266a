#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace brainclust {

/// Grid extents. Voxel (x, y, z) lives at linear index x + nx * (y + ny * z),
/// so x varies fastest. Every operation in the library assumes this order.
struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  [[nodiscard]] constexpr std::size_t count() const noexcept { return nx * ny * nz; }
  [[nodiscard]] constexpr std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + nx * (y + ny * z);
  }
  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

/// Millimetres per voxel along x, y, z.
struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  friend constexpr bool operator==(const Spacing&, const Spacing&) = default;
};

std::string to_string(const Dims& d);

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(const Dims& a, const Dims& b);
};

/// Dense scalar volume. Values are stored as float32; arithmetic that
/// accumulates across voxels is done in double.
class Volume {
 public:
  Volume() = default;
  Volume(Dims dims, Spacing spacing);
  Volume(Dims dims, Spacing spacing, std::vector<float> data);

  [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
  [[nodiscard]] const Spacing& spacing() const noexcept { return spacing_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::span<const float> data() const noexcept { return data_; }
  [[nodiscard]] std::span<float> data() noexcept { return data_; }

  [[nodiscard]] float operator[](std::size_t i) const noexcept { return data_[i]; }
  float& operator[](std::size_t i) noexcept { return data_[i]; }
  [[nodiscard]] float at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return data_[dims_.index(x, y, z)];
  }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Dims dims_{};
  Spacing spacing_{};
  std::vector<float> data_;
};

/// One boolean per voxel.
class Mask {
 public:
  Mask() = default;
  explicit Mask(Dims dims, bool value = false);
  Mask(Dims dims, std::vector<std::uint8_t> bits);

  [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t size() const noexcept { return bits_.size(); }
  [[nodiscard]] bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool v) noexcept { bits_[i] = v ? 1 : 0; }
  [[nodiscard]] std::size_t count() const noexcept;
  [[nodiscard]] bool none() const noexcept { return count() == 0; }
  [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  Dims dims_{};
  std::vector<std::uint8_t> bits_;
};

Mask operator&(const Mask& a, const Mask& b);
Mask operator|(const Mask& a, const Mask& b);

/// Per-voxel integer labels (cluster indices, tissue ids). Voxels outside
/// the region that was labelled carry `kBackground`.
class LabelMap {
 public:
  static constexpr std::int32_t kBackground = -1;

  LabelMap() = default;
  explicit LabelMap(Dims dims, std::int32_t fill = kBackground);

  [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] std::int32_t operator[](std::size_t i) const noexcept { return labels_[i]; }
  std::int32_t& operator[](std::size_t i) noexcept { return labels_[i]; }
  [[nodiscard]] std::span<const std::int32_t> labels() const noexcept { return labels_; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  Dims dims_{};
  std::vector<std::int32_t> labels_;
};

/// Bit set iff the voxel value is nonzero. Negative values count as foreground.
Mask brain_mask(const Volume& v);

/// Bit set iff both voxels are nonzero. Throws DimensionMismatch.
Mask joint_mask(const Volume& a, const Volume& b);

void require_same_dims(const Dims& a, const Dims& b);

}  // namespace brainclust
