#include "brainclust/volume.hpp"

#include <algorithm>
#include <cmath>

namespace brainclust {

std::string to_string(const Dims& d) {
  return "(" + std::to_string(d.nx) + "," + std::to_string(d.ny) + "," + std::to_string(d.nz) + ")";
}

DimensionMismatch::DimensionMismatch(const Dims& a, const Dims& b)
    : std::invalid_argument("dimension mismatch: " + to_string(a) + " vs " + to_string(b)) {}

void require_same_dims(const Dims& a, const Dims& b) {
  if (a != b) throw DimensionMismatch(a, b);
}

namespace {

void check_geometry(const Dims& dims, const Spacing& spacing) {
  if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) {
    throw std::invalid_argument("volume dims must be positive, got " + to_string(dims));
  }
  for (double s : {spacing.sx, spacing.sy, spacing.sz}) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("voxel spacing must be finite and positive");
    }
  }
}

}  // namespace

Volume::Volume(Dims dims, Spacing spacing) : dims_(dims), spacing_(spacing), data_(dims.count(), 0.0f) {
  check_geometry(dims_, spacing_);
}

Volume::Volume(Dims dims, Spacing spacing, std::vector<float> data)
    : dims_(dims), spacing_(spacing), data_(std::move(data)) {
  check_geometry(dims_, spacing_);
  if (data_.size() != dims_.count()) {
    throw std::invalid_argument("volume data length " + std::to_string(data_.size()) + " does not match dims " +
                                to_string(dims_));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](float f) { return std::isfinite(f); })) {
    throw std::invalid_argument("volume contains non-finite values");
  }
}

Mask::Mask(Dims dims, bool value) : dims_(dims), bits_(dims.count(), value ? 1 : 0) {}

Mask::Mask(Dims dims, std::vector<std::uint8_t> bits) : dims_(dims), bits_(std::move(bits)) {
  if (bits_.size() != dims_.count()) throw std::invalid_argument("mask length does not match dims");
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask operator&(const Mask& a, const Mask& b) {
  require_same_dims(a.dims(), b.dims());
  Mask out(a.dims());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] && b[i]);
  return out;
}

Mask operator|(const Mask& a, const Mask& b) {
  require_same_dims(a.dims(), b.dims());
  Mask out(a.dims());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] || b[i]);
  return out;
}

LabelMap::LabelMap(Dims dims, std::int32_t fill) : dims_(dims), labels_(dims.count(), fill) {}

Mask brain_mask(const Volume& v) {
  Mask m(v.dims());
  const auto data = v.data();
  for (std::size_t i = 0; i < data.size(); ++i) m.set(i, data[i] != 0.0f);
  return m;
}

Mask joint_mask(const Volume& a, const Volume& b) {
  require_same_dims(a.dims(), b.dims());
  Mask m(a.dims());
  for (std::size_t i = 0; i < a.size(); ++i) m.set(i, a[i] != 0.0f && b[i] != 0.0f);
  return m;
}

}  // namespace brainclust
