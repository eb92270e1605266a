#pragma once

#include <cstdint>

#include "brainclust/volume.hpp"

namespace brainclust {

/// Min-max rescales the voxels inside `m` to [0, 1]; voxels outside `m`
/// become 0. A constant in-mask image maps to all zeros.
Volume normalize(const Volume& v, const Mask& m);

/// Intensity complement p -> min(v) + max(v) - p, with min/max taken over
/// every voxel (background included). Voxels that were 0 stay 0.
Volume complement(const Volume& v);

/// Replaces every nonzero voxel with an i.i.d. uniform sample in [0, 1)
/// drawn from Xorshift64Star(seed) in linear voxel order.
Volume random_fill(const Volume& v, std::uint64_t seed);

/// Slice-wise (constant z) 3x3 median with edge replication. Only voxels
/// inside `m` are rewritten; the 9-sample neighbourhood reads the input
/// volume regardless of the mask.
Volume median_filter_3x3(const Volume& v, const Mask& m);

/// Linear map of [0, 1] onto [lo, hi] for voxels inside `m`; voxels
/// outside `m` become 0.
Volume rescale(const Volume& v, const Mask& m, double lo, double hi);

}  // namespace brainclust
