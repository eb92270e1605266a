#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "brainclust/pipeline.hpp"
#include "brainclust/volume.hpp"

namespace brainclust {

/// t2 = slope * t1 + offset inside one tissue.
struct AffineTransfer {
  double slope = 1.0;
  double offset = 0.0;
};

/// Synthetic T1/T2 pair with known tissue labels.
struct Phantom {
  PatientPair pair;   // t2 and seg are always present
  LabelMap tissues;   // generator tissue index per brain voxel
};

/// Intensity band [lo, hi] of tissue t in the T1 phantom:
/// [(t + 0.2) / T, (t + 0.8) / T]. Bands of different tissues are disjoint.
struct Band {
  double lo = 0.0;
  double hi = 0.0;
};
Band phantom_band(std::size_t tissue, std::size_t tissue_count);

/// A transfer that maps each T1 band exactly onto another band (a
/// permutation chosen by `family_seed`), with slope +1 or -1 per tissue.
std::vector<AffineTransfer> phantom_transfer_family(std::size_t tissue_count, std::uint64_t family_seed);

/// Identity transfer for every tissue.
std::vector<AffineTransfer> identity_transfer(std::size_t tissue_count);

enum class PhantomShape {
  // Brain covers whole axial slices; only the top and bottom nz/8 slices
  // (at least one) are background. The slice-wise median filter then never
  // reads background inside the brain, so synthesis error measures the
  // transfer alone.
  kSlab,
  // Ellipsoid with semi-axes 0.45 * n per axis, centred in the grid.
  kEllipsoid,
};

/// Brain (see PhantomShape) split into `tissue_count` equal-volume regions by
/// quantile thresholds of a smooth random field. Inside each region T1 is a
/// second smooth field stretched exactly onto the tissue band, so every
/// phantom of a family has the same per-tissue intensity range. T2 is the
/// tissue's affine transfer of T1 plus Gaussian noise, clamped to
/// [1e-3, 1]. seg holds a nested tumor (1 inner, 4 ring, 2 shell).
///
/// Throws std::invalid_argument for tissue_count outside [2, 6], dims
/// smaller than 8 on any axis, negative noise, or a transfer that is not
/// finite, has zero slope, or maps a band outside (0, 1].
Phantom make_phantom(std::uint64_t seed, Dims dims, std::size_t tissue_count,
                     const std::vector<AffineTransfer>& transfer, double noise_sd,
                     PhantomShape shape = PhantomShape::kSlab);

/// make_phantom(...).pair
PatientPair make_phantom_pair(std::uint64_t seed, Dims dims, std::size_t tissue_count,
                              const std::vector<AffineTransfer>& transfer, double noise_sd,
                              PhantomShape shape = PhantomShape::kSlab);

}  // namespace brainclust
