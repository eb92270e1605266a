#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "brainclust/volume.hpp"

namespace brainclust {

/// Failure while reading or writing a NIfTI-1 file. `kind()` distinguishes
/// the causes so callers (and tests) do not have to parse messages.
class NiftiError : public std::runtime_error {
 public:
  enum class Kind {
    kIo,                   // cannot open / read / write
    kBadMagic,             // sizeof_hdr or magic field wrong
    kUnsupportedDatatype,  // datatype code outside the supported set
    kBadDims,              // dim[] entries <= 0 or more than 3 non-trivial axes
    kTruncated,            // header or payload shorter than declared
    kNonFinite,            // payload contains NaN or Inf after scaling
  };

  NiftiError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace nifti {

inline constexpr int kHeaderSize = 348;
inline constexpr int kDefaultVoxOffset = 352;

// NIfTI-1 datatype codes accepted on read.
inline constexpr int kUint8 = 2;
inline constexpr int kInt16 = 4;
inline constexpr int kInt32 = 8;
inline constexpr int kFloat32 = 16;
inline constexpr int kFloat64 = 64;
inline constexpr int kUint16 = 512;

}  // namespace nifti

/// Reads a single-file NIfTI-1 volume (.nii or .nii.gz; compression is
/// detected from the content, not the name). Integer payloads are promoted
/// to float and scl_slope/scl_inter are applied when scl_slope is nonzero.
/// Orientation fields are ignored; data keep the on-disk x-fastest order.
Volume read_nifti(const std::filesystem::path& path);

/// Writes a float32 NIfTI-1 file. Gzip is used iff the path ends in ".gz".
void write_nifti(const Volume& v, const std::filesystem::path& path);

}  // namespace brainclust
