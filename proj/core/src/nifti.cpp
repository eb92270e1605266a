#include "brainclust/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace brainclust {

namespace {

static_assert(std::endian::native == std::endian::little, "NIfTI I/O assumes a little-endian host");

using Bytes = std::vector<unsigned char>;

// Header field offsets (NIfTI-1, 348-byte header).
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffDescrip = 148;
constexpr std::size_t kOffQformCode = 252;
constexpr std::size_t kOffSformCode = 254;
constexpr std::size_t kOffSrowX = 280;
constexpr std::size_t kOffMagic = 344;

Bytes slurp(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (f == nullptr) throw NiftiError(NiftiError::Kind::kIo, "cannot open " + path.string());
  Bytes out;
  std::array<unsigned char, 1 << 16> chunk{};
  for (;;) {
    const int n = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int errnum = 0;
      const std::string msg = gzerror(f, &errnum);
      gzclose(f);
      // A gzip stream that ends early surfaces as Z_BUF_ERROR.
      if (errnum == Z_BUF_ERROR) throw NiftiError(NiftiError::Kind::kTruncated, path.string() + ": truncated gzip stream");
      throw NiftiError(NiftiError::Kind::kIo, path.string() + ": " + msg);
    }
    if (n == 0) break;
    out.insert(out.end(), chunk.begin(), chunk.begin() + n);
  }
  gzclose(f);
  return out;
}

class HeaderReader {
 public:
  HeaderReader(const Bytes& b, bool swap) : b_(b), swap_(swap) {}

  template <typename T>
  T get(std::size_t off) const {
    std::array<unsigned char, sizeof(T)> raw{};
    std::memcpy(raw.data(), b_.data() + off, sizeof(T));
    if (swap_) std::reverse(raw.begin(), raw.end());
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
  }

 private:
  const Bytes& b_;
  bool swap_;
};

int datatype_size(int datatype) {
  switch (datatype) {
    case nifti::kUint8: return 1;
    case nifti::kInt16:
    case nifti::kUint16: return 2;
    case nifti::kInt32:
    case nifti::kFloat32: return 4;
    case nifti::kFloat64: return 8;
    default: return 0;
  }
}

template <typename T>
double load_scalar(const unsigned char* p, bool swap) {
  std::array<unsigned char, sizeof(T)> raw{};
  std::memcpy(raw.data(), p, sizeof(T));
  if (swap) std::reverse(raw.begin(), raw.end());
  T v;
  std::memcpy(&v, raw.data(), sizeof(T));
  return static_cast<double>(v);
}

double load_voxel(int datatype, const unsigned char* p, bool swap) {
  switch (datatype) {
    case nifti::kUint8: return load_scalar<std::uint8_t>(p, swap);
    case nifti::kInt16: return load_scalar<std::int16_t>(p, swap);
    case nifti::kUint16: return load_scalar<std::uint16_t>(p, swap);
    case nifti::kInt32: return load_scalar<std::int32_t>(p, swap);
    case nifti::kFloat32: return load_scalar<float>(p, swap);
    case nifti::kFloat64: return load_scalar<double>(p, swap);
    default: return 0.0;
  }
}

template <typename T>
void put(Bytes& b, std::size_t off, T v) {
  std::memcpy(b.data() + off, &v, sizeof(T));
}

bool ends_with_gz(const std::filesystem::path& path) {
  const std::string s = path.string();
  return s.size() >= 3 && s.compare(s.size() - 3, 3, ".gz") == 0;
}

}  // namespace

Volume read_nifti(const std::filesystem::path& path) {
  const Bytes bytes = slurp(path);
  const std::string where = path.string();
  if (bytes.size() < static_cast<std::size_t>(nifti::kHeaderSize)) {
    throw NiftiError(NiftiError::Kind::kTruncated, where + ": header shorter than 348 bytes");
  }

  // Files written on big-endian machines are byte-swapped relative to us.
  bool swap = false;
  if (HeaderReader(bytes, false).get<std::int32_t>(kOffSizeofHdr) != nifti::kHeaderSize) {
    if (HeaderReader(bytes, true).get<std::int32_t>(kOffSizeofHdr) != nifti::kHeaderSize) {
      throw NiftiError(NiftiError::Kind::kBadMagic, where + ": sizeof_hdr is not 348");
    }
    swap = true;
  }
  if (std::memcmp(bytes.data() + kOffMagic, "n+1\0", 4) != 0) {
    throw NiftiError(NiftiError::Kind::kBadMagic, where + ": magic is not \"n+1\" (only single-file NIfTI-1 is supported)");
  }

  const HeaderReader h(bytes, swap);
  const auto ndim = h.get<std::int16_t>(kOffDim);
  if (ndim < 1 || ndim > 7) throw NiftiError(NiftiError::Kind::kBadDims, where + ": dim[0] out of range");
  std::array<std::size_t, 3> extent{1, 1, 1};
  for (int axis = 1; axis <= ndim; ++axis) {
    const auto n = h.get<std::int16_t>(kOffDim + 2 * static_cast<std::size_t>(axis));
    if (n <= 0) throw NiftiError(NiftiError::Kind::kBadDims, where + ": dim[" + std::to_string(axis) + "] <= 0");
    if (axis <= 3) {
      extent[static_cast<std::size_t>(axis - 1)] = static_cast<std::size_t>(n);
    } else if (n != 1) {
      throw NiftiError(NiftiError::Kind::kBadDims, where + ": only 3D volumes are supported");
    }
  }
  const Dims dims{extent[0], extent[1], extent[2]};

  const int datatype = h.get<std::int16_t>(kOffDatatype);
  const int voxel_bytes = datatype_size(datatype);
  if (voxel_bytes == 0) {
    throw NiftiError(NiftiError::Kind::kUnsupportedDatatype, where + ": unsupported datatype " + std::to_string(datatype));
  }

  std::array<double, 3> spacing{};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const double s = std::fabs(static_cast<double>(h.get<float>(kOffPixdim + 4 * (axis + 1))));
    // Some writers leave pixdim at 0; the format treats that as unit spacing.
    spacing[axis] = (s > 0.0 && std::isfinite(s)) ? s : 1.0;
  }

  const float vox_offset_f = h.get<float>(kOffVoxOffset);
  if (!std::isfinite(vox_offset_f) || vox_offset_f < 0.0f) {
    throw NiftiError(NiftiError::Kind::kBadMagic, where + ": invalid vox_offset");
  }
  const auto vox_offset = std::max<std::size_t>(static_cast<std::size_t>(vox_offset_f), nifti::kHeaderSize);
  const double slope = h.get<float>(kOffSclSlope);
  const double inter = h.get<float>(kOffSclInter);
  const bool scaled = slope != 0.0 && std::isfinite(slope) && std::isfinite(inter);

  const std::size_t count = dims.count();
  const std::size_t payload = count * static_cast<std::size_t>(voxel_bytes);
  if (bytes.size() < vox_offset || bytes.size() - vox_offset < payload) {
    throw NiftiError(NiftiError::Kind::kTruncated, where + ": payload shorter than dims * bitpix");
  }

  std::vector<float> data(count);
  const unsigned char* base = bytes.data() + vox_offset;
  for (std::size_t i = 0; i < count; ++i) {
    double v = load_voxel(datatype, base + i * static_cast<std::size_t>(voxel_bytes), swap);
    if (scaled) v = v * slope + inter;
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) {
      throw NiftiError(NiftiError::Kind::kNonFinite, where + ": non-finite voxel at index " + std::to_string(i));
    }
    data[i] = f;
  }
  return Volume(dims, Spacing{spacing[0], spacing[1], spacing[2]}, std::move(data));
}

void write_nifti(const Volume& v, const std::filesystem::path& path) {
  const Dims& d = v.dims();
  constexpr auto kMaxExtent = static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max());
  if (d.nx > kMaxExtent || d.ny > kMaxExtent || d.nz > kMaxExtent) {
    throw NiftiError(NiftiError::Kind::kBadDims, "NIfTI-1 extents are limited to 32767");
  }

  Bytes out(nifti::kDefaultVoxOffset + 4 * v.size(), 0);
  put<std::int32_t>(out, kOffSizeofHdr, nifti::kHeaderSize);
  put<std::int16_t>(out, kOffDim, 3);
  put<std::int16_t>(out, kOffDim + 2, static_cast<std::int16_t>(d.nx));
  put<std::int16_t>(out, kOffDim + 4, static_cast<std::int16_t>(d.ny));
  put<std::int16_t>(out, kOffDim + 6, static_cast<std::int16_t>(d.nz));
  for (std::size_t k = 4; k < 8; ++k) put<std::int16_t>(out, kOffDim + 2 * k, 1);
  put<std::int16_t>(out, kOffDatatype, nifti::kFloat32);
  put<std::int16_t>(out, kOffBitpix, 32);
  const Spacing& s = v.spacing();
  put<float>(out, kOffPixdim, 1.0f);  // qfac
  put<float>(out, kOffPixdim + 4, static_cast<float>(s.sx));
  put<float>(out, kOffPixdim + 8, static_cast<float>(s.sy));
  put<float>(out, kOffPixdim + 12, static_cast<float>(s.sz));
  for (std::size_t k = 4; k < 8; ++k) put<float>(out, kOffPixdim + 4 * k, 1.0f);
  put<float>(out, kOffVoxOffset, static_cast<float>(nifti::kDefaultVoxOffset));
  put<float>(out, kOffSclSlope, 0.0f);
  put<float>(out, kOffSclInter, 0.0f);
  out[kOffXyztUnits] = 2;  // NIFTI_UNITS_MM
  const char descrip[] = "brainclust";
  std::memcpy(out.data() + kOffDescrip, descrip, sizeof(descrip) - 1);
  // Scaled-identity sform so viewers place voxels at their physical size.
  put<std::int16_t>(out, kOffQformCode, 0);
  put<std::int16_t>(out, kOffSformCode, 2);
  put<float>(out, kOffSrowX, static_cast<float>(s.sx));
  put<float>(out, kOffSrowX + 16 + 4, static_cast<float>(s.sy));
  put<float>(out, kOffSrowX + 32 + 8, static_cast<float>(s.sz));
  std::memcpy(out.data() + kOffMagic, "n+1\0", 4);

  const auto data = v.data();
  for (std::size_t i = 0; i < data.size(); ++i) put<float>(out, nifti::kDefaultVoxOffset + 4 * i, data[i]);

  const std::string where = path.string();
  if (ends_with_gz(path)) {
    gzFile f = gzopen(where.c_str(), "wb6");
    if (f == nullptr) throw NiftiError(NiftiError::Kind::kIo, "cannot open " + where + " for writing");
    std::size_t written = 0;
    while (written < out.size()) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(out.size() - written, 1u << 24));
      if (gzwrite(f, out.data() + written, chunk) != static_cast<int>(chunk)) {
        gzclose(f);
        throw NiftiError(NiftiError::Kind::kIo, "write failed: " + where);
      }
      written += chunk;
    }
    if (gzclose(f) != Z_OK) throw NiftiError(NiftiError::Kind::kIo, "write failed: " + where);
  } else {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw NiftiError(NiftiError::Kind::kIo, "cannot open " + where + " for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw NiftiError(NiftiError::Kind::kIo, "write failed: " + where);
  }
}

}  // namespace brainclust
