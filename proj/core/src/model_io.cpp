#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "brainclust/mapping_model.hpp"

namespace brainclust {

namespace {

constexpr char kMagic[4] = {'B', 'M', 'A', 'P'};

std::uint64_t fnv1a(const std::uint8_t* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 0; s < 64; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}

  void need(std::size_t k) const {
    if (n_ - pos_ < k) throw ModelFormatError(ModelFormatError::Kind::kCorrupt, "model file is truncated");
  }
  std::uint8_t u8() {
    need(1);
    return p_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int s = 0; s < 32; s += 8) v |= static_cast<std::uint32_t>(p_[pos_++]) << s;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int s = 0; s < 64; s += 8) v |= static_cast<std::uint64_t>(p_[pos_++]) << s;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  [[nodiscard]] std::size_t remaining() const { return n_ - pos_; }

 private:
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

void write_table(Writer& w, const MappingTable& t) {
  w.u64(t.size());
  for (const auto& r : t.rows()) {
    w.f64(r.key);
    w.f64(r.value);
    w.u64(r.count);
  }
}

MappingTable read_table(Reader& r) {
  const std::uint64_t n = r.u64();
  if (n > r.remaining() / 24) throw ModelFormatError(ModelFormatError::Kind::kCorrupt, "model file is truncated");
  std::vector<MappingRow> rows(static_cast<std::size_t>(n));
  for (auto& row : rows) {
    row.key = r.f64();
    row.value = r.f64();
    row.count = r.u64();
  }
  try {
    return MappingTable::from_rows(std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(ModelFormatError::Kind::kInvariant, std::string("model table invalid: ") + e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Model& model) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.k_macro()));
  w.u32(static_cast<std::uint32_t>(model.k_micro()));
  w.u32(model.meta().max_rows);
  w.u8(static_cast<std::uint8_t>(model.meta().normalization));
  w.u8(0);
  w.u8(0);
  w.u8(0);
  w.u64(model.meta().training_fingerprint);
  w.u32(model.meta().patient_count);
  for (const auto& t : model.tables()) write_table(w, t);
  write_table(w, model.fallback());
  const auto checksum = fnv1a(w.buffer().data(), w.buffer().size());
  w.u64(checksum);
  return std::move(w.buffer());
}

Model deserialize_model(const std::vector<std::uint8_t>& bytes) {
  using Kind = ModelFormatError::Kind;
  Reader r(bytes.data(), bytes.size());
  r.need(8);
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw ModelFormatError(Kind::kCorrupt, "not a model file (bad magic)");
  for (int i = 0; i < 4; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw ModelFormatError(Kind::kVersion, "unsupported model format version " + std::to_string(version) +
                                               " (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  if (bytes.size() < 16) throw ModelFormatError(Kind::kCorrupt, "model file is truncated");
  const std::size_t body = bytes.size() - 8;
  Reader tail(bytes.data() + body, 8);
  if (tail.u64() != fnv1a(bytes.data(), body)) {
    throw ModelFormatError(Kind::kCorrupt, "model file is truncated or corrupt (checksum mismatch)");
  }

  Reader rb(bytes.data(), body);
  for (int i = 0; i < 8; ++i) rb.u8();
  const std::uint32_t k_macro = rb.u32();
  const std::uint32_t k_micro = rb.u32();
  const std::uint32_t max_rows = rb.u32();
  const std::uint8_t norm = rb.u8();
  for (int i = 0; i < 3; ++i) rb.u8();
  if (k_macro == 0 || k_macro > 1024) throw ModelFormatError(Kind::kInvariant, "invalid k_macro in model file");
  if (norm > static_cast<std::uint8_t>(NormalizationMode::kMinMaxBrain)) {
    throw ModelFormatError(Kind::kInvariant, "unknown normalization mode in model file");
  }

  Model m(k_macro, k_micro);
  m.meta().max_rows = max_rows;
  m.meta().normalization = static_cast<NormalizationMode>(norm);
  m.meta().training_fingerprint = rb.u64();
  m.meta().patient_count = rb.u32();
  for (std::uint32_t t = 0; t < k_macro; ++t) m.table(t) = read_table(rb);
  m.fallback() = read_table(rb);
  if (rb.remaining() != 0) throw ModelFormatError(Kind::kCorrupt, "trailing bytes in model file");
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(Kind::kInvariant, std::string("model invalid: ") + e.what());
  }
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ModelFormatError(ModelFormatError::Kind::kIo, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ModelFormatError(ModelFormatError::Kind::kIo, "write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ModelFormatError(ModelFormatError::Kind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace brainclust
