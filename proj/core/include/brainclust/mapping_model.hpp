#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace brainclust {

/// One row of an intensity transfer table.
struct MappingRow {
  double key = 0.0;    // T1W intensity
  double value = 0.0;  // mean T2W intensity observed for this key
  std::uint64_t count = 0;

  friend bool operator==(const MappingRow&, const MappingRow&) = default;
};

/// Monotone-key table mapping a T1W intensity to a T2W intensity for one
/// tissue. Two keys are the same row iff they fall into the same
/// quantization cell (see kmeans1d.hpp).
class MappingTable {
 public:
  MappingTable() = default;

  /// Builds a table from rows that already satisfy the invariants
  /// (strictly increasing keys in distinct cells, counts >= 1, finite).
  /// Throws std::invalid_argument otherwise.
  static MappingTable from_rows(std::vector<MappingRow> rows);

  /// New row (a1, a2, 1) or a moving-average update of the existing row:
  /// value += (a2 - value) / count after incrementing count.
  void insert(double a1, double a2);

  /// Piecewise-linear interpolation between the two rows bracketing p,
  /// clamped to the end rows outside the key range. Throws on empty table.
  [[nodiscard]] double lookup(double p) const;

  [[nodiscard]] const std::vector<MappingRow>& rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
  [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }
  [[nodiscard]] std::uint64_t total_count() const noexcept;

  friend bool operator==(const MappingTable&, const MappingTable&) = default;

 private:
  std::vector<MappingRow> rows_;
};

inline constexpr std::size_t kDefaultMaxRows = 1024;

/// Merges rows into at most `max_rows` uniform-width key bins over
/// [min key, max key]. Each bin becomes one row with the count-weighted
/// mean key and value and the summed count. Identity if the table already
/// fits. Throws if max_rows < 2.
MappingTable compress(const MappingTable& t, std::size_t max_rows);

enum class NormalizationMode : std::uint8_t {
  kNone = 0,
  kMinMaxBrain = 1,  // per-scan min-max over the nonzero voxels
};

struct ModelMeta {
  NormalizationMode normalization = NormalizationMode::kMinMaxBrain;
  std::uint32_t max_rows = static_cast<std::uint32_t>(kDefaultMaxRows);
  std::uint64_t training_fingerprint = 0;  // FNV-1a of the sorted patient ids
  std::uint32_t patient_count = 0;

  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

/// One transfer table per macro cluster plus a merged fallback.
class Model {
 public:
  Model() = default;
  Model(std::size_t k_macro, std::size_t k_micro);

  [[nodiscard]] std::size_t k_macro() const noexcept { return tables_.size(); }
  [[nodiscard]] std::size_t k_micro() const noexcept { return k_micro_; }

  [[nodiscard]] const MappingTable& table(std::size_t tissue) const { return tables_.at(tissue); }
  MappingTable& table(std::size_t tissue) { return tables_.at(tissue); }
  [[nodiscard]] const std::vector<MappingTable>& tables() const noexcept { return tables_; }
  [[nodiscard]] const MappingTable& fallback() const noexcept { return fallback_; }
  MappingTable& fallback() noexcept { return fallback_; }

  [[nodiscard]] const ModelMeta& meta() const noexcept { return meta_; }
  ModelMeta& meta() noexcept { return meta_; }

  /// Inserts the pair into the tissue table and into the fallback.
  void insert(std::size_t tissue, double a1, double a2);

  /// Compresses every table (fallback included) to meta().max_rows.
  void compress_tables();

  [[nodiscard]] bool all_empty() const noexcept;

  /// Throws std::invalid_argument if the model invariants are violated.
  void validate() const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  std::size_t k_micro_ = 0;
  std::vector<MappingTable> tables_;
  MappingTable fallback_;
  ModelMeta meta_;
};

/// Lookup in the tissue table, or in the fallback if that table is empty.
/// Throws std::out_of_range for tissue >= k_macro and std::runtime_error if
/// every table is empty.
double lookup_model(const Model& model, std::size_t tissue, double p);

class ModelFormatError : public std::runtime_error {
 public:
  enum class Kind { kIo, kCorrupt, kVersion, kInvariant };
  ModelFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Serializes to the little-endian "BMAP" format documented in README.md.
std::vector<std::uint8_t> serialize_model(const Model& model);
Model deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace brainclust
