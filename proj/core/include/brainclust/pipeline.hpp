#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brainclust/mapping_model.hpp"
#include "brainclust/volume.hpp"

namespace brainclust {

/// Co-registered scans of one patient. t2 is absent for query patients;
/// seg is an optional tumor label map.
struct PatientPair {
  std::string id;
  Volume t1;
  std::optional<Volume> t2;
  std::optional<Volume> seg;

  /// Throws DimensionMismatch if present volumes disagree on dims.
  void validate() const;
};

struct TrainConfig {
  std::size_t k_macro = 3;
  std::size_t k_micro = 100;
  std::size_t max_rows = kDefaultMaxRows;
  std::size_t threads = 1;
};

struct SearchConfig {
  std::size_t w = 10;
  std::size_t k_macro = 5;
  std::size_t k_micro = 100;
  std::size_t max_rows = kDefaultMaxRows;
  std::size_t threads = 1;

  /// w >= 1, k_macro in [3, 6], k_micro >= 100.
  void validate() const;
};

/// A training failure tagged with the patient that caused it.
class PatientError : public std::runtime_error {
 public:
  PatientError(std::string id, const std::string& what)
      : std::runtime_error("patient " + id + ": " + what), id_(std::move(id)) {}
  [[nodiscard]] const std::string& patient_id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// (tissue, a1, a2) rows one patient contributes to the transfer tables, in
/// insertion order.
struct TableEntry {
  std::size_t tissue = 0;
  double a1 = 0.0;
  double a2 = 0.0;
};

/// Training steps for one pair without touching a model: macro clustering of
/// both scans over their joint mask, macro label matching (T2 onto T1),
/// per-tissue micro clustering and matching, and the matched micro-cluster
/// mean pairs. Inputs must be normalized. Throws on dims mismatch, missing
/// t2, or an empty joint mask.
std::vector<TableEntry> pair_entries(const PatientPair& p, std::size_t k_macro, std::size_t k_micro);

/// pair_entries followed by insertion into `model` (tissue table and
/// fallback). The model's k_macro must equal `k_macro`.
void train_pair(const PatientPair& p, std::size_t k_macro, std::size_t k_micro, Model& model);

/// Trains over the dataset in sorted-id order and compresses the tables.
/// Per-patient clustering may run on cfg.threads workers; insertion is
/// sequential, so the result does not depend on the thread count or the
/// input order. Errors are rethrown as PatientError.
Model train(const std::vector<PatientPair>& dataset, const TrainConfig& cfg);

/// FNV-1a over the sorted ids joined by '\n'.
std::uint64_t dataset_fingerprint(std::vector<std::string> ids);

/// Macro-clusters the (normalized) query, maps every in-mask voxel through
/// its tissue table, clamps to [0, 1] and applies the 3x3 median filter.
/// Throws std::invalid_argument on an empty brain mask or empty model.
Volume synthesize(const Volume& t1, const Model& model);

struct RankedCandidate {
  std::string id;
  double mse = 0.0;  // over the joint mask; +inf if the masks do not overlap
};

/// Candidates sorted by ascending T1 MSE to the query, ties by id.
std::vector<RankedCandidate> rank_by_mse(const Volume& query_t1, const std::vector<PatientPair>& candidates);

struct SearchResult {
  Volume synthesized;
  std::vector<RankedCandidate> neighbors;  // the w patients used, best first
  Model model;
};

/// Builds a model from the w closest training patients and synthesizes.
/// Throws std::invalid_argument if the dataset has fewer than w patients.
SearchResult search_synthesize(const Volume& query_t1, const std::vector<PatientPair>& dataset, const SearchConfig& cfg);

/// Brain mask of the raw scan followed by normalize().
Volume normalize_scan(const Volume& v);

}  // namespace brainclust
