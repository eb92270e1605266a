#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brainclust/metrics.hpp"
#include "brainclust/pipeline.hpp"

namespace brainclust {

/// Syntax error in a manifest; `line()` is 1-based.
class ManifestError : public std::runtime_error {
 public:
  ManifestError(const std::filesystem::path& file, std::size_t line, const std::string& what);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// One dataset record: `id<TAB>t1<TAB>t2<TAB>seg`. t2 and seg may be
/// omitted, empty, or "-".
struct DatasetRecord {
  std::string id;
  std::filesystem::path t1;
  std::optional<std::filesystem::path> t2;
  std::optional<std::filesystem::path> seg;
};

/// One evaluation record:
/// `id<TAB>real_t2<TAB>synthesized_t2<TAB>reference_seg<TAB>predicted_seg`,
/// each path optional as above.
struct EvaluationRecord {
  std::string id;
  std::optional<std::filesystem::path> real_t2;
  std::optional<std::filesystem::path> synthesized_t2;
  std::optional<std::filesystem::path> reference_seg;
  std::optional<std::filesystem::path> predicted_seg;
};

/// Blank lines and lines starting with '#' are skipped. Relative paths are
/// resolved against the manifest's directory. Ids must be unique.
std::vector<DatasetRecord> read_dataset_manifest(const std::filesystem::path& file);
std::vector<EvaluationRecord> read_evaluation_manifest(const std::filesystem::path& file);

/// Writes records with paths as given (no relativization).
void write_dataset_manifest(const std::vector<DatasetRecord>& records, const std::filesystem::path& file);
void write_evaluation_manifest(const std::vector<EvaluationRecord>& records, const std::filesystem::path& file);

/// Reads the NIfTI files of one record. Errors name the offending path.
PatientPair load_patient(const DatasetRecord& r);

/// Loads every volume of an evaluation record. A read failure is stored in
/// `load_error` instead of thrown, so one broken patient does not stop the
/// others.
EvaluationCase load_evaluation_case(const EvaluationRecord& r);

}  // namespace brainclust
