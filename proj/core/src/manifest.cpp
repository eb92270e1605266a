#include "brainclust/manifest.hpp"

#include <fstream>
#include <set>

#include "brainclust/nifti.hpp"

namespace fs = std::filesystem;

namespace brainclust {

ManifestError::ManifestError(const fs::path& file, std::size_t line, const std::string& what)
    : std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> fields;
};

std::vector<Line> read_records(const fs::path& file, std::size_t min_fields, std::size_t max_fields) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open manifest " + file.string());
  std::vector<Line> out;
  std::set<std::string> ids;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos || text.front() == '#') continue;
    Line l{number, {}};
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = text.find('\t', start);
      l.fields.push_back(text.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    while (l.fields.size() > min_fields && l.fields.back().empty()) l.fields.pop_back();
    if (l.fields.size() < min_fields || l.fields.size() > max_fields) {
      throw ManifestError(file, number, "expected " + std::to_string(min_fields) + " to " + std::to_string(max_fields) +
                                            " tab-separated fields, got " + std::to_string(l.fields.size()));
    }
    if (l.fields[0].empty()) throw ManifestError(file, number, "empty patient id");
    if (!ids.insert(l.fields[0]).second) throw ManifestError(file, number, "duplicate patient id " + l.fields[0]);
    l.fields.resize(max_fields);
    out.push_back(std::move(l));
  }
  return out;
}

std::optional<fs::path> optional_path(const fs::path& base, const std::string& field) {
  if (field.empty() || field == "-") return std::nullopt;
  const fs::path p(field);
  return p.is_absolute() ? p : base / p;
}

std::string field_of(const std::optional<fs::path>& p) {
  if (!p) return "-";
  return p->string();
}

void check_field(const std::string& s) {
  if (s.find_first_of("\t\r\n") != std::string::npos) {
    throw std::invalid_argument("manifest field contains a tab or newline: " + s);
  }
}

void write_lines(const fs::path& file, const std::string& header, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest " + file.string());
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      check_field(row[i]);
      out << (i ? "\t" : "") << row[i];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing manifest " + file.string());
}

}  // namespace

std::vector<DatasetRecord> read_dataset_manifest(const fs::path& file) {
  const fs::path base = file.parent_path();
  std::vector<DatasetRecord> out;
  for (auto& l : read_records(file, 2, 4)) {
    DatasetRecord r;
    r.id = l.fields[0];
    auto t1 = optional_path(base, l.fields[1]);
    if (!t1) throw ManifestError(file, l.number, "missing T1 path");
    r.t1 = *t1;
    r.t2 = optional_path(base, l.fields[2]);
    r.seg = optional_path(base, l.fields[3]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EvaluationRecord> read_evaluation_manifest(const fs::path& file) {
  const fs::path base = file.parent_path();
  std::vector<EvaluationRecord> out;
  for (auto& l : read_records(file, 2, 5)) {
    EvaluationRecord r;
    r.id = l.fields[0];
    r.real_t2 = optional_path(base, l.fields[1]);
    r.synthesized_t2 = optional_path(base, l.fields[2]);
    r.reference_seg = optional_path(base, l.fields[3]);
    r.predicted_seg = optional_path(base, l.fields[4]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_dataset_manifest(const std::vector<DatasetRecord>& records, const fs::path& file) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : records) rows.push_back({r.id, r.t1.string(), field_of(r.t2), field_of(r.seg)});
  write_lines(file, "# id\tt1\tt2\tseg", rows);
}

void write_evaluation_manifest(const std::vector<EvaluationRecord>& records, const fs::path& file) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : records) {
    rows.push_back({r.id, field_of(r.real_t2), field_of(r.synthesized_t2), field_of(r.reference_seg),
                    field_of(r.predicted_seg)});
  }
  write_lines(file, "# id\treal_t2\tsynthesized_t2\treference_seg\tpredicted_seg", rows);
}

PatientPair load_patient(const DatasetRecord& r) {
  PatientPair p;
  p.id = r.id;
  p.t1 = read_nifti(r.t1);
  if (r.t2) p.t2 = read_nifti(*r.t2);
  if (r.seg) p.seg = read_nifti(*r.seg);
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw PatientError(r.id, e.what());
  }
  return p;
}

EvaluationCase load_evaluation_case(const EvaluationRecord& r) {
  EvaluationCase c;
  c.id = r.id;
  try {
    if (r.real_t2) c.real_t2 = read_nifti(*r.real_t2);
    if (r.synthesized_t2) c.synthesized_t2 = read_nifti(*r.synthesized_t2);
    if (r.reference_seg) c.reference_seg = read_nifti(*r.reference_seg);
    if (r.predicted_seg) c.predicted_seg = read_nifti(*r.predicted_seg);
  } catch (const std::exception& e) {
    c.load_error = e.what();
  }
  return c;
}

}  // namespace brainclust
