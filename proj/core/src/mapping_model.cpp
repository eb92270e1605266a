#include "brainclust/mapping_model.hpp"

#include <algorithm>
#include <cmath>

#include "brainclust/kmeans1d.hpp"

namespace brainclust {

namespace {

void check_rows(const std::vector<MappingRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!std::isfinite(r.key) || !std::isfinite(r.value)) throw std::invalid_argument("mapping row is not finite");
    if (r.count == 0) throw std::invalid_argument("mapping row count must be >= 1");
    if (i > 0) {
      if (!(rows[i - 1].key < r.key)) throw std::invalid_argument("mapping keys must be strictly increasing");
      if (quantize(rows[i - 1].key) == quantize(r.key)) {
        throw std::invalid_argument("two mapping keys share a quantization cell");
      }
    }
  }
}

struct Accumulator {
  long double key = 0, value = 0;
  std::uint64_t count = 0;

  void add(const MappingRow& r) {
    key += static_cast<long double>(r.key) * static_cast<long double>(r.count);
    value += static_cast<long double>(r.value) * static_cast<long double>(r.count);
    count += r.count;
  }
  void add(const Accumulator& o) {
    key += o.key;
    value += o.value;
    count += o.count;
  }
  [[nodiscard]] MappingRow row() const {
    const auto c = static_cast<long double>(count);
    return {static_cast<double>(key / c), static_cast<double>(value / c), count};
  }
};

}  // namespace

MappingTable MappingTable::from_rows(std::vector<MappingRow> rows) {
  check_rows(rows);
  MappingTable t;
  t.rows_ = std::move(rows);
  return t;
}

void MappingTable::insert(double a1, double a2) {
  if (!std::isfinite(a1) || !std::isfinite(a2)) throw std::invalid_argument("insert: non-finite intensity");
  const std::uint32_t cell = quantize(a1);
  auto it = std::lower_bound(rows_.begin(), rows_.end(), cell,
                             [](const MappingRow& r, std::uint32_t c) { return quantize(r.key) < c; });
  if (it != rows_.end() && quantize(it->key) == cell) {
    ++it->count;
    it->value += (a2 - it->value) / static_cast<double>(it->count);
    return;
  }
  rows_.insert(it, MappingRow{a1, a2, 1});
}

double MappingTable::lookup(double p) const {
  if (rows_.empty()) throw std::runtime_error("lookup on an empty mapping table");
  if (p <= rows_.front().key) return rows_.front().value;
  if (p >= rows_.back().key) return rows_.back().value;
  const auto hi = std::upper_bound(rows_.begin(), rows_.end(), p, [](double x, const MappingRow& r) { return x < r.key; });
  const auto lo = hi - 1;
  if (lo->key == p) return lo->value;
  const double t = (p - lo->key) / (hi->key - lo->key);
  return lo->value + t * (hi->value - lo->value);
}

std::uint64_t MappingTable::total_count() const noexcept {
  std::uint64_t n = 0;
  for (const auto& r : rows_) n += r.count;
  return n;
}

MappingTable compress(const MappingTable& t, std::size_t max_rows) {
  if (max_rows < 2) throw std::invalid_argument("compress: max_rows must be >= 2");
  if (t.size() <= max_rows) return t;

  const auto& rows = t.rows();
  const double lo = rows.front().key;
  const double span = rows.back().key - lo;
  std::vector<Accumulator> bins;
  std::size_t current = static_cast<std::size_t>(-1);
  for (const auto& r : rows) {
    const double pos = (r.key - lo) / span * static_cast<double>(max_rows);
    const auto bin = std::min(static_cast<std::size_t>(std::max(pos, 0.0)), max_rows - 1);
    if (bin != current) {
      bins.emplace_back();
      current = bin;
    }
    bins.back().add(r);
  }

  // Merged keys of adjacent bins can land in one quantization cell when the
  // key range is narrower than max_rows cells; fold those together too.
  std::vector<Accumulator> merged;
  for (const auto& b : bins) {
    if (!merged.empty() && quantize(merged.back().row().key) == quantize(b.row().key)) {
      merged.back().add(b);
    } else {
      merged.push_back(b);
    }
  }

  std::vector<MappingRow> out;
  out.reserve(merged.size());
  for (const auto& m : merged) out.push_back(m.row());
  return MappingTable::from_rows(std::move(out));
}

Model::Model(std::size_t k_macro, std::size_t k_micro) : k_micro_(k_micro), tables_(k_macro) {
  if (k_macro == 0) throw std::invalid_argument("model needs at least one macro cluster");
}

void Model::insert(std::size_t tissue, double a1, double a2) {
  tables_.at(tissue).insert(a1, a2);
  fallback_.insert(a1, a2);
}

void Model::compress_tables() {
  for (auto& t : tables_) t = compress(t, meta_.max_rows);
  fallback_ = compress(fallback_, meta_.max_rows);
}

bool Model::all_empty() const noexcept {
  return fallback_.empty() && std::all_of(tables_.begin(), tables_.end(), [](const auto& t) { return t.empty(); });
}

void Model::validate() const {
  if (tables_.empty()) throw std::invalid_argument("model has no tissue tables");
  for (const auto& t : tables_) check_rows(t.rows());
  check_rows(fallback_.rows());
  const bool any = std::any_of(tables_.begin(), tables_.end(), [](const auto& t) { return !t.empty(); });
  if (any && fallback_.empty()) throw std::invalid_argument("fallback table is empty but tissue tables are not");
  if (meta_.max_rows < 2) throw std::invalid_argument("max_rows must be >= 2");
}

double lookup_model(const Model& model, std::size_t tissue, double p) {
  if (tissue >= model.k_macro()) {
    throw std::out_of_range("tissue " + std::to_string(tissue) + " >= k_macro " + std::to_string(model.k_macro()));
  }
  const MappingTable& t = model.table(tissue);
  if (!t.empty()) return t.lookup(p);
  if (model.fallback().empty()) throw std::runtime_error("model has no mapping rows");
  return model.fallback().lookup(p);
}

}  // namespace brainclust
