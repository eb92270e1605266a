#include "brainclust/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brainclust/kmeans1d.hpp"
#include "brainclust/matching.hpp"
#include "brainclust/metrics.hpp"
#include "brainclust/parallel.hpp"
#include "brainclust/preprocess.hpp"

namespace brainclust {

void PatientPair::validate() const {
  if (t2) require_same_dims(t1.dims(), t2->dims());
  if (seg) require_same_dims(t1.dims(), seg->dims());
}

void SearchConfig::validate() const {
  if (w < 1) throw std::invalid_argument("search: w must be >= 1");
  if (k_macro < 3 || k_macro > 6) throw std::invalid_argument("search: k_macro must be in [3, 6]");
  if (k_micro < 100) throw std::invalid_argument("search: k_micro must be >= 100");
}

namespace {

struct LabelledScan {
  Clustering clustering;
  LabelMap labels;
};

// Clusters both scans over their own masks with the same effective k: if one
// side has fewer distinct values than k, the other is re-clustered to match.
std::pair<LabelledScan, LabelledScan> cluster_pair(const Volume& a, const Mask& ma, const Volume& b, const Mask& mb,
                                                   std::size_t k) {
  const WeightedValues ha = intensity_histogram(a, ma);
  const WeightedValues hb = intensity_histogram(b, mb);
  const std::size_t kk = std::min({k, ha.size(), hb.size()});
  Clustering ca = cluster_1d(ha, kk);
  Clustering cb = cluster_1d(hb, kk);
  ca.requested_k = k;
  cb.requested_k = k;
  LabelMap la = assign_labels(a, ma, ca);
  LabelMap lb = assign_labels(b, mb, cb);
  return {LabelledScan{std::move(ca), std::move(la)}, LabelledScan{std::move(cb), std::move(lb)}};
}

Mask label_mask(const LabelMap& labels, std::int32_t label) {
  Mask m(labels.dims());
  for (std::size_t i = 0; i < labels.size(); ++i) m.set(i, labels[i] == label);
  return m;
}

// Mean voxel intensity per label over [0, k).
std::vector<double> label_means(const Volume& v, const LabelMap& labels, std::size_t k) {
  std::vector<long double> sum(k, 0);
  std::vector<std::uint64_t> n(k, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::int32_t l = labels[i];
    if (l < 0) continue;
    sum[static_cast<std::size_t>(l)] += v[i];
    ++n[static_cast<std::size_t>(l)];
  }
  std::vector<double> means(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    if (n[c] > 0) means[c] = static_cast<double>(sum[c] / static_cast<long double>(n[c]));
  }
  return means;
}

}  // namespace

std::vector<TableEntry> pair_entries(const PatientPair& p, std::size_t k_macro, std::size_t k_micro) {
  p.validate();
  if (!p.t2) throw std::invalid_argument("training pair has no T2 scan");
  if (k_macro == 0 || k_micro == 0) throw std::invalid_argument("cluster counts must be >= 1");
  const Volume& t1 = p.t1;
  const Volume& t2 = *p.t2;

  const Mask joint = joint_mask(t1, t2);
  if (joint.none()) throw std::invalid_argument("empty joint mask");

  auto [macro1, macro2] = cluster_pair(t1, joint, t2, joint, k_macro);
  const std::size_t tissues = macro1.clustering.k;
  const Assignment tissue_match =
      max_weight_matching(overlap_matrix(macro1.labels, macro2.labels, joint, tissues));

  std::vector<TableEntry> entries;
  for (std::size_t t = 0; t < tissues; ++t) {
    const Mask m1 = label_mask(macro1.labels, static_cast<std::int32_t>(t));
    const Mask m2 = label_mask(macro2.labels, static_cast<std::int32_t>(tissue_match.perm[t]));
    const Mask common = m1 & m2;
    if (m1.none() || m2.none() || common.none()) continue;

    auto [micro1, micro2] = cluster_pair(t1, m1, t2, m2, k_micro);
    const std::size_t shades = micro1.clustering.k;
    const Assignment shade_match = max_weight_matching(overlap_matrix(micro1.labels, micro2.labels, common, shades));

    const std::vector<double> a1 = label_means(t1, micro1.labels, shades);
    const std::vector<double> a2 = label_means(t2, micro2.labels, shades);
    for (std::size_t i = 0; i < shades; ++i) entries.push_back({t, a1[i], a2[shade_match.perm[i]]});
  }
  return entries;
}

void train_pair(const PatientPair& p, std::size_t k_macro, std::size_t k_micro, Model& model) {
  if (model.k_macro() != k_macro) throw std::invalid_argument("model k_macro does not match training k_macro");
  for (const auto& e : pair_entries(p, k_macro, k_micro)) model.insert(e.tissue, e.a1, e.a2);
}

std::uint64_t dataset_fingerprint(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) {
      h ^= static_cast<unsigned char>('\n');
      h *= 0x100000001b3ULL;
    }
    for (unsigned char c : ids[i]) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

Model train_sorted(std::vector<const PatientPair*> dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.max_rows < 2) throw std::invalid_argument("train: max_rows must be >= 2");

  std::sort(dataset.begin(), dataset.end(), [](const PatientPair* a, const PatientPair* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < dataset.size(); ++i) {
    if (dataset[i]->id == dataset[i - 1]->id) throw std::invalid_argument("train: duplicate patient id " + dataset[i]->id);
  }

  std::vector<std::vector<TableEntry>> entries(dataset.size());
  parallel_for(dataset.size(), cfg.threads, [&](std::size_t i) {
    const PatientPair& p = *dataset[i];
    try {
      entries[i] = pair_entries(p, cfg.k_macro, cfg.k_micro);
    } catch (const PatientError&) {
      throw;
    } catch (const std::exception& e) {
      throw PatientError(p.id, e.what());
    }
  });

  Model model(cfg.k_macro, cfg.k_micro);
  model.meta().max_rows = static_cast<std::uint32_t>(cfg.max_rows);
  model.meta().normalization = NormalizationMode::kMinMaxBrain;
  model.meta().patient_count = static_cast<std::uint32_t>(dataset.size());
  std::vector<std::string> ids;
  for (const auto* p : dataset) ids.push_back(p->id);
  model.meta().training_fingerprint = dataset_fingerprint(std::move(ids));

  for (const auto& patient_entries : entries) {
    for (const auto& e : patient_entries) model.insert(e.tissue, e.a1, e.a2);
  }
  model.compress_tables();
  return model;
}

}  // namespace

Model train(const std::vector<PatientPair>& dataset, const TrainConfig& cfg) {
  std::vector<const PatientPair*> refs;
  refs.reserve(dataset.size());
  for (const auto& p : dataset) refs.push_back(&p);
  return train_sorted(std::move(refs), cfg);
}

Volume synthesize(const Volume& t1, const Model& model) {
  const Mask brain = brain_mask(t1);
  if (brain.none()) throw std::invalid_argument("empty brain mask");
  if (model.all_empty()) throw std::invalid_argument("empty model");

  const Clustering macro = cluster_1d(intensity_histogram(t1, brain), model.k_macro());
  const LabelMap tissues = assign_labels(t1, brain, macro);

  Volume raw(t1.dims(), t1.spacing());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    if (!brain[i]) continue;
    const double v = lookup_model(model, static_cast<std::size_t>(tissues[i]), t1[i]);
    raw[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return median_filter_3x3(raw, brain);
}

std::vector<RankedCandidate> rank_by_mse(const Volume& query_t1, const std::vector<PatientPair>& candidates) {
  std::vector<RankedCandidate> ranked;
  ranked.reserve(candidates.size());
  for (const auto& c : candidates) {
    require_same_dims(query_t1.dims(), c.t1.dims());
    const Mask m = joint_mask(query_t1, c.t1);
    const double e = m.none() ? std::numeric_limits<double>::infinity() : mse(query_t1, c.t1, m);
    ranked.push_back({c.id, e});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.mse != b.mse) return a.mse < b.mse;
    return a.id < b.id;
  });
  return ranked;
}

SearchResult search_synthesize(const Volume& query_t1, const std::vector<PatientPair>& dataset, const SearchConfig& cfg) {
  cfg.validate();
  if (dataset.size() < cfg.w) {
    throw std::invalid_argument("search: dataset has " + std::to_string(dataset.size()) + " patients, fewer than w = " +
                                std::to_string(cfg.w));
  }
  std::vector<RankedCandidate> ranked = rank_by_mse(query_t1, dataset);
  ranked.resize(cfg.w);

  std::vector<const PatientPair*> subset;
  subset.reserve(cfg.w);
  for (const auto& r : ranked) {
    const auto it = std::find_if(dataset.begin(), dataset.end(), [&](const PatientPair& p) { return p.id == r.id; });
    subset.push_back(&*it);
  }
  Model model = train_sorted(std::move(subset), TrainConfig{cfg.k_macro, cfg.k_micro, cfg.max_rows, cfg.threads});
  Volume out = synthesize(query_t1, model);
  return SearchResult{std::move(out), std::move(ranked), std::move(model)};
}

Volume normalize_scan(const Volume& v) { return normalize(v, brain_mask(v)); }

}  // namespace brainclust
