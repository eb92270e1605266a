#include "brainclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "brainclust/parallel.hpp"
#include "brainclust/preprocess.hpp"

namespace brainclust {

double mse(const Volume& a, const Volume& b, const Mask& m) {
  require_same_dims(a.dims(), b.dims());
  require_same_dims(a.dims(), m.dims());
  long double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!m[i]) continue;
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("mse: empty mask");
  return static_cast<double>(sum / static_cast<long double>(n));
}

RegionSet region_masks(const Volume& seg, const LabelCodes& codes) {
  RegionSet r{Mask(seg.dims()), Mask(seg.dims()), Mask(seg.dims())};
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const float v = seg[i];
    if (v == 0.0f) continue;
    if (v == static_cast<float>(codes.enhancing)) {
      r.whole.set(i, true);
      r.core.set(i, true);
      r.active.set(i, true);
    } else if (v == static_cast<float>(codes.necrotic)) {
      r.whole.set(i, true);
      r.core.set(i, true);
    } else if (v == static_cast<float>(codes.edema)) {
      r.whole.set(i, true);
    } else {
      throw UnknownLabelError("unknown segmentation label " + std::to_string(v) + " at voxel " + std::to_string(i));
    }
  }
  return r;
}

double dice(const Mask& pred, const Mask& truth) {
  require_same_dims(pred.dims(), truth.dims());
  std::size_t a = 0, b = 0, both = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    a += pred[i];
    b += truth[i];
    both += pred[i] && truth[i];
  }
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
}

double volume_diagonal(const Dims& d, const Spacing& s) {
  const double x = static_cast<double>(d.nx) * s.sx;
  const double y = static_cast<double>(d.ny) * s.sy;
  const double z = static_cast<double>(d.nz) * s.sz;
  return std::sqrt(x * x + y * y + z * z);
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(q > 0.0 && q <= 100.0)) throw std::invalid_argument("percentile must be in (0, 100]");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared-distance transform of sampled function f along one line, with
// sample spacing `step` (Felzenszwalb & Huttenlocher lower envelope).
// Infinite samples are not sites.
void distance_transform_1d(std::vector<double>& f, double step, std::vector<double>& out, std::vector<std::size_t>& v,
                           std::vector<double>& z) {
  const std::size_t n = f.size();
  const double w = step * step;
  std::size_t k = 0;
  bool any = false;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (!any) {
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      any = true;
      continue;
    }
    const auto dq = static_cast<double>(q);
    double s = 0.0;
    for (;;) {
      const auto dv = static_cast<double>(v[k]);
      s = ((f[q] + w * dq * dq) - (f[v[k]] + w * dv * dv)) / (2.0 * w * (dq - dv));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {  // k == 0 and the new site dominates everywhere
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (!any) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  std::size_t j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[j + 1] < static_cast<double>(q)) ++j;
    const double d = step * (static_cast<double>(q) - static_cast<double>(v[j]));
    out[q] = d * d + f[v[j]];
  }
}

// Squared Euclidean distance (mm^2) from each voxel to the nearest set voxel.
std::vector<double> squared_edt(const Mask& m, const Spacing& sp) {
  const Dims& d = m.dims();
  std::vector<double> g(d.count());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = m[i] ? 0.0 : kInf;

  const std::size_t longest = std::max({d.nx, d.ny, d.nz});
  std::vector<double> line(longest), out(longest), z(longest + 1);
  std::vector<std::size_t> v(longest);

  auto pass = [&](std::size_t len, double step, auto index_of, std::size_t outer_a, std::size_t outer_b) {
    line.resize(len);
    out.resize(len);
    for (std::size_t b = 0; b < outer_b; ++b) {
      for (std::size_t a = 0; a < outer_a; ++a) {
        for (std::size_t t = 0; t < len; ++t) line[t] = g[index_of(t, a, b)];
        distance_transform_1d(line, step, out, v, z);
        for (std::size_t t = 0; t < len; ++t) g[index_of(t, a, b)] = out[t];
      }
    }
  };
  pass(d.nx, sp.sx, [&](std::size_t t, std::size_t a, std::size_t b) { return d.index(t, a, b); }, d.ny, d.nz);
  pass(d.ny, sp.sy, [&](std::size_t t, std::size_t a, std::size_t b) { return d.index(a, t, b); }, d.nx, d.nz);
  pass(d.nz, sp.sz, [&](std::size_t t, std::size_t a, std::size_t b) { return d.index(a, b, t); }, d.nx, d.ny);
  return g;
}

Mask surface(const Mask& m) {
  const Dims& d = m.dims();
  Mask s(d);
  auto outside = [&](long long x, long long y, long long z) {
    if (x < 0 || y < 0 || z < 0 || x >= static_cast<long long>(d.nx) || y >= static_cast<long long>(d.ny) ||
        z >= static_cast<long long>(d.nz)) {
      return true;
    }
    return !m[d.index(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z))];
  };
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        const std::size_t i = d.index(x, y, z);
        if (!m[i]) continue;
        const auto X = static_cast<long long>(x), Y = static_cast<long long>(y), Z = static_cast<long long>(z);
        s.set(i, outside(X - 1, Y, Z) || outside(X + 1, Y, Z) || outside(X, Y - 1, Z) || outside(X, Y + 1, Z) ||
                     outside(X, Y, Z - 1) || outside(X, Y, Z + 1));
      }
    }
  }
  return s;
}

double directed_hd95(const Mask& from, const Mask& to, const Spacing& sp) {
  const std::vector<double> dist2 = squared_edt(to, sp);
  std::vector<double> d;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i]) d.push_back(std::sqrt(dist2[i]));
  }
  return nearest_rank_percentile(std::move(d), 95.0);
}

}  // namespace

double hd95(const Mask& pred, const Mask& truth, const Spacing& spacing, const HausdorffOptions& opts) {
  require_same_dims(pred.dims(), truth.dims());
  const bool pe = pred.none();
  const bool te = truth.none();
  if (pe && te) return 0.0;
  if (pe || te) return opts.empty_penalty.value_or(volume_diagonal(pred.dims(), spacing));
  const Mask a = opts.surface_only ? surface(pred) : pred;
  const Mask b = opts.surface_only ? surface(truth) : truth;
  return std::max(directed_hd95(a, b, spacing), directed_hd95(b, a, spacing));
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"mse_brain",  "mse_tumor",  "dice_whole", "dice_core",
                                              "dice_active", "dice_avg",   "hd95_whole", "hd95_core",
                                              "hd95_active", "hd95_avg"};
  return names;
}

std::optional<double> metric_value(const PatientMetrics& p, const std::string& name) {
  auto region = [&](const std::optional<RegionScores>& r, const std::string& suffix) -> std::optional<double> {
    if (!r) return std::nullopt;
    if (suffix == "whole") return r->whole;
    if (suffix == "core") return r->core;
    if (suffix == "active") return r->active;
    if (suffix == "avg") return r->average;
    return std::nullopt;
  };
  if (name == "mse_brain") return p.mse_brain;
  if (name == "mse_tumor") return p.mse_tumor;
  if (name.rfind("dice_", 0) == 0) return region(p.dice, name.substr(5));
  if (name.rfind("hd95_", 0) == 0) return region(p.hd95, name.substr(5));
  return std::nullopt;
}

namespace {

PatientMetrics evaluate_case(const EvaluationCase& c, EvaluationMode mode, const EvaluationOptions& opts) {
  PatientMetrics pm;
  pm.id = c.id;
  bool scored = false;

  if (c.real_t2 && c.synthesized_t2) {
    require_same_dims(c.real_t2->dims(), c.synthesized_t2->dims());
    const Mask brain = brain_mask(*c.real_t2);
    if (brain.none()) throw std::invalid_argument("real T2 has an empty brain mask");
    const Volume real = normalize(*c.real_t2, brain);
    const Volume synth = normalize(*c.synthesized_t2, brain);
    pm.mse_brain = mse(real, synth, brain);
    if (mode == EvaluationMode::kGroundTruth && c.reference_seg) {
      require_same_dims(c.real_t2->dims(), c.reference_seg->dims());
      const Mask tumor = region_masks(*c.reference_seg, opts.codes).whole & brain;
      if (!tumor.none()) pm.mse_tumor = mse(real, synth, tumor);
    }
    scored = true;
  }

  if (c.predicted_seg && c.reference_seg) {
    require_same_dims(c.predicted_seg->dims(), c.reference_seg->dims());
    const RegionSet pred = region_masks(*c.predicted_seg, opts.codes);
    const RegionSet ref = region_masks(*c.reference_seg, opts.codes);
    const Spacing& sp = c.reference_seg->spacing();
    RegionScores d{dice(pred.whole, ref.whole), dice(pred.core, ref.core), dice(pred.active, ref.active), 0.0};
    d.average = (d.whole + d.core + d.active) / 3.0;
    RegionScores h{hd95(pred.whole, ref.whole, sp, opts.hausdorff), hd95(pred.core, ref.core, sp, opts.hausdorff),
                   hd95(pred.active, ref.active, sp, opts.hausdorff), 0.0};
    h.average = (h.whole + h.core + h.active) / 3.0;
    pm.dice = d;
    pm.hd95 = h;
    scored = true;
  }

  if (!scored) throw std::invalid_argument("missing inputs: need real+synthesized T2 and/or reference+predicted segmentation");
  return pm;
}

MetricSummary summarize(const std::string& name, std::vector<double> values) {
  MetricSummary s;
  s.metric = name;
  s.count = values.size();
  if (values.empty()) return s;
  long double sum = 0;
  for (double v : values) sum += v;
  s.mean = static_cast<double>(sum / static_cast<long double>(values.size()));
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  if (n > 1) {
    long double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(static_cast<double>(ss / static_cast<long double>(n - 1)));
  }
  return s;
}

}  // namespace

MetricsReport evaluate(const std::vector<EvaluationCase>& cases, EvaluationMode mode, const EvaluationOptions& opts) {
  std::vector<std::optional<PatientMetrics>> results(cases.size());
  std::vector<std::string> errors(cases.size());
  parallel_for(cases.size(), opts.threads, [&](std::size_t i) {
    const EvaluationCase& c = cases[i];
    if (!c.load_error.empty()) {
      errors[i] = c.load_error;
      return;
    }
    try {
      results[i] = evaluate_case(c, mode, opts);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  MetricsReport report;
  report.mode = mode;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (results[i]) {
      report.patients.push_back(std::move(*results[i]));
    } else {
      report.failures.push_back({cases[i].id, errors[i]});
    }
  }
  std::sort(report.patients.begin(), report.patients.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(report.failures.begin(), report.failures.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  for (const auto& name : metric_names()) {
    std::vector<double> values;
    for (const auto& p : report.patients) {
      if (auto v = metric_value(p, name)) values.push_back(*v);
    }
    report.summary.push_back(summarize(name, std::move(values)));
  }
  return report;
}

}  // namespace brainclust
