#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "brainclust/metrics.hpp"
#include "brainclust/report.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace brainclust {
namespace {

Volume line(std::vector<float> v) {
  const std::size_t n = v.size();
  return Volume(Dims{n, 1, 1}, Spacing{}, std::move(v));
}

Mask mask_of(Dims d, std::initializer_list<std::array<std::size_t, 3>> voxels) {
  Mask m(d);
  for (const auto& p : voxels) m.set(d.index(p[0], p[1], p[2]), true);
  return m;
}

// Random mask with at most `max_set` voxels.
Mask sparse_mask(std::mt19937_64& rng, Dims d, std::size_t max_set) {
  Mask m(d);
  const std::size_t n = 1 + rng() % max_set;
  for (std::size_t i = 0; i < n; ++i) m.set(rng() % d.count(), true);
  return m;
}

TEST(Mse, Examples) {
  const Volume a = line({0.2f, 0.4f, 0.6f});
  EXPECT_EQ(mse(a, a, Mask(a.dims(), true)), 0.0);
  const Volume p = line({0, 1});
  const Volume q = line({1, 0});
  EXPECT_EQ(mse(p, q, Mask(p.dims(), true)), 1.0);
  const Volume b = line({0.2f, 0.1f, 0.6f});
  EXPECT_NEAR(mse(a, b, Mask(a.dims(), true)), 0.03, 1e-7);
}

TEST(Mse, SymmetricNonNegativeAndMasked) {
  std::mt19937_64 rng(501);
  for (int trial = 0; trial < 50; ++trial) {
    const Volume a = testing::random_volume(rng, Dims{5, 4, 3});
    const Volume b = testing::random_volume(rng, Dims{5, 4, 3});
    const Mask m = testing::random_mask(rng, a.dims(), 0.5);
    if (m.none()) continue;
    EXPECT_EQ(mse(a, b, m), mse(b, a, m));
    EXPECT_GT(mse(a, b, m), 0.0);
  }
  const Volume a = line({1, 5});
  const Volume b = line({1, 9});
  Mask m(a.dims());
  m.set(0, true);
  EXPECT_EQ(mse(a, b, m), 0.0);
}

TEST(Mse, Errors) {
  const Volume a = line({1, 2});
  EXPECT_THROW(mse(a, a, Mask(a.dims())), std::invalid_argument);
  EXPECT_THROW(mse(a, line({1, 2, 3}), Mask(a.dims(), true)), DimensionMismatch);
}

TEST(RegionMasks, Background) {
  const RegionSet r = region_masks(line({0, 0, 0}));
  EXPECT_TRUE(r.whole.none());
  EXPECT_TRUE(r.core.none());
  EXPECT_TRUE(r.active.none());
}

TEST(RegionMasks, EnhancingInAllThree) {
  const RegionSet r = region_masks(line({0, 4}));
  EXPECT_TRUE(r.whole[1] && r.core[1] && r.active[1]);
  EXPECT_EQ(r.whole.count(), 1u);
}

TEST(RegionMasks, EdemaInWholeOnly) {
  const RegionSet r = region_masks(line({2}));
  EXPECT_TRUE(r.whole[0]);
  EXPECT_FALSE(r.core[0]);
  EXPECT_FALSE(r.active[0]);
}

TEST(RegionMasks, NecroticInWholeAndCore) {
  const RegionSet r = region_masks(line({1}));
  EXPECT_TRUE(r.whole[0] && r.core[0]);
  EXPECT_FALSE(r.active[0]);
}

TEST(RegionMasks, CustomCodesAndUnknownLabel) {
  EXPECT_THROW(region_masks(line({0, 3})), UnknownLabelError);
  const RegionSet r = region_masks(line({3}), LabelCodes{1, 2, 3});
  EXPECT_TRUE(r.active[0]);
}

TEST(RegionMasks, ContainmentChain) {
  std::mt19937_64 rng(503);
  const float codes[] = {0, 1, 2, 4};
  std::vector<float> v(200);
  for (auto& x : v) x = codes[rng() % 4];
  const RegionSet r = region_masks(line(v));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (r.active[i]) EXPECT_TRUE(r.core[i]);
    if (r.core[i]) EXPECT_TRUE(r.whole[i]);
  }
}

TEST(Dice, Examples) {
  const Dims d{10, 1, 1};
  const Mask a = mask_of(d, {{{0, 0, 0}}, {{1, 0, 0}}, {{2, 0, 0}}, {{3, 0, 0}}});
  EXPECT_EQ(dice(a, a), 1.0);
  EXPECT_EQ(dice(a, mask_of(d, {{{5, 0, 0}}})), 0.0);
  const Mask b = mask_of(d, {{{1, 0, 0}}, {{2, 0, 0}}, {{3, 0, 0}}, {{6, 0, 0}}, {{7, 0, 0}}, {{8, 0, 0}}});
  EXPECT_DOUBLE_EQ(dice(a, b), 0.6);
  EXPECT_EQ(dice(Mask(d), Mask(d)), 1.0);
  EXPECT_EQ(dice(a, Mask(d)), 0.0);
}

TEST(Dice, SymmetricAndBounded) {
  std::mt19937_64 rng(509);
  for (int trial = 0; trial < 100; ++trial) {
    const Mask a = testing::random_mask(rng, Dims{4, 4, 4}, 0.3);
    const Mask b = testing::random_mask(rng, Dims{4, 4, 4}, 0.3);
    EXPECT_EQ(dice(a, b), dice(b, a));
    EXPECT_GE(dice(a, b), 0.0);
    EXPECT_LE(dice(a, b), 1.0);
  }
}

TEST(Percentile, NearestRank) {
  EXPECT_EQ(nearest_rank_percentile({0.0, 1.0}, 95), 1.0);
  EXPECT_EQ(nearest_rank_percentile({3.0}, 95), 3.0);
  std::vector<double> v(100);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(100 - i);
  EXPECT_EQ(nearest_rank_percentile(v, 95), 95.0);
  EXPECT_EQ(nearest_rank_percentile(v, 100), 100.0);
  EXPECT_EQ(nearest_rank_percentile(v, 0.5), 1.0);
  EXPECT_THROW(nearest_rank_percentile({}, 95), std::invalid_argument);
  EXPECT_THROW(nearest_rank_percentile({1.0}, 0), std::invalid_argument);
  EXPECT_THROW(nearest_rank_percentile({1.0}, 101), std::invalid_argument);
}

TEST(Hd95, Examples) {
  const Dims d{5, 2, 2};
  const Mask a = mask_of(d, {{{0, 0, 0}}, {{1, 1, 1}}});
  EXPECT_EQ(hd95(a, a, Spacing{}), 0.0);
  EXPECT_EQ(hd95(mask_of(d, {{{0, 0, 0}}}), mask_of(d, {{{3, 0, 0}}}), Spacing{}), 3.0);
  EXPECT_EQ(hd95(mask_of(d, {{{0, 0, 0}}, {{1, 0, 0}}}), mask_of(d, {{{0, 0, 0}}}), Spacing{}), 1.0);
}

TEST(Hd95, EmptyConventions) {
  const Dims d{4, 3, 2};
  const Spacing s{1.0, 2.0, 3.0};
  const Mask a = mask_of(d, {{{1, 1, 1}}});
  EXPECT_EQ(hd95(Mask(d), Mask(d), s), 0.0);
  EXPECT_DOUBLE_EQ(hd95(a, Mask(d), s), std::sqrt(16.0 + 36.0 + 36.0));
  EXPECT_DOUBLE_EQ(hd95(Mask(d), a, s), volume_diagonal(d, s));
  HausdorffOptions o;
  o.empty_penalty = 373.0;
  EXPECT_EQ(hd95(a, Mask(d), s, o), 373.0);
}

TEST(Hd95, AnisotropicSpacing) {
  const Dims d{4, 4, 4};
  const Spacing s{0.5, 2.0, 3.0};
  EXPECT_EQ(hd95(mask_of(d, {{{0, 0, 0}}}), mask_of(d, {{{0, 0, 2}}}), s), 6.0);
  EXPECT_EQ(hd95(mask_of(d, {{{0, 0, 0}}}), mask_of(d, {{{2, 0, 0}}}), s), 1.0);
}

TEST(Hd95, MatchesBruteForce) {
  std::mt19937_64 rng(521);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Dims d{1 + rng() % 9, 1 + rng() % 9, 1 + rng() % 6};
    const Spacing s = trial % 2 == 0 ? Spacing{} : Spacing{u(rng), u(rng), u(rng)};
    const Mask a = sparse_mask(rng, d, 50);
    const Mask b = sparse_mask(rng, d, 50);
    EXPECT_EQ(hd95(a, b, s), oracle::hd95(a, b, s)) << "trial " << trial;
  }
}

TEST(Hd95, SymmetryIdentityAndScaling) {
  std::mt19937_64 rng(523);
  for (int trial = 0; trial < 100; ++trial) {
    const Dims d{8, 7, 5};
    const Spacing s{1.0 + static_cast<double>(rng() % 3), 1.5, 0.75};
    const Mask a = sparse_mask(rng, d, 40);
    const Mask b = sparse_mask(rng, d, 40);
    EXPECT_EQ(hd95(a, b, s), hd95(b, a, s));
    EXPECT_EQ(hd95(a, a, s), 0.0);
    EXPECT_EQ(hd95(a, b, Spacing{2 * s.sx, 2 * s.sy, 2 * s.sz}), 2 * hd95(a, b, s));
    const double c = 1.7;
    EXPECT_NEAR(hd95(a, b, Spacing{c * s.sx, c * s.sy, c * s.sz}), c * hd95(a, b, s), 1e-12);
  }
}

TEST(Hd95, SurfaceOnlyIgnoresInterior) {
  // A solid 5x5x5 cube against itself shifted by one: interior voxels of
  // the cube are dropped, so only boundary voxels are measured.
  const Dims d{9, 9, 9};
  Mask a(d), b(d);
  for (std::size_t z = 2; z < 7; ++z) {
    for (std::size_t y = 2; y < 7; ++y) {
      for (std::size_t x = 2; x < 7; ++x) {
        a.set(d.index(x, y, z), true);
        b.set(d.index(x + 1, y, z), true);
      }
    }
  }
  HausdorffOptions o;
  o.surface_only = true;
  EXPECT_EQ(hd95(a, b, Spacing{}, o), 1.0);
  EXPECT_EQ(hd95(a, b, Spacing{}), 1.0);
  Mask solid(Dims{3, 3, 3}, true);
  EXPECT_EQ(hd95(solid, solid, Spacing{}, o), 0.0);
}

TEST(Hd95, DimsMismatch) {
  EXPECT_THROW(hd95(Mask(Dims{2, 2, 2}), Mask(Dims{2, 2, 3}), Spacing{}), DimensionMismatch);
}

Volume seg_volume(Dims d, std::vector<float> v) { return Volume(d, Spacing{}, std::move(v)); }

EvaluationCase perfect_case(const std::string& id) {
  const Dims d{4, 2, 1};
  EvaluationCase c;
  c.id = id;
  c.real_t2 = Volume(d, Spacing{}, {0, 0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f, 0.7f});
  c.synthesized_t2 = c.real_t2;
  c.reference_seg = seg_volume(d, {0, 0, 1, 2, 4, 4, 2, 0});
  c.predicted_seg = c.reference_seg;
  return c;
}

TEST(Evaluate, PerfectCase) {
  const MetricsReport r = evaluate({perfect_case("p1")}, EvaluationMode::kGroundTruth);
  ASSERT_EQ(r.patients.size(), 1u);
  const auto& p = r.patients[0];
  EXPECT_EQ(*p.mse_brain, 0.0);
  EXPECT_EQ(*p.mse_tumor, 0.0);
  EXPECT_EQ(p.dice->average, 1.0);
  EXPECT_EQ(p.hd95->average, 0.0);
  EXPECT_TRUE(r.failures.empty());
}

TEST(Evaluate, ReferenceModeSkipsTumorMse) {
  const MetricsReport r = evaluate({perfect_case("p1")}, EvaluationMode::kReferenceSegmentation);
  ASSERT_EQ(r.patients.size(), 1u);
  EXPECT_FALSE(r.patients[0].mse_tumor.has_value());
  EXPECT_EQ(r.patients[0].dice->whole, 1.0);
  EXPECT_EQ(r.patients[0].dice->core, 1.0);
  EXPECT_EQ(r.patients[0].dice->active, 1.0);
}

TEST(Evaluate, MseUsesPerVolumeNormalization) {
  EvaluationCase c = perfect_case("scaled");
  Volume s = *c.real_t2;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 10.0f * s[i] + 3.0f * (s[i] != 0.0f);
  c.synthesized_t2 = s;
  const MetricsReport r = evaluate({c}, EvaluationMode::kGroundTruth);
  EXPECT_NEAR(*r.patients[0].mse_brain, 0.0, 1e-12);
}

TEST(Evaluate, AveragesAreRegionMeans) {
  EvaluationCase c = perfect_case("mix");
  c.predicted_seg = seg_volume(Dims{4, 2, 1}, {0, 2, 1, 2, 4, 0, 2, 0});
  const MetricsReport r = evaluate({c}, EvaluationMode::kGroundTruth);
  const auto& p = r.patients[0];
  EXPECT_DOUBLE_EQ(p.dice->average, (p.dice->whole + p.dice->core + p.dice->active) / 3.0);
  EXPECT_DOUBLE_EQ(p.hd95->average, (p.hd95->whole + p.hd95->core + p.hd95->active) / 3.0);
  // whole: ref {2,3,4,5,6}, pred {1,2,3,4,6} -> 2*4/10
  EXPECT_DOUBLE_EQ(p.dice->whole, 0.8);
}

TEST(Evaluate, BrokenPatientListedOthersScored) {
  EvaluationCase broken = perfect_case("b_broken");
  broken.predicted_seg = seg_volume(Dims{4, 2, 1}, {0, 0, 0, 7, 0, 0, 0, 0});
  EvaluationCase missing;
  missing.id = "c_missing";
  EvaluationCase unloadable;
  unloadable.id = "a_unloadable";
  unloadable.load_error = "cannot open x.nii";
  const MetricsReport r = evaluate({perfect_case("d_ok"), broken, missing, unloadable, perfect_case("a_ok")},
                                   EvaluationMode::kGroundTruth, EvaluationOptions{{}, {}, 3});
  ASSERT_EQ(r.patients.size(), 2u);
  EXPECT_EQ(r.patients[0].id, "a_ok");
  EXPECT_EQ(r.patients[1].id, "d_ok");
  ASSERT_EQ(r.failures.size(), 3u);
  EXPECT_EQ(r.failures[0].id, "a_unloadable");
  EXPECT_EQ(r.failures[0].message, "cannot open x.nii");
  EXPECT_EQ(r.failures[1].id, "b_broken");
  EXPECT_EQ(r.failures[2].id, "c_missing");
}

TEST(Evaluate, SummaryStatistics) {
  std::vector<EvaluationCase> cases;
  const double offsets[] = {0.0, 0.1, 0.3};
  for (int i = 0; i < 3; ++i) {
    EvaluationCase c = perfect_case("p" + std::to_string(i));
    c.predicted_seg.reset();
    Volume s = *c.real_t2;
    s[7] = static_cast<float>(0.7 - offsets[i]);
    c.synthesized_t2 = s;
    cases.push_back(c);
  }
  const MetricsReport r = evaluate(cases, EvaluationMode::kGroundTruth);
  std::vector<double> v;
  for (const auto& p : r.patients) v.push_back(*p.mse_brain);
  const MetricSummary& s = r.summary[0];
  ASSERT_EQ(s.metric, "mse_brain");
  EXPECT_EQ(s.count, 3u);
  const double mean = (v[0] + v[1] + v[2]) / 3;
  EXPECT_NEAR(s.mean, mean, 1e-15);
  std::sort(v.begin(), v.end());
  EXPECT_EQ(s.median, v[1]);
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(s.stddev, std::sqrt(ss / 2), 1e-15);
  EXPECT_EQ(r.summary[2].metric, "dice_whole");
  EXPECT_EQ(r.summary[2].count, 0u);
}

TEST(Report, SchemaAndFormatting) {
  EvaluationCase c = perfect_case("p1");
  EvaluationCase bad;
  bad.id = "zz";
  bad.load_error = "line one\nline two";
  const MetricsReport r = evaluate({c, bad}, EvaluationMode::kGroundTruth);

  const std::string tsv = format_patient_tsv(r);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "patient_id\tmetric\tvalue");
  EXPECT_NE(tsv.find("p1\tdice_avg\t1\n"), std::string::npos);
  EXPECT_NE(tsv.find("p1\thd95_avg\t0\n"), std::string::npos);
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 11);

  const std::string summary = format_summary_tsv(r);
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "metric\tcount\tmean\tmedian\tstd");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 11);

  EXPECT_EQ(format_failures_tsv(r), "patient_id\terror\nzz\tline one line two\n");

  const std::string table = format_report_table(r);
  EXPECT_EQ(table.substr(0, table.find('\n')), "mode: ground-truth");
  EXPECT_NE(table.find("failures: 1\n  zz: line one line two\n"), std::string::npos);
  EXPECT_EQ(table.find(" \n"), std::string::npos);

  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Report, WritesFourFiles) {
  testing::TempDir dir("report");
  const MetricsReport r = evaluate({perfect_case("p1")}, EvaluationMode::kReferenceSegmentation);
  write_report(r, dir / "out");
  for (const char* f : {"out.txt", "out.tsv", "out_summary.tsv", "out_failures.tsv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  EXPECT_EQ(testing::read_bytes(dir / "out.tsv").size(), format_patient_tsv(r).size());
}

TEST(MetricNames, OrderAndLookup) {
  const auto& n = metric_names();
  ASSERT_EQ(n.size(), 10u);
  EXPECT_EQ(n.front(), "mse_brain");
  EXPECT_EQ(n.back(), "hd95_avg");
  PatientMetrics p;
  p.dice = RegionScores{0.1, 0.2, 0.3, 0.2};
  EXPECT_EQ(metric_value(p, "dice_core"), 0.2);
  EXPECT_FALSE(metric_value(p, "hd95_core").has_value());
  EXPECT_FALSE(metric_value(p, "bogus").has_value());
}

}  // namespace
}  // namespace brainclust
