#pragma once

#include <optional>
#include <string>
#include <vector>

#include "brainclust/volume.hpp"

namespace brainclust {

/// Mean squared difference over the voxels of `m`. Throws
/// DimensionMismatch, or std::invalid_argument for an empty mask.
double mse(const Volume& a, const Volume& b, const Mask& m);

/// Integer codes of the three tumor classes in a segmentation label map.
/// Defaults follow the BraTS convention.
struct LabelCodes {
  int necrotic = 1;   // necrotic core / non-enhancing tumor
  int edema = 2;
  int enhancing = 4;
};

/// BraTS evaluation regions; active ⊆ core ⊆ whole.
struct RegionSet {
  Mask whole;   // necrotic ∪ edema ∪ enhancing
  Mask core;    // necrotic ∪ enhancing
  Mask active;  // enhancing
};

class UnknownLabelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws UnknownLabelError for any voxel that is neither 0 nor one of the
/// configured codes.
RegionSet region_masks(const Volume& seg, const LabelCodes& codes = {});

/// 2|A∩B| / (|A| + |B|); 1.0 when both masks are empty.
double dice(const Mask& pred, const Mask& truth);

struct HausdorffOptions {
  /// Value returned when exactly one mask is empty. Unset means the length
  /// of the volume diagonal in millimetres.
  std::optional<double> empty_penalty;
  /// Measure only boundary voxels (set voxels with a 6-neighbour outside
  /// the mask or outside the grid) instead of every set voxel.
  bool surface_only = false;
};

/// Undirected 95th-percentile Hausdorff distance in millimetres: the max
/// over both directions of the nearest-rank 95th percentile of the
/// distances from each voxel of one mask to the closest voxel of the other.
/// Distances come from an exact anisotropic Euclidean distance transform.
/// Both empty gives 0; one empty gives the penalty.
double hd95(const Mask& pred, const Mask& truth, const Spacing& spacing, const HausdorffOptions& opts = {});

/// Nearest-rank percentile (q in (0, 100]) of an unsorted sample.
double nearest_rank_percentile(std::vector<double> values, double q);

/// Length of the grid diagonal, sqrt(sum (n_i * s_i)^2).
double volume_diagonal(const Dims& dims, const Spacing& spacing);

enum class EvaluationMode {
  kGroundTruth,            // prediction vs ground-truth segmentation
  kReferenceSegmentation,  // prediction vs segmentation made with the real T2
};

/// Inputs for one patient. Volumes that are not present skip the metrics
/// that need them.
struct EvaluationCase {
  std::string id;
  std::optional<Volume> real_t2;
  std::optional<Volume> synthesized_t2;
  std::optional<Volume> reference_seg;  // ground truth or real-T2 segmentation, per mode
  std::optional<Volume> predicted_seg;
  std::string load_error;  // nonempty if inputs could not be loaded
};

struct RegionScores {
  double whole = 0.0;
  double core = 0.0;
  double active = 0.0;
  double average = 0.0;  // mean of the three
};

struct PatientMetrics {
  std::string id;
  std::optional<double> mse_brain;
  std::optional<double> mse_tumor;
  std::optional<RegionScores> dice;
  std::optional<RegionScores> hd95;
};

struct MetricSummary {
  std::string metric;
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1); 0 for n < 2
};

struct PatientFailure {
  std::string id;
  std::string message;
};

struct MetricsReport {
  EvaluationMode mode = EvaluationMode::kGroundTruth;
  std::vector<PatientMetrics> patients;  // sorted by id
  std::vector<MetricSummary> summary;
  std::vector<PatientFailure> failures;  // sorted by id
};

struct EvaluationOptions {
  LabelCodes codes;
  HausdorffOptions hausdorff;
  std::size_t threads = 1;
};

/// MSE on the brain mask of the real T2 after min-max normalizing both
/// volumes over it; tumor MSE (ground-truth mode only) on the whole-tumor
/// region of the reference segmentation; Dice and HD95 per region plus the
/// region average. A patient whose inputs are broken is listed in
/// `failures` and the others are still scored.
MetricsReport evaluate(const std::vector<EvaluationCase>& cases, EvaluationMode mode, const EvaluationOptions& opts = {});

/// Names of the metrics in report order ("mse_brain", "dice_whole", ...).
const std::vector<std::string>& metric_names();

/// Value of a named metric for one patient, if computed.
std::optional<double> metric_value(const PatientMetrics& p, const std::string& name);

}  // namespace brainclust
