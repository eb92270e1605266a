#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "brainclust/manifest.hpp"
#include "brainclust/mapping_model.hpp"
#include "brainclust/metrics.hpp"
#include "brainclust/nifti.hpp"
#include "brainclust/parallel.hpp"
#include "brainclust/phantom.hpp"
#include "brainclust/pipeline.hpp"
#include "brainclust/preprocess.hpp"
#include "brainclust/random.hpp"
#include "brainclust/report.hpp"

namespace fs = std::filesystem;

namespace brainclust::cli {

namespace {

struct TrainArgs {
  fs::path manifest;
  fs::path out;
  std::size_t k_macro = 3;
  std::size_t k_micro = 100;
  std::size_t max_rows = kDefaultMaxRows;
};

struct SynthesizeArgs {
  fs::path t1;
  fs::path model;
  fs::path out;
  std::vector<double> rescale;
};

struct SearchArgs {
  fs::path t1;
  fs::path manifest;
  fs::path out;
  fs::path model_out;
  std::size_t w = 10;
  std::size_t k_macro = 5;
  std::size_t k_micro = 100;
  std::size_t max_rows = kDefaultMaxRows;
  std::vector<double> rescale;
};

struct BaselineArgs {
  fs::path t1;
  std::string kind;
  fs::path out;
};

struct EvaluateArgs {
  fs::path manifest;
  std::string mode = "ground-truth";
  fs::path out;
  LabelCodes codes;
  std::optional<double> hd95_penalty;
  bool surface_only = false;
};

struct PhantomArgs {
  fs::path out_dir;
  std::size_t count = 10;
  std::vector<std::size_t> dims{64};
  std::size_t tissues = 4;
  double noise = 0.0;
  std::string shape = "slab";
};

struct Common {
  std::size_t threads = 0;
  std::uint64_t seed = 0;
};

// A normalized copy of every volume the pipeline consumes.
PatientPair normalized(PatientPair p) {
  p.t1 = normalize_scan(p.t1);
  if (p.t2) p.t2 = normalize_scan(*p.t2);
  return p;
}

std::vector<PatientPair> load_dataset(const fs::path& manifest, std::size_t threads, std::ostream& out) {
  std::vector<DatasetRecord> records = read_dataset_manifest(manifest);
  if (records.empty()) throw std::runtime_error("manifest " + manifest.string() + " has no patients");
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<PatientPair> dataset(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) { dataset[i] = normalized(load_patient(records[i])); });
  for (const auto& p : dataset) {
    if (!p.t2) throw PatientError(p.id, "no T2 path in manifest");
    out << "loaded " << p.id << '\n';
  }
  return dataset;
}

Volume finish(const Volume& synthesized, const Volume& query, const std::vector<double>& rescale_range) {
  if (rescale_range.empty()) return synthesized;
  return rescale(synthesized, brain_mask(query), rescale_range[0], rescale_range[1]);
}

// out.nii.gz -> out.neighbors.tsv
fs::path neighbors_path(const fs::path& out) {
  std::string s = out.string();
  for (const std::string ext : {".nii.gz", ".nii"}) {
    if (s.size() > ext.size() && s.compare(s.size() - ext.size(), ext.size(), ext) == 0) {
      s.resize(s.size() - ext.size());
      break;
    }
  }
  return s + ".neighbors.tsv";
}

int cmd_train(const TrainArgs& a, const Common& c, std::ostream& out) {
  const std::vector<PatientPair> dataset = load_dataset(a.manifest, c.threads, out);
  const Model model = train(dataset, TrainConfig{a.k_macro, a.k_micro, a.max_rows, c.threads});
  save_model(model, a.out);
  out << "trained on " << dataset.size() << " patients, wrote " << a.out.string() << '\n';
  return kExitOk;
}

int cmd_synthesize(const SynthesizeArgs& a, std::ostream& out) {
  const Model model = load_model(a.model);
  Volume t1 = read_nifti(a.t1);
  if (model.meta().normalization == NormalizationMode::kMinMaxBrain) t1 = normalize_scan(t1);
  write_nifti(finish(synthesize(t1, model), t1, a.rescale), a.out);
  out << "wrote " << a.out.string() << '\n';
  return kExitOk;
}

int cmd_search(const SearchArgs& a, const Common& c, std::ostream& out) {
  const SearchConfig cfg{a.w, a.k_macro, a.k_micro, a.max_rows, c.threads};
  cfg.validate();
  const std::size_t available = read_dataset_manifest(a.manifest).size();
  if (available < a.w) {
    throw std::invalid_argument("search: w = " + std::to_string(a.w) + " but the manifest lists only " +
                                std::to_string(available) + " patients");
  }
  const Volume query = normalize_scan(read_nifti(a.t1));
  const std::vector<PatientPair> dataset = load_dataset(a.manifest, c.threads, out);
  const SearchResult r = search_synthesize(query, dataset, cfg);
  write_nifti(finish(r.synthesized, query, a.rescale), a.out);

  const fs::path np = neighbors_path(a.out);
  std::ofstream nf(np, std::ios::binary);
  if (!nf) throw std::runtime_error("cannot write " + np.string());
  nf << "rank\tpatient_id\tmse\n";
  for (std::size_t i = 0; i < r.neighbors.size(); ++i) {
    nf << i + 1 << '\t' << r.neighbors[i].id << '\t' << format_number(r.neighbors[i].mse) << '\n';
  }
  if (!nf) throw std::runtime_error("failed writing " + np.string());
  if (!a.model_out.empty()) save_model(r.model, a.model_out);
  out << "wrote " << a.out.string() << " and " << np.string() << '\n';
  return kExitOk;
}

int cmd_baseline(const BaselineArgs& a, const Common& c, std::ostream& out) {
  const Volume t1 = read_nifti(a.t1);
  write_nifti(a.kind == "complement" ? complement(t1) : random_fill(t1, c.seed), a.out);
  out << "wrote " << a.out.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const std::vector<EvaluationRecord> records = read_evaluation_manifest(a.manifest);
  std::vector<EvaluationCase> cases(records.size());
  parallel_for(records.size(), c.threads, [&](std::size_t i) { cases[i] = load_evaluation_case(records[i]); });

  EvaluationOptions opts;
  opts.codes = a.codes;
  opts.hausdorff.empty_penalty = a.hd95_penalty;
  opts.hausdorff.surface_only = a.surface_only;
  opts.threads = c.threads;
  const EvaluationMode mode = a.mode == "ground-truth" ? EvaluationMode::kGroundTruth
                                                       : EvaluationMode::kReferenceSegmentation;
  const MetricsReport report = evaluate(cases, mode, opts);
  write_report(report, a.out);
  out << "evaluated " << report.patients.size() << " patients, report prefix " << a.out.string() << '\n';
  for (const auto& f : report.failures) err << "error: patient " << f.id << ": " << f.message << '\n';
  return report.failures.empty() ? kExitOk : kExitFailure;
}

int cmd_phantom(const PhantomArgs& a, const Common& c, std::ostream& out) {
  if (a.dims.size() != 1 && a.dims.size() != 3) throw std::invalid_argument("--dims takes 1 or 3 values");
  const Dims dims = a.dims.size() == 1 ? Dims{a.dims[0], a.dims[0], a.dims[0]} : Dims{a.dims[0], a.dims[1], a.dims[2]};
  const PhantomShape shape = a.shape == "slab" ? PhantomShape::kSlab : PhantomShape::kEllipsoid;
  const std::vector<AffineTransfer> transfer = phantom_transfer_family(a.tissues, c.seed);
  fs::create_directories(a.out_dir);

  std::vector<DatasetRecord> records(a.count);
  parallel_for(a.count, c.threads, [&](std::size_t i) {
    char id[32];
    std::snprintf(id, sizeof id, "phantom_%03zu", i);
    PatientPair p = make_phantom_pair(splitmix64(c.seed + i + 1), dims, a.tissues, transfer, a.noise, shape);
    const std::string base = id;
    write_nifti(p.t1, a.out_dir / (base + "_t1.nii.gz"));
    write_nifti(*p.t2, a.out_dir / (base + "_t2.nii.gz"));
    write_nifti(*p.seg, a.out_dir / (base + "_seg.nii.gz"));
    records[i] = DatasetRecord{base, base + "_t1.nii.gz", fs::path(base + "_t2.nii.gz"), fs::path(base + "_seg.nii.gz")};
  });
  const fs::path manifest = a.out_dir / "manifest.tsv";
  write_dataset_manifest(records, manifest);
  out << "wrote " << a.count << " phantom pairs and " << manifest.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intensity-clustering T1W to T2W synthesis and evaluation", "brainclust"};
  app.set_version_flag("--version", "brainclust 1.0.0");
  app.require_subcommand(1);

  Common common;
  common.threads = default_thread_count();
  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--threads", common.threads, "Worker threads (default: BRAINCLUST_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    if (with_seed) sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  };
  auto add_rescale = [](CLI::App* sub, std::vector<double>& target) {
    sub->add_option("--rescale", target, "Map the [0,1] output onto LO HI inside the brain mask")->expected(2);
  };

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "Build a model from a dataset manifest");
  train_cmd->add_option("--manifest", train_args.manifest, "Dataset manifest (id, t1, t2[, seg])")->required();
  train_cmd->add_option("--out", train_args.out, "Model file to write")->required();
  train_cmd->add_option("--k-macro", train_args.k_macro, "Macro clusters")->capture_default_str()->check(CLI::Range(1, 64));
  train_cmd->add_option("--k-micro", train_args.k_micro, "Micro clusters per tissue")
      ->capture_default_str()
      ->check(CLI::Range(1, 1 << 16));
  train_cmd->add_option("--max-rows", train_args.max_rows, "Rows kept per table after compression")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 24));
  add_common(train_cmd, false);

  SynthesizeArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand("synthesize", "Synthesize a T2W scan with a trained model");
  synth_cmd->add_option("--t1", synth_args.t1, "Input T1W NIfTI")->required();
  synth_cmd->add_option("--model", synth_args.model, "Model file")->required();
  synth_cmd->add_option("--out", synth_args.out, "Output NIfTI")->required();
  add_rescale(synth_cmd, synth_args.rescale);

  SearchArgs search_args;
  CLI::App* search_cmd = app.add_subcommand("search", "Synthesize from a model of the w closest training patients");
  search_cmd->add_option("--t1", search_args.t1, "Input T1W NIfTI")->required();
  search_cmd->add_option("--manifest", search_args.manifest, "Dataset manifest")->required();
  search_cmd->add_option("--out", search_args.out, "Output NIfTI")->required();
  search_cmd->add_option("-w,--w", search_args.w, "Neighbours used for the model")->capture_default_str();
  search_cmd->add_option("--k-macro", search_args.k_macro, "Macro clusters, 3 to 6")->capture_default_str();
  search_cmd->add_option("--k-micro", search_args.k_micro, "Micro clusters per tissue, at least 100")->capture_default_str();
  search_cmd->add_option("--max-rows", search_args.max_rows, "Rows kept per table after compression")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 24));
  search_cmd->add_option("--model-out", search_args.model_out, "Also save the per-query model");
  add_rescale(search_cmd, search_args.rescale);
  add_common(search_cmd, false);

  BaselineArgs baseline_args;
  CLI::App* baseline_cmd = app.add_subcommand("baseline", "Complement or random baseline");
  baseline_cmd->add_option("--t1", baseline_args.t1, "Input T1W NIfTI")->required();
  baseline_cmd->add_option("--kind", baseline_args.kind, "complement or random")
      ->required()
      ->check(CLI::IsMember({"complement", "random"}));
  baseline_cmd->add_option("--out", baseline_args.out, "Output NIfTI")->required();
  add_common(baseline_cmd, true);

  EvaluateArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score synthesized scans and segmentations");
  eval_cmd->add_option("--manifest", eval_args.manifest,
                       "Evaluation manifest (id, real_t2, synthesized_t2, reference_seg, predicted_seg)")
      ->required();
  eval_cmd->add_option("--mode", eval_args.mode, "ground-truth or reference")
      ->capture_default_str()
      ->check(CLI::IsMember({"ground-truth", "reference"}));
  eval_cmd->add_option("--out", eval_args.out, "Report prefix")->required();
  eval_cmd->add_option("--label-necrotic", eval_args.codes.necrotic, "Necrotic/non-enhancing label")->capture_default_str();
  eval_cmd->add_option("--label-edema", eval_args.codes.edema, "Edema label")->capture_default_str();
  eval_cmd->add_option("--label-enhancing", eval_args.codes.enhancing, "Enhancing label")->capture_default_str();
  eval_cmd->add_option("--hd95-penalty", eval_args.hd95_penalty,
                       "HD95 when exactly one mask is empty (default: volume diagonal)");
  eval_cmd->add_flag("--surface-only", eval_args.surface_only, "HD95 over boundary voxels only");
  add_common(eval_cmd, false);

  PhantomArgs phantom_args;
  CLI::App* phantom_cmd = app.add_subcommand("phantom", "Generate a synthetic T1W/T2W corpus and manifest");
  phantom_cmd->add_option("--out-dir", phantom_args.out_dir, "Output directory")->required();
  phantom_cmd->add_option("--count", phantom_args.count, "Number of pairs")->capture_default_str()->check(CLI::PositiveNumber);
  phantom_cmd->add_option("--dims", phantom_args.dims, "N or NX NY NZ")->capture_default_str()->expected(1, 3)->check(CLI::Range(8, 1024));
  phantom_cmd->add_option("--tissues", phantom_args.tissues, "Tissue count, 2 to 6")->capture_default_str()->check(CLI::Range(2, 6));
  phantom_cmd->add_option("--noise", phantom_args.noise, "T2 noise standard deviation")->capture_default_str()->check(CLI::NonNegativeNumber);
  phantom_cmd->add_option("--shape", phantom_args.shape, "slab or ellipsoid")
      ->capture_default_str()
      ->check(CLI::IsMember({"slab", "ellipsoid"}));
  add_common(phantom_cmd, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_args, common, out);
    if (*synth_cmd) return cmd_synthesize(synth_args, out);
    if (*search_cmd) return cmd_search(search_args, common, out);
    if (*baseline_cmd) return cmd_baseline(baseline_args, common, out);
    if (*eval_cmd) return cmd_evaluate(eval_args, common, out, err);
    if (*phantom_cmd) return cmd_phantom(phantom_args, common, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace brainclust::cli
