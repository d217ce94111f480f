#include "ppgbp/commands.hpp"

#include <fstream>

#include "ppgbp/error.hpp"

namespace ppgbp::commands {

namespace {

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

std::array<double, 3> label_array(const BpLabel& l) { return {l.sbp, l.dbp, l.map}; }

void ensure_dir(const fs::path& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

}  // namespace

std::vector<PrepareOutput> prepare(const std::vector<fs::path>& records, const PipelineConfig& config,
                                   const fs::path& out_dir) {
  validate(config);
  if (records.empty()) throw Error(Errc::empty_input, "no records given");
  ensure_dir(out_dir);
  std::vector<PrepareOutput> outputs;
  for (const auto& path : records) {
    const RawRecord record = load_record(path);
    PrepareOutput out;
    out.prepared = prepare_record(record, config);
    quantize_to_file_precision(out.prepared.beats);
    out.dataset = out_dir / (path.stem().string() + ".beats");
    out.sidecar = out_dir / (path.stem().string() + ".stats.json");
    save_dataset(out.prepared.beats, out.dataset);
    write_json(out.sidecar, prepare_sidecar(out.prepared, config));
    outputs.push_back(std::move(out));
  }
  return outputs;
}

TrainOutput train(const fs::path& dataset, const PipelineConfig& config, const fs::path& model_out) {
  validate(config);
  const BeatDataset beats = load_dataset(dataset);
  if (beats.empty()) throw Error(Errc::empty_input, "dataset '" + dataset.string() + "' has no beats");
  auto [train_set, test_set] = split_dataset(beats, config.train.train_fraction, config.seed);
  TrainOutput out;
  out.n_train = train_set.size();
  out.n_test = test_set.size();
  std::tie(out.model, out.report) = ppgbp::train(train_set, test_set, config.train);
  ensure_dir(model_out.parent_path());
  out.model_path = model_out;
  out.report_path = fs::path(model_out.string() + ".train.json");
  save_model(out.model, out.model_path);
  nlohmann::json j = out.report;
  j["dataset"] = dataset.string();
  j["n_train"] = out.n_train;
  j["n_test"] = out.n_test;
  j["split_seed"] = config.seed;
  j["config"] = config.train;
  write_json(out.report_path, j);
  return out;
}

Split split_from_string(const std::string& name) {
  if (name == "test") return Split::test;
  if (name == "train") return Split::train;
  if (name == "all") return Split::all;
  throw Error(Errc::invalid_spec, "unknown split '" + name + "' (test, train, all)");
}

EvaluateOutput evaluate(const std::vector<EvalInput>& inputs, const PipelineConfig& config, Split split,
                        const fs::path& out_dir) {
  if (inputs.empty()) throw Error(Errc::empty_input, "nothing to evaluate");
  EvaluateOutput out;
  std::vector<double> pooled_pred[2], pooled_ref[2];
  for (const auto& in : inputs) {
    const MlpModel model = load_model(in.model);
    const BeatDataset beats = load_dataset(in.dataset);
    if (model.input_size() != kBeatVectorLength || model.output_size() != 3)
      throw Error(Errc::dimension_mismatch, "model '" + in.model.string() + "' is " +
                                                std::to_string(model.input_size()) + "->" +
                                                std::to_string(model.output_size()) + ", dataset beats are " +
                                                std::to_string(kBeatVectorLength) + "->3");
    BeatDataset subset;
    if (split == Split::all) {
      subset = beats;
    } else {
      auto [tr, te] = split_dataset(beats, config.train.train_fraction, config.seed);
      subset = split == Split::test ? std::move(te) : std::move(tr);
    }
    const auto pred = forward_batch(model, subset);
    std::vector<std::array<double, 3>> ref;
    ref.reserve(subset.size());
    for (const auto& b : subset) ref.push_back(label_array(b.label));
    out.reports.push_back(ppgbp::evaluate(in.dataset.stem().string(), pred, ref));
    for (std::size_t i = 0; i < pred.size(); ++i)
      for (int c = 0; c < 2; ++c) {
        pooled_pred[c].push_back(pred[i][c]);
        pooled_ref[c].push_back(ref[i][c]);
      }
  }
  out.files = write_report(out_dir, out.reports, bland_altman(pooled_pred[0], pooled_ref[0]),
                           bland_altman(pooled_pred[1], pooled_ref[1]));
  return out;
}

std::size_t infer(const fs::path& model_path, const fs::path& record_path, const PipelineConfig& config,
                  std::ostream& out) {
  const MlpModel model = load_model(model_path);
  const RawRecord record = load_record(record_path);
  const auto estimates = infer_record(model, record, config);
  out << "beat_start_index,sbp,dbp,map\n";
  char line[128];
  for (const auto& e : estimates) {
    std::snprintf(line, sizeof line, "%zu,%.4f,%.4f,%.4f\n", e.start_index, e.bp[0], e.bp[1], e.bp[2]);
    out << line;
  }
  return estimates.size();
}

ProfileReport profile(const fs::path& model_path, const PipelineConfig& config, const ProfileOptions& options,
                      const fs::path& out_dir, std::ostream& table_out) {
  const MlpModel model = load_model(model_path);
  if (!(options.power_mw > 0.0)) throw Error(Errc::non_positive_power, "--power-mw must be positive");
  if (options.window_samples < 3) throw Error(Errc::too_short_signal, "--window-samples must be at least 3");

  RawRecord source;
  if (options.record) {
    source = load_record(*options.record);
  } else {
    SyntheticConfig sc;
    sc.fs = config.filter.fs;
    sc.n_beats = 16;
    sc.seed = config.seed;
    source = generate_synthetic_subject(sc).record;
  }
  if (source.ppg.size() < options.window_samples)
    throw Error(Errc::too_short_signal, "record shorter than the profiling window");
  FilterSpec spec = config.filter;
  spec.fs = source.fs;
  const std::span<const double> window = std::span<const double>(source.ppg).first(options.window_samples);

  const PreprocOpCount pre =
      count_preproc_ops(spec, options.window_samples, config.segmentation.min_distance, kBeatVectorLength);
  const AnnOpCount ann = count_ann_ops(model);
  LatencyOptions lopt;
  lopt.repetitions = options.repetitions;
  const StageLatency latency =
      measure_latency(spec, config.segmentation.min_distance, config.segmentation.clean, model, window, lopt);
  ProfileReport report = build_profile(pre, ann, latency, EnergyModel{options.power_mw, options.scale},
                                       options.window_samples);
  ensure_dir(out_dir);
  write_json(out_dir / "profile.json", profile_json(report));
  table_out << profile_table(report);
  return report;
}

void export_coeffs(const PipelineConfig& config, std::ostream& out) {
  out << coefficients_json(design_bandpass(config.filter), config.filter).dump(2) << '\n';
}

void export_model_json(const fs::path& model, std::ostream& out) { out << model_json(load_model(model)).dump(2) << '\n'; }

SyntheticSubject synth(const SyntheticConfig& config, const fs::path& out) {
  SyntheticSubject s = generate_synthetic_subject(config);
  ensure_dir(out.parent_path());
  save_record(s.record, out, guess_format(out));
  return s;
}

}  // namespace ppgbp::commands
