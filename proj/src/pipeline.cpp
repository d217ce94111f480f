#include "ppgbp/pipeline.hpp"

#include <fstream>

#include "ppgbp/error.hpp"

namespace ppgbp {

void validate(const PipelineConfig& c) {
  validate(c.filter);
  validate(c.train);
  const auto& s = c.segmentation;
  if (s.min_distance < 1) throw Error(Errc::invalid_spec, "min_distance must be >= 1");
  if (s.clean.min_len > s.clean.max_len) throw Error(Errc::invalid_spec, "min_len exceeds max_len");
  if (s.clean.max_len > kBeatVectorLength)
    throw Error(Errc::invalid_spec, "max_len cannot exceed the beat vector length " + std::to_string(kBeatVectorLength));
  if (!(s.clean.amp_k > 0.0)) throw Error(Errc::invalid_spec, "amp_k must be positive");
  if (!(c.label_k > 0.0)) throw Error(Errc::invalid_spec, "label_k must be positive");
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json{{"filter", c.filter},
                     {"segmentation",
                      {{"min_distance", c.segmentation.min_distance},
                       {"min_len", c.segmentation.clean.min_len},
                       {"max_len", c.segmentation.clean.max_len},
                       {"amp_k", c.segmentation.clean.amp_k}}},
                     {"label_k", c.label_k},
                     {"train", c.train},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  if (j.contains("filter")) j.at("filter").get_to(c.filter);
  if (j.contains("segmentation")) {
    const auto& s = j.at("segmentation");
    c.segmentation.min_distance = s.value("min_distance", c.segmentation.min_distance);
    c.segmentation.clean.min_len = s.value("min_len", c.segmentation.clean.min_len);
    c.segmentation.clean.max_len = s.value("max_len", c.segmentation.clean.max_len);
    c.segmentation.clean.amp_k = s.value("amp_k", c.segmentation.clean.amp_k);
  }
  c.label_k = j.value("label_k", c.label_k);
  c.seed = j.value("seed", c.seed);
  // A top-level seed also seeds training unless train.seed is given.
  if (j.contains("seed")) c.train.seed = c.seed;
  if (j.contains("train")) j.at("train").get_to(c.train);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config '" + path.string() + "'");
  PipelineConfig c;
  try {
    nlohmann::json::parse(in).get_to(c);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  validate(c);
  return c;
}

SegmentedRecord segment_record(const RawRecord& record, const PipelineConfig& config) {
  validate(record);
  FilterSpec spec = config.filter;
  spec.fs = record.fs;
  const BiquadCascade cascade = design_bandpass(spec);
  SegmentedRecord out;
  out.normalized = normalize_minmax(apply_filter(cascade, record.ppg));
  const PeakList peaks = detect_peaks(out.normalized.samples, config.segmentation.min_distance);
  out.peak_count = peaks.indices.size();
  const auto segments = segment_beats(out.normalized.samples, peaks);
  CleanResult cleaned = clean_beats(segments, config.segmentation.clean);
  out.beats = std::move(cleaned.kept);
  out.cleaning = cleaned.stats;
  out.amplitude = cleaned.amplitude;
  return out;
}

PreparedRecord prepare_record(const RawRecord& record, const PipelineConfig& config) {
  if (!record.has_abp())
    throw Error(Errc::labels_unavailable, "record '" + record.subject_id + "' has no ABP channel");
  SegmentedRecord seg = segment_record(record, config);
  const auto& abp = *record.abp;

  std::vector<BpLabel> labels;
  labels.reserve(seg.beats.size());
  for (const auto& b : seg.beats)
    labels.push_back(extract_bp_label(std::span<const double>(abp).subspan(b.start_index, b.size())));

  PreparedRecord out;
  out.subject_id = record.subject_id;
  out.cleaning = seg.cleaning;
  out.peak_count = seg.peak_count;
  const LabelScreen screen = discard_label_outliers(labels, config.label_k);
  out.label_removed = screen.removed_count;
  out.label_stats_all = screen.stats;
  out.label_stats = label_stats(screen.kept);
  for (std::size_t i = 0; i < screen.kept.size(); ++i) {
    const BeatSegment& b = seg.beats[screen.kept_indices[i]];
    out.beats.push_back(LabeledBeat{to_vector(b), screen.kept[i]});
    out.start_indices.push_back(b.start_index);
  }
  return out;
}

namespace {

nlohmann::json stats_json(const LabelStats& s) {
  return nlohmann::json{{"mean_sbp", s.mean_sbp}, {"std_sbp", s.std_sbp}, {"mean_dbp", s.mean_dbp},
                        {"std_dbp", s.std_dbp},   {"mean_map", s.mean_map}, {"std_map", s.std_map}};
}

}  // namespace

nlohmann::json prepare_sidecar(const PreparedRecord& p, const PipelineConfig& config) {
  return nlohmann::json{{"subject_id", p.subject_id},
                        {"n_beats", p.beats.size()},
                        {"peak_count", p.peak_count},
                        {"cleaning",
                         {{"total_beats", p.cleaning.total_beats},
                          {"removed_length", p.cleaning.removed_length},
                          {"removed_amplitude", p.cleaning.removed_amplitude},
                          {"removed_fraction", p.cleaning.removed_fraction}}},
                        {"label_screen", {{"k", config.label_k}, {"removed_count", p.label_removed},
                                          {"stats_before", stats_json(p.label_stats_all)}}},
                        {"label_stats", stats_json(p.label_stats)},
                        {"config", config}};
}

std::vector<BeatEstimate> infer_record(const MlpModel& model, const RawRecord& record, const PipelineConfig& config) {
  validate(model);
  if (model.input_size() != kBeatVectorLength)
    throw Error(Errc::dimension_mismatch, "model expects " + std::to_string(model.input_size()) +
                                              " inputs, beat vectors have " + std::to_string(kBeatVectorLength));
  const SegmentedRecord seg = segment_record(record, config);
  std::vector<BeatEstimate> out;
  out.reserve(seg.beats.size());
  for (const auto& b : seg.beats) {
    // Match the precision the model was trained on.
    BeatVector v = to_vector(b);
    for (auto& x : v.values) x = static_cast<float>(x);
    out.push_back(BeatEstimate{b.start_index, forward(model, v.values)});
  }
  return out;
}

}  // namespace ppgbp
