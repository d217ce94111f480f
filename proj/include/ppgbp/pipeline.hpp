#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "ppgbp/dataset.hpp"
#include "ppgbp/dsp.hpp"
#include "ppgbp/mlp.hpp"
#include "ppgbp/record.hpp"
#include "ppgbp/segmentation.hpp"

namespace ppgbp {

struct SegmentationConfig {
  std::size_t min_distance = 30;
  CleanConfig clean;
};

/// Every stage's settings; defaults are the reference pipeline constants.
struct PipelineConfig {
  FilterSpec filter;
  SegmentationConfig segmentation;
  double label_k = 5.0;
  TrainConfig train;
  std::uint64_t seed = 42;
};

void validate(const PipelineConfig& config);
void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);
PipelineConfig load_config(const std::filesystem::path& path);

/// Beats of one record after filtering, normalization, peak detection,
/// segmentation and cleaning. Indices refer to the record's samples.
struct SegmentedRecord {
  std::vector<BeatSegment> beats;
  CleaningStats cleaning;
  AmplitudeStats amplitude;
  std::size_t peak_count = 0;
  NormalizedSignal normalized;
};

/// The filter is designed at the record's sampling rate.
SegmentedRecord segment_record(const RawRecord& record, const PipelineConfig& config);

struct PreparedRecord {
  std::string subject_id;
  BeatDataset beats;
  std::vector<std::size_t> start_indices;
  CleaningStats cleaning;
  std::size_t peak_count = 0;
  std::size_t label_removed = 0;
  LabelStats label_stats_all;  // before the label screen
  LabelStats label_stats;      // of the kept beats
};

/// Segments the record and labels each beat from the ABP over the same
/// sample range, then drops label outliers. Requires ABP.
PreparedRecord prepare_record(const RawRecord& record, const PipelineConfig& config);

nlohmann::json prepare_sidecar(const PreparedRecord& prepared, const PipelineConfig& config);

struct BeatEstimate {
  std::size_t start_index = 0;
  BpOutput bp{};
};

/// Per-beat estimates for every beat surviving segmentation cleaning.
std::vector<BeatEstimate> infer_record(const MlpModel& model, const RawRecord& record, const PipelineConfig& config);

}  // namespace ppgbp
