#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppgbp {

/// Synchronized PPG (and optionally ABP) streams sharing one time base.
struct RawRecord {
  std::string subject_id;
  double fs = 125.0;
  std::vector<double> ppg;
  std::optional<std::vector<double>> abp;  // mmHg

  std::size_t size() const { return ppg.size(); }
  bool has_abp() const { return abp.has_value(); }
};

enum class RecordFormat { csv, binary };

/// Picks the format from the extension: ".csv" is CSV, anything else binary.
RecordFormat guess_format(const std::filesystem::path& path);

RawRecord load_record(const std::filesystem::path& path, RecordFormat format);
RawRecord load_record(const std::filesystem::path& path);

/// CSV parsing from memory; `origin` only labels error messages.
RawRecord parse_csv_record(const std::string& text, const std::string& origin = "<memory>");

void save_record(const RawRecord& record, const std::filesystem::path& path, RecordFormat format);

/// Throws if the record violates its invariants.
void validate(const RawRecord& record);

struct BpLabel {
  double sbp = 0.0;
  double dbp = 0.0;
  double map = 0.0;
};

/// MAP = (2*DBP + SBP) / 3.
constexpr double mean_arterial(double sbp, double dbp) { return (2.0 * dbp + sbp) / 3.0; }

/// SBP/DBP are the beat's ABP maximum/minimum.
BpLabel extract_bp_label(std::span<const double> abp_beat);

struct LabelStats {
  double mean_sbp = 0.0, std_sbp = 0.0;
  double mean_dbp = 0.0, std_dbp = 0.0;
  double mean_map = 0.0, std_map = 0.0;
};

/// Arithmetic mean and population standard deviation per field.
LabelStats label_stats(std::span<const BpLabel> labels);

struct LabelScreen {
  std::vector<BpLabel> kept;
  std::vector<std::size_t> kept_indices;  // positions in the input
  std::size_t removed_count = 0;
  LabelStats stats;  // statistics the screen was computed with
};

/// Drops labels with any field outside mean +- k*std, statistics taken once over the input.
LabelScreen discard_label_outliers(std::span<const BpLabel> labels, double k = 5.0);

/// Same rule with caller-supplied statistics.
LabelScreen discard_label_outliers(std::span<const BpLabel> labels, const LabelStats& stats, double k);

}  // namespace ppgbp
