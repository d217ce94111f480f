#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ppgbp {

inline constexpr std::size_t kBeatVectorLength = 160;

/// Strictly increasing sample indices of systolic peaks.
struct PeakList {
  std::vector<std::size_t> indices;
};

/// Local maxima (strictly above the left neighbour, strictly above the first
/// differing right neighbour; plateaus report their leftmost sample), thinned
/// greedily by descending amplitude so survivors are more than `min_distance`
/// samples apart.
PeakList detect_peaks(std::span<const double> signal, std::size_t min_distance = 30);

/// Candidate local maxima before distance thinning.
std::vector<std::size_t> local_maxima(std::span<const double> signal);

struct BeatSegment {
  std::vector<double> samples;
  std::size_t start_index = 0;

  std::size_t size() const { return samples.size(); }
  /// max - min; 0 for an empty segment.
  double amplitude() const;
};

/// Peak-to-peak segments [p_i, p_{i+1}).
std::vector<BeatSegment> segment_beats(std::span<const double> signal, const PeakList& peaks);

struct CleanConfig {
  std::size_t min_len = 30;
  std::size_t max_len = 160;
  double amp_k = 2.0;
};

struct AmplitudeStats {
  double mean = 0.0;
  double std = 0.0;
};

struct CleaningStats {
  std::size_t total_beats = 0;
  std::size_t removed_length = 0;
  std::size_t removed_amplitude = 0;
  double removed_fraction = 0.0;
};

struct CleanResult {
  std::vector<BeatSegment> kept;
  CleaningStats stats;
  AmplitudeStats amplitude;  // over length-valid segments
};

/// Length rule first, then amplitude (max - min) outside mean +- amp_k*std.
CleanResult clean_beats(std::span<const BeatSegment> segments, const CleanConfig& config = {});

/// Same rules with frozen amplitude statistics.
CleanResult clean_beats(std::span<const BeatSegment> segments, const CleanConfig& config,
                        const AmplitudeStats& frozen);

/// One beat zero-padded to a fixed length.
struct BeatVector {
  std::vector<double> values;
  std::size_t valid_len = 0;

  std::span<const double> valid() const { return std::span<const double>(values).first(valid_len); }
};

BeatVector to_vector(const BeatSegment& segment, std::size_t target_len = kBeatVectorLength);

}  // namespace ppgbp
