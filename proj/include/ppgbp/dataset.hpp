#pragma once

#include <filesystem>
#include <vector>

#include "ppgbp/record.hpp"
#include "ppgbp/segmentation.hpp"

namespace ppgbp {

struct LabeledBeat {
  BeatVector vector;
  BpLabel label;
};

using BeatDataset = std::vector<LabeledBeat>;

/// "BEAT" file: little-endian, u32 version, u32 n, then per beat u16 valid_len,
/// 160 f32 values and f32 sbp, dbp, map.
void save_dataset(const BeatDataset& beats, const std::filesystem::path& path);
BeatDataset load_dataset(const std::filesystem::path& path);

/// Rounds values and labels to what the file stores, so in-memory data equals a reload.
void quantize_to_file_precision(BeatDataset& beats);

}  // namespace ppgbp
