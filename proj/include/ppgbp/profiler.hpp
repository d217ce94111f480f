#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "ppgbp/dsp.hpp"
#include "ppgbp/mlp.hpp"
#include "ppgbp/segmentation.hpp"

namespace ppgbp {

/// Figures measured on the EFM32 Leopard Gecko reference device.
struct ReferenceEnvelope {
  double preproc_latency_ms = 22.48, preproc_power_mw = 50.73, preproc_energy_mj = 1.140;
  double ann_latency_ms = 20.71, ann_power_mw = 50.58, ann_energy_mj = 1.047;
  double total_latency_ms = 42.25, total_power_mw = 50.58, total_energy_mj = 2.137;
  double preproc_ram_kb = 18.1, preproc_flash_kb = 27.0;
  double ann_ram_kb = 0.1, ann_flash_kb = 6.1;
  double total_ram_kb = 18.2;
};

struct AnnOpCount {
  std::uint64_t mul_adds = 0;     // sum over layers of in*out
  std::uint64_t activations = 0;  // hidden units
  std::uint64_t parameters = 0;
  std::uint64_t param_bytes = 0;    // f32
  std::uint64_t working_bytes = 0;  // live activation buffers, f32
};

AnnOpCount count_ann_ops(const MlpModel& model);
AnnOpCount count_ann_ops(std::span<const std::size_t> layer_sizes);

struct PreprocOpCount {
  std::uint64_t filter_mul_adds = 0;  // 9 per section per sample (5 mul + 4 add)
  std::uint64_t normalize_ops = 0;    // min/max scan plus subtract and scale
  std::uint64_t peak_scan_ops = 0;    // two neighbour comparisons per sample
  std::uint64_t mul_adds = 0;         // sum of the above
  std::uint64_t working_bytes = 0;
  std::uint64_t const_bytes = 0;  // f32 coefficients
};

PreprocOpCount count_preproc_ops(const FilterSpec& spec, std::size_t window_len = 375,
                                 std::size_t min_distance = 30, std::size_t beat_len = kBeatVectorLength);

struct LatencyOptions {
  std::size_t repetitions = 30;
  std::size_t warmup = 3;
};

struct StageLatency {
  double preprocessing_s = 0.0;
  double ann_s = 0.0;
};

/// Median host wall time (steady clock) of one reading per stage.
StageLatency measure_latency(const FilterSpec& spec, std::size_t min_distance, const CleanConfig& clean,
                             const MlpModel& model, std::span<const double> window, const LatencyOptions& options = {});

struct EnergyModel {
  double avg_power_mw = 50.58;
  double scale = 1.0;  // target latency / host latency
};

/// mJ = mW * ms / 1000.
double model_energy(double target_latency_ms, double avg_power_mw);

enum class Stage { preprocessing, ann };

struct StageCost {
  Stage stage = Stage::preprocessing;
  std::uint64_t mul_adds = 0;
  std::uint64_t activations = 0;
  std::uint64_t mem_bytes_working = 0;
  std::uint64_t mem_bytes_const = 0;
  double host_latency_s = 0.0;
  double target_latency_ms = 0.0;
  double energy_mj = 0.0;
};

struct ProfileReport {
  std::size_t window_samples = 0;
  EnergyModel energy;
  std::array<StageCost, 2> stages{};
  StageCost total;
  ReferenceEnvelope reference;
  double reference_energy_mj = 0.0;  // reference total latency through this energy model
};

ProfileReport build_profile(const PreprocOpCount& pre, const AnnOpCount& ann, const StageLatency& latency,
                            const EnergyModel& energy, std::size_t window_samples);

nlohmann::json profile_json(const ProfileReport& report);
/// Per-stage latency, power and energy rows plus op counts, memory and deltas against the reference.
std::string profile_table(const ProfileReport& report);

}  // namespace ppgbp
