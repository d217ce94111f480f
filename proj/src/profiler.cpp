#include "ppgbp/profiler.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <vector>

#include "ppgbp/error.hpp"

namespace ppgbp {

AnnOpCount count_ann_ops(std::span<const std::size_t> sizes) {
  AnnOpCount c;
  std::uint64_t peak_live = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    c.mul_adds += static_cast<std::uint64_t>(sizes[l]) * sizes[l + 1];
    c.parameters += static_cast<std::uint64_t>(sizes[l]) * sizes[l + 1] + sizes[l + 1];
    if (l + 2 < sizes.size()) c.activations += sizes[l + 1];
    // The input vector belongs to the preprocessing stage's beat buffer.
    const std::uint64_t live = (l == 0 ? 0 : sizes[l]) + sizes[l + 1];
    peak_live = std::max(peak_live, live);
  }
  c.param_bytes = 4 * c.parameters;
  c.working_bytes = 4 * peak_live;
  return c;
}

AnnOpCount count_ann_ops(const MlpModel& model) { return count_ann_ops(model.layer_sizes); }

PreprocOpCount count_preproc_ops(const FilterSpec& spec, std::size_t window_len, std::size_t min_distance,
                                 std::size_t beat_len) {
  validate(spec);
  const std::uint64_t sections = static_cast<std::uint64_t>(spec.order);
  const std::uint64_t n = window_len;
  PreprocOpCount c;
  c.filter_mul_adds = sections * 9 * n;
  c.normalize_ops = 4 * n;
  c.peak_scan_ops = 2 * n;
  c.mul_adds = c.filter_mul_adds + c.normalize_ops + c.peak_scan_ops;
  if (window_len == 0) return c;
  const std::uint64_t max_peaks = n / (min_distance + 1) + 1;
  c.working_bytes = 4 * n                // sample window, filtered and normalized in place
                    + 4 * 2 * sections   // filter state
                    + 2 * max_peaks      // u16 peak indices
                    + 4 * beat_len;      // beat vector
  c.const_bytes = 4 * 5 * sections;
  return c;
}

namespace {

using clock_type = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// One preprocessing pass; returns the first beat vector (zeros if none survive).
BeatVector preprocess_once(const BiquadCascade& cascade, std::size_t min_distance, const CleanConfig& clean,
                           std::span<const double> window) {
  const auto filtered = apply_filter(cascade, window);
  BeatVector out;
  out.values.assign(kBeatVectorLength, 0.0);
  NormalizedSignal norm;
  try {
    norm = normalize_minmax(filtered);
  } catch (const Error&) {
    return out;
  }
  const PeakList peaks = detect_peaks(norm.samples, min_distance);
  if (peaks.indices.size() < 2) return out;
  const auto segments = segment_beats(norm.samples, peaks);
  const auto cleaned = clean_beats(segments, clean);
  if (cleaned.kept.empty()) return out;
  return to_vector(cleaned.kept.front());
}

}  // namespace

StageLatency measure_latency(const FilterSpec& spec, std::size_t min_distance, const CleanConfig& clean,
                             const MlpModel& model, std::span<const double> window, const LatencyOptions& options) {
  const BiquadCascade cascade = design_bandpass(spec);
  const std::size_t reps = std::max<std::size_t>(options.repetitions, 1);
  std::vector<double> pre_times, ann_times;
  pre_times.reserve(reps);
  ann_times.reserve(reps);
  volatile double sink = 0.0;
  BeatVector vec = preprocess_once(cascade, min_distance, clean, window);
  if (vec.values.size() != model.input_size()) vec.values.assign(model.input_size(), 0.0);

  for (std::size_t i = 0; i < options.warmup + reps; ++i) {
    const auto t0 = clock_type::now();
    const BeatVector v = preprocess_once(cascade, min_distance, clean, window);
    const auto t1 = clock_type::now();
    const auto y = forward_standardized(model, vec.values);
    const auto t2 = clock_type::now();
    sink = sink + v.values[0] + y[0];
    if (i < options.warmup) continue;
    pre_times.push_back(std::chrono::duration<double>(t1 - t0).count());
    ann_times.push_back(std::chrono::duration<double>(t2 - t1).count());
  }
  (void)sink;
  return {median(pre_times), median(ann_times)};
}

double model_energy(double target_latency_ms, double avg_power_mw) {
  if (!(avg_power_mw > 0.0)) throw Error(Errc::non_positive_power, "average power must be positive");
  return avg_power_mw * target_latency_ms / 1000.0;
}

ProfileReport build_profile(const PreprocOpCount& pre, const AnnOpCount& ann, const StageLatency& latency,
                            const EnergyModel& energy, std::size_t window_samples) {
  if (!(energy.avg_power_mw > 0.0)) throw Error(Errc::non_positive_power, "average power must be positive");
  ProfileReport r;
  r.window_samples = window_samples;
  r.energy = energy;

  StageCost& p = r.stages[0];
  p.stage = Stage::preprocessing;
  p.mul_adds = pre.mul_adds;
  p.mem_bytes_working = pre.working_bytes;
  p.mem_bytes_const = pre.const_bytes;
  p.host_latency_s = latency.preprocessing_s;

  StageCost& a = r.stages[1];
  a.stage = Stage::ann;
  a.mul_adds = ann.mul_adds;
  a.activations = ann.activations;
  a.mem_bytes_working = ann.working_bytes;
  a.mem_bytes_const = ann.param_bytes;
  a.host_latency_s = latency.ann_s;

  for (StageCost& s : r.stages) {
    s.target_latency_ms = s.host_latency_s * 1000.0 * energy.scale;
    s.energy_mj = model_energy(s.target_latency_ms, energy.avg_power_mw);
  }
  r.total.mul_adds = p.mul_adds + a.mul_adds;
  r.total.activations = p.activations + a.activations;
  r.total.mem_bytes_working = p.mem_bytes_working + a.mem_bytes_working;
  r.total.mem_bytes_const = p.mem_bytes_const + a.mem_bytes_const;
  r.total.host_latency_s = p.host_latency_s + a.host_latency_s;
  r.total.target_latency_ms = p.target_latency_ms + a.target_latency_ms;
  r.total.energy_mj = p.energy_mj + a.energy_mj;
  r.reference_energy_mj = model_energy(r.reference.total_latency_ms, energy.avg_power_mw);
  return r;
}

namespace {

const char* stage_name(Stage s) { return s == Stage::preprocessing ? "preprocessing" : "ann"; }

nlohmann::json stage_json(const StageCost& s, const char* name) {
  return nlohmann::json{{"stage", name},
                        {"mul_adds", s.mul_adds},
                        {"activations", s.activations},
                        {"mem_bytes_working", s.mem_bytes_working},
                        {"mem_bytes_const", s.mem_bytes_const},
                        {"host_latency_s", s.host_latency_s},
                        {"target_latency_ms", s.target_latency_ms},
                        {"energy_mj", s.energy_mj}};
}

double pct(double ours, double ref) { return ref != 0.0 ? 100.0 * (ours - ref) / ref : 0.0; }

}  // namespace

nlohmann::json profile_json(const ProfileReport& r) {
  const ReferenceEnvelope& ref = r.reference;
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.stages) stages.push_back(stage_json(s, stage_name(s.stage)));
  return nlohmann::json{
      {"window_samples", r.window_samples},
      {"energy_model", {{"avg_power_mw", r.energy.avg_power_mw}, {"scale", r.energy.scale}}},
      {"stages", stages},
      {"total", stage_json(r.total, "entire")},
      {"reference",
       {{"preprocessing", {{"latency_ms", ref.preproc_latency_ms}, {"power_mw", ref.preproc_power_mw},
                           {"energy_mj", ref.preproc_energy_mj}, {"ram_kb", ref.preproc_ram_kb},
                           {"flash_kb", ref.preproc_flash_kb}}},
        {"ann", {{"latency_ms", ref.ann_latency_ms}, {"power_mw", ref.ann_power_mw}, {"energy_mj", ref.ann_energy_mj},
                 {"ram_kb", ref.ann_ram_kb}, {"flash_kb", ref.ann_flash_kb}}},
        {"entire", {{"latency_ms", ref.total_latency_ms}, {"power_mw", ref.total_power_mw},
                    {"energy_mj", ref.total_energy_mj}, {"ram_kb", ref.total_ram_kb}}}}},
      {"reference_latency_modeled_energy_mj", r.reference_energy_mj},
      {"delta_pct",
       {{"latency", pct(r.total.target_latency_ms, ref.total_latency_ms)},
        {"energy", pct(r.total.energy_mj, ref.total_energy_mj)},
        {"ram", pct(static_cast<double>(r.total.mem_bytes_working) / 1024.0, ref.total_ram_kb)}}}};
}

std::string profile_table(const ProfileReport& r) {
  const ReferenceEnvelope& ref = r.reference;
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %12s %12s %12s %10s %10s %10s\n", "stage", "mul-adds", "target(ms)",
                "power(mW)", "energy(mJ)", "RAM(KB)", "const(KB)");
  out << line << std::string(std::string_view(line).size() - 1, '-') << '\n';
  auto row = [&](const char* name, const StageCost& s) {
    std::snprintf(line, sizeof line, "%-16s %12llu %12.4f %12.2f %10.4f %10.2f %10.2f\n", name,
                  static_cast<unsigned long long>(s.mul_adds), s.target_latency_ms, r.energy.avg_power_mw, s.energy_mj,
                  s.mem_bytes_working / 1024.0, s.mem_bytes_const / 1024.0);
    out << line;
  };
  row("Preprocessing", r.stages[0]);
  row("ANN", r.stages[1]);
  row("Entire solution", r.total);
  out << '\n' << "reference device (EFM32, " << r.window_samples << "-sample window):\n";
  std::snprintf(line, sizeof line, "%-16s %12.2f ms %10.3f mJ %8.1f KB RAM\n", "Preprocessing", ref.preproc_latency_ms,
                ref.preproc_energy_mj, ref.preproc_ram_kb);
  out << line;
  std::snprintf(line, sizeof line, "%-16s %12.2f ms %10.3f mJ %8.1f KB RAM\n", "ANN", ref.ann_latency_ms,
                ref.ann_energy_mj, ref.ann_ram_kb);
  out << line;
  std::snprintf(line, sizeof line, "%-16s %12.2f ms %10.3f mJ %8.1f KB RAM\n", "Entire solution", ref.total_latency_ms,
                ref.total_energy_mj, ref.total_ram_kb);
  out << line;
  std::snprintf(line, sizeof line, "delta vs reference: latency %+.1f%%, energy %+.1f%%, RAM %+.1f%%\n",
                pct(r.total.target_latency_ms, ref.total_latency_ms), pct(r.total.energy_mj, ref.total_energy_mj),
                pct(r.total.mem_bytes_working / 1024.0, ref.total_ram_kb));
  out << line;
  std::snprintf(line, sizeof line, "reference latency through this energy model: %.3f mJ\n", r.reference_energy_mj);
  out << line;
  return out.str();
}

}  // namespace ppgbp
