#include "ppgbp/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ppgbp/error.hpp"

namespace ppgbp {

std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> out;
  const std::size_t n = x.size();
  if (n < 3) return out;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        out.push_back(i);
        i = ahead;
        continue;
      }
      // plateau running into the last sample or rising again
      i = ahead;
      continue;
    }
    ++i;
  }
  return out;
}

PeakList detect_peaks(std::span<const double> signal, std::size_t min_distance) {
  if (signal.size() < 3)
    throw Error(Errc::too_short_signal, "peak detection needs at least 3 samples, got " + std::to_string(signal.size()));
  std::vector<std::size_t> candidates = local_maxima(signal);

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return signal[candidates[a]] > signal[candidates[b]]; });

  std::vector<bool> keep(candidates.size(), true);
  for (std::size_t rank : order) {
    if (!keep[rank]) continue;
    const std::size_t p = candidates[rank];
    for (std::size_t j = rank; j-- > 0 && p - candidates[j] <= min_distance;) keep[j] = false;
    for (std::size_t j = rank + 1; j < candidates.size() && candidates[j] - p <= min_distance; ++j) keep[j] = false;
  }

  PeakList peaks;
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (keep[k]) peaks.indices.push_back(candidates[k]);
  return peaks;
}

double BeatSegment::amplitude() const {
  if (samples.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  return *hi - *lo;
}

std::vector<BeatSegment> segment_beats(std::span<const double> signal, const PeakList& peaks) {
  const auto& idx = peaks.indices;
  if (idx.size() < 2) throw Error(Errc::too_few_peaks, "segmentation needs at least 2 peaks, got " + std::to_string(idx.size()));
  std::vector<BeatSegment> out;
  out.reserve(idx.size() - 1);
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    if (idx[i] >= idx[i + 1] || idx[i + 1] > signal.size())
      throw Error(Errc::degenerate_input, "peak indices must be strictly increasing and inside the signal");
    BeatSegment seg;
    seg.start_index = idx[i];
    seg.samples.assign(signal.begin() + static_cast<std::ptrdiff_t>(idx[i]),
                       signal.begin() + static_cast<std::ptrdiff_t>(idx[i + 1]));
    out.push_back(std::move(seg));
  }
  return out;
}

namespace {

bool length_ok(const BeatSegment& s, const CleanConfig& c) { return s.size() >= c.min_len && s.size() <= c.max_len; }

AmplitudeStats amplitude_stats(std::span<const BeatSegment> segments, const CleanConfig& config) {
  std::vector<double> amps;
  for (const auto& s : segments)
    if (length_ok(s, config)) amps.push_back(s.amplitude());
  if (amps.empty()) return {};
  const double n = static_cast<double>(amps.size());
  double shift = 0.0;
  for (double a : amps) shift += a - amps.front();
  const double mean = amps.front() + shift / n;
  double var = 0.0;
  for (double a : amps) var += (a - mean) * (a - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

CleanResult clean_beats(std::span<const BeatSegment> segments, const CleanConfig& config,
                        const AmplitudeStats& frozen) {
  if (segments.empty()) throw Error(Errc::empty_input, "no segments to clean");
  CleanResult out;
  out.amplitude = frozen;
  out.stats.total_beats = segments.size();
  const double lo = frozen.mean - config.amp_k * frozen.std;
  const double hi = frozen.mean + config.amp_k * frozen.std;
  for (const auto& s : segments) {
    if (!length_ok(s, config)) {
      ++out.stats.removed_length;
      continue;
    }
    const double a = s.amplitude();
    if (a < lo || a > hi) {
      ++out.stats.removed_amplitude;
      continue;
    }
    out.kept.push_back(s);
  }
  out.stats.removed_fraction =
      static_cast<double>(out.stats.removed_length + out.stats.removed_amplitude) / static_cast<double>(segments.size());
  return out;
}

CleanResult clean_beats(std::span<const BeatSegment> segments, const CleanConfig& config) {
  if (segments.empty()) throw Error(Errc::empty_input, "no segments to clean");
  return clean_beats(segments, config, amplitude_stats(segments, config));
}

BeatVector to_vector(const BeatSegment& segment, std::size_t target_len) {
  if (segment.size() > target_len)
    throw Error(Errc::segment_too_long, "segment of " + std::to_string(segment.size()) + " samples exceeds " +
                                            std::to_string(target_len));
  BeatVector v;
  v.values.assign(target_len, 0.0);
  std::copy(segment.samples.begin(), segment.samples.end(), v.values.begin());
  v.valid_len = segment.size();
  return v;
}

}  // namespace ppgbp
