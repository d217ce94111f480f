#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace ppgbp {

/// Inverse Chebyshev (type II) bandpass parameters.
///
/// `low_cut`/`high_cut` are the passband edges. The design places the
/// stopband edges one octave outside them (low_cut/2, high_cut*2), where the
/// attenuation reaches `stopband_atten_db`. `order` is the analog lowpass
/// prototype order, so the bandpass has `order` second-order sections.
struct FilterSpec {
  double fs = 125.0;
  double low_cut = 0.4;
  double high_cut = 8.0;
  int order = 4;
  double stopband_atten_db = 40.0;

  double stop_low() const { return low_cut / 2.0; }
  double stop_high() const { return high_cut * 2.0; }
};

/// Throws invalid_spec if any field is out of range.
void validate(const FilterSpec& spec);

void to_json(nlohmann::json& j, const FilterSpec& spec);
void from_json(const nlohmann::json& j, FilterSpec& spec);

struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;  // a0 == 1

  std::complex<double> response(std::complex<double> z) const;
  /// Roots of z^2 + a1 z + a2.
  std::pair<std::complex<double>, std::complex<double>> poles() const;
};

/// Cascade of transposed direct-form II sections with per-section state.
/// Not safe for concurrent use; one cascade per stream.
class BiquadCascade {
 public:
  BiquadCascade() = default;
  explicit BiquadCascade(std::vector<Biquad> sections);

  const std::vector<Biquad>& sections() const { return sections_; }
  std::size_t size() const { return sections_.size(); }

  /// Streaming step: filters `in` into `out` (same length, may alias) carrying state across calls.
  void process(std::span<const double> in, std::span<double> out);
  std::vector<double> process(std::span<const double> in);
  double process_sample(double x);

  void reset();
  bool is_reset() const;

  /// H(e^{j 2 pi f / fs}).
  std::complex<double> response(double f, double fs) const;
  double magnitude_db(double f, double fs) const;
  bool is_stable() const;

 private:
  struct State {
    double s1 = 0.0, s2 = 0.0;
  };
  std::vector<Biquad> sections_;
  std::vector<State> state_;
};

BiquadCascade design_bandpass(const FilterSpec& spec);

/// Zero-state filtering; the passed cascade is not modified.
std::vector<double> apply_filter(const BiquadCascade& cascade, std::span<const double> signal);

nlohmann::json coefficients_json(const BiquadCascade& cascade, const FilterSpec& spec);

struct NormalizedSignal {
  std::vector<double> samples;
  double source_min = 0.0;
  double source_max = 0.0;
};

/// (x - min) / (max - min) over the whole sequence.
NormalizedSignal normalize_minmax(std::span<const double> signal);

}  // namespace ppgbp
