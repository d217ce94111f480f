#include "ppgbp/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ppgbp/error.hpp"
#include "ppgbp/kernels.hpp"

namespace ppgbp {

namespace {

using cplx = std::complex<double>;

// Extra attenuation in the prototype so the equiripple stopband peaks stay at
// or below the requested level after rounding.
constexpr double kStopbandMarginDb = 0.01;

struct Zpk {
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
  double gain = 1.0;
};

// Chebyshev type II analog lowpass prototype with its stopband edge at 1 rad/s.
Zpk cheby2_prototype(int order, double atten_db) {
  const double de = 1.0 / std::sqrt(std::pow(10.0, 0.1 * atten_db) - 1.0);
  const double mu = std::asinh(1.0 / de) / order;
  const double pi = std::numbers::pi;
  Zpk out;
  for (int m = -order + 1; m < order; m += 2) {
    if (m != 0) out.zeros.push_back(-std::conj(cplx(0.0, 1.0) / std::sin(m * pi / (2.0 * order))));
    cplx p = -std::exp(cplx(0.0, pi * m / (2.0 * order)));
    p = cplx(std::sinh(mu) * p.real(), std::cosh(mu) * p.imag());
    out.poles.push_back(1.0 / p);
  }
  cplx num(1.0), den(1.0);
  for (auto p : out.poles) num *= -p;
  for (auto z : out.zeros) den *= -z;
  out.gain = (num / den).real();
  return out;
}

// Lowpass (cutoff 1 rad/s) to bandpass with center `w0` and width `bw`.
Zpk lowpass_to_bandpass(const Zpk& lp, double w0, double bw) {
  Zpk out;
  auto split = [&](cplx r, std::vector<cplx>& dst) {
    const cplx half = r * bw / 2.0;
    const cplx disc = std::sqrt(half * half - w0 * w0);
    dst.push_back(half + disc);
    dst.push_back(half - disc);
  };
  for (auto z : lp.zeros) split(z, out.zeros);
  for (auto p : lp.poles) split(p, out.poles);
  const std::size_t degree = lp.poles.size() - lp.zeros.size();
  out.zeros.insert(out.zeros.end(), degree, cplx(0.0));
  out.gain = lp.gain * std::pow(bw, static_cast<double>(degree));
  return out;
}

Zpk bilinear(const Zpk& analog, double fs) {
  const double fs2 = 2.0 * fs;
  Zpk out;
  cplx num(1.0), den(1.0);
  for (auto z : analog.zeros) {
    out.zeros.push_back((fs2 + z) / (fs2 - z));
    num *= fs2 - z;
  }
  for (auto p : analog.poles) {
    out.poles.push_back((fs2 + p) / (fs2 - p));
    den *= fs2 - p;
  }
  out.zeros.insert(out.zeros.end(), analog.poles.size() - analog.zeros.size(), cplx(-1.0));
  out.gain = analog.gain * (num / den).real();
  return out;
}

// Groups roots into conjugate (or real) pairs, each given by one representative
// pair of values.
std::vector<std::pair<cplx, cplx>> conjugate_pairs(const std::vector<cplx>& roots) {
  std::vector<std::pair<cplx, cplx>> pairs;
  std::vector<double> reals;
  for (auto r : roots) {
    const double tol = 1e-10 * std::max(1.0, std::abs(r));
    if (std::abs(r.imag()) <= tol)
      reals.push_back(r.real());
    else if (r.imag() > 0)
      pairs.emplace_back(r, std::conj(r));
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i < reals.size(); i += 2) {
    cplx second = i + 1 < reals.size() ? cplx(reals[i + 1]) : cplx(0.0);
    pairs.emplace_back(cplx(reals[i]), second);
  }
  return pairs;
}

std::vector<Biquad> zpk_to_sections(const Zpk& digital, double f_center, double fs) {
  auto pole_pairs = conjugate_pairs(digital.poles);
  auto zero_pairs = conjugate_pairs(digital.zeros);
  if (zero_pairs.size() != pole_pairs.size())
    throw Error(Errc::numerical_failure, "pole/zero pairing produced unequal section counts");

  // Least resonant section first; each pole pair takes the closest zero pair.
  std::sort(pole_pairs.begin(), pole_pairs.end(),
            [](const auto& a, const auto& b) { return std::abs(a.first) < std::abs(b.first); });

  const cplx zc = std::exp(cplx(0.0, 2.0 * std::numbers::pi * f_center / fs));
  std::vector<Biquad> sections;
  double gain = digital.gain;
  for (const auto& [p1, p2] : pole_pairs) {
    auto best = std::min_element(zero_pairs.begin(), zero_pairs.end(), [&](const auto& a, const auto& b) {
      return std::abs(a.first - p1) < std::abs(b.first - p1);
    });
    auto [z1, z2] = *best;
    zero_pairs.erase(best);

    Biquad s;
    s.b0 = 1.0;
    s.b1 = -(z1 + z2).real();
    s.b2 = (z1 * z2).real();
    s.a1 = -(p1 + p2).real();
    s.a2 = (p1 * p2).real();
    const double mag = std::abs(s.response(zc));
    if (!(mag > 0.0) || !std::isfinite(mag))
      throw Error(Errc::numerical_failure, "section has no gain at the band center");
    s.b0 /= mag;
    s.b1 /= mag;
    s.b2 /= mag;
    gain *= mag;
    sections.push_back(s);
  }
  Biquad& first = sections.front();
  first.b0 *= gain;
  first.b1 *= gain;
  first.b2 *= gain;
  return sections;
}

}  // namespace

void validate(const FilterSpec& spec) {
  auto bad = [](const std::string& msg) { throw Error(Errc::invalid_spec, msg); };
  if (!std::isfinite(spec.fs) || !(spec.fs > 0.0)) bad("fs must be positive");
  if (!(spec.low_cut > 0.0)) bad("low_cut must be positive");
  if (!(spec.low_cut < spec.high_cut)) bad("low_cut must be below high_cut");
  if (!(spec.high_cut < spec.fs / 2.0)) bad("high_cut must be below fs/2");
  if (!(spec.stop_high() < spec.fs / 2.0)) bad("upper stopband edge (2*high_cut) must be below fs/2");
  if (spec.order < 2 || spec.order % 2 != 0 || spec.order > 32) bad("order must be even and in [2, 32]");
  if (!std::isfinite(spec.stopband_atten_db) || !(spec.stopband_atten_db > 0.0))
    bad("stopband_atten_db must be positive");
}

void to_json(nlohmann::json& j, const FilterSpec& spec) {
  j = nlohmann::json{{"fs", spec.fs},
                     {"low_cut", spec.low_cut},
                     {"high_cut", spec.high_cut},
                     {"order", spec.order},
                     {"stopband_atten_db", spec.stopband_atten_db}};
}

void from_json(const nlohmann::json& j, FilterSpec& spec) {
  spec.fs = j.value("fs", spec.fs);
  spec.low_cut = j.value("low_cut", spec.low_cut);
  spec.high_cut = j.value("high_cut", spec.high_cut);
  spec.order = j.value("order", spec.order);
  spec.stopband_atten_db = j.value("stopband_atten_db", spec.stopband_atten_db);
}

std::complex<double> Biquad::response(std::complex<double> z) const {
  const cplx zi = 1.0 / z;
  return (b0 + zi * (b1 + zi * b2)) / (1.0 + zi * (a1 + zi * a2));
}

std::pair<std::complex<double>, std::complex<double>> Biquad::poles() const {
  const cplx disc = std::sqrt(cplx(a1 * a1 - 4.0 * a2));
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

BiquadCascade::BiquadCascade(std::vector<Biquad> sections)
    : sections_(std::move(sections)), state_(sections_.size()) {}

void BiquadCascade::process(std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size()) throw Error(Errc::length_mismatch, "filter output buffer size differs from input");
  for (double x : in)
    if (!std::isfinite(x)) throw Error(Errc::non_finite_sample, "filter input contains NaN or infinity");
  for (std::size_t i = 0; i < in.size(); ++i) {
    double x = in[i];
    for (std::size_t k = 0; k < sections_.size(); ++k) {
      const Biquad& c = sections_[k];
      State& st = state_[k];
      const double y = c.b0 * x + st.s1;
      st.s1 = c.b1 * x - c.a1 * y + st.s2;
      st.s2 = c.b2 * x - c.a2 * y;
      x = y;
    }
    out[i] = x;
  }
}

std::vector<double> BiquadCascade::process(std::span<const double> in) {
  std::vector<double> out(in.size());
  process(in, out);
  return out;
}

double BiquadCascade::process_sample(double x) {
  double y = 0.0;
  process(std::span<const double>(&x, 1), std::span<double>(&y, 1));
  return y;
}

void BiquadCascade::reset() { std::fill(state_.begin(), state_.end(), State{}); }

bool BiquadCascade::is_reset() const {
  return std::all_of(state_.begin(), state_.end(), [](const State& s) { return s.s1 == 0.0 && s.s2 == 0.0; });
}

std::complex<double> BiquadCascade::response(double f, double fs) const {
  const cplx z = std::exp(cplx(0.0, 2.0 * std::numbers::pi * f / fs));
  cplx h(1.0);
  for (const auto& s : sections_) h *= s.response(z);
  return h;
}

double BiquadCascade::magnitude_db(double f, double fs) const { return 20.0 * std::log10(std::abs(response(f, fs))); }

bool BiquadCascade::is_stable() const {
  return std::all_of(sections_.begin(), sections_.end(), [](const Biquad& s) {
    auto [p1, p2] = s.poles();
    return std::abs(p1) < 1.0 && std::abs(p2) < 1.0;
  });
}

BiquadCascade design_bandpass(const FilterSpec& spec) {
  validate(spec);
  const double pi = std::numbers::pi;
  // Pre-warped stopband edges (rad/s) for the bilinear transform.
  const double w1 = 2.0 * spec.fs * std::tan(pi * spec.stop_low() / spec.fs);
  const double w2 = 2.0 * spec.fs * std::tan(pi * spec.stop_high() / spec.fs);

  const Zpk proto = cheby2_prototype(spec.order, spec.stopband_atten_db + kStopbandMarginDb);
  const Zpk analog = lowpass_to_bandpass(proto, std::sqrt(w1 * w2), w2 - w1);
  const Zpk digital = bilinear(analog, spec.fs);

  for (auto p : digital.poles)
    if (!(std::abs(p) < 1.0))
      throw Error(Errc::numerical_failure, "designed pole on or outside the unit circle (|p| = " +
                                               std::to_string(std::abs(p)) + ")");

  BiquadCascade cascade(zpk_to_sections(digital, std::sqrt(spec.low_cut * spec.high_cut), spec.fs));
  if (!cascade.is_stable()) throw Error(Errc::numerical_failure, "section coefficients are unstable");
  return cascade;
}

std::vector<double> apply_filter(const BiquadCascade& cascade, std::span<const double> signal) {
  BiquadCascade fresh(cascade.sections());
  return fresh.process(signal);
}

nlohmann::json coefficients_json(const BiquadCascade& cascade, const FilterSpec& spec) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& s : cascade.sections())
    sections.push_back({{"b0", s.b0}, {"b1", s.b1}, {"b2", s.b2}, {"a0", 1.0}, {"a1", s.a1}, {"a2", s.a2}});
  return nlohmann::json{{"spec", spec},
                        {"stopband_edges_hz", {spec.stop_low(), spec.stop_high()}},
                        {"form", "transposed-direct-form-II"},
                        {"sections", sections}};
}

NormalizedSignal normalize_minmax(std::span<const double> signal) {
  if (signal.empty()) throw Error(Errc::empty_input, "cannot normalize an empty signal");
  for (double x : signal)
    if (!std::isfinite(x)) throw Error(Errc::non_finite_sample, "normalization input contains NaN or infinity");
  const auto [lo, hi] = kernels::minmax(signal);
  if (!(hi > lo)) throw Error(Errc::constant_signal, "max equals min, normalization undefined");
  NormalizedSignal out;
  out.source_min = lo;
  out.source_max = hi;
  out.samples.resize(signal.size());
  const double range = hi - lo;
  for (std::size_t i = 0; i < signal.size(); ++i) out.samples[i] = (signal[i] - lo) / range;
  return out;
}

}  // namespace ppgbp
