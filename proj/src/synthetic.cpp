#include "ppgbp/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "ppgbp/error.hpp"
#include "rng.hpp"

namespace ppgbp {

namespace {

struct BeatShape {
  double onset, period, amp, width, reflect, sbp, dbp;
};

inline double gauss(double t, double mu, double sigma) {
  const double u = (t - mu) / sigma;
  return std::exp(-0.5 * u * u);
}

// Offsets from beat onset, seconds.
constexpr double kSystolicDelay = 0.20;     // PPG systolic peak
constexpr double kReflectedDelay = 0.39;    // PPG reflected wave
constexpr double kAbpPeakDelay = 0.10;      // ABP systolic peak
constexpr double kAbpDicroticDelay = 0.30;  // ABP dicrotic wave
constexpr double kAbpWidth = 0.045;
constexpr double kAbpDicroticWidth = 0.06;
constexpr double kAbpDicroticRatio = 0.3;
constexpr double kSupport = 1.0;  // only beats within this many seconds contribute

}  // namespace

SyntheticSubject generate_synthetic_subject(const SyntheticConfig& cfg) {
  if (!(cfg.fs > 0.0) || cfg.n_beats < 3) throw Error(Errc::invalid_spec, "synthetic subject needs fs > 0 and >= 3 beats");
  if (!(cfg.latent_rho >= 0.0 && cfg.latent_rho < 1.0)) throw Error(Errc::invalid_spec, "latent_rho must be in [0, 1)");
  rng::Engine engine(cfg.seed);
  std::array<double, 4> z{};
  for (auto& v : z) v = rng::normal(engine);
  const double innov = std::sqrt(1.0 - cfg.latent_rho * cfg.latent_rho);

  std::vector<BeatShape> beats;
  beats.reserve(cfg.n_beats);
  double t = 0.5;
  for (std::size_t k = 0; k < cfg.n_beats; ++k) {
    for (auto& v : z) v = cfg.latent_rho * v + innov * rng::normal(engine);
    const double resp = std::sin(2.0 * std::numbers::pi * 0.25 * t);
    BeatShape b;
    b.onset = t;
    b.period = std::clamp(0.80 + 0.07 * z[3] + 0.02 * resp, 0.55, 1.10);
    b.amp = std::max(0.4, 1.0 + 0.18 * z[0]);
    b.width = 0.055 * std::max(0.6, 1.0 + 0.15 * z[1]);
    b.reflect = std::clamp(0.45 + 0.12 * z[2], 0.1, 0.8);
    b.sbp = 118.0 + 11.0 * z[0] - 4.0 * z[1] + 4.0 * z[2] + cfg.sbp_noise_mmhg * rng::normal(engine);
    b.dbp = 68.0 + 3.5 * z[0] + 2.5 * z[2] - 2.5 * z[3] + cfg.dbp_noise_mmhg * rng::normal(engine);
    b.dbp = std::min(b.dbp, b.sbp - 15.0);
    beats.push_back(b);
    t += b.period;
  }

  const auto n = static_cast<std::size_t>(std::ceil((t + 0.5) * cfg.fs));
  std::vector<double> ppg(n, 0.0), abp(n, 0.0);

  // Diastolic baseline interpolated between onsets.
  std::size_t cur = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) / cfg.fs;
    while (cur + 1 < beats.size() && beats[cur + 1].onset <= ti) ++cur;
    const BeatShape& a = beats[cur];
    if (ti < a.onset) {
      abp[i] = a.dbp;
    } else if (cur + 1 < beats.size()) {
      const BeatShape& b = beats[cur + 1];
      const double u = (ti - a.onset) / (b.onset - a.onset);
      abp[i] = a.dbp + u * (b.dbp - a.dbp);
    } else {
      abp[i] = a.dbp;
    }
  }

  for (const BeatShape& b : beats) {
    const auto lo = static_cast<std::size_t>(std::max(0.0, (b.onset - kSupport) * cfg.fs));
    const auto hi = std::min(n, static_cast<std::size_t>((b.onset + kSupport + 0.5) * cfg.fs));
    for (std::size_t i = lo; i < hi; ++i) {
      const double ti = static_cast<double>(i) / cfg.fs;
      ppg[i] += b.amp * (gauss(ti, b.onset + kSystolicDelay, b.width) +
                         b.reflect * gauss(ti, b.onset + kReflectedDelay, 1.6 * b.width));
      abp[i] += (b.sbp - b.dbp) * (gauss(ti, b.onset + kAbpPeakDelay, kAbpWidth) +
                                   kAbpDicroticRatio * gauss(ti, b.onset + kAbpDicroticDelay, kAbpDicroticWidth));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) / cfg.fs;
    ppg[i] += cfg.drift * std::sin(2.0 * std::numbers::pi * 0.03 * ti) +
              0.35 * cfg.drift * std::sin(2.0 * std::numbers::pi * 0.12 * ti + 1.0) + cfg.ppg_noise * rng::normal(engine);
  }

  SyntheticSubject out;
  out.record.subject_id = cfg.subject_id;
  out.record.fs = cfg.fs;
  out.record.ppg = std::move(ppg);
  out.record.abp = std::move(abp);
  out.beats.reserve(beats.size());
  for (const auto& b : beats) out.beats.push_back({b.onset, b.period, b.sbp, b.dbp});
  return out;
}

}  // namespace ppgbp
