#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppgbp/record.hpp"

namespace ppgbp {

/// Seeded desk-scale subject: a Gaussian-pulse PPG (systolic wave plus a
/// reflected wave) whose per-beat amplitude, width, reflection ratio and
/// cycle length follow slow AR(1) latent processes; the ABP pulse of every
/// beat has SBP/DBP given by fixed linear maps of the same latents.
struct SyntheticConfig {
  std::string subject_id = "synthetic";
  double fs = 125.0;
  std::size_t n_beats = 5600;
  std::uint64_t seed = 7;
  double latent_rho = 0.97;      // beat-to-beat AR(1) coefficient
  double ppg_noise = 0.01;       // white noise, in units of the mean pulse height
  double drift = 0.4;            // baseline wander amplitude
  double sbp_noise_mmhg = 1.0;
  double dbp_noise_mmhg = 0.7;
};

struct SyntheticBeat {
  double onset_s = 0.0;
  double period_s = 0.0;
  double sbp = 0.0;
  double dbp = 0.0;
};

struct SyntheticSubject {
  RawRecord record;
  std::vector<SyntheticBeat> beats;  // generating parameters, one per cardiac cycle
};

SyntheticSubject generate_synthetic_subject(const SyntheticConfig& config = {});

}  // namespace ppgbp
