#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ppgbp/pipeline.hpp"
#include "ppgbp/segmentation.hpp"
#include "ppgbp/synthetic.hpp"
#include "test_util.hpp"

using namespace ppgbp;

namespace {

std::vector<double> sinusoid(double f, double fs, double seconds) {
  std::vector<double> x(static_cast<std::size_t>(fs * seconds));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * f * i / fs);
  return x;
}

BeatSegment segment_with_amplitude(double amp, std::size_t len, std::size_t start) {
  BeatSegment s;
  s.start_index = start;
  s.samples.assign(len, 0.0);
  s.samples[len / 3] = amp;
  return s;
}

}  // namespace

TEST_SUITE("segmentation") {

TEST_CASE("1 Hz sinusoid gives three peaks a period apart") {
  const auto x = sinusoid(1.0, 125.0, 3.0);
  const auto peaks = detect_peaks(x, 30);
  CHECK(peaks.indices == oracle::greedy_peaks(x, 30));
  REQUIRE(peaks.indices.size() == 3);
  CHECK(peaks.indices[1] - peaks.indices[0] == 125);
  CHECK(peaks.indices[2] - peaks.indices[1] == 125);

  const auto segs = segment_beats(x, peaks);
  REQUIRE(segs.size() == 2);
  for (const auto& s : segs) CHECK(s.size() == 125);
}

TEST_CASE("ramp has no peaks") {
  std::vector<double> ramp(200);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.01 * i;
  CHECK(detect_peaks(ramp).indices.empty());
}

TEST_CASE("close maxima keep the taller one") {
  std::vector<double> x(100, 0.0);
  x[40] = 0.8;
  x[50] = 1.0;
  const auto p = detect_peaks(x, 30);
  CHECK(p.indices == std::vector<std::size_t>{50});
  CHECK(p.indices == oracle::greedy_peaks(x, 30));
}

TEST_CASE("plateau reports its leftmost sample") {
  std::vector<double> x{0, 1, 3, 3, 3, 1, 0};
  CHECK(local_maxima(x) == std::vector<std::size_t>{2});
  std::vector<double> shoulder{0, 2, 2, 3, 0};
  CHECK(local_maxima(shoulder) == std::vector<std::size_t>{3});
  CHECK_ERRC(detect_peaks(std::vector<double>{1.0, 2.0}), Errc::too_short_signal);
}

TEST_CASE("detect_peaks matches the brute-force oracle on random signals") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(3 + gen() % 2000);
    // Quantized values produce plateaus and ties.
    const int levels = 2 + static_cast<int>(gen() % 30);
    for (auto& v : x) v = static_cast<double>(gen() % levels);
    const std::size_t d = gen() % 60;
    REQUIRE(local_maxima(x) == oracle::local_maxima(x));
    const auto p = detect_peaks(x, d);
    REQUIRE(p.indices == oracle::greedy_peaks(x, d));
    for (std::size_t i = 1; i < p.indices.size(); ++i) CHECK(p.indices[i] - p.indices[i - 1] > d);
    for (std::size_t i : p.indices) {
      CHECK(x[i] >= x[i - 1]);
      CHECK(x[i] >= x[i + 1]);
    }
  }
}

TEST_CASE("detect_peaks matches the oracle on the synthetic subject") {
  SyntheticConfig sc;
  sc.n_beats = 400;
  const auto subj = generate_synthetic_subject(sc);
  PipelineConfig cfg;
  const auto seg = segment_record(subj.record, cfg);
  const auto& x = seg.normalized.samples;
  const auto p = detect_peaks(x, 30);
  CHECK(p.indices == oracle::greedy_peaks(x, 30));
  CHECK(p.indices.size() == seg.peak_count);
  // Roughly one detected peak per generated cycle.
  CHECK(p.indices.size() >= sc.n_beats * 9 / 10);
  CHECK(p.indices.size() <= sc.n_beats * 11 / 10);
}

TEST_CASE("segment_beats boundaries") {
  std::vector<double> x(400);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  const auto segs = segment_beats(x, PeakList{{100, 220, 350}});
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].size() == 120);
  CHECK(segs[1].size() == 130);
  CHECK(segs[0].start_index == 100);
  CHECK(segs[1].start_index == 220);
  CHECK_ERRC(segment_beats(x, PeakList{{100}}), Errc::too_few_peaks);
  CHECK_ERRC(segment_beats(x, PeakList{{}}), Errc::too_few_peaks);
}

TEST_CASE("segment concatenation reproduces the signal between first and last peak") {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(500 + gen() % 3000);
    for (auto& v : x) v = n(gen);
    const auto p = detect_peaks(x, 10);
    if (p.indices.size() < 2) continue;
    const auto segs = segment_beats(x, p);
    CHECK(segs.size() == p.indices.size() - 1);
    std::vector<double> cat;
    for (const auto& s : segs) cat.insert(cat.end(), s.samples.begin(), s.samples.end());
    const std::vector<double> ref(x.begin() + p.indices.front(), x.begin() + p.indices.back());
    CHECK(cat == ref);
  }
}

TEST_CASE("clean_beats length rule") {
  std::vector<BeatSegment> segs;
  for (int i = 0; i < 10; ++i) segs.push_back(segment_with_amplitude(1.0, 100, i * 100));
  segs.push_back(segment_with_amplitude(1.0, 161, 2000));
  segs.push_back(segment_with_amplitude(1.0, 29, 3000));
  segs.push_back(segment_with_amplitude(1.0, 160, 4000));
  segs.push_back(segment_with_amplitude(1.0, 30, 5000));
  const auto r = clean_beats(segs);
  CHECK(r.stats.total_beats == 14);
  CHECK(r.stats.removed_length == 2);
  CHECK(r.stats.removed_amplitude == 0);
  CHECK(r.kept.size() == 12);
  for (const auto& s : r.kept) CHECK((s.size() >= 30 && s.size() <= 160));
}

TEST_CASE("clean_beats on identical segments removes nothing") {
  std::vector<BeatSegment> segs(50, segment_with_amplitude(0.7, 120, 0));
  const auto r = clean_beats(segs);
  CHECK(r.stats.removed_amplitude == 0);
  CHECK(r.stats.removed_length == 0);
  CHECK(r.kept.size() == 50);
  CHECK(r.amplitude.std == 0.0);
}

TEST_CASE("clean_beats amplitude rule against oracle statistics") {
  std::vector<BeatSegment> segs;
  std::vector<double> amps;
  for (int i = 0; i < 99; ++i) {
    segs.push_back(segment_with_amplitude(1.0, 100, i * 100));
    amps.push_back(1.0);
  }
  segs.push_back(segment_with_amplitude(10.0, 100, 9900));
  amps.push_back(10.0);
  const auto [m, s] = oracle::mean_std(amps);
  REQUIRE(std::abs(10.0 - m) > 2 * s);
  REQUIRE(std::abs(1.0 - m) <= 2 * s);

  const auto r = clean_beats(segs);
  CHECK(r.stats.removed_amplitude == 1);
  CHECK(r.kept.size() == 99);
  for (const auto& k : r.kept) CHECK(k.amplitude() == 1.0);
  CHECK(r.amplitude.mean == doctest::Approx(m).epsilon(1e-12));
  CHECK(r.amplitude.std == doctest::Approx(s).epsilon(1e-12));
  CHECK(r.stats.removed_fraction == doctest::Approx(0.01));
}

TEST_CASE("clean_beats randomized against oracle") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<BeatSegment> segs;
    for (int i = 0; i < 200; ++i) segs.push_back(segment_with_amplitude(u(gen), 20 + gen() % 160, i));
    std::vector<double> amps;
    for (const auto& s : segs)
      if (s.size() >= 30 && s.size() <= 160) amps.push_back(s.amplitude());
    const auto [m, sd] = oracle::mean_std(amps);
    std::size_t expect = 0;
    for (double a : amps) expect += (a < m - 2 * sd || a > m + 2 * sd);
    const auto r = clean_beats(segs);
    CHECK(r.stats.removed_length == 200 - amps.size());
    CHECK(r.stats.removed_amplitude == expect);
    CHECK(r.kept.size() + r.stats.removed_length + r.stats.removed_amplitude == 200);

    // Re-screening the kept beats with the same statistics removes nothing more.
    const auto again = clean_beats(r.kept, CleanConfig{}, r.amplitude);
    CHECK(again.kept.size() == r.kept.size());
  }
}

TEST_CASE("to_vector pads with exact zeros") {
  BeatSegment s;
  for (int i = 0; i < 100; ++i) s.samples.push_back(0.01 * i + 0.3);
  const auto v = to_vector(s);
  CHECK(v.values.size() == 160);
  CHECK(v.valid_len == 100);
  for (std::size_t i = 100; i < 160; ++i) CHECK(v.values[i] == 0.0);
  CHECK(std::vector<double>(v.valid().begin(), v.valid().end()) == s.samples);

  BeatSegment full;
  full.samples.assign(160, 0.5);
  const auto f = to_vector(full);
  CHECK(f.values == full.samples);
  CHECK(f.valid_len == 160);

  BeatSegment big;
  big.samples.assign(161, 0.5);
  CHECK_ERRC(to_vector(big), Errc::segment_too_long);
}

TEST_CASE("to_vector round trip on random segments") {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    BeatSegment s;
    s.samples.resize(gen() % 161);
    for (auto& v : s.samples) v = n(gen);
    const auto v = to_vector(s);
    REQUIRE(v.values.size() == kBeatVectorLength);
    CHECK(std::vector<double>(v.valid().begin(), v.valid().end()) == s.samples);
    for (std::size_t i = v.valid_len; i < kBeatVectorLength; ++i) CHECK(v.values[i] == 0.0);
  }
}

}  // TEST_SUITE
