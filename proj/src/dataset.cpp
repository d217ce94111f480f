#include "ppgbp/dataset.hpp"

#include <limits>
#include <string>

#include "binio.hpp"
#include "ppgbp/error.hpp"

namespace ppgbp {

namespace {
constexpr std::string_view kBeatMagic = "BEAT";
constexpr std::uint32_t kBeatVersion = 1;
}  // namespace

void save_dataset(const BeatDataset& beats, const std::filesystem::path& path) {
  if (beats.size() > std::numeric_limits<std::uint32_t>::max())
    throw Error(Errc::degenerate_input, "too many beats for the dataset format");
  binio::Writer w;
  w.bytes(kBeatMagic);
  w.u32(kBeatVersion);
  w.u32(static_cast<std::uint32_t>(beats.size()));
  for (const auto& b : beats) {
    if (b.vector.values.size() != kBeatVectorLength || b.vector.valid_len > kBeatVectorLength)
      throw Error(Errc::dimension_mismatch, "beat vectors must have " + std::to_string(kBeatVectorLength) + " entries");
    w.u16(static_cast<std::uint16_t>(b.vector.valid_len));
    for (double v : b.vector.values) w.f32(static_cast<float>(v));
    w.f32(static_cast<float>(b.label.sbp));
    w.f32(static_cast<float>(b.label.dbp));
    w.f32(static_cast<float>(b.label.map));
  }
  w.write_file(path.string());
}

BeatDataset load_dataset(const std::filesystem::path& path) {
  binio::Reader r(binio::read_file(path.string()), path.string(), Errc::corrupt_file);
  if (!r.expect_magic(kBeatMagic)) r.fail(Errc::corrupt_file, "bad magic, expected BEAT");
  if (auto v = r.u32(); v != kBeatVersion) r.fail(Errc::version_mismatch, "unsupported version " + std::to_string(v));
  const std::uint32_t n = r.u32();
  constexpr std::size_t kRecordBytes = 2 + 4 * (kBeatVectorLength + 3);
  if (r.remaining() != static_cast<std::size_t>(n) * kRecordBytes)
    r.fail(Errc::corrupt_file, "size does not match beat count " + std::to_string(n));
  BeatDataset beats(n);
  for (auto& b : beats) {
    b.vector.valid_len = r.u16();
    if (b.vector.valid_len > kBeatVectorLength) r.fail(Errc::corrupt_file, "valid_len exceeds vector length");
    b.vector.values.resize(kBeatVectorLength);
    for (auto& v : b.vector.values) v = r.f32();
    b.label.sbp = r.f32();
    b.label.dbp = r.f32();
    b.label.map = r.f32();
  }
  return beats;
}

void quantize_to_file_precision(BeatDataset& beats) {
  auto q = [](double& x) { x = static_cast<float>(x); };
  for (auto& b : beats) {
    for (auto& v : b.vector.values) q(v);
    q(b.label.sbp);
    q(b.label.dbp);
    q(b.label.map);
  }
}

}  // namespace ppgbp
