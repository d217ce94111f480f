#include "ppgbp/record.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "binio.hpp"
#include "ppgbp/error.hpp"

namespace ppgbp {

namespace {

constexpr std::string_view kRecordMagic = "PPGR";
constexpr std::uint32_t kRecordVersion = 1;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void fail_at(Errc code, const std::string& origin, std::size_t line, const std::string& msg) {
  throw Error(code, origin + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

RecordFormat guess_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? RecordFormat::csv : RecordFormat::binary;
}

void validate(const RawRecord& record) {
  if (!(record.fs > 0.0) || !std::isfinite(record.fs))
    throw Error(Errc::invalid_spec, "sampling rate must be positive, got " + std::to_string(record.fs));
  if (record.abp && record.abp->size() != record.ppg.size())
    throw Error(Errc::length_mismatch, "ppg has " + std::to_string(record.ppg.size()) + " samples, abp has " +
                                           std::to_string(record.abp->size()));
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(record.ppg) || (record.abp && !finite(*record.abp)))
    throw Error(Errc::non_finite_sample, "record '" + record.subject_id + "' contains NaN or infinite samples");
}

RawRecord parse_csv_record(const std::string& text, const std::string& origin) {
  RawRecord rec;
  std::vector<double> abp;
  std::size_t abp_rows = 0;
  bool declared_abp = false;
  bool seen_data = false;

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      if (body.rfind("fs=", 0) == 0) {
        if (seen_data) fail_at(Errc::parse_error, origin, lineno, "fs header after data");
        if (!parse_double(body.substr(3), rec.fs) || !(rec.fs > 0.0))
          fail_at(Errc::parse_error, origin, lineno, "bad sampling rate '" + std::string(body.substr(3)) + "'");
      }
      continue;
    }
    auto comma = line.find(',');
    auto first = line.substr(0, comma);
    std::optional<std::string_view> second;
    if (comma != std::string_view::npos) {
      second = line.substr(comma + 1);
      if (second->find(',') != std::string_view::npos)
        fail_at(Errc::parse_error, origin, lineno, "more than two columns");
    }

    double ppg_value = 0.0;
    if (!seen_data && !parse_double(first, ppg_value) && !trim(first).empty()) {
      // column-name header, e.g. "ppg,abp"
      if (trim(first) != "ppg") fail_at(Errc::parse_error, origin, lineno, "unknown column '" + std::string(first) + "'");
      if (second) {
        if (trim(*second) != "abp")
          fail_at(Errc::parse_error, origin, lineno, "unknown column '" + std::string(*second) + "'");
        declared_abp = true;
      }
      seen_data = true;
      continue;
    }
    seen_data = true;

    if (trim(first).empty()) fail_at(Errc::missing_column, origin, lineno, "ppg value missing");
    if (!parse_double(first, ppg_value))
      fail_at(Errc::parse_error, origin, lineno, "bad ppg value '" + std::string(first) + "'");
    rec.ppg.push_back(ppg_value);

    if (second && !trim(*second).empty()) {
      double abp_value = 0.0;
      if (!parse_double(*second, abp_value))
        fail_at(Errc::parse_error, origin, lineno, "bad abp value '" + std::string(*second) + "'");
      abp.push_back(abp_value);
      ++abp_rows;
    } else if (declared_abp) {
      fail_at(Errc::missing_column, origin, lineno, "abp value missing");
    }
  }

  if (abp_rows > 0 || declared_abp) {
    if (abp_rows != rec.ppg.size())
      throw Error(Errc::length_mismatch, origin + ": ppg has " + std::to_string(rec.ppg.size()) +
                                             " samples, abp has " + std::to_string(abp_rows));
    rec.abp = std::move(abp);
  }
  validate(rec);
  return rec;
}

RawRecord load_record(const std::filesystem::path& path, RecordFormat format) {
  const std::string origin = path.string();
  std::string bytes = binio::read_file(origin);
  RawRecord rec;
  if (format == RecordFormat::csv) {
    rec = parse_csv_record(bytes, origin);
  } else {
    binio::Reader r(std::move(bytes), origin, Errc::parse_error);
    if (!r.expect_magic(kRecordMagic)) r.fail(Errc::parse_error, "bad magic, expected PPGR");
    if (auto v = r.u32(); v != kRecordVersion) r.fail(Errc::version_mismatch, "unsupported version " + std::to_string(v));
    rec.fs = r.f64();
    const std::uint64_t n = r.u64();
    if (n > r.remaining() / 4) r.fail(Errc::parse_error, "sample count exceeds file size");
    rec.ppg.resize(n);
    for (auto& x : rec.ppg) x = r.f32();
    const std::uint8_t has_abp = r.u8();
    if (has_abp > 1) r.fail(Errc::parse_error, "bad has_abp flag");
    if (has_abp) {
      std::vector<double> abp(n);
      for (auto& x : abp) x = r.f32();
      rec.abp = std::move(abp);
    }
    if (r.remaining() != 0) r.fail(Errc::parse_error, "trailing bytes");
    validate(rec);
  }
  rec.subject_id = path.stem().string();
  return rec;
}

RawRecord load_record(const std::filesystem::path& path) { return load_record(path, guess_format(path)); }

void save_record(const RawRecord& record, const std::filesystem::path& path, RecordFormat format) {
  validate(record);
  if (format == RecordFormat::csv) {
    std::ostringstream out;
    out.precision(17);
    out << "# fs=" << record.fs << '\n';
    for (std::size_t i = 0; i < record.ppg.size(); ++i) {
      out << record.ppg[i];
      if (record.abp) out << ',' << (*record.abp)[i];
      out << '\n';
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::io_error, "cannot open '" + path.string() + "' for writing");
    f << out.str();
    return;
  }
  binio::Writer w;
  w.bytes(kRecordMagic);
  w.u32(kRecordVersion);
  w.f64(record.fs);
  w.u64(record.ppg.size());
  for (double x : record.ppg) w.f32(static_cast<float>(x));
  w.u8(record.abp ? 1 : 0);
  if (record.abp)
    for (double x : *record.abp) w.f32(static_cast<float>(x));
  w.write_file(path.string());
}

BpLabel extract_bp_label(std::span<const double> abp_beat) {
  if (abp_beat.empty()) throw Error(Errc::empty_input, "empty ABP segment");
  auto [lo, hi] = std::minmax_element(abp_beat.begin(), abp_beat.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) throw Error(Errc::non_finite_sample, "non-finite ABP sample");
  return BpLabel{*hi, *lo, mean_arterial(*hi, *lo)};
}

LabelStats label_stats(std::span<const BpLabel> labels) {
  if (labels.empty()) throw Error(Errc::empty_input, "no labels");
  // Shifted by the first label so identical inputs give an exact mean and zero std.
  const double n = static_cast<double>(labels.size());
  const BpLabel& ref = labels.front();
  double ds = 0, dd = 0, dm = 0;
  for (const auto& l : labels) {
    ds += l.sbp - ref.sbp;
    dd += l.dbp - ref.dbp;
    dm += l.map - ref.map;
  }
  const double ms = ref.sbp + ds / n, md = ref.dbp + dd / n, mm = ref.map + dm / n;
  double vs = 0, vd = 0, vm = 0;
  for (const auto& l : labels) {
    vs += (l.sbp - ms) * (l.sbp - ms);
    vd += (l.dbp - md) * (l.dbp - md);
    vm += (l.map - mm) * (l.map - mm);
  }
  return LabelStats{ms, std::sqrt(vs / n), md, std::sqrt(vd / n), mm, std::sqrt(vm / n)};
}

LabelScreen discard_label_outliers(std::span<const BpLabel> labels, const LabelStats& stats, double k) {
  LabelScreen out;
  out.stats = stats;
  auto inside = [k](double v, double mean, double sd) { return v >= mean - k * sd && v <= mean + k * sd; };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    if (inside(l.sbp, stats.mean_sbp, stats.std_sbp) && inside(l.dbp, stats.mean_dbp, stats.std_dbp) &&
        inside(l.map, stats.mean_map, stats.std_map)) {
      out.kept.push_back(l);
      out.kept_indices.push_back(i);
    } else {
      ++out.removed_count;
    }
  }
  return out;
}

LabelScreen discard_label_outliers(std::span<const BpLabel> labels, double k) {
  if (labels.size() < 2) throw Error(Errc::degenerate_input, "label screening needs at least 2 labels");
  return discard_label_outliers(labels, label_stats(labels), k);
}

}  // namespace ppgbp
