#include "ppgbp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ppgbp/error.hpp"

namespace ppgbp {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> ref, std::size_t min_len) {
  if (pred.size() != ref.size())
    throw Error(Errc::length_mismatch, "prediction has " + std::to_string(pred.size()) + " values, reference " +
                                           std::to_string(ref.size()));
  if (pred.size() < min_len)
    throw Error(Errc::empty_input, "need at least " + std::to_string(min_len) + " pairs, got " + std::to_string(pred.size()));
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open '" + path.string() + "' for writing");
  out << text;
}

}  // namespace

MetricSet compute_metrics(std::span<const double> pred, std::span<const double> ref) {
  check_pair(pred, ref, 1);
  const double n = static_cast<double>(pred.size());
  double sum_abs = 0, sum_sq = 0, sum_err = 0, mean_p = 0, mean_r = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - ref[i];
    sum_abs += std::abs(e);
    sum_sq += e * e;
    sum_err += e;
    mean_p += pred[i];
    mean_r += ref[i];
  }
  MetricSet m;
  m.mae = sum_abs / n;
  m.rmsd = std::sqrt(sum_sq / n);
  m.me = sum_err / n;
  mean_p /= n;
  mean_r /= n;

  double var_abs = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double a = std::abs(pred[i] - ref[i]) - m.mae;
    var_abs += a * a;
    const double dx = pred[i] - mean_p, dy = ref[i] - mean_r;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  m.std_abs_err = std::sqrt(var_abs / n);
  if (!(sxx > 0.0) || !(syy > 0.0))
    throw Error(Errc::constant_sequence, "Pearson r undefined for a constant sequence");
  m.pearson_r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return m;
}

bool aami_pass(double rmsd) { return rmsd < kAamiRmsdLimit; }

std::array<bool, 3> aami_check(const std::array<MetricSet, 3>& metrics) {
  return {aami_pass(metrics[0].rmsd), aami_pass(metrics[1].rmsd), aami_pass(metrics[2].rmsd)};
}

EvalReport evaluate(const std::string& subject_id, std::span<const std::array<double, 3>> pred,
                    std::span<const std::array<double, 3>> ref) {
  if (pred.size() != ref.size()) throw Error(Errc::length_mismatch, "prediction/reference counts differ");
  EvalReport r;
  r.subject_id = subject_id;
  r.n_beats = pred.size();
  std::vector<double> p(pred.size()), q(ref.size());
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < pred.size(); ++i) {
      p[i] = pred[i][c];
      q[i] = ref[i][c];
    }
    r.metrics[c] = compute_metrics(p, q);
  }
  r.aami = aami_check(r.metrics);
  return r;
}

BlandAltmanSeries bland_altman(std::span<const double> pred, std::span<const double> ref) {
  check_pair(pred, ref, 2);
  BlandAltmanSeries s;
  s.points.reserve(pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - ref[i];
    s.points.emplace_back((pred[i] + ref[i]) / 2.0, d);
    sum += d;
  }
  const double n = static_cast<double>(pred.size());
  s.bias = sum / n;
  double var = 0.0;
  for (const auto& [m, d] : s.points) var += (d - s.bias) * (d - s.bias);
  s.sd = std::sqrt(var / n);
  s.loa_low = s.bias - 1.96 * s.sd;
  s.loa_high = s.bias + 1.96 * s.sd;
  return s;
}

void to_json(nlohmann::json& j, const MetricSet& m) {
  j = nlohmann::json{{"mae", m.mae}, {"rmsd", m.rmsd}, {"me", m.me}, {"std_abs_err", m.std_abs_err}, {"pearson_r", m.pearson_r}};
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"subject_id", r.subject_id}, {"n_beats", r.n_beats}};
  for (std::size_t c = 0; c < 3; ++c) {
    nlohmann::json m = r.metrics[c];
    m["aami_pass"] = r.aami[c];
    j[kChannelNames[c]] = m;
  }
}

std::array<MetricSet, 3> average_metrics(std::span<const EvalReport> reports) {
  if (reports.empty()) throw Error(Errc::empty_input, "no reports to average");
  std::array<MetricSet, 3> avg{};
  for (const auto& r : reports)
    for (std::size_t c = 0; c < 3; ++c) {
      avg[c].mae += r.metrics[c].mae;
      avg[c].rmsd += r.metrics[c].rmsd;
      avg[c].me += r.metrics[c].me;
      avg[c].std_abs_err += r.metrics[c].std_abs_err;
      avg[c].pearson_r += r.metrics[c].pearson_r;
    }
  const double n = static_cast<double>(reports.size());
  for (auto& m : avg) {
    m.mae /= n;
    m.rmsd /= n;
    m.me /= n;
    m.std_abs_err /= n;
    m.pearson_r /= n;
  }
  return avg;
}

std::string report_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "subject,n_beats";
  for (const char* c : kChannelNames) out << ',' << c << "_mae," << c << "_rmsd," << c << "_r," << c << "_me," << c << "_std";
  out << '\n';
  auto row = [&](const std::string& name, const std::string& n, const std::array<MetricSet, 3>& ms) {
    out << name << ',' << n;
    for (const auto& m : ms)
      out << ',' << full(m.mae) << ',' << full(m.rmsd) << ',' << full(m.pearson_r) << ',' << full(m.me) << ','
          << full(m.std_abs_err);
    out << '\n';
  };
  std::size_t total = 0;
  for (const auto& r : reports) {
    row(r.subject_id, std::to_string(r.n_beats), r.metrics);
    total += r.n_beats;
  }
  row("Average", std::to_string(total), average_metrics(reports));
  return out.str();
}

nlohmann::json report_json(std::span<const EvalReport> reports) {
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& r : reports) subjects.push_back(r);
  const auto avg = average_metrics(reports);
  nlohmann::json average;
  for (std::size_t c = 0; c < 3; ++c) {
    nlohmann::json m = avg[c];
    m["aami_pass"] = aami_pass(avg[c].rmsd);
    average[kChannelNames[c]] = m;
  }
  return nlohmann::json{{"subjects", subjects}, {"average", average}, {"aami_rmsd_limit_mmhg", kAamiRmsdLimit}};
}

std::string report_table(std::span<const EvalReport> reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %7s | %8s %8s %6s | %8s %8s %6s | %8s %8s %6s\n", "subject", "beats", "SBP MAE",
                "RMSD", "r", "DBP MAE", "RMSD", "r", "MAP MAE", "RMSD", "r");
  out << line << std::string(std::string_view(line).size() - 1, '-') << '\n';
  auto row = [&](const std::string& name, std::size_t n, const std::array<MetricSet, 3>& m) {
    std::snprintf(line, sizeof line, "%-12s %7zu | %8.4f %8.4f %6.3f | %8.4f %8.4f %6.3f | %8.4f %8.4f %6.3f\n",
                  name.c_str(), n, m[0].mae, m[0].rmsd, m[0].pearson_r, m[1].mae, m[1].rmsd, m[1].pearson_r, m[2].mae,
                  m[2].rmsd, m[2].pearson_r);
    out << line;
  };
  std::size_t total = 0;
  for (const auto& r : reports) {
    row(r.subject_id, r.n_beats, r.metrics);
    total += r.n_beats;
  }
  row("Average", total, average_metrics(reports));
  const auto avg = average_metrics(reports);
  out << "AAMI (RMSD < " << fmt(kAamiRmsdLimit, 0) << " mmHg): SBP " << (aami_pass(avg[0].rmsd) ? "pass" : "fail")
      << ", DBP " << (aami_pass(avg[1].rmsd) ? "pass" : "fail") << ", MAP " << (aami_pass(avg[2].rmsd) ? "pass" : "fail")
      << '\n';
  return out.str();
}

std::string bland_altman_csv(const BlandAltmanSeries& s) {
  std::ostringstream out;
  out << "# bias=" << full(s.bias) << ",sd=" << full(s.sd) << ",loa_low=" << full(s.loa_low)
      << ",loa_high=" << full(s.loa_high) << ",n=" << s.points.size() << '\n';
  out << "mean,diff\n";
  for (const auto& [m, d] : s.points) out << full(m) << ',' << full(d) << '\n';
  return out.str();
}

ReportFiles write_report(const std::filesystem::path& dir, std::span<const EvalReport> reports,
                         const BlandAltmanSeries& ba_sbp, const BlandAltmanSeries& ba_dbp) {
  std::filesystem::create_directories(dir);
  ReportFiles files{dir / "report.json", dir / "report.csv", dir / "blandaltman_sbp.csv", dir / "blandaltman_dbp.csv"};
  write_text(files.json, report_json(reports).dump(2) + "\n");
  write_text(files.csv, report_csv(reports));
  write_text(files.ba_sbp, bland_altman_csv(ba_sbp));
  write_text(files.ba_dbp, bland_altman_csv(ba_dbp));
  return files;
}

}  // namespace ppgbp
