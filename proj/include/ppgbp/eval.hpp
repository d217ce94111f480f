#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ppgbp {

/// AAMI-style precision threshold on RMSD, mmHg (strict).
inline constexpr double kAamiRmsdLimit = 8.0;

struct MetricSet {
  double mae = 0.0;
  double rmsd = 0.0;
  double me = 0.0;
  double std_abs_err = 0.0;  // population std of |pred - ref|
  double pearson_r = 0.0;
};

/// Errors written as pred - ref. Throws on length mismatch, empty input, or a
/// constant sequence (r undefined).
MetricSet compute_metrics(std::span<const double> pred, std::span<const double> ref);

/// rmsd < 8 mmHg.
bool aami_pass(double rmsd);

enum class BpChannel { sbp = 0, dbp = 1, map = 2 };
inline constexpr std::array<const char*, 3> kChannelNames{"sbp", "dbp", "map"};

struct EvalReport {
  std::string subject_id;
  std::size_t n_beats = 0;
  std::array<MetricSet, 3> metrics{};  // sbp, dbp, map
  std::array<bool, 3> aami{};
};

/// Per-output pass flags for a report's metrics.
std::array<bool, 3> aami_check(const std::array<MetricSet, 3>& metrics);

/// `pred`/`ref` hold (sbp, dbp, map) per beat.
EvalReport evaluate(const std::string& subject_id, std::span<const std::array<double, 3>> pred,
                    std::span<const std::array<double, 3>> ref);

struct BlandAltmanSeries {
  std::vector<std::pair<double, double>> points;  // (mean of pred and ref, pred - ref)
  double bias = 0.0;
  double sd = 0.0;  // population std of the differences
  double loa_low = 0.0;
  double loa_high = 0.0;
};

BlandAltmanSeries bland_altman(std::span<const double> pred, std::span<const double> ref);

void to_json(nlohmann::json& j, const MetricSet& m);
void to_json(nlohmann::json& j, const EvalReport& r);

/// Unweighted mean over subjects of every metric.
std::array<MetricSet, 3> average_metrics(std::span<const EvalReport> reports);

/// Per-subject rows plus an "Average" row, columns subject,n_beats then
/// {sbp,dbp,map}_{mae,rmsd,r,me,std}.
std::string report_csv(std::span<const EvalReport> reports);
nlohmann::json report_json(std::span<const EvalReport> reports);
/// Fixed-width table for terminals.
std::string report_table(std::span<const EvalReport> reports);

/// First line "# bias=..,sd=..,loa_low=..,loa_high=..,n=..", then "mean,diff" and one row per point.
std::string bland_altman_csv(const BlandAltmanSeries& series);

struct ReportFiles {
  std::filesystem::path json, csv, ba_sbp, ba_dbp;
};

/// Writes report.json, report.csv and blandaltman_{sbp,dbp}.csv into `dir`.
/// The Bland-Altman data pools every subject's beats.
ReportFiles write_report(const std::filesystem::path& dir, std::span<const EvalReport> reports,
                         const BlandAltmanSeries& ba_sbp, const BlandAltmanSeries& ba_dbp);

}  // namespace ppgbp
