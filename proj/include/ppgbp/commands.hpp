#pragma once

// Workflow commands behind the `ppgbp` executable: prepare -> train ->
// evaluate -> infer -> profile.

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "ppgbp/eval.hpp"
#include "ppgbp/mlp.hpp"
#include "ppgbp/pipeline.hpp"
#include "ppgbp/profiler.hpp"
#include "ppgbp/synthetic.hpp"

namespace ppgbp::commands {

namespace fs = std::filesystem;

struct PrepareOutput {
  fs::path dataset;
  fs::path sidecar;
  PreparedRecord prepared;
};

/// One "<stem>.beats" dataset and "<stem>.stats.json" sidecar per record.
std::vector<PrepareOutput> prepare(const std::vector<fs::path>& records, const PipelineConfig& config,
                                   const fs::path& out_dir);

struct TrainOutput {
  fs::path model_path;
  fs::path report_path;
  MlpModel model;
  TrainReport report;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

/// Splits with `config.seed`, trains with the held-out part as the monitored
/// set, writes the model and "<model>.train.json".
TrainOutput train(const fs::path& dataset, const PipelineConfig& config, const fs::path& model_out);

enum class Split { test, train, all };
Split split_from_string(const std::string& name);

struct EvalInput {
  fs::path dataset;
  fs::path model;
};

struct EvaluateOutput {
  std::vector<EvalReport> reports;
  ReportFiles files;
};

EvaluateOutput evaluate(const std::vector<EvalInput>& inputs, const PipelineConfig& config, Split split,
                        const fs::path& out_dir);

/// CSV "beat_start_index,sbp,dbp,map"; returns the number of beats.
std::size_t infer(const fs::path& model, const fs::path& record, const PipelineConfig& config, std::ostream& out);

struct ProfileOptions {
  std::size_t window_samples = 375;
  double power_mw = 50.58;
  double scale = 1.0;
  std::size_t repetitions = 30;
  std::optional<fs::path> record;  // window source; a synthetic subject when absent
};

ProfileReport profile(const fs::path& model, const PipelineConfig& config, const ProfileOptions& options,
                      const fs::path& out_dir, std::ostream& table_out);

void export_coeffs(const PipelineConfig& config, std::ostream& out);
void export_model_json(const fs::path& model, std::ostream& out);

/// Writes a synthetic subject record (CSV or binary by extension).
SyntheticSubject synth(const SyntheticConfig& config, const fs::path& out);

}  // namespace ppgbp::commands
