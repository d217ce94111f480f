// ppgbp: cuffless blood-pressure estimation from single-site PPG.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ppgbp/commands.hpp"
#include "ppgbp/error.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ppgbp;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

PipelineConfig resolve(const Globals& g) {
  PipelineConfig c = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed) {
    c.seed = *g.seed;
    c.train.seed = *g.seed;
  }
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ppgbp - per-beat SBP/DBP/MAP estimation from PPG waveforms"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed for splitting, initialization and synthesis");
  app.add_option("--out-dir", g.out_dir, "Directory for output files");

  std::vector<std::string> records;
  auto* prepare = app.add_subcommand("prepare", "Filter, segment and label records into beat datasets");
  prepare->add_option("records", records, "Record files (.csv or binary)")->required()->check(CLI::ExistingFile);

  std::string dataset, model_out;
  auto* train = app.add_subcommand("train", "Train a per-subject model on a beat dataset");
  train->add_option("dataset", dataset, "Beat dataset (.beats)")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--model", model_out, "Model output path (default <out-dir>/<dataset>.mlp)");
  std::optional<std::size_t> max_epochs;
  train->add_option("--max-epochs", max_epochs, "Override the epoch limit");

  std::vector<std::string> eval_datasets, eval_models;
  std::string split = "test";
  auto* evaluate = app.add_subcommand("evaluate", "Accuracy metrics, AAMI check and Bland-Altman data");
  evaluate->add_option("--dataset", eval_datasets, "Beat dataset, repeat per subject")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", eval_models, "Model, one per --dataset")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--split", split, "Beats to score: test, train or all")->check(CLI::IsMember({"test", "train", "all"}));

  std::string model_path, record_path, infer_output;
  auto* infer = app.add_subcommand("infer", "Per-beat estimates for a PPG record");
  infer->add_option("model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  infer->add_option("record", record_path, "Record file")->required()->check(CLI::ExistingFile);
  infer->add_option("-o,--output", infer_output, "CSV output (default stdout)");

  commands::ProfileOptions popt;
  std::string profile_record;
  auto* profile = app.add_subcommand("profile", "Operation counts, memory, latency and modeled energy");
  profile->add_option("model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  profile->add_option("--window-samples", popt.window_samples, "Samples per reading")->capture_default_str();
  profile->add_option("--power-mw", popt.power_mw, "Average target power, mW")->capture_default_str();
  profile->add_option("--scale", popt.scale, "Target/host latency ratio")->capture_default_str();
  profile->add_option("--repetitions", popt.repetitions, "Timed repetitions (median)")->capture_default_str();
  profile->add_option("--record", profile_record, "Record supplying the window")->check(CLI::ExistingFile);

  auto* coeffs = app.add_subcommand("export-coeffs", "Print the bandpass sections as JSON");
  auto* model_json = app.add_subcommand("export-model-json", "Print a model as JSON");
  model_json->add_option("model", model_path, "Model file")->required()->check(CLI::ExistingFile);

  SyntheticConfig sconf;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write the bundled synthetic subject record");
  synth->add_option("output", synth_out, "Output record (.csv or binary)")->required();
  synth->add_option("--beats", sconf.n_beats, "Cardiac cycles to generate")->capture_default_str();
  synth->add_option("--subject", sconf.subject_id, "Subject id")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    const PipelineConfig config = resolve(g);
    const fs::path out_dir = g.out_dir;

    if (*prepare) {
      std::vector<fs::path> paths(records.begin(), records.end());
      for (const auto& o : commands::prepare(paths, config, out_dir))
        std::cout << o.dataset.string() << ": " << o.prepared.beats.size() << " beats, removed_fraction "
                  << o.prepared.cleaning.removed_fraction << ", label outliers " << o.prepared.label_removed << '\n';
    } else if (*train) {
      PipelineConfig c = config;
      if (max_epochs) c.train.max_epochs = *max_epochs;
      const fs::path out = model_out.empty() ? out_dir / (fs::path(dataset).stem().string() + ".mlp") : fs::path(model_out);
      const auto o = commands::train(dataset, c, out);
      std::cout << o.model_path.string() << ": epochs_run " << o.report.epochs_run << ", best_epoch "
                << o.report.best_epoch << ", best_val_loss " << o.report.best_val_loss << '\n';
    } else if (*evaluate) {
      if (eval_datasets.size() != eval_models.size()) {
        std::cerr << "error: --dataset and --model must be given the same number of times\n";
        return kExitUsage;
      }
      std::vector<commands::EvalInput> inputs;
      for (std::size_t i = 0; i < eval_datasets.size(); ++i) inputs.push_back({eval_datasets[i], eval_models[i]});
      const auto o = commands::evaluate(inputs, config, commands::split_from_string(split), out_dir);
      std::cout << report_table(o.reports);
    } else if (*infer) {
      if (infer_output.empty()) {
        commands::infer(model_path, record_path, config, std::cout);
      } else {
        std::ofstream f(infer_output, std::ios::trunc);
        if (!f) throw Error(Errc::io_error, "cannot open '" + infer_output + "'");
        commands::infer(model_path, record_path, config, f);
      }
    } else if (*profile) {
      if (!profile_record.empty()) popt.record = profile_record;
      commands::profile(model_path, config, popt, out_dir, std::cout);
    } else if (*coeffs) {
      commands::export_coeffs(config, std::cout);
    } else if (*model_json) {
      commands::export_model_json(model_path, std::cout);
    } else if (*synth) {
      if (g.seed) sconf.seed = *g.seed;
      sconf.fs = config.filter.fs;
      const auto s = commands::synth(sconf, synth_out);
      std::cout << synth_out << ": " << s.record.size() << " samples, " << s.beats.size() << " cycles\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return classify(e.code()) == ErrorClass::numeric ? kExitNumeric : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
