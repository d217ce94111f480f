#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ppgbp/dataset.hpp"

namespace ppgbp {

enum class Activation : std::uint32_t { relu = 0, tanh = 1 };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Fully connected layer, weights row-major [out][in].
struct Dense {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  std::span<const double> row(std::size_t o) const { return std::span<const double>(weights).subspan(o * in, in); }
};

/// Per-output standardization of the targets: y_std = (y - mean) / std.
struct LabelScaler {
  std::vector<double> mean;
  std::vector<double> std;
};

/// Feed-forward regressor: affine layers with `hidden` activation between them
/// and a linear output in standardized label units.
struct MlpModel {
  std::vector<std::size_t> layer_sizes;
  std::vector<Dense> layers;
  Activation hidden = Activation::relu;
  LabelScaler scaler;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t parameter_count() const;
};

using BpOutput = std::array<double, 3>;  // sbp, dbp, map in mmHg

void validate(const MlpModel& model);

/// He-style uniform init, U(-sqrt(6/fan_in), +sqrt(6/fan_in)), stored at f32
/// precision; zero biases; identity scaler.
MlpModel init_model(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed,
                    Activation hidden = Activation::relu);

/// Network output in standardized units.
std::vector<double> forward_standardized(const MlpModel& model, std::span<const double> input);

/// De-standardized (sbp, dbp, map); model must have 3 outputs.
BpOutput forward(const MlpModel& model, std::span<const double> input);
std::vector<BpOutput> forward_batch(const MlpModel& model, std::span<const LabeledBeat> batch);

/// Same shapes as the model's layers.
struct Gradients {
  std::vector<Dense> layers;
};

/// Mean over batch and outputs of the squared standardized error, with exact
/// backpropagated gradients.
std::pair<double, Gradients> loss_and_gradient(const MlpModel& model, std::span<const LabeledBeat> batch);

/// Loss only, also split per output (each is a mean over the batch).
double loss(const MlpModel& model, std::span<const LabeledBeat> batch, std::array<double, 3>* per_output = nullptr);

/// Parameters flattened in file order: per layer weights row-major, then biases.
std::vector<double> flatten(const MlpModel& model);
std::vector<double> flatten(const Gradients& grads);
void unflatten(MlpModel& model, std::span<const double> params);

/// Rounds all parameters and the scaler to f32, the persisted precision.
void round_to_f32(MlpModel& model);

struct TrainConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  std::vector<std::size_t> hidden_sizes{35, 20};
  Activation hidden_activation = Activation::relu;
  double initial_lr = 1e-3;
  double momentum = 0.9;
  double lr_reduce_factor = 0.5;
  std::size_t lr_patience = 10;
  double min_lr = 1e-7;
  std::size_t stop_patience = 20;
  std::size_t max_epochs = 500;
  std::size_t batch_size = 64;
};

void validate(const TrainConfig& config);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct TrainReport {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 0 is the initial model
  double final_train_loss = 0.0;
  double best_val_loss = 0.0;
  std::vector<std::pair<std::size_t, double>> lr_schedule_trace;  // (epoch, lr) at each change
  std::vector<double> val_loss_trace;  // index 0 is the initial model
  std::vector<double> train_loss_trace;
};

void to_json(nlohmann::json& j, const TrainReport& r);

/// Uniform random permutation split; sizes floor(n*f) and n - floor(n*f).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double train_fraction,
                                                                            std::uint64_t seed);
std::pair<BeatDataset, BeatDataset> split_dataset(const BeatDataset& beats, double train_fraction, std::uint64_t seed);

/// Label scaler fit on `beats` (population std, 1 when a label is constant).
LabelScaler fit_scaler(std::span<const LabeledBeat> beats);

/// Momentum SGD with reduce-on-plateau and early stopping on the validation
/// loss; returns the best-validation parameters rounded to f32.
std::pair<MlpModel, TrainReport> train(const BeatDataset& train_set, const BeatDataset& val_set,
                                       const TrainConfig& config);

/// "MLP1" file: u32 version, u32 n_layers, u32 layer sizes, u32 activation tag,
/// f32 parameters in flatten() order, then f32 (mean, std) per output.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);
std::string serialize_model(const MlpModel& model);
MlpModel deserialize_model(std::string bytes, const std::string& origin = "<memory>");

nlohmann::json model_json(const MlpModel& model);

}  // namespace ppgbp
