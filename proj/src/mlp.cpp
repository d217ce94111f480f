#include "ppgbp/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "binio.hpp"
#include "ppgbp/error.hpp"
#include "ppgbp/kernels.hpp"
#include "rng.hpp"

namespace ppgbp {

namespace {

constexpr std::string_view kModelMagic = "MLP1";
constexpr std::uint32_t kModelVersion = 1;
constexpr std::size_t kOutputs = 3;

inline double activate(Activation a, double z) { return a == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z); }

// Derivative expressed through the activation value.
inline double activate_grad(Activation a, double y) { return a == Activation::relu ? (y > 0.0 ? 1.0 : 0.0) : 1.0 - y * y; }

BpOutput label_array(const BpLabel& l) { return {l.sbp, l.dbp, l.map}; }

void check_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw Error(Errc::non_finite_input, "network input contains NaN or infinity");
}

void check_input(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.input_size())
    throw Error(Errc::dimension_mismatch, "input has " + std::to_string(x.size()) + " values, model expects " +
                                              std::to_string(model.input_size()));
  check_finite(x);
}

// Activations of every layer for one input; acts[0] is the input itself.
struct ForwardTrace {
  std::vector<std::vector<double>> acts;
};

void run_forward(const MlpModel& model, std::span<const double> input, ForwardTrace& trace) {
  const std::size_t L = model.layers.size();
  trace.acts.resize(L + 1);
  trace.acts[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < L; ++l) {
    const Dense& layer = model.layers[l];
    const auto& x = trace.acts[l];
    auto& y = trace.acts[l + 1];
    y.resize(layer.out);
    const bool last = l + 1 == L;
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double z = layer.bias[o] + kernels::dot(layer.row(o), x);
      y[o] = last ? z : activate(model.hidden, z);
    }
  }
}

std::vector<double> standardized_target(const MlpModel& model, const BpLabel& label) {
  const BpOutput y = label_array(label);
  std::vector<double> t(kOutputs);
  for (std::size_t k = 0; k < kOutputs; ++k) t[k] = (y[k] - model.scaler.mean[k]) / model.scaler.std[k];
  return t;
}

void check_output3(const MlpModel& model) {
  if (model.output_size() != kOutputs)
    throw Error(Errc::dimension_mismatch, "model must have 3 outputs (sbp, dbp, map)");
}

}  // namespace

const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw Error(Errc::invalid_spec, "unknown activation '" + name + "'");
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void validate(const MlpModel& model) {
  const auto& sizes = model.layer_sizes;
  if (sizes.size() < 2 || std::find(sizes.begin(), sizes.end(), 0u) != sizes.end())
    throw Error(Errc::invalid_sizes, "need at least 2 layer sizes, all positive");
  if (model.layers.size() + 1 != sizes.size()) throw Error(Errc::invalid_sizes, "layer count does not match sizes");
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Dense& d = model.layers[l];
    if (d.in != sizes[l] || d.out != sizes[l + 1] || d.weights.size() != d.in * d.out || d.bias.size() != d.out)
      throw Error(Errc::invalid_sizes, "layer " + std::to_string(l) + " dimensions do not chain");
    for (double w : d.weights)
      if (!std::isfinite(w)) throw Error(Errc::numerical_failure, "non-finite weight");
    for (double b : d.bias)
      if (!std::isfinite(b)) throw Error(Errc::numerical_failure, "non-finite bias");
  }
  if (model.scaler.mean.size() != model.output_size() || model.scaler.std.size() != model.output_size())
    throw Error(Errc::invalid_sizes, "label scaler size does not match outputs");
  for (std::size_t k = 0; k < model.output_size(); ++k)
    if (!std::isfinite(model.scaler.mean[k]) || !(model.scaler.std[k] > 0.0) || !std::isfinite(model.scaler.std[k]))
      throw Error(Errc::numerical_failure, "label scaler must be finite with positive std");
}

MlpModel init_model(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed, Activation hidden) {
  if (layer_sizes.size() < 2 || std::find(layer_sizes.begin(), layer_sizes.end(), 0u) != layer_sizes.end())
    throw Error(Errc::invalid_sizes, "need at least 2 layer sizes, all positive");
  rng::Engine engine(seed);
  MlpModel m;
  m.layer_sizes = layer_sizes;
  m.hidden = hidden;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    Dense d;
    d.in = layer_sizes[l];
    d.out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(d.in));
    d.weights.resize(d.in * d.out);
    for (auto& w : d.weights) w = static_cast<float>((2.0 * rng::uniform01(engine) - 1.0) * limit);
    d.bias.assign(d.out, 0.0);
    m.layers.push_back(std::move(d));
  }
  m.scaler.mean.assign(m.output_size(), 0.0);
  m.scaler.std.assign(m.output_size(), 1.0);
  return m;
}

std::vector<double> forward_standardized(const MlpModel& model, std::span<const double> input) {
  check_input(model, input);
  ForwardTrace trace;
  run_forward(model, input, trace);
  return std::move(trace.acts.back());
}

BpOutput forward(const MlpModel& model, std::span<const double> input) {
  check_output3(model);
  const auto z = forward_standardized(model, input);
  BpOutput out{};
  for (std::size_t k = 0; k < kOutputs; ++k) out[k] = model.scaler.mean[k] + model.scaler.std[k] * z[k];
  return out;
}

std::vector<BpOutput> forward_batch(const MlpModel& model, std::span<const LabeledBeat> batch) {
  std::vector<BpOutput> out;
  out.reserve(batch.size());
  for (const auto& b : batch) out.push_back(forward(model, b.vector.values));
  return out;
}

double loss(const MlpModel& model, std::span<const LabeledBeat> batch, std::array<double, 3>* per_output) {
  if (batch.empty()) throw Error(Errc::empty_batch, "loss of an empty batch");
  check_output3(model);
  std::array<double, 3> acc{};
  ForwardTrace trace;
  for (const auto& b : batch) {
    check_input(model, b.vector.values);
    run_forward(model, b.vector.values, trace);
    const auto t = standardized_target(model, b.label);
    for (std::size_t k = 0; k < kOutputs; ++k) {
      const double e = trace.acts.back()[k] - t[k];
      acc[k] += e * e;
    }
  }
  const double n = static_cast<double>(batch.size());
  for (auto& a : acc) a /= n;
  if (per_output) *per_output = acc;
  return (acc[0] + acc[1] + acc[2]) / static_cast<double>(kOutputs);
}

std::pair<double, Gradients> loss_and_gradient(const MlpModel& model, std::span<const LabeledBeat> batch) {
  if (batch.empty()) throw Error(Errc::empty_batch, "gradient of an empty batch");
  check_output3(model);
  const std::size_t L = model.layers.size();
  Gradients g;
  g.layers.reserve(L);
  for (const auto& d : model.layers) {
    Dense z{d.in, d.out, std::vector<double>(d.weights.size(), 0.0), std::vector<double>(d.out, 0.0)};
    g.layers.push_back(std::move(z));
  }

  const double scale = 2.0 / static_cast<double>(batch.size() * kOutputs);
  double total = 0.0;
  ForwardTrace trace;
  std::vector<double> delta, prev;
  for (const auto& b : batch) {
    check_input(model, b.vector.values);
    run_forward(model, b.vector.values, trace);
    const auto t = standardized_target(model, b.label);
    delta.assign(kOutputs, 0.0);
    for (std::size_t k = 0; k < kOutputs; ++k) {
      const double e = trace.acts.back()[k] - t[k];
      total += e * e;
      delta[k] = scale * e;
    }
    // delta holds dLoss/dz for layer l.
    for (std::size_t l = L; l-- > 0;) {
      const Dense& layer = model.layers[l];
      Dense& grad = g.layers[l];
      const auto& x = trace.acts[l];
      for (std::size_t o = 0; o < layer.out; ++o) {
        grad.bias[o] += delta[o];
        kernels::axpy(delta[o], x, std::span<double>(grad.weights).subspan(o * layer.in, layer.in));
      }
      if (l == 0) break;
      prev.assign(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) kernels::axpy(delta[o], layer.row(o), prev);
      for (std::size_t i = 0; i < layer.in; ++i) prev[i] *= activate_grad(model.hidden, x[i]);
      std::swap(delta, prev);
    }
  }
  return {total / static_cast<double>(batch.size() * kOutputs), std::move(g)};
}

std::vector<double> flatten(const MlpModel& model) {
  std::vector<double> out;
  out.reserve(model.parameter_count());
  for (const auto& l : model.layers) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

std::vector<double> flatten(const Gradients& grads) {
  std::vector<double> out;
  for (const auto& l : grads.layers) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void unflatten(MlpModel& model, std::span<const double> params) {
  if (params.size() != model.parameter_count())
    throw Error(Errc::dimension_mismatch, "parameter vector has wrong length");
  std::size_t pos = 0;
  for (auto& l : model.layers) {
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(), l.weights.begin());
    pos += l.weights.size();
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(), l.bias.begin());
    pos += l.bias.size();
  }
}

void round_to_f32(MlpModel& model) {
  auto q = [](std::vector<double>& v) {
    for (auto& x : v) x = static_cast<float>(x);
  };
  for (auto& l : model.layers) {
    q(l.weights);
    q(l.bias);
  }
  q(model.scaler.mean);
  q(model.scaler.std);
}

void validate(const TrainConfig& c) {
  auto bad = [](const std::string& m) { throw Error(Errc::invalid_spec, "train config: " + m); };
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) bad("train_fraction must be in (0, 1)");
  if (c.stop_patience < 1) bad("stop_patience must be >= 1");
  if (!(c.initial_lr > 0.0)) bad("initial_lr must be positive");
  if (!(c.lr_reduce_factor > 0.0 && c.lr_reduce_factor < 1.0)) bad("lr_reduce_factor must be in (0, 1)");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) bad("momentum must be in [0, 1)");
  if (c.batch_size < 1) bad("batch_size must be >= 1");
  if (c.hidden_sizes.empty() || std::find(c.hidden_sizes.begin(), c.hidden_sizes.end(), 0u) != c.hidden_sizes.end())
    bad("hidden_sizes must be non-empty and positive");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"train_fraction", c.train_fraction},
                     {"seed", c.seed},
                     {"hidden_sizes", c.hidden_sizes},
                     {"hidden_activation", to_string(c.hidden_activation)},
                     {"initial_lr", c.initial_lr},
                     {"momentum", c.momentum},
                     {"lr_reduce_factor", c.lr_reduce_factor},
                     {"lr_patience", c.lr_patience},
                     {"min_lr", c.min_lr},
                     {"stop_patience", c.stop_patience},
                     {"max_epochs", c.max_epochs},
                     {"batch_size", c.batch_size}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.train_fraction = j.value("train_fraction", c.train_fraction);
  c.seed = j.value("seed", c.seed);
  c.hidden_sizes = j.value("hidden_sizes", c.hidden_sizes);
  if (j.contains("hidden_activation")) c.hidden_activation = activation_from_string(j.at("hidden_activation"));
  c.initial_lr = j.value("initial_lr", c.initial_lr);
  c.momentum = j.value("momentum", c.momentum);
  c.lr_reduce_factor = j.value("lr_reduce_factor", c.lr_reduce_factor);
  c.lr_patience = j.value("lr_patience", c.lr_patience);
  c.min_lr = j.value("min_lr", c.min_lr);
  c.stop_patience = j.value("stop_patience", c.stop_patience);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
}

void to_json(nlohmann::json& j, const TrainReport& r) {
  nlohmann::json lr = nlohmann::json::array();
  for (const auto& [epoch, rate] : r.lr_schedule_trace) lr.push_back({{"epoch", epoch}, {"lr", rate}});
  j = nlohmann::json{{"epochs_run", r.epochs_run},
                     {"best_epoch", r.best_epoch},
                     {"final_train_loss", r.final_train_loss},
                     {"best_val_loss", r.best_val_loss},
                     {"lr_schedule_trace", lr},
                     {"val_loss_trace", r.val_loss_trace},
                     {"train_loss_trace", r.train_loss_trace}};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double train_fraction,
                                                                            std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(Errc::invalid_spec, "train_fraction must be in (0, 1)");
  if (n < 10) throw Error(Errc::too_few_beats, "splitting needs at least 10 beats, got " + std::to_string(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng::Engine engine(seed);
  rng::shuffle(perm, engine);
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
  std::vector<std::size_t> tr(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> te(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return {std::move(tr), std::move(te)};
}

std::pair<BeatDataset, BeatDataset> split_dataset(const BeatDataset& beats, double train_fraction, std::uint64_t seed) {
  auto [tr, te] = split_indices(beats.size(), train_fraction, seed);
  BeatDataset a, b;
  a.reserve(tr.size());
  b.reserve(te.size());
  for (auto i : tr) a.push_back(beats[i]);
  for (auto i : te) b.push_back(beats[i]);
  return {std::move(a), std::move(b)};
}

LabelScaler fit_scaler(std::span<const LabeledBeat> beats) {
  if (beats.empty()) throw Error(Errc::empty_input, "cannot fit a scaler on no beats");
  std::vector<BpLabel> labels;
  labels.reserve(beats.size());
  for (const auto& b : beats) labels.push_back(b.label);
  const LabelStats s = label_stats(labels);
  auto positive = [](double sd) { return sd > 0.0 ? sd : 1.0; };
  return LabelScaler{{s.mean_sbp, s.mean_dbp, s.mean_map},
                     {positive(s.std_sbp), positive(s.std_dbp), positive(s.std_map)}};
}

std::pair<MlpModel, TrainReport> train(const BeatDataset& train_set, const BeatDataset& val_set,
                                       const TrainConfig& config) {
  validate(config);
  if (train_set.empty() || val_set.empty()) throw Error(Errc::empty_input, "training and validation sets must be non-empty");
  const std::size_t input = train_set.front().vector.values.size();

  std::vector<std::size_t> sizes{input};
  sizes.insert(sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
  sizes.push_back(kOutputs);
  MlpModel model = init_model(sizes, config.seed, config.hidden_activation);
  model.scaler = fit_scaler(train_set);
  round_to_f32(model);

  TrainReport report;
  double lr = config.initial_lr;
  report.lr_schedule_trace.emplace_back(0, lr);

  double best = loss(model, val_set);
  if (!std::isfinite(best)) throw Error(Errc::divergence, "initial validation loss is not finite");
  report.val_loss_trace.push_back(best);
  report.best_val_loss = best;
  report.final_train_loss = loss(model, train_set);
  MlpModel best_model = model;

  std::vector<double> params = flatten(model);
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  rng::Engine engine(config.seed ^ 0x9E3779B97F4A7C15ULL);

  BeatDataset batch;
  std::size_t since_best = 0, since_lr = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng::shuffle(order, engine);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);
      auto [batch_loss, grads] = loss_and_gradient(model, batch);
      if (!std::isfinite(batch_loss))
        throw Error(Errc::divergence, "training loss became non-finite at epoch " + std::to_string(epoch));
      epoch_loss += batch_loss * static_cast<double>(end - start);
      const auto g = flatten(grads);
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = config.momentum * velocity[p] - lr * g[p];
        params[p] += velocity[p];
      }
      unflatten(model, params);
    }
    epoch_loss /= static_cast<double>(order.size());
    const double val = loss(model, val_set);
    if (!std::isfinite(val) || !std::isfinite(epoch_loss))
      throw Error(Errc::divergence, "loss became non-finite at epoch " + std::to_string(epoch));

    report.epochs_run = epoch;
    report.final_train_loss = epoch_loss;
    report.train_loss_trace.push_back(epoch_loss);
    report.val_loss_trace.push_back(val);

    if (val < best) {
      best = val;
      best_model = model;
      report.best_epoch = epoch;
      report.best_val_loss = val;
      since_best = 0;
      since_lr = 0;
    } else {
      ++since_best;
      ++since_lr;
      if (since_best >= config.stop_patience) break;
      if (since_lr >= config.lr_patience && lr > config.min_lr) {
        lr = std::max(config.min_lr, lr * config.lr_reduce_factor);
        report.lr_schedule_trace.emplace_back(epoch, lr);
        since_lr = 0;
      }
    }
  }

  round_to_f32(best_model);
  return {std::move(best_model), std::move(report)};
}

std::string serialize_model(const MlpModel& model) {
  validate(model);
  binio::Writer w;
  w.bytes(kModelMagic);
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(model.layer_sizes.size()));
  for (auto s : model.layer_sizes) w.u32(static_cast<std::uint32_t>(s));
  w.u32(static_cast<std::uint32_t>(model.hidden));
  for (double p : flatten(model)) w.f32(static_cast<float>(p));
  for (std::size_t k = 0; k < model.output_size(); ++k) {
    w.f32(static_cast<float>(model.scaler.mean[k]));
    w.f32(static_cast<float>(model.scaler.std[k]));
  }
  return w.data();
}

MlpModel deserialize_model(std::string bytes, const std::string& origin) {
  binio::Reader r(std::move(bytes), origin, Errc::corrupt_file);
  if (!r.expect_magic(kModelMagic)) r.fail(Errc::corrupt_file, "bad magic, expected MLP1");
  if (auto v = r.u32(); v != kModelVersion) r.fail(Errc::version_mismatch, "unsupported model version " + std::to_string(v));
  const std::uint32_t n_layers = r.u32();
  if (n_layers < 2 || n_layers > 64) r.fail(Errc::corrupt_file, "implausible layer count");
  std::vector<std::size_t> sizes(n_layers);
  for (auto& s : sizes) {
    s = r.u32();
    if (s == 0 || s > (1u << 20)) r.fail(Errc::corrupt_file, "implausible layer size");
  }
  const std::uint32_t tag = r.u32();
  if (tag > 1) r.fail(Errc::corrupt_file, "unknown activation tag");
  MlpModel m = init_model(sizes, 0, static_cast<Activation>(tag));
  std::vector<double> params(m.parameter_count());
  if (r.remaining() != 4 * (params.size() + 2 * m.output_size()))
    r.fail(Errc::corrupt_file, "size does not match layer sizes");
  for (auto& p : params) p = r.f32();
  unflatten(m, params);
  for (std::size_t k = 0; k < m.output_size(); ++k) {
    m.scaler.mean[k] = r.f32();
    m.scaler.std[k] = r.f32();
  }
  try {
    validate(m);
  } catch (const Error& e) {
    throw Error(Errc::corrupt_file, origin + ": " + e.what());
  }
  return m;
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  binio::Writer w;
  w.bytes(serialize_model(model));
  w.write_file(path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  return deserialize_model(binio::read_file(path.string()), path.string());
}

nlohmann::json model_json(const MlpModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : model.layers) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t o = 0; o < l.out; ++o) {
      auto r = l.row(o);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weights", rows}, {"bias", l.bias}});
  }
  return nlohmann::json{{"format", "MLP1"},
                        {"layer_sizes", model.layer_sizes},
                        {"hidden_activation", to_string(model.hidden)},
                        {"output_activation", "identity"},
                        {"layers", layers},
                        {"label_scaler", {{"mean", model.scaler.mean}, {"std", model.scaler.std}}}};
}

}  // namespace ppgbp
