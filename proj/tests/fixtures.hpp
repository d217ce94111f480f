#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "ppgbp/mlp.hpp"

namespace fixtures {

using namespace ppgbp;

inline LabeledBeat make_beat(std::vector<double> values, double sbp, double dbp, double map) {
  LabeledBeat b;
  b.vector.valid_len = values.size();
  b.vector.values = std::move(values);
  b.label = {sbp, dbp, map};
  return b;
}

// Mean of the vector over [0,50), [50,100) and [100,150).
inline std::vector<double> linear_features(const std::vector<double>& v) {
  double a = 0, b = 0, c = 0;
  for (std::size_t i = 0; i < 50; ++i) a += v[i];
  for (std::size_t i = 50; i < 100; ++i) b += v[i];
  for (std::size_t i = 100; i < 150; ++i) c += v[i];
  return {a / 50, b / 50, c / 50};
}

// Beats built from three latent factors over fixed smooth basis shapes; the
// labels are an affine map of three linear statistics of the vector plus noise.
struct LinearTask {
  BeatDataset train, val;
  double noise_floor = 0.0;  // standardized MSE of the least-squares fit on val
};

inline LinearTask linear_task(std::size_t n_train, std::size_t n_val, double noise, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::size_t dim = 160;
  auto make = [&](std::size_t n) {
    BeatDataset set;
    std::vector<std::vector<double>> feats;
    for (std::size_t i = 0; i < n; ++i) {
      const double z0 = nd(gen), z1 = nd(gen), z2 = nd(gen);
      std::vector<double> v(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        const double t = static_cast<double>(k) / dim;
        v[k] = 0.5 + 0.12 * z0 * std::sin(std::numbers::pi * t) + 0.08 * z1 * std::cos(2 * std::numbers::pi * t) +
               0.06 * z2 * t + 0.01 * nd(gen);
      }
      const auto f = linear_features(v);
      const double sbp = 120 + 150 * f[0] - 60 * f[1] + 40 * f[2] + noise * 10 * nd(gen);
      const double dbp = 70 + 40 * f[0] + 50 * f[2] + noise * 5 * nd(gen);
      set.push_back(make_beat(std::move(v), sbp, dbp, mean_arterial(sbp, dbp)));
      feats.push_back(f);
    }
    return std::pair{set, feats};
  };
  auto [tr, ftr] = make(n_train);
  auto [va, fva] = make(n_val);

  LinearTask task{tr, va, 0.0};
  for (int k = 0; k < 3; ++k) {
    auto pick = [k](const BpLabel& l) { return k == 0 ? l.sbp : k == 1 ? l.dbp : l.map; };
    std::vector<double> ytr;
    for (const auto& b : tr) ytr.push_back(pick(b.label));
    const auto beta = oracle::least_squares(ftr, ytr);
    const auto [m, sd] = oracle::mean_std(ytr);
    double sse = 0;
    for (std::size_t i = 0; i < va.size(); ++i) {
      double pred = beta[0];
      for (int j = 0; j < 3; ++j) pred += beta[j + 1] * fva[i][j];
      const double r = (pred - pick(va[i].label)) / sd;
      sse += r * r;
    }
    task.noise_floor += sse / va.size() / 3.0;
  }
  return task;
}

inline BeatDataset random_dataset(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  BeatDataset out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = u(gen);
    const double s = 120 + 10 * nd(gen), d = 70 + 5 * nd(gen);
    out.push_back(make_beat(std::move(v), s, d, mean_arterial(s, d)));
  }
  return out;
}

// Straightforward forward pass on the definitions, returning pre-activations too.
inline std::vector<std::vector<double>> pre_activations(const MlpModel& m, std::span<const double> x) {
  std::vector<std::vector<double>> zs;
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& d = m.layers[l];
    std::vector<double> z(d.out);
    for (std::size_t o = 0; o < d.out; ++o) {
      long double s = d.bias[o];
      for (std::size_t i = 0; i < d.in; ++i) s += static_cast<long double>(d.weights[o * d.in + i]) * a[i];
      z[o] = static_cast<double>(s);
    }
    zs.push_back(z);
    a = z;
    if (l + 1 < m.layers.size())
      for (auto& v : a) v = m.hidden == Activation::relu ? std::max(0.0, v) : std::tanh(v);
  }
  return zs;
}


struct GradCheck {
  std::size_t draws = 0;
  std::size_t coords = 0;
  std::size_t failures = 0;  // coordinates outside 1e-6 absolute and 1e-4 relative
  double worst_abs = 0.0;
};

// Random small models (tanh and ReLU alternating) on random batches, analytic
// gradient against central differences with step 1e-5. ReLU draws with a
// pre-activation within 1e-3 of the kink are redrawn.
inline GradCheck gradient_check(std::size_t wanted, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  GradCheck out;
  std::size_t attempts = 0;
  while (out.draws < wanted && attempts < 50 * wanted) {
    ++attempts;
    const Activation act = attempts % 2 ? Activation::tanh : Activation::relu;
    const std::vector<std::size_t> sizes{2 + gen() % 6, 1 + gen() % 5, 1 + gen() % 4, 3};
    auto m = init_model(sizes, gen(), act);
    std::vector<double> p = flatten(m);
    for (auto& v : p) v = 0.7 * nd(gen);
    unflatten(m, p);
    m.scaler = {{1.0 + nd(gen), nd(gen), nd(gen)}, {0.5 + std::abs(nd(gen)), 1.3, 0.8}};
    const auto batch = random_dataset(1 + gen() % 6, sizes[0], gen());

    if (act == Activation::relu) {
      bool near_kink = false;
      for (const auto& b : batch) {
        const auto zs = pre_activations(m, b.vector.values);
        for (std::size_t l = 0; l + 1 < zs.size(); ++l)
          for (double z : zs[l]) near_kink |= std::abs(z) < 1e-3;
      }
      if (near_kink) continue;
    }

    const auto g = flatten(loss_and_gradient(m, batch).second);
    const auto fd = oracle::finite_diff(
        [&](std::span<const double> q) {
          MlpModel t = m;
          unflatten(t, q);
          return loss(t, batch);
        },
        p, 1e-5);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double err = std::abs(g[i] - fd[i]);
      out.worst_abs = std::max(out.worst_abs, err);
      if (err > 1e-6 && err > 1e-4 * std::abs(fd[i])) ++out.failures;
    }
    out.coords += g.size();
    ++out.draws;
  }
  return out;
}

}  // namespace fixtures
