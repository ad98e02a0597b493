#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "hsdiff/cube.hpp"
#include "hsdiff/cube_io.hpp"
#include "hsdiff/diffusion.hpp"
#include "hsdiff/errors.hpp"
#include "hsdiff/predictor.hpp"
#include "hsdiff/predictor_io.hpp"
#include "hsdiff/rng.hpp"
#include "hsdiff/schedule.hpp"

namespace hsdiff {

struct TrainConfig {
  long long steps = 1000;
  int batch_size = 16;
  double learning_rate = 0.0001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  long long checkpoint_every = 0;  // 0 disables checkpoints
  long long log_every = 50;
};

inline void validate(const TrainConfig& cfg) {
  if (cfg.steps < 1) throw ArgumentError("train: steps must be >= 1");
  if (cfg.batch_size < 1)
    throw ArgumentError("train: batch_size must be >= 1");
  if (!(cfg.learning_rate > 0.0))
    throw ArgumentError("train: learning_rate must be > 0");
  if (cfg.adam_beta1 < 0.0 || cfg.adam_beta1 >= 1.0 || cfg.adam_beta2 < 0.0 ||
      cfg.adam_beta2 >= 1.0)
    throw ArgumentError("train: adam betas must be in [0, 1)");
  if (!(cfg.adam_epsilon > 0.0))
    throw ArgumentError("train: adam_epsilon must be > 0");
}

struct AdamParams {
  double learning_rate = 0.0001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

inline AdamParams adam_params(const TrainConfig& cfg) {
  return {cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
          cfg.adam_epsilon};
}

// One bias-corrected Adam step; `step` is the 1-based update count.
template <typename S>
void adam_update(MatX<S>& value, const MatX<S>& grad, MatX<S>& m, MatX<S>& v,
                 long long step, const AdamParams& ap) {
  const S b1 = static_cast<S>(ap.beta1);
  const S b2 = static_cast<S>(ap.beta2);
  m = b1 * m + (S(1) - b1) * grad;
  v.array() = b2 * v.array() + (S(1) - b2) * grad.array().square();
  const S c1 = static_cast<S>(1.0 - std::pow(ap.beta1, step));
  const S c2 = static_cast<S>(1.0 - std::pow(ap.beta2, step));
  value.array() -= static_cast<S>(ap.learning_rate) * (m.array() / c1) /
                   ((v.array() / c2).sqrt() + static_cast<S>(ap.epsilon));
}

template <typename S>
struct TrainSample {
  CubeT<S> x0;
  int t = 1;
  CubeT<S> epsilon;
};

template <typename S>
struct TrainStateT {
  NoisePredictorT<S> predictor;
  std::vector<MatX<S>> m, v;
  long long iteration = 0;
  std::vector<double> loss_history;

  explicit TrainStateT(NoisePredictorT<S> p) : predictor(std::move(p)) {
    m.reserve(predictor.params().size());
    v.reserve(predictor.params().size());
    for (const auto& q : predictor.params()) {
      m.push_back(MatX<S>::Zero(q.value.rows(), q.value.cols()));
      v.push_back(MatX<S>::Zero(q.value.rows(), q.value.cols()));
    }
  }
};

using TrainState = TrainStateT<float>;

inline int draw_step_index(Rng& rng, int T) {
  return 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(T)));
}

// Mean squared noise-prediction error over the batch, with parameter
// gradients accumulated for exactly that mean. Grads are zeroed first.
template <typename S>
double loss_and_grads(NoisePredictorT<S>& p,
                      const std::vector<TrainSample<S>>& samples,
                      const NoiseSchedule& s) {
  if (samples.empty()) throw ArgumentError("loss_and_grads: empty batch");
  for (const auto& sm : samples) {
    require_same_shape(sm.x0, samples.front().x0, "loss_and_grads");
    require_same_shape(sm.x0, sm.epsilon, "loss_and_grads");
  }
  p.zero_grads();
  const double denom = static_cast<double>(samples.size()) *
                       static_cast<double>(samples.front().x0.size());
  double loss = 0.0;
  for (const auto& sm : samples) {
    const double ab = alpha_bar(s, sm.t);
    CubeT<S> x_t(sm.x0.height(), sm.x0.width(), sm.x0.bands());
    x_t.flat() = static_cast<S>(std::sqrt(ab)) * sm.x0.flat() +
                 static_cast<S>(std::sqrt(1.0 - ab)) * sm.epsilon.flat();
    ForwardCache<S> cache;
    const CubeT<S> eps_hat = p.forward(x_t, sm.t, cache);
    CubeT<S> diff(sm.x0.height(), sm.x0.width(), sm.x0.bands());
    diff.flat() = eps_hat.flat() - sm.epsilon.flat();
    loss += diff.flat().template cast<double>().square().sum() / denom;
    CubeT<S> dout(sm.x0.height(), sm.x0.width(), sm.x0.bands());
    dout.flat() = diff.flat() * static_cast<S>(2.0 / denom);
    p.backward(cache, dout);
  }
  return loss;
}

// One optimization step: sample (t, noise) per patch, compute loss and
// gradients, apply Adam. Throws DivergenceError instead of propagating a
// non-finite state.
template <typename S>
double train_step(TrainStateT<S>& state, const std::vector<CubeT<S>>& batch,
                  const NoiseSchedule& s, const TrainConfig& cfg, Rng& rng) {
  if (batch.empty()) throw ArgumentError("train_step: empty batch");
  std::vector<TrainSample<S>> samples;
  samples.reserve(batch.size());
  for (const auto& x0 : batch) {
    TrainSample<S> sm;
    sm.t = draw_step_index(rng, s.T);
    sm.epsilon = gaussian_cube<S>(x0.height(), x0.width(), x0.bands(), rng);
    sm.x0 = x0;
    samples.push_back(std::move(sm));
  }
  const double loss = loss_and_grads(state.predictor, samples, s);
  if (!std::isfinite(loss))
    throw DivergenceError("training loss is not finite at iteration " +
                          std::to_string(state.iteration + 1));
  ++state.iteration;
  const AdamParams ap = adam_params(cfg);
  auto& params = state.predictor.params();
  for (std::size_t i = 0; i < params.size(); ++i)
    adam_update(params[i].value, params[i].grad, state.m[i], state.v[i],
                state.iteration, ap);
  if (!state.predictor.parameters_finite())
    throw DivergenceError("parameters diverged at iteration " +
                          std::to_string(state.iteration));
  state.loss_history.push_back(loss);
  return loss;
}

// Optimizer sidecar: the weight container layout with per-parameter first
// and second moment records (".m"/".v" suffixes) and the iteration counter
// in the config block.
inline void save_optimizer_state(const TrainState& state,
                                 const std::string& path) {
  auto config = config_kv(state.predictor.config());
  config["iteration"] = std::to_string(state.iteration);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  detail::write_container_header(os, config);
  const auto& params = state.predictor.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    detail::write_record(os, params[i].name + ".m", params[i].dims,
                         state.m[i].data(),
                         static_cast<std::size_t>(state.m[i].size()));
    detail::write_record(os, params[i].name + ".v", params[i].dims,
                         state.v[i].data(),
                         static_cast<std::size_t>(state.v[i].size()));
  }
  if (!os) throw IoError("write failed: " + path);
}

inline void load_optimizer_state(TrainState& state, const std::string& path) {
  const auto wc = detail::read_weight_container(path);
  state.iteration = detail::kv_int(wc.config, "iteration");
  const auto& params = state.predictor.params();
  if (wc.records.size() != 2 * params.size())
    throw FormatError("optimizer state: record count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& rm = wc.records[2 * i];
    const auto& rv = wc.records[2 * i + 1];
    if (rm.name != params[i].name + ".m" || rv.name != params[i].name + ".v")
      throw FormatError("optimizer state: unexpected record " + rm.name);
    if (rm.payload.size() != static_cast<std::size_t>(state.m[i].size()) ||
        rv.payload.size() != static_cast<std::size_t>(state.v[i].size()))
      throw FormatError("optimizer state: moment size mismatch");
    std::copy(rm.payload.begin(), rm.payload.end(), state.m[i].data());
    std::copy(rv.payload.begin(), rv.payload.end(), state.v[i].data());
  }
}

inline HsiCube normalized_for_manifest(HsiCube cube,
                                       const DatasetManifest& manifest) {
  switch (manifest.norm) {
    case DatasetManifest::Norm::MinMax:
      return minmax_normalize(cube);
    case DatasetManifest::Norm::Fixed:
      return normalize(cube, manifest.norm_lo, manifest.norm_hi);
    case DatasetManifest::Norm::None:
      return cube;
  }
  throw ContractError("unreachable normalization kind");
}

struct TrainSinks {
  std::string checkpoint_prefix;  // "<prefix>_<iteration>.tdfw" (+ ".opt")
  std::string loss_csv;
};

// Full training run over the manifest's train cubes: patches are cut once
// up front, then each step samples a batch with replacement. Deterministic
// given cfg.seed (sub-streams 1..3: patch cutting, batch choice, noise).
inline NoisePredictor train(const DatasetManifest& manifest,
                            const PatchSpec& patch,
                            const PredictorConfig& pcfg,
                            const TrainConfig& tcfg, const NoiseSchedule& s,
                            const TrainSinks& sinks = {}) {
  validate(pcfg);
  validate(tcfg);
  if (patch.band_count != pcfg.bands)
    throw ArgumentError("train: patch band_count must equal predictor bands");
  const auto train_paths = manifest.paths("train");
  if (train_paths.empty())
    throw ArgumentError("train: manifest has no train entries");
  Rng root(tcfg.seed);
  Rng patch_seeder = root.fork(1);
  std::vector<HsiCube> patches;
  for (const auto& path : train_paths) {
    const HsiCube cube = normalized_for_manifest(load_cube(path), manifest);
    auto cut = extract_patches(cube, patch, patch_seeder.next_u64());
    for (auto& p : cut) patches.push_back(std::move(p));
  }
  if (patches.empty())
    throw ArgumentError("train: no patches could be extracted");

  TrainState state{NoisePredictor(pcfg)};
  Rng batch_rng = root.fork(2);
  Rng noise_rng = root.fork(3);
  std::ofstream log;
  if (!sinks.loss_csv.empty()) {
    log.open(sinks.loss_csv, std::ios::trunc);
    if (!log) throw IoError("cannot open for writing: " + sinks.loss_csv);
    log << "iteration,loss\n";
  }
  std::vector<HsiCube> batch(static_cast<std::size_t>(tcfg.batch_size));
  for (long long step = 1; step <= tcfg.steps; ++step) {
    for (auto& slot : batch)
      slot = patches[batch_rng.uniform_int(patches.size())];
    const double loss = train_step(state, batch, s, tcfg, noise_rng);
    if (log.is_open() &&
        (state.iteration % tcfg.log_every == 0 || step == tcfg.steps))
      log << state.iteration << "," << loss << "\n";
    if (tcfg.checkpoint_every > 0 &&
        state.iteration % tcfg.checkpoint_every == 0 &&
        !sinks.checkpoint_prefix.empty()) {
      const std::string base = sinks.checkpoint_prefix + "_" +
                               std::to_string(state.iteration) + ".tdfw";
      save_weights(state.predictor, base);
      save_optimizer_state(state, base + ".opt");
    }
  }
  return std::move(state.predictor);
}

}  // namespace hsdiff
