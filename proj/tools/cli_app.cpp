#include "cli_app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hsdiff/config.hpp"
#include "hsdiff/cube_io.hpp"
#include "hsdiff/errors.hpp"
#include "hsdiff/metrics.hpp"
#include "hsdiff/noise_sim.hpp"
#include "hsdiff/predictor_io.hpp"
#include "hsdiff/trainer.hpp"

namespace hsdiff::cli {

HsiCube pad_replicate(const HsiCube& cube, int new_height, int new_width) {
  if (new_height < cube.height() || new_width < cube.width())
    throw ArgumentError("pad_replicate: target dims smaller than cube");
  HsiCube out(new_height, new_width, cube.bands());
  for (int b = 0; b < cube.bands(); ++b)
    for (int r = 0; r < new_height; ++r)
      for (int c = 0; c < new_width; ++c)
        out(r, c, b) = cube(std::min(r, cube.height() - 1),
                            std::min(c, cube.width() - 1), b);
  return out;
}

std::vector<int> band_group_starts(int cube_bands, int model_bands) {
  if (model_bands < 1)
    throw ArgumentError("band grouping: model band count must be positive");
  if (cube_bands < model_bands)
    throw ArgumentError(
        "cube has fewer bands than the model was trained on");
  std::vector<int> starts;
  const int step = std::max(1, model_bands / 2);
  for (int s = 0; s + model_bands < cube_bands; s += step) starts.push_back(s);
  starts.push_back(cube_bands - model_bands);
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return starts;
}

HsiCube denoise_cube(const HsiCube& noisy, const NoisePredictor& model,
                     const NoiseSchedule& s, const SamplerConfig& scfg) {
  const int stride = 1 << model.config().depth;
  const int ph = (noisy.height() + stride - 1) / stride * stride;
  const int pw = (noisy.width() + stride - 1) / stride * stride;
  const HsiCube padded = (ph != noisy.height() || pw != noisy.width())
                             ? pad_replicate(noisy, ph, pw)
                             : noisy;
  const int mb = model.config().bands;
  const auto starts = band_group_starts(noisy.bands(), mb);
  CubeT<double> acc(ph, pw, noisy.bands());
  std::vector<int> hits(static_cast<std::size_t>(noisy.bands()), 0);
  const Rng seeder(scfg.seed);
  const auto predict = [&model](const HsiCube& x, int t) {
    return model.predict(x, t);
  };
  for (std::size_t gi = 0; gi < starts.size(); ++gi) {
    const int b0 = starts[gi];
    HsiCube group(ph, pw, mb);
    for (int b = 0; b < mb; ++b) group.band(b) = padded.band(b0 + b);
    SamplerConfig gcfg = scfg;
    if (starts.size() > 1) gcfg.seed = seeder.fork_seed(gi);
    const HsiCube den = truncated_sample(group, predict, s, gcfg);
    for (int b = 0; b < mb; ++b) {
      acc.band(b0 + b) += den.band(b).cast<double>();
      ++hits[static_cast<std::size_t>(b0 + b)];
    }
  }
  HsiCube out(noisy.height(), noisy.width(), noisy.bands());
  for (int b = 0; b < noisy.bands(); ++b)
    out.band(b) = (acc.band(b) / static_cast<double>(hits[b]))
                      .block(0, 0, noisy.height(), noisy.width())
                      .cast<float>();
  return out;
}

namespace {

struct CmdOpts {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Registers a flag that overrides one config key; precedence over the
// config file comes from applying overrides after it.
void kv_opt(CLI::App* sub, const std::shared_ptr<CmdOpts>& o,
            const std::string& flag, const std::string& key,
            const std::string& desc) {
  sub->add_option_function<std::string>(
      flag,
      [o, key](const std::string& v) { o->overrides.emplace_back(key, v); },
      desc);
}

void kv_flag(CLI::App* sub, const std::shared_ptr<CmdOpts>& o,
             const std::string& flag, const std::string& key,
             const std::string& value, const std::string& desc) {
  sub->add_flag_function(
      flag,
      [o, key, value](std::int64_t n) {
        if (n > 0) o->overrides.emplace_back(key, value);
      },
      desc);
}

void add_config_option(CLI::App* sub, const std::shared_ptr<CmdOpts>& o) {
  sub->add_option("--config", o->config_file,
                  "key=value configuration file applied before flags");
}

void merge(KvConfig& cfg, const CmdOpts& o) {
  if (!o.config_file.empty()) cfg.apply_file(o.config_file);
  for (const auto& [k, v] : o.overrides) cfg.set(k, v);
}

std::string need(const KvConfig& cfg, const std::string& key,
                 const std::string& flag) {
  const std::string& v = cfg.get(key);
  if (v.empty()) throw ArgumentError("missing required " + flag);
  return v;
}

void declare_schedule(KvConfig& c) {
  c.declare("schedule.steps", "1000");
  c.declare("schedule.beta_first", "0.0001");
  c.declare("schedule.beta_last", "0.02");
}

NoiseSchedule schedule_from(const KvConfig& c) {
  return linear_schedule(static_cast<int>(c.get_int("schedule.steps")),
                         c.get_double("schedule.beta_first"),
                         c.get_double("schedule.beta_last"));
}

void add_schedule_opts(CLI::App* sub, const std::shared_ptr<CmdOpts>& o) {
  kv_opt(sub, o, "--t-total", "schedule.steps", "diffusion step count");
  kv_opt(sub, o, "--beta-first", "schedule.beta_first",
         "variance at the first step");
  kv_opt(sub, o, "--beta-last", "schedule.beta_last",
         "variance at the last step");
}

void declare_predictor(KvConfig& c) {
  c.declare("predictor.bands", "8");
  c.declare("predictor.base_width", "32");
  c.declare("predictor.depth", "2");
  c.declare("predictor.time_embed_dim", "64");
  c.declare("predictor.seed", "0");
}

PredictorConfig predictor_from(const KvConfig& c) {
  PredictorConfig p;
  p.bands = static_cast<int>(c.get_int("predictor.bands"));
  p.base_width = static_cast<int>(c.get_int("predictor.base_width"));
  p.depth = static_cast<int>(c.get_int("predictor.depth"));
  p.time_embed_dim = static_cast<int>(c.get_int("predictor.time_embed_dim"));
  p.seed = c.get_u64("predictor.seed");
  return p;
}

void declare_train(KvConfig& c) {
  c.declare("train.steps", "1000");
  c.declare("train.batch_size", "16");
  c.declare("train.learning_rate", "0.0001");
  c.declare("train.adam_beta1", "0.9");
  c.declare("train.adam_beta2", "0.999");
  c.declare("train.adam_epsilon", "1e-8");
  c.declare("train.seed", "0");
  c.declare("train.checkpoint_every", "0");
  c.declare("train.log_every", "50");
  c.declare("patch.size", "32");
  c.declare("patch.stride", "32");
}

TrainConfig train_from(const KvConfig& c) {
  TrainConfig t;
  t.steps = c.get_int("train.steps");
  t.batch_size = static_cast<int>(c.get_int("train.batch_size"));
  t.learning_rate = c.get_double("train.learning_rate");
  t.adam_beta1 = c.get_double("train.adam_beta1");
  t.adam_beta2 = c.get_double("train.adam_beta2");
  t.adam_epsilon = c.get_double("train.adam_epsilon");
  t.seed = c.get_u64("train.seed");
  t.checkpoint_every = c.get_int("train.checkpoint_every");
  t.log_every = c.get_int("train.log_every");
  return t;
}

void declare_sampler(KvConfig& c) {
  c.declare("sampler.t_cut", "35");
  c.declare("sampler.stochastic", "1");
  c.declare("sampler.seed", "0");
  c.declare("sampler.scale_input", "0");
}

SamplerConfig sampler_from(const KvConfig& c) {
  SamplerConfig s;
  s.t_cut = static_cast<int>(c.get_int("sampler.t_cut"));
  s.stochastic = c.get_bool("sampler.stochastic");
  s.seed = c.get_u64("sampler.seed");
  s.scale_input = c.get_bool("sampler.scale_input");
  return s;
}

void add_sampler_opts(CLI::App* sub, const std::shared_ptr<CmdOpts>& o) {
  kv_opt(sub, o, "--t-cut", "sampler.t_cut",
         "truncation step the reverse chain starts from");
  kv_opt(sub, o, "--seed", "sampler.seed", "sampler noise seed");
  kv_flag(sub, o, "--deterministic", "sampler.stochastic", "0",
          "drop the stochastic term from every reverse step");
  kv_flag(sub, o, "--scale-input", "sampler.scale_input", "1",
          "pre-scale the input as if it were a forward-diffused sample");
}

void declare_noise(KvConfig& c) {
  c.declare("noise.awgn", "0");
  c.declare("noise.awgn_sigma_lo", "0");
  c.declare("noise.awgn_sigma_hi", "0");
  c.declare("noise.impulse", "0");
  c.declare("noise.impulse_density", "0");
  c.declare("noise.impulse_bands", "all");
  c.declare("noise.stripes", "0");
  c.declare("noise.stripe_bands", "all");
  c.declare("noise.stripe_fraction", "0");
  c.declare("noise.stripe_intensity", "0");
  c.declare("noise.seed", "0");
}

BandRule band_rule_from(const std::string& s) {
  if (s == "all") return BandRule::all();
  std::istringstream is(s);
  double f = 0.0;
  if (!(is >> f) || !(is >> std::ws).eof())
    throw ArgumentError("band rule must be 'all' or a fraction, got: " + s);
  return BandRule::subset(f);
}

NoiseSpec noise_from(const KvConfig& c) {
  NoiseSpec n;
  n.has_awgn = c.get_bool("noise.awgn");
  n.awgn_sigma_lo = c.get_double("noise.awgn_sigma_lo");
  n.awgn_sigma_hi = c.get_double("noise.awgn_sigma_hi");
  n.has_impulse = c.get_bool("noise.impulse");
  n.impulse_density = c.get_double("noise.impulse_density");
  n.impulse_bands = band_rule_from(c.get("noise.impulse_bands"));
  n.has_stripes = c.get_bool("noise.stripes");
  n.stripe_bands = band_rule_from(c.get("noise.stripe_bands"));
  n.stripe_fraction = c.get_double("noise.stripe_fraction");
  n.stripe_intensity = c.get_double("noise.stripe_intensity");
  n.seed = c.get_u64("noise.seed");
  return n;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    std::istringstream one(item);
    int v = 0;
    if (!(one >> v) || !(one >> std::ws).eof())
      throw ArgumentError("bad integer in list: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw ArgumentError("empty integer list");
  return out;
}

void setup_convert(CLI::App& app) {
  auto o = std::make_shared<CmdOpts>();
  auto* sub = app.add_subcommand(
      "convert", "pack a raw float32 band-planar file into a cube file");
  add_config_option(sub, o);
  kv_opt(sub, o, "--in", "in", "raw little-endian float32 payload");
  kv_opt(sub, o, "--out", "out", "output cube path");
  kv_opt(sub, o, "--height", "convert.height", "rows per band");
  kv_opt(sub, o, "--width", "convert.width", "columns per band");
  kv_opt(sub, o, "--bands", "convert.bands", "band count");
  kv_opt(sub, o, "--normalize", "convert.normalize",
         "none, minmax, or lo:hi fixed range");
  sub->callback([o]() {
    KvConfig cfg;
    cfg.declare("in", "");
    cfg.declare("out", "");
    cfg.declare("convert.height", "0");
    cfg.declare("convert.width", "0");
    cfg.declare("convert.bands", "0");
    cfg.declare("convert.normalize", "none");
    merge(cfg, *o);
    const std::string in = need(cfg, "in", "--in");
    const std::string out = need(cfg, "out", "--out");
    const int h = static_cast<int>(cfg.get_int("convert.height"));
    const int w = static_cast<int>(cfg.get_int("convert.width"));
    const int b = static_cast<int>(cfg.get_int("convert.bands"));
    HsiCube cube(h, w, b);
    std::ifstream is(in, std::ios::binary);
    if (!is) throw IoError("cannot open: " + in);
    if (!detail::get_f32_block(is, cube.flat().data(),
                               static_cast<std::size_t>(cube.size())))
      throw FormatError("raw payload shorter than the declared dims");
    if (is.peek() != std::char_traits<char>::eof())
      throw FormatError("raw payload longer than the declared dims");
    if (!cube.all_finite())
      throw ValueError("raw payload contains non-finite values");
    const std::string mode = cfg.get("convert.normalize");
    if (mode == "minmax") {
      cube = minmax_normalize(cube);
    } else if (mode != "none") {
      const auto colon = mode.find(':');
      if (colon == std::string::npos)
        throw ArgumentError("--normalize expects none, minmax, or lo:hi");
      std::istringstream lo_s(mode.substr(0, colon));
      std::istringstream hi_s(mode.substr(colon + 1));
      double lo = 0.0, hi = 0.0;
      if (!(lo_s >> lo) || !(hi_s >> hi))
        throw ArgumentError("--normalize expects none, minmax, or lo:hi");
      cube = normalize(cube, lo, hi);
    }
    save_cube(cube, out);
    cfg.write_snapshot(out + ".cfg");
    std::cout << "wrote " << out << ": " << h << "x" << w << "x" << b
              << ", range [" << cube.flat().minCoeff() << ", "
              << cube.flat().maxCoeff() << "]\n";
  });
}

void setup_simulate(CLI::App& app) {
  auto o = std::make_shared<CmdOpts>();
  auto* sub = app.add_subcommand(
      "simulate", "degrade a clean cube with a seeded noise composition");
  add_config_option(sub, o);
  kv_opt(sub, o, "--in", "in", "clean cube");
  kv_opt(sub, o, "--out", "out", "noisy cube to write");
  sub->add_flag_function(
      "--hybrid",
      [o](std::int64_t n) {
        if (n <= 0) return;
        auto kv = to_key_values(hybrid_spec(0));
        kv.erase("noise.seed");
        for (const auto& [k, v] : kv) o->overrides.emplace_back(k, v);
      },
      "banded gaussian + impulse + stripe composition defaults");
  sub->add_option_function<std::string>(
      "--awgn",
      [o](const std::string& v) {
        o->overrides.emplace_back("noise.awgn", "1");
        o->overrides.emplace_back("noise.awgn_sigma_lo", v);
        o->overrides.emplace_back("noise.awgn_sigma_hi", v);
      },
      "gaussian noise sigma on the 8-bit scale");
  sub->add_option_function<std::string>(
      "--awgn-range",
      [o](const std::string& v) {
        const auto colon = v.find(':');
        if (colon == std::string::npos)
          throw ArgumentError("--awgn-range expects lo:hi");
        o->overrides.emplace_back("noise.awgn", "1");
        o->overrides.emplace_back("noise.awgn_sigma_lo", v.substr(0, colon));
        o->overrides.emplace_back("noise.awgn_sigma_hi", v.substr(colon + 1));
      },
      "per-band gaussian sigma range lo:hi on the 8-bit scale");
  sub->add_option_function<std::string>(
      "--impulse",
      [o](const std::string& v) {
        o->overrides.emplace_back("noise.impulse", "1");
        o->overrides.emplace_back("noise.impulse_density", v);
      },
      "salt-and-pepper corruption probability");
  kv_opt(sub, o, "--impulse-bands", "noise.impulse_bands",
         "bands hit by impulse noise: all or a fraction");
  sub->add_option_function<std::string>(
      "--stripes",
      [o](const std::string& v) {
        o->overrides.emplace_back("noise.stripes", "1");
        o->overrides.emplace_back("noise.stripe_fraction", v);
      },
      "fraction of columns striped per affected band");
  kv_opt(sub, o, "--stripe-bands", "noise.stripe_bands",
         "bands hit by stripes: all or a fraction");
  kv_opt(sub, o, "--stripe-intensity", "noise.stripe_intensity",
         "maximum absolute stripe offset");
  kv_opt(sub, o, "--seed", "noise.seed", "noise seed");
  sub->callback([o]() {
    KvConfig cfg;
    cfg.declare("in", "");
    cfg.declare("out", "");
    declare_noise(cfg);
    merge(cfg, *o);
    const std::string in = need(cfg, "in", "--in");
    const std::string out = need(cfg, "out", "--out");
    const NoiseSpec spec = noise_from(cfg);
    const HsiCube noisy = apply_noise(load_cube(in), spec);
    save_cube(noisy, out);
    cfg.write_snapshot(out + ".cfg");
    std::cout << "wrote " << out << "\n";
  });
}

void setup_train(CLI::App& app) {
  auto o = std::make_shared<CmdOpts>();
  auto* sub = app.add_subcommand(
      "train", "fit the noise predictor on cubes listed in a manifest");
  add_config_option(sub, o);
  kv_opt(sub, o, "--manifest", "manifest", "dataset manifest (role<TAB>path)");
  kv_opt(sub, o, "--out", "out", "weight file to write");
  kv_opt(sub, o, "--steps", "train.steps", "optimization step budget");
  kv_opt(sub, o, "--batch-size", "train.batch_size", "patches per step");
  kv_opt(sub, o, "--lr", "train.learning_rate", "Adam learning rate");
  kv_opt(sub, o, "--seed", "train.seed", "training seed");
  kv_opt(sub, o, "--checkpoint-every", "train.checkpoint_every",
         "write a checkpoint every N steps (0 = off)");
  kv_opt(sub, o, "--log-every", "train.log_every",
         "log the loss every N steps");
  kv_opt(sub, o, "--patch-size", "patch.size", "square patch side");
  kv_opt(sub, o, "--patch-stride", "patch.stride", "patch tiling stride");
  kv_opt(sub, o, "--bands", "predictor.bands", "model band count");
  kv_opt(sub, o, "--base-width", "predictor.base_width",
         "channels at full resolution");
  kv_opt(sub, o, "--depth", "predictor.depth", "downsampling levels");
  kv_opt(sub, o, "--time-embed-dim", "predictor.time_embed_dim",
         "step embedding width");
  kv_opt(sub, o, "--init-seed", "predictor.seed",
         "weight initialization seed");
  add_schedule_opts(sub, o);
  sub->callback([o]() {
    KvConfig cfg;
    cfg.declare("manifest", "");
    cfg.declare("out", "");
    declare_schedule(cfg);
    declare_predictor(cfg);
    declare_train(cfg);
    merge(cfg, *o);
    const std::string manifest_path = need(cfg, "manifest", "--manifest");
    const std::string out = need(cfg, "out", "--out");
    const DatasetManifest manifest = load_manifest(manifest_path);
    const NoiseSchedule s = schedule_from(cfg);
    const PredictorConfig pcfg = predictor_from(cfg);
    const TrainConfig tcfg = train_from(cfg);
    PatchSpec patch;
    patch.patch_size = static_cast<int>(cfg.get_int("patch.size"));
    patch.stride = static_cast<int>(cfg.get_int("patch.stride"));
    patch.band_count = pcfg.bands;
    TrainSinks sinks;
    sinks.checkpoint_prefix = out + ".ckpt";
    sinks.loss_csv = out + ".loss.csv";
    const NoisePredictor model = train(manifest, patch, pcfg, tcfg, s, sinks);
    save_weights(model, out);
    cfg.write_snapshot(out + ".cfg");
    std::cout << "trained " << tcfg.steps << " steps, wrote " << out << "\n";
  });
}

void setup_denoise(CLI::App& app) {
  auto o = std::make_shared<CmdOpts>();
  auto* sub = app.add_subcommand(
      "denoise", "run the truncated reverse chain on a noisy cube");
  add_config_option(sub, o);
  kv_opt(sub, o, "--in", "in", "noisy cube");
  kv_opt(sub, o, "--weights", "weights", "trained weight file");
  kv_opt(sub, o, "--out", "out", "denoised cube to write");
  add_sampler_opts(sub, o);
  add_schedule_opts(sub, o);
  sub->callback([o]() {
    KvConfig cfg;
    cfg.declare("in", "");
    cfg.declare("weights", "");
    cfg.declare("out", "");
    declare_schedule(cfg);
    declare_sampler(cfg);
    merge(cfg, *o);
    const std::string in = need(cfg, "in", "--in");
    const std::string weights = need(cfg, "weights", "--weights");
    const std::string out = need(cfg, "out", "--out");
    const NoiseSchedule s = schedule_from(cfg);
    const SamplerConfig scfg = sampler_from(cfg);
    const NoisePredictor model = load_weights(weights);
    const HsiCube noisy = load_cube(in);
    const HsiCube denoised = denoise_cube(noisy, model, s, scfg);
    save_cube(denoised, out);
    cfg.write_snapshot(out + ".cfg");
    std::cout << "wrote " << out << "\n";
  });
}

void setup_evaluate(CLI::App& app) {
  auto o = std::make_shared<CmdOpts>();
  auto* sub = app.add_subcommand(
      "evaluate", "print reference-vs-estimate quality metrics as CSV");
  add_config_option(sub, o);
  kv_opt(sub, o, "--ref", "ref", "reference cube");
  kv_opt(sub, o, "--est", "est", "estimated cube");
  kv_opt(sub, o, "--csv", "csv",
         "append the row to this CSV (header written on creation)");
  kv_opt(sub, o, "--label", "label", "optional leading label column");
  sub->callback([o]() {
    KvConfig cfg;
    cfg.declare("ref", "");
    cfg.declare("est", "");
    cfg.declare("csv", "");
    cfg.declare("label", "");
    merge(cfg, *o);
    const std::string ref = need(cfg, "ref", "--ref");
    const std::string est = need(cfg, "est", "--est");
    const MetricReport report = evaluate(load_cube(ref), load_cube(est));
    const std::string label = cfg.get("label");
    const std::string row =
        label.empty() ? metric_csv_row(report)
                      : label + "," + metric_csv_row(report);
    std::cout << row << "\n";
    const std::string csv = cfg.get("csv");
    if (!csv.empty()) {
      const bool fresh = !std::filesystem::exists(csv) ||
                         std::filesystem::file_size(csv) == 0;
      std::ofstream os(csv, std::ios::app);
      if (!os) throw IoError("cannot open for append: " + csv);
      if (fresh)
        os << (label.empty() ? std::string(kMetricCsvHeader)
                             : "label," + std::string(kMetricCsvHeader))
           << "\n";
      os << row << "\n";
      cfg.write_snapshot(csv + ".cfg");
    }
  });
}

void setup_sweep(CLI::App& app) {
  auto o = std::make_shared<CmdOpts>();
  auto* sub = app.add_subcommand(
      "sweep-tcut",
      "denoise at several truncation steps and tabulate the metrics");
  add_config_option(sub, o);
  kv_opt(sub, o, "--in", "in", "noisy cube");
  kv_opt(sub, o, "--ref", "ref", "clean reference cube");
  kv_opt(sub, o, "--weights", "weights", "trained weight file");
  kv_opt(sub, o, "--out", "out", "CSV to write");
  kv_opt(sub, o, "--t-cut-list", "sweep.t_cut_list",
         "comma-separated truncation steps");
  kv_opt(sub, o, "--seed", "sampler.seed",
         "sampler seed shared by every run");
  kv_flag(sub, o, "--deterministic", "sampler.stochastic", "0",
          "drop the stochastic term from every reverse step");
  add_schedule_opts(sub, o);
  sub->callback([o]() {
    KvConfig cfg;
    cfg.declare("in", "");
    cfg.declare("ref", "");
    cfg.declare("weights", "");
    cfg.declare("out", "");
    cfg.declare("sweep.t_cut_list", "5,15,25,35,50,75,100");
    declare_schedule(cfg);
    declare_sampler(cfg);
    merge(cfg, *o);
    const std::string in = need(cfg, "in", "--in");
    const std::string ref_path = need(cfg, "ref", "--ref");
    const std::string weights = need(cfg, "weights", "--weights");
    const std::string out = need(cfg, "out", "--out");
    const NoiseSchedule s = schedule_from(cfg);
    std::vector<int> cuts = parse_int_list(cfg.get("sweep.t_cut_list"));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (const int c : cuts)
      if (c < 1 || c > s.T)
        throw ArgumentError("t_cut " + std::to_string(c) +
                            " outside [1, " + std::to_string(s.T) + "]");
    const NoisePredictor model = load_weights(weights);
    const HsiCube noisy = load_cube(in);
    const HsiCube reference = load_cube(ref_path);
    require_same_shape(reference, noisy, "sweep");
    std::ofstream os(out, std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + out);
    os << "t_cut," << kMetricCsvHeader << "\n";
    for (const int c : cuts) {
      SamplerConfig scfg = sampler_from(cfg);
      scfg.t_cut = c;
      const HsiCube denoised = denoise_cube(noisy, model, s, scfg);
      os << c << "," << metric_csv_row(evaluate(reference, denoised))
         << "\n";
    }
    if (!os) throw IoError("write failed: " + out);
    os.close();
    cfg.write_snapshot(out + ".cfg");
    std::cout << "wrote " << out << " (" << cuts.size() << " rows)\n";
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"hyperspectral cube denoising with a truncated diffusion "
               "sampler",
               "hsdiff"};
  app.require_subcommand(1);
  setup_convert(app);
  setup_simulate(app);
  setup_train(app);
  setup_denoise(app);
  setup_evaluate(app);
  setup_sweep(app);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace hsdiff::cli
