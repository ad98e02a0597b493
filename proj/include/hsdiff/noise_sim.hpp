#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hsdiff/cube.hpp"
#include "hsdiff/errors.hpp"
#include "hsdiff/rng.hpp"

namespace hsdiff {

// Which bands a degradation component touches: all of them, or a seeded
// random subset of floor(fraction * bands) distinct bands.
struct BandRule {
  enum class Kind { All, Fraction } kind = Kind::All;
  double fraction = 1.0;

  static BandRule all() { return {Kind::All, 1.0}; }
  static BandRule subset(double f) { return {Kind::Fraction, f}; }
};

namespace detail {

// Partial Fisher-Yates: k distinct indices from [0, n), seeded order.
inline std::vector<int> sample_indices(int n, int k, Rng& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline std::vector<int> select_bands(const BandRule& rule, int bands,
                                     Rng& rng) {
  if (rule.kind == BandRule::Kind::All) {
    std::vector<int> all(bands);
    for (int b = 0; b < bands; ++b) all[b] = b;
    return all;
  }
  if (rule.fraction < 0.0 || rule.fraction > 1.0)
    throw ArgumentError("band rule fraction out of [0, 1]");
  const int k = static_cast<int>(rule.fraction * bands);
  return sample_indices(bands, k, rng);
}

}  // namespace detail

// Additive white Gaussian noise, sigma given on the 8-bit [0, 255] scale.
// Band b draws from rng.fork(b), so bands are independent streams.
inline HsiCube add_awgn(const HsiCube& cube, double sigma8, Rng& rng) {
  if (sigma8 < 0.0) throw ArgumentError("add_awgn: sigma must be >= 0");
  HsiCube out = cube;
  const double sigma = sigma8 / 255.0;
  for (int b = 0; b < cube.bands(); ++b) {
    Rng rb = rng.fork(static_cast<std::uint64_t>(b));
    auto plane = out.band(b);
    for (int r = 0; r < cube.height(); ++r)
      for (int c = 0; c < cube.width(); ++c)
        plane(r, c) += static_cast<float>(sigma * rb.gaussian());
  }
  return clamp01(std::move(out));
}

// Per-band sigma drawn uniformly from [sigma_lo, sigma_hi] (8-bit units);
// with sigma_lo == sigma_hi this is exactly add_awgn.
inline HsiCube add_awgn_banded(const HsiCube& cube, double sigma_lo,
                               double sigma_hi, Rng& rng) {
  if (sigma_lo < 0.0 || sigma_hi < sigma_lo)
    throw ArgumentError("add_awgn_banded: need 0 <= sigma_lo <= sigma_hi");
  if (sigma_lo == sigma_hi) return add_awgn(cube, sigma_lo, rng);
  HsiCube out = cube;
  for (int b = 0; b < cube.bands(); ++b) {
    Rng rb = rng.fork(static_cast<std::uint64_t>(b));
    const double sigma =
        (sigma_lo + (sigma_hi - sigma_lo) * rb.uniform()) / 255.0;
    auto plane = out.band(b);
    for (int r = 0; r < cube.height(); ++r)
      for (int c = 0; c < cube.width(); ++c)
        plane(r, c) += static_cast<float>(sigma * rb.gaussian());
  }
  return clamp01(std::move(out));
}

// Salt-and-pepper impulse noise: on each selected band, every pixel is
// independently corrupted with the given probability, taking 0 or 1 with
// equal chance.
inline HsiCube add_impulse(const HsiCube& cube, double density,
                           const BandRule& band_rule, Rng& rng) {
  if (density < 0.0 || density >= 1.0)
    throw ArgumentError("add_impulse: density must be in [0, 1)");
  HsiCube out = cube;
  const auto bands = detail::select_bands(band_rule, cube.bands(), rng);
  for (int b : bands) {
    Rng rb = rng.fork(static_cast<std::uint64_t>(b));
    auto plane = out.band(b);
    for (int r = 0; r < cube.height(); ++r)
      for (int c = 0; c < cube.width(); ++c)
        if (rb.uniform() < density)
          plane(r, c) = rb.uniform() < 0.5 ? 0.0f : 1.0f;
  }
  return out;
}

// Column stripes: on each selected band, floor(stripe_fraction * width)
// distinct columns receive a constant offset drawn uniformly from
// [-intensity, +intensity].
inline HsiCube add_stripes(const HsiCube& cube, const BandRule& band_rule,
                           double stripe_fraction, double intensity,
                           Rng& rng) {
  if (stripe_fraction < 0.0 || stripe_fraction >= 1.0)
    throw ArgumentError("add_stripes: stripe_fraction must be in [0, 1)");
  if (intensity < 0.0)
    throw ArgumentError("add_stripes: intensity must be >= 0");
  HsiCube out = cube;
  const auto bands = detail::select_bands(band_rule, cube.bands(), rng);
  const int n_cols = static_cast<int>(stripe_fraction * cube.width());
  for (int b : bands) {
    Rng rb = rng.fork(static_cast<std::uint64_t>(b));
    const auto cols = detail::sample_indices(cube.width(), n_cols, rb);
    auto plane = out.band(b);
    for (int c : cols) {
      const float offset =
          static_cast<float>((2.0 * rb.uniform() - 1.0) * intensity);
      plane.col(c) += offset;
    }
  }
  return clamp01(std::move(out));
}

// Declarative degradation description. AWGN sigma is a [lo, hi] range in
// 8-bit units; lo == hi applies one sigma to every band, lo < hi draws a
// sigma per band. Components apply in the fixed order AWGN, impulse,
// stripes, each clamping to [0, 1], with sub-seeds forked from `seed`
// (streams 1, 2, 3 respectively).
struct NoiseSpec {
  bool has_awgn = false;
  double awgn_sigma_lo = 0.0;
  double awgn_sigma_hi = 0.0;
  bool has_impulse = false;
  double impulse_density = 0.0;
  BandRule impulse_bands = BandRule::all();
  bool has_stripes = false;
  BandRule stripe_bands = BandRule::all();
  double stripe_fraction = 0.0;
  double stripe_intensity = 0.0;
  std::uint64_t seed = 0;
};

inline NoiseSpec awgn_spec(double sigma8, std::uint64_t seed) {
  NoiseSpec s;
  s.has_awgn = true;
  s.awgn_sigma_lo = s.awgn_sigma_hi = sigma8;
  s.seed = seed;
  return s;
}

// The hybrid composition defaults: per-band AWGN sigma from [10, 50],
// impulse on a random third of the bands at density 0.1, stripes on a
// random third at fraction 0.1 and intensity 0.2.
inline NoiseSpec hybrid_spec(std::uint64_t seed) {
  NoiseSpec s;
  s.has_awgn = true;
  s.awgn_sigma_lo = 10.0;
  s.awgn_sigma_hi = 50.0;
  s.has_impulse = true;
  s.impulse_density = 0.1;
  s.impulse_bands = BandRule::subset(1.0 / 3.0);
  s.has_stripes = true;
  s.stripe_bands = BandRule::subset(1.0 / 3.0);
  s.stripe_fraction = 0.1;
  s.stripe_intensity = 0.2;
  s.seed = seed;
  return s;
}

inline void validate(const NoiseSpec& spec) {
  if (!spec.has_awgn && !spec.has_impulse && !spec.has_stripes)
    throw ArgumentError("noise spec: at least one component required");
  if (spec.has_awgn &&
      (spec.awgn_sigma_lo < 0.0 || spec.awgn_sigma_hi < spec.awgn_sigma_lo))
    throw ArgumentError("noise spec: bad awgn sigma range");
  if (spec.has_impulse &&
      (spec.impulse_density < 0.0 || spec.impulse_density >= 1.0))
    throw ArgumentError("noise spec: impulse density out of [0, 1)");
  if (spec.has_stripes &&
      (spec.stripe_fraction < 0.0 || spec.stripe_fraction >= 1.0))
    throw ArgumentError("noise spec: stripe fraction out of [0, 1)");
  if (spec.has_stripes && spec.stripe_intensity < 0.0)
    throw ArgumentError("noise spec: stripe intensity must be >= 0");
}

inline HsiCube apply_noise(const HsiCube& cube, const NoiseSpec& spec) {
  validate(spec);
  Rng root(spec.seed);
  HsiCube out = cube;
  if (spec.has_awgn) {
    Rng r = root.fork(1);
    out = add_awgn_banded(out, spec.awgn_sigma_lo, spec.awgn_sigma_hi, r);
  }
  if (spec.has_impulse) {
    Rng r = root.fork(2);
    out = add_impulse(out, spec.impulse_density, spec.impulse_bands, r);
  }
  if (spec.has_stripes) {
    Rng r = root.fork(3);
    out = add_stripes(out, spec.stripe_bands, spec.stripe_fraction,
                      spec.stripe_intensity, r);
  }
  return out;
}

// Flat key=value serialization, recorded alongside simulated outputs.
inline std::map<std::string, std::string> to_key_values(
    const NoiseSpec& spec) {
  std::map<std::string, std::string> kv;
  auto put = [&kv](const std::string& k, double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    kv[k] = os.str();
  };
  auto put_rule = [&kv, &put](const std::string& k, const BandRule& r) {
    if (r.kind == BandRule::Kind::All)
      kv[k] = "all";
    else
      put(k, r.fraction);
  };
  kv["noise.awgn"] = spec.has_awgn ? "1" : "0";
  if (spec.has_awgn) {
    put("noise.awgn_sigma_lo", spec.awgn_sigma_lo);
    put("noise.awgn_sigma_hi", spec.awgn_sigma_hi);
  }
  kv["noise.impulse"] = spec.has_impulse ? "1" : "0";
  if (spec.has_impulse) {
    put("noise.impulse_density", spec.impulse_density);
    put_rule("noise.impulse_bands", spec.impulse_bands);
  }
  kv["noise.stripes"] = spec.has_stripes ? "1" : "0";
  if (spec.has_stripes) {
    put_rule("noise.stripe_bands", spec.stripe_bands);
    put("noise.stripe_fraction", spec.stripe_fraction);
    put("noise.stripe_intensity", spec.stripe_intensity);
  }
  kv["noise.seed"] = std::to_string(spec.seed);
  return kv;
}

}  // namespace hsdiff
