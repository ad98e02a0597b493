#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "hsdiff/cube.hpp"
#include "hsdiff/errors.hpp"
#include "hsdiff/rng.hpp"
#include "hsdiff/schedule.hpp"

namespace hsdiff {

// One draw from the forward noising kernel:
//   x_t = sqrt(alpha_bar_t) * x_0 + sqrt(1 - alpha_bar_t) * epsilon
template <typename Scalar>
struct ForwardSample {
  CubeT<Scalar> x_t;
  CubeT<Scalar> epsilon;
  int t = 0;
};

template <typename Scalar>
ForwardSample<Scalar> forward_sample(const CubeT<Scalar>& x0, int t,
                                     const NoiseSchedule& s, Rng& rng) {
  if (t < 1 || t > s.T)
    throw ArgumentError("forward_sample: step index out of range");
  const double ab = alpha_bar(s, t);
  const Scalar signal = static_cast<Scalar>(std::sqrt(ab));
  const Scalar noise = static_cast<Scalar>(std::sqrt(1.0 - ab));
  ForwardSample<Scalar> out;
  out.t = t;
  out.epsilon = gaussian_cube<Scalar>(x0.height(), x0.width(), x0.bands(), rng);
  out.x_t = CubeT<Scalar>(x0.height(), x0.width(), x0.bands());
  out.x_t.flat() = signal * x0.flat() + noise * out.epsilon.flat();
  return out;
}

// Invert the forward kernel given the injected noise:
//   x_0 = (x_t - sqrt(1 - alpha_bar_t) * eps) / sqrt(alpha_bar_t)
template <typename Scalar>
CubeT<Scalar> predict_x0(const CubeT<Scalar>& x_t, const CubeT<Scalar>& eps,
                         int t, const NoiseSchedule& s) {
  require_same_shape(x_t, eps, "predict_x0");
  if (t < 1 || t > s.T)
    throw ArgumentError("predict_x0: step index out of range");
  const double ab = alpha_bar(s, t);
  const Scalar noise = static_cast<Scalar>(std::sqrt(1.0 - ab));
  const Scalar inv_signal = static_cast<Scalar>(1.0 / std::sqrt(ab));
  CubeT<Scalar> x0(x_t.height(), x_t.width(), x_t.bands());
  x0.flat() = (x_t.flat() - noise * eps.flat()) * inv_signal;
  return x0;
}

// One reverse transition:
//   x_{t-1} = (x_t - ((1 - alpha_t) / sqrt(1 - alpha_bar_t)) * eps_hat)
//             / sqrt(alpha_t) + sigma_t * z
// z == nullptr means the zero field; at t = 1 the z term must be zero.
template <typename Scalar>
CubeT<Scalar> reverse_step(const CubeT<Scalar>& x_t,
                           const CubeT<Scalar>& eps_hat, int t,
                           const NoiseSchedule& s,
                           const CubeT<Scalar>* z = nullptr) {
  require_same_shape(x_t, eps_hat, "reverse_step");
  if (t < 1 || t > s.T)
    throw ArgumentError("reverse_step: step index out of range");
  if (z != nullptr) {
    require_same_shape(x_t, *z, "reverse_step");
    if (t == 1 && (z->flat() != Scalar{0}).any())
      throw ContractError("reverse_step: z must be the zero field at t = 1");
  }
  const double a = s.alpha[t - 1];
  const double ab = alpha_bar(s, t);
  const Scalar eps_coef =
      static_cast<Scalar>((1.0 - a) / std::sqrt(1.0 - ab));
  const Scalar inv_sqrt_a = static_cast<Scalar>(1.0 / std::sqrt(a));
  const Scalar sig = static_cast<Scalar>(posterior_sigma(s, t));
  CubeT<Scalar> out(x_t.height(), x_t.width(), x_t.bands());
  out.flat() = (x_t.flat() - eps_coef * eps_hat.flat()) * inv_sqrt_a;
  if (z != nullptr && t > 1) out.flat() += sig * z->flat();
  return out;
}

struct SamplerConfig {
  int t_cut = 35;
  bool stochastic = true;    // include the sigma_t z_t term for t > 1
  std::uint64_t seed = 0;
  bool scale_input = false;  // diagnostic: pre-scale input by sqrt(alpha_bar)
};

// Truncated reverse chain. The noisy cube enters as x_{t_cut} verbatim
// (unless scale_input is set), the chain runs t_cut, t_cut-1, ..., 1, and
// only the final output is clamped to [0, 1]. Schedule entries above t_cut
// are never read.
template <typename Scalar, typename PredictFn>
CubeT<Scalar> truncated_sample(const CubeT<Scalar>& x_noisy,
                               PredictFn&& predict_eps,
                               const NoiseSchedule& s,
                               const SamplerConfig& cfg) {
  if (cfg.t_cut < 1 || cfg.t_cut > s.T)
    throw ArgumentError("truncated_sample: t_cut out of range");
  Rng rng(cfg.seed);
  CubeT<Scalar> x = x_noisy;
  if (cfg.scale_input)
    x.flat() *= static_cast<Scalar>(std::sqrt(alpha_bar(s, cfg.t_cut)));
  for (int t = cfg.t_cut; t >= 1; --t) {
    const CubeT<Scalar> eps_hat = predict_eps(x, t);
    require_same_shape(x, eps_hat, "truncated_sample");
    if (t > 1 && cfg.stochastic) {
      const CubeT<Scalar> z =
          gaussian_cube<Scalar>(x.height(), x.width(), x.bands(), rng);
      x = reverse_step(x, eps_hat, t, s, &z);
    } else {
      x = reverse_step(x, eps_hat, t, s);
    }
  }
  return clamp01(std::move(x));
}

}  // namespace hsdiff
