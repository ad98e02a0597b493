#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "hsdiff/errors.hpp"

namespace hsdiff {

// Diffusion hyperparameter tables. Steps are 1-based: entry t lives at
// index t-1, and the empty product alpha_bar(0) = 1 is a convention handled
// by the accessor. All tables are precomputed in double.
//
//   alpha_t     = 1 - beta_t
//   alpha_bar_t = prod_{i=1..t} alpha_i
//   sigma_t     = sqrt(((1 - alpha_bar_{t-1}) / (1 - alpha_bar_t)) * beta_t)
//
// sigma_1 is exactly 0 (the numerator vanishes).
struct NoiseSchedule {
  int T = 0;
  Eigen::ArrayXd beta;
  Eigen::ArrayXd alpha;
  Eigen::ArrayXd alpha_bar;
  Eigen::ArrayXd sigma;
};

inline NoiseSchedule linear_schedule(int T, double beta_1, double beta_T) {
  if (T < 2) throw ArgumentError("linear_schedule: T must be >= 2");
  if (!(beta_1 > 0.0) || !(beta_1 <= beta_T) || !(beta_T < 1.0))
    throw ArgumentError("linear_schedule: need 0 < beta_1 <= beta_T < 1");
  NoiseSchedule s;
  s.T = T;
  s.beta.resize(T);
  s.alpha.resize(T);
  s.alpha_bar.resize(T);
  s.sigma.resize(T);
  double running = 1.0;
  for (int t = 1; t <= T; ++t) {
    const double b =
        beta_1 + (static_cast<double>(t - 1) / (T - 1)) * (beta_T - beta_1);
    const double prev_bar = running;
    running *= 1.0 - b;
    s.beta[t - 1] = b;
    s.alpha[t - 1] = 1.0 - b;
    s.alpha_bar[t - 1] = running;
    s.sigma[t - 1] =
        t == 1 ? 0.0 : std::sqrt((1.0 - prev_bar) / (1.0 - running) * b);
  }
  return s;
}

// alpha_bar with the alpha_bar(0) = 1 convention; t in [0, T].
inline double alpha_bar(const NoiseSchedule& s, int t) {
  if (t < 0 || t > s.T)
    throw ArgumentError("alpha_bar: step index out of range");
  return t == 0 ? 1.0 : s.alpha_bar[t - 1];
}

// Posterior standard deviation sigma_t; t in [1, T].
inline double posterior_sigma(const NoiseSchedule& s, int t) {
  if (t < 1 || t > s.T)
    throw ArgumentError("posterior_sigma: step index out of range");
  return s.sigma[t - 1];
}

}  // namespace hsdiff
