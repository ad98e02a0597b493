#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "hsdiff/cube.hpp"
#include "hsdiff/errors.hpp"

namespace hsdiff {

// All metrics are computed in double regardless of cube storage precision.
// Definitions (the usual HSI-denoising conventions):
//   cc    - per-band Pearson correlation, averaged over bands
//   mpsnr - per-band 10*log10(peak^2 / MSE), 100 dB cap, averaged over bands
//   mssim - per-band SSIM (11x11 Gaussian window, sigma 1.5, C1 = 0.01^2,
//           C2 = 0.03^2 for peak 1, valid region only), averaged over bands
//   sam   - mean per-pixel spectral angle in degrees
struct MetricReport {
  double cc = 0.0;
  double mpsnr = 0.0;
  double mssim = 0.0;
  double sam = 0.0;
};

inline constexpr double kPsnrCapDb = 100.0;

template <typename Scalar>
double cc(const CubeT<Scalar>& ref, const CubeT<Scalar>& est) {
  require_same_shape(ref, est, "cc");
  const Eigen::Index n = static_cast<Eigen::Index>(ref.height()) * ref.width();
  double sum = 0.0;
  for (int b = 0; b < ref.bands(); ++b) {
    const Eigen::ArrayXXd r = ref.band(b).template cast<double>();
    const Eigen::ArrayXXd e = est.band(b).template cast<double>();
    const double mr = r.mean();
    const double me = e.mean();
    const Eigen::ArrayXXd dr = r - mr;
    const Eigen::ArrayXXd de = e - me;
    const double vr = (dr * dr).sum();
    const double ve = (de * de).sum();
    if (vr == 0.0 || ve == 0.0) {
      // Pearson is undefined for a constant band; score agreement directly.
      sum += (r == e).all() ? 1.0 : 0.0;
    } else {
      sum += (dr * de).sum() / std::sqrt(vr * ve);
    }
  }
  return sum / ref.bands();
}

template <typename Scalar>
double mpsnr(const CubeT<Scalar>& ref, const CubeT<Scalar>& est,
             double peak = 1.0) {
  require_same_shape(ref, est, "mpsnr");
  const double n = static_cast<double>(ref.height()) * ref.width();
  double sum = 0.0;
  for (int b = 0; b < ref.bands(); ++b) {
    const Eigen::ArrayXXd diff = (ref.band(b).template cast<double>() -
                                  est.band(b).template cast<double>());
    const double mse = (diff * diff).sum() / n;
    sum += mse == 0.0
               ? kPsnrCapDb
               : std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse));
  }
  return sum / ref.bands();
}

namespace detail {

inline Eigen::VectorXd gaussian_window_1d(int radius, double sigma) {
  Eigen::VectorXd w(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    w[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  return w / w.sum();
}

// Valid-region separable filtering: rows then columns.
inline Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& img,
                                    const Eigen::VectorXd& w) {
  const int radius = static_cast<int>(w.size()) / 2;
  const Eigen::Index h = img.rows(), wd = img.cols();
  Eigen::MatrixXd rows(h, wd - 2 * radius);
  for (Eigen::Index c = 0; c < rows.cols(); ++c)
    rows.col(c) = img.middleCols(c, w.size()) * w;
  Eigen::MatrixXd out(h - 2 * radius, rows.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    out.row(r) = w.transpose() * rows.middleRows(r, w.size());
  return out;
}

}  // namespace detail

template <typename Scalar>
double mssim(const CubeT<Scalar>& ref, const CubeT<Scalar>& est,
             double peak = 1.0) {
  require_same_shape(ref, est, "mssim");
  constexpr int kWindow = 11;
  constexpr double kSigma = 1.5;
  if (ref.height() < kWindow || ref.width() < kWindow)
    throw ArgumentError("mssim: spatial dims must be >= 11");
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const Eigen::VectorXd w = detail::gaussian_window_1d(kWindow / 2, kSigma);
  double sum = 0.0;
  for (int b = 0; b < ref.bands(); ++b) {
    const Eigen::MatrixXd x =
        ref.band(b).template cast<double>().matrix();
    const Eigen::MatrixXd y =
        est.band(b).template cast<double>().matrix();
    const Eigen::MatrixXd mu_x = detail::filter_valid(x, w);
    const Eigen::MatrixXd mu_y = detail::filter_valid(y, w);
    const Eigen::MatrixXd xx =
        detail::filter_valid(x.cwiseProduct(x), w) - mu_x.cwiseProduct(mu_x);
    const Eigen::MatrixXd yy =
        detail::filter_valid(y.cwiseProduct(y), w) - mu_y.cwiseProduct(mu_y);
    const Eigen::MatrixXd xy =
        detail::filter_valid(x.cwiseProduct(y), w) - mu_x.cwiseProduct(mu_y);
    const Eigen::ArrayXXd num =
        (2.0 * mu_x.cwiseProduct(mu_y).array() + c1) * (2.0 * xy.array() + c2);
    const Eigen::ArrayXXd den =
        (mu_x.array().square() + mu_y.array().square() + c1) *
        (xx.array() + yy.array() + c2);
    sum += (num / den).mean();
  }
  return sum / ref.bands();
}

template <typename Scalar>
double sam(const CubeT<Scalar>& ref, const CubeT<Scalar>& est) {
  require_same_shape(ref, est, "sam");
  if (ref.bands() < 2) throw ArgumentError("sam: need at least 2 bands");
  const Eigen::Index pixels =
      static_cast<Eigen::Index>(ref.height()) * ref.width();
  double sum = 0.0;
  Eigen::Index valid = 0;
  for (Eigen::Index p = 0; p < pixels; ++p) {
    double dot = 0.0, nr = 0.0, ne = 0.0;
    for (int b = 0; b < ref.bands(); ++b) {
      const double r = static_cast<double>(ref.flat()[b * pixels + p]);
      const double e = static_cast<double>(est.flat()[b * pixels + p]);
      dot += r * e;
      nr += r * r;
      ne += e * e;
    }
    if (nr == 0.0 || ne == 0.0) continue;
    const double arg =
        std::clamp(dot / std::sqrt(nr * ne), -1.0, 1.0);
    sum += std::acos(arg);
    ++valid;
  }
  if (valid == 0)
    throw UndefinedError("sam: every pixel has a zero-norm spectrum");
  return (sum / valid) * (180.0 / std::numbers::pi);
}

template <typename Scalar>
MetricReport evaluate(const CubeT<Scalar>& ref, const CubeT<Scalar>& est) {
  MetricReport r;
  r.cc = cc(ref, est);
  r.mpsnr = mpsnr(ref, est);
  r.mssim = mssim(ref, est);
  r.sam = sam(ref, est);
  return r;
}

inline constexpr const char* kMetricCsvHeader = "cc,mpsnr,mssim,sam";

inline std::string metric_csv_row(const MetricReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", r.cc, r.mpsnr,
                r.mssim, r.sam);
  return buf;
}

}  // namespace hsdiff
