#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "hsdiff/cube.hpp"
#include "hsdiff/errors.hpp"
#include "hsdiff/rng.hpp"

namespace hsdiff {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Encoder-decoder noise estimator. Feature maps are column-major matrices of
// shape [H*W x C]; column c holds channel c flattened row-major, which makes
// a band-major cube and its feature matrix share one memory layout.
struct PredictorConfig {
  int bands = 8;
  int base_width = 32;
  int depth = 2;
  int time_embed_dim = 64;
  std::uint64_t seed = 0;
};

inline void validate(const PredictorConfig& cfg) {
  if (cfg.bands < 1) throw ArgumentError("predictor: bands must be >= 1");
  if (cfg.depth < 1) throw ArgumentError("predictor: depth must be >= 1");
  if (cfg.base_width < 8)
    throw ArgumentError("predictor: base_width must be >= 8");
  if (cfg.time_embed_dim < 2 || cfg.time_embed_dim % 2 != 0)
    throw ArgumentError("predictor: time_embed_dim must be even and >= 2");
}

namespace detail {

// Interleaved [sin(t*w_k), cos(t*w_k)] with w_k = 10000^(-2k/dim).
inline Eigen::VectorXd sin_cos_embedding(int t, int dim) {
  Eigen::VectorXd e(dim);
  for (int k = 0; k < dim / 2; ++k) {
    const double omega = std::pow(10000.0, -2.0 * k / dim);
    e[2 * k] = std::sin(t * omega);
    e[2 * k + 1] = std::cos(t * omega);
  }
  return e;
}

}  // namespace detail

// Step embedding vector for t in [0, T]; dim must be even. t=0 never occurs
// in sampling but is accepted so the formula can be probed directly.
inline Eigen::VectorXd time_embedding(int t, int dim, int T) {
  if (dim < 2 || dim % 2 != 0)
    throw ArgumentError("time_embedding: dim must be even and >= 2");
  if (t < 0 || t > T) throw ArgumentError("time_embedding: t out of [0, T]");
  return detail::sin_cos_embedding(t, dim);
}

namespace detail {

// 3x3 patch matrix with zero padding: output row p = flattened pixel index,
// column ci*9 + (ky+1)*3 + (kx+1) holds x[(r+ky, c+kx), ci].
template <typename S>
MatX<S> im2col_3x3(const MatX<S>& x, int h, int w) {
  const Eigen::Index cin = x.cols();
  MatX<S> p = MatX<S>::Zero(x.rows(), cin * 9);
  for (Eigen::Index ci = 0; ci < cin; ++ci)
    for (int ky = -1; ky <= 1; ++ky)
      for (int kx = -1; kx <= 1; ++kx) {
        const Eigen::Index col = ci * 9 + (ky + 1) * 3 + (kx + 1);
        const int c0 = std::max(0, -kx);
        const int c1 = std::min(w, w - kx);
        if (c1 <= c0) continue;
        for (int r = std::max(0, -ky); r < std::min(h, h - ky); ++r)
          p.col(col).segment(static_cast<Eigen::Index>(r) * w + c0, c1 - c0) =
              x.col(ci).segment(
                  static_cast<Eigen::Index>(r + ky) * w + c0 + kx, c1 - c0);
      }
  return p;
}

// Adjoint of im2col_3x3: scatter patch-gradient columns back onto pixels.
template <typename S>
MatX<S> col2im_3x3(const MatX<S>& p, int h, int w, Eigen::Index cin) {
  MatX<S> x = MatX<S>::Zero(p.rows(), cin);
  for (Eigen::Index ci = 0; ci < cin; ++ci)
    for (int ky = -1; ky <= 1; ++ky)
      for (int kx = -1; kx <= 1; ++kx) {
        const Eigen::Index col = ci * 9 + (ky + 1) * 3 + (kx + 1);
        const int c0 = std::max(0, -kx);
        const int c1 = std::min(w, w - kx);
        if (c1 <= c0) continue;
        for (int r = std::max(0, -ky); r < std::min(h, h - ky); ++r)
          x.col(ci).segment(static_cast<Eigen::Index>(r + ky) * w + c0 + kx,
                            c1 - c0) +=
              p.col(col).segment(static_cast<Eigen::Index>(r) * w + c0,
                                 c1 - c0);
      }
  return x;
}

// Same-padding 3x3 convolution; k is [Cin*9 x Cout], b is [Cout x 1].
template <typename S>
MatX<S> conv3x3_forward(const MatX<S>& x, int h, int w, const MatX<S>& k,
                        const MatX<S>& b) {
  MatX<S> y = im2col_3x3(x, h, w) * k;
  y.rowwise() += b.col(0).transpose();
  return y;
}

// Accumulates dk and db, returns the input gradient.
template <typename S>
MatX<S> conv3x3_backward(const MatX<S>& x, int h, int w, const MatX<S>& k,
                         const MatX<S>& dy, MatX<S>& dk, MatX<S>& db) {
  dk.noalias() += im2col_3x3(x, h, w).transpose() * dy;
  db.col(0) += dy.colwise().sum().transpose();
  return col2im_3x3<S>((dy * k.transpose()).eval(), h, w, x.cols());
}

template <typename S>
struct GnCache {
  MatX<S> xhat;
  VecX<S> inv_std;
};

inline constexpr double kGnEps = 1e-5;

// Group normalization over [H*W x group] slabs, then per-channel affine.
template <typename S>
MatX<S> group_norm_forward(const MatX<S>& x, int groups, const MatX<S>& gain,
                           const MatX<S>& bias, GnCache<S>& cache) {
  const Eigen::Index c = x.cols();
  const Eigen::Index gs = c / groups;
  cache.xhat.resize(x.rows(), c);
  cache.inv_std.resize(groups);
  for (int g = 0; g < groups; ++g) {
    auto xg = x.middleCols(g * gs, gs);
    const S n = static_cast<S>(x.rows() * gs);
    const S mean = xg.sum() / n;
    const S var = (xg.array() - mean).square().sum() / n;
    const S inv = S(1) / std::sqrt(var + static_cast<S>(kGnEps));
    cache.inv_std[g] = inv;
    cache.xhat.middleCols(g * gs, gs) = ((xg.array() - mean) * inv).matrix();
  }
  MatX<S> y(x.rows(), c);
  for (Eigen::Index j = 0; j < c; ++j)
    y.col(j) = (cache.xhat.col(j).array() * gain(j, 0) + bias(j, 0)).matrix();
  return y;
}

template <typename S>
MatX<S> group_norm_backward(const GnCache<S>& cache, int groups,
                            const MatX<S>& gain, const MatX<S>& dy,
                            MatX<S>& dgain, MatX<S>& dbias) {
  const Eigen::Index c = dy.cols();
  const Eigen::Index gs = c / groups;
  for (Eigen::Index j = 0; j < c; ++j) {
    dgain(j, 0) += (dy.col(j).array() * cache.xhat.col(j).array()).sum();
    dbias(j, 0) += dy.col(j).sum();
  }
  MatX<S> dx(dy.rows(), c);
  for (int g = 0; g < groups; ++g) {
    MatX<S> dxh(dy.rows(), gs);
    for (Eigen::Index j = 0; j < gs; ++j)
      dxh.col(j) = dy.col(g * gs + j) * gain(g * gs + j, 0);
    auto xh = cache.xhat.middleCols(g * gs, gs);
    const S n = static_cast<S>(dy.rows() * gs);
    const S sum_dxh = dxh.sum();
    const S sum_dxh_xh = (dxh.array() * xh.array()).sum();
    dx.middleCols(g * gs, gs) =
        ((cache.inv_std[g] / n) *
         (n * dxh.array() - sum_dxh - xh.array() * sum_dxh_xh))
            .matrix();
  }
  return dx;
}

template <typename D>
auto silu(const Eigen::MatrixBase<D>& x) {
  using S = typename D::Scalar;
  return ((x.array() / (S(1) + (-x.array()).exp())).matrix()).eval();
}

template <typename D1, typename D2>
auto silu_backward(const Eigen::MatrixBase<D1>& x,
                   const Eigen::MatrixBase<D2>& dy) {
  using S = typename D1::Scalar;
  auto sig = S(1) / (S(1) + (-x.array()).exp());
  return ((dy.array() * sig * (S(1) + x.array() * (S(1) - sig))).matrix())
      .eval();
}

template <typename S>
MatX<S> avg_pool2(const MatX<S>& x, int h, int w) {
  const int oh = h / 2, ow = w / 2;
  MatX<S> y(static_cast<Eigen::Index>(oh) * ow, x.cols());
  for (Eigen::Index ch = 0; ch < x.cols(); ++ch)
    for (int r = 0; r < oh; ++r)
      for (int c = 0; c < ow; ++c) {
        const Eigen::Index base = static_cast<Eigen::Index>(2 * r) * w + 2 * c;
        y(static_cast<Eigen::Index>(r) * ow + c, ch) =
            S(0.25) * (x(base, ch) + x(base + 1, ch) + x(base + w, ch) +
                       x(base + w + 1, ch));
      }
  return y;
}

// h, w are the forward input dims (the gradient returned has h*w rows).
template <typename S>
MatX<S> avg_pool2_backward(const MatX<S>& dy, int h, int w) {
  const int ow = w / 2;
  MatX<S> dx(static_cast<Eigen::Index>(h) * w, dy.cols());
  for (Eigen::Index ch = 0; ch < dy.cols(); ++ch)
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        dx(static_cast<Eigen::Index>(r) * w + c, ch) =
            S(0.25) *
            dy(static_cast<Eigen::Index>(r / 2) * ow + c / 2, ch);
  return dx;
}

template <typename S>
MatX<S> upsample2(const MatX<S>& x, int h, int w) {
  const int oh = 2 * h, ow = 2 * w;
  MatX<S> y(static_cast<Eigen::Index>(oh) * ow, x.cols());
  for (Eigen::Index ch = 0; ch < x.cols(); ++ch)
    for (int r = 0; r < oh; ++r)
      for (int c = 0; c < ow; ++c)
        y(static_cast<Eigen::Index>(r) * ow + c, ch) =
            x(static_cast<Eigen::Index>(r / 2) * w + c / 2, ch);
  return y;
}

// h, w are the forward input dims; each input cell sums its 2x2 replicas.
template <typename S>
MatX<S> upsample2_backward(const MatX<S>& dy, int h, int w) {
  const int ow = 2 * w;
  MatX<S> dx = MatX<S>::Zero(static_cast<Eigen::Index>(h) * w, dy.cols());
  for (Eigen::Index ch = 0; ch < dy.cols(); ++ch)
    for (int r = 0; r < 2 * h; ++r)
      for (int c = 0; c < ow; ++c)
        dx(static_cast<Eigen::Index>(r / 2) * w + c / 2, ch) +=
            dy(static_cast<Eigen::Index>(r) * ow + c, ch);
  return dx;
}

}  // namespace detail

template <typename S>
struct ParamTensor {
  std::string name;
  MatX<S> value;
  MatX<S> grad;
  std::vector<std::uint32_t> dims;
};

template <typename S>
struct BlockCache {
  MatX<S> x_in;
  detail::GnCache<S> gn1, gn2;
  MatX<S> pre1;   // SiLU input after norm + time bias
  MatX<S> x_mid;  // second conv input
  MatX<S> pre2;   // final SiLU input
  int h = 0, w = 0;
};

template <typename S>
struct ForwardCache {
  VecX<S> emb, h1_pre, h1, hemb;
  std::vector<BlockCache<S>> enc;
  BlockCache<S> mid;
  std::vector<BlockCache<S>> dec;  // indexed by level
  MatX<S> out_in;
  int h0 = 0, w0 = 0;
};

template <typename S>
class NoisePredictorT {
 public:
  explicit NoisePredictorT(const PredictorConfig& cfg) : cfg_(cfg) {
    validate(cfg);
    const int e = cfg.time_embed_dim;
    fc1_w_ = add(e, e, "tmlp.fc1.weight");
    fc1_b_ = add_bias(e, "tmlp.fc1.bias");
    fc2_w_ = add(e, e, "tmlp.fc2.weight");
    fc2_b_ = add_bias(e, "tmlp.fc2.bias");
    enc_.push_back(add_block(cfg.bands, width(0), "enc0"));
    for (int l = 1; l < cfg.depth; ++l)
      enc_.push_back(
          add_block(width(l - 1), width(l), "enc" + std::to_string(l)));
    mid_ = add_block(width(cfg.depth - 1), width(cfg.depth), "mid");
    dec_.resize(cfg.depth);
    for (int l = cfg.depth - 1; l >= 0; --l)
      dec_[l] = add_block(width(l + 1) + width(l), width(l),
                          "dec" + std::to_string(l));
    out_w_ = add(width(0) * 9, cfg.bands, "out.weight");
    out_b_ = add_bias(cfg.bands, "out.bias");
    init_parameters();
  }

  const PredictorConfig& config() const { return cfg_; }
  std::vector<ParamTensor<S>>& params() { return params_; }
  const std::vector<ParamTensor<S>>& params() const { return params_; }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  int param_index(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
      if (params_[i].name == name) return static_cast<int>(i);
    throw ArgumentError("unknown parameter: " + name);
  }

  bool parameters_finite() const {
    for (const auto& p : params_)
      if (!p.value.allFinite()) return false;
    return true;
  }

  void zero_grads() {
    for (auto& p : params_) p.grad.setZero();
  }

  CubeT<S> predict(const CubeT<S>& x_t, int t) const {
    check_input(x_t, t);
    const MatX<S> y = run(to_features(x_t), x_t.height(), x_t.width(), t,
                          nullptr);
    return from_features(y, x_t.height(), x_t.width());
  }

  // Forward pass that records every intermediate needed by backward().
  CubeT<S> forward(const CubeT<S>& x_t, int t, ForwardCache<S>& cache) const {
    check_input(x_t, t);
    cache.enc.resize(cfg_.depth);
    cache.dec.resize(cfg_.depth);
    cache.h0 = x_t.height();
    cache.w0 = x_t.width();
    const MatX<S> y =
        run(to_features(x_t), x_t.height(), x_t.width(), t, &cache);
    return from_features(y, x_t.height(), x_t.width());
  }

  // Accumulates parameter gradients for d(loss)/d(output) = dout.
  void backward(const ForwardCache<S>& cache, const CubeT<S>& dout) {
    backward_features(cache, to_features(dout));
  }

 private:
  struct BlockWiring {
    int conv1_w, conv1_b, gn1_g, gn1_b;
    int temb_w, temb_b;
    int conv2_w, conv2_b, gn2_g, gn2_b;
    int groups;
  };

  int width(int level) const { return cfg_.base_width << level; }

  int add(Eigen::Index rows, Eigen::Index cols, const std::string& name) {
    ParamTensor<S> p;
    p.name = name;
    p.value = MatX<S>::Zero(rows, cols);
    p.grad = MatX<S>::Zero(rows, cols);
    p.dims = {static_cast<std::uint32_t>(rows),
              static_cast<std::uint32_t>(cols)};
    params_.push_back(std::move(p));
    return static_cast<int>(params_.size()) - 1;
  }

  int add_bias(Eigen::Index n, const std::string& name) {
    const int i = add(n, 1, name);
    params_[i].dims = {static_cast<std::uint32_t>(n)};
    return i;
  }

  BlockWiring add_block(int cin, int cout, const std::string& prefix) {
    BlockWiring b;
    b.conv1_w = add(static_cast<Eigen::Index>(cin) * 9, cout,
                    prefix + ".conv1.weight");
    b.conv1_b = add_bias(cout, prefix + ".conv1.bias");
    b.gn1_g = add_bias(cout, prefix + ".gn1.gain");
    b.gn1_b = add_bias(cout, prefix + ".gn1.bias");
    b.temb_w = add(cfg_.time_embed_dim, cout, prefix + ".temb.weight");
    b.temb_b = add_bias(cout, prefix + ".temb.bias");
    b.conv2_w = add(static_cast<Eigen::Index>(cout) * 9, cout,
                    prefix + ".conv2.weight");
    b.conv2_b = add_bias(cout, prefix + ".conv2.bias");
    b.gn2_g = add_bias(cout, prefix + ".gn2.gain");
    b.gn2_b = add_bias(cout, prefix + ".gn2.bias");
    b.groups = std::gcd(cout, 8);
    return b;
  }

  // Weights get fan-in-scaled uniform values, normalization gains start at
  // one, every bias at zero, and the output convolution entirely at zero so
  // a fresh network is the zero map. Values are drawn in registration order.
  void init_parameters() {
    Rng rng(cfg_.seed);
    for (auto& p : params_) {
      const bool is_weight = p.name.ends_with(".weight");
      if (p.name.starts_with("out.")) continue;
      if (p.name.ends_with(".gain")) {
        p.value.setOnes();
      } else if (is_weight) {
        const S s = S(1) / std::sqrt(static_cast<S>(p.value.rows()));
        for (Eigen::Index j = 0; j < p.value.cols(); ++j)
          for (Eigen::Index i = 0; i < p.value.rows(); ++i)
            p.value(i, j) = static_cast<S>((2.0 * rng.uniform() - 1.0)) * s;
      }
    }
  }

  const MatX<S>& P(int i) const { return params_[i].value; }
  MatX<S>& G(int i) { return params_[i].grad; }

  void check_input(const CubeT<S>& x, int t) const {
    if (x.bands() != cfg_.bands)
      throw ArgumentError("predictor: input bands do not match config");
    const int div = 1 << cfg_.depth;
    if (x.height() % div != 0 || x.width() % div != 0)
      throw ArgumentError(
          "predictor: spatial dims must be divisible by 2^depth");
    if (t < 1) throw ArgumentError("predictor: step index must be >= 1");
  }

  static MatX<S> to_features(const CubeT<S>& c) {
    return Eigen::Map<const MatX<S>>(
        c.flat().data(), static_cast<Eigen::Index>(c.height()) * c.width(),
        c.bands());
  }

  static CubeT<S> from_features(const MatX<S>& f, int h, int w) {
    CubeT<S> c(h, w, static_cast<int>(f.cols()));
    Eigen::Map<MatX<S>>(c.flat().data(), f.rows(), f.cols()) = f;
    return c;
  }

  MatX<S> block_forward(const BlockWiring& b, const MatX<S>& x, int h, int w,
                        const VecX<S>& hemb, BlockCache<S>* cache) const {
    MatX<S> a = detail::conv3x3_forward(x, h, w, P(b.conv1_w), P(b.conv1_b));
    detail::GnCache<S> g1;
    MatX<S> n1 = detail::group_norm_forward(a, b.groups, P(b.gn1_g),
                                            P(b.gn1_b), g1);
    const VecX<S> tb = P(b.temb_w).transpose() * hemb + P(b.temb_b).col(0);
    n1.rowwise() += tb.transpose();
    MatX<S> s1 = detail::silu(n1);
    MatX<S> a2 = detail::conv3x3_forward(s1, h, w, P(b.conv2_w), P(b.conv2_b));
    detail::GnCache<S> g2;
    MatX<S> n2 = detail::group_norm_forward(a2, b.groups, P(b.gn2_g),
                                            P(b.gn2_b), g2);
    MatX<S> y = detail::silu(n2);
    if (cache) {
      cache->x_in = x;
      cache->gn1 = std::move(g1);
      cache->pre1 = std::move(n1);
      cache->x_mid = std::move(s1);
      cache->gn2 = std::move(g2);
      cache->pre2 = std::move(n2);
      cache->h = h;
      cache->w = w;
    }
    return y;
  }

  MatX<S> block_backward(const BlockWiring& b, const BlockCache<S>& c,
                         const MatX<S>& dy, const VecX<S>& hemb,
                         VecX<S>& dhemb) {
    const MatX<S> dn2 = detail::silu_backward(c.pre2, dy);
    const MatX<S> da2 = detail::group_norm_backward(c.gn2, b.groups,
                                                    P(b.gn2_g), dn2,
                                                    G(b.gn2_g), G(b.gn2_b));
    const MatX<S> ds1 = detail::conv3x3_backward(c.x_mid, c.h, c.w,
                                                 P(b.conv2_w), da2,
                                                 G(b.conv2_w), G(b.conv2_b));
    const MatX<S> dn1 = detail::silu_backward(c.pre1, ds1);
    const VecX<S> dtb = dn1.colwise().sum().transpose();
    G(b.temb_w).noalias() += hemb * dtb.transpose();
    G(b.temb_b).col(0) += dtb;
    dhemb.noalias() += P(b.temb_w) * dtb;
    const MatX<S> da = detail::group_norm_backward(c.gn1, b.groups,
                                                   P(b.gn1_g), dn1,
                                                   G(b.gn1_g), G(b.gn1_b));
    return detail::conv3x3_backward(c.x_in, c.h, c.w, P(b.conv1_w), da,
                                    G(b.conv1_w), G(b.conv1_b));
  }

  MatX<S> run(const MatX<S>& x, int h0, int w0, int t,
              ForwardCache<S>* fc) const {
    const VecX<S> emb =
        detail::sin_cos_embedding(t, cfg_.time_embed_dim).cast<S>();
    const VecX<S> h1_pre = P(fc1_w_).transpose() * emb + P(fc1_b_).col(0);
    const VecX<S> h1 = detail::silu(h1_pre);
    const VecX<S> hemb = P(fc2_w_).transpose() * h1 + P(fc2_b_).col(0);
    if (fc) {
      fc->emb = emb;
      fc->h1_pre = h1_pre;
      fc->h1 = h1;
      fc->hemb = hemb;
    }
    std::vector<MatX<S>> skips(cfg_.depth);
    MatX<S> f = x;
    int h = h0, w = w0;
    for (int l = 0; l < cfg_.depth; ++l) {
      f = block_forward(enc_[l], f, h, w, hemb, fc ? &fc->enc[l] : nullptr);
      skips[l] = f;
      f = detail::avg_pool2(f, h, w);
      h /= 2;
      w /= 2;
    }
    f = block_forward(mid_, f, h, w, hemb, fc ? &fc->mid : nullptr);
    for (int l = cfg_.depth - 1; l >= 0; --l) {
      f = detail::upsample2(f, h, w);
      h *= 2;
      w *= 2;
      MatX<S> cat(f.rows(), f.cols() + skips[l].cols());
      cat << f, skips[l];
      f = block_forward(dec_[l], cat, h, w, hemb,
                        fc ? &fc->dec[l] : nullptr);
    }
    if (fc) fc->out_in = f;
    return detail::conv3x3_forward(f, h, w, P(out_w_), P(out_b_));
  }

  void backward_features(const ForwardCache<S>& fc, const MatX<S>& dout) {
    VecX<S> dhemb = VecX<S>::Zero(cfg_.time_embed_dim);
    int h = fc.h0, w = fc.w0;
    MatX<S> df = detail::conv3x3_backward(fc.out_in, h, w, P(out_w_), dout,
                                          G(out_w_), G(out_b_));
    std::vector<MatX<S>> dskips(cfg_.depth);
    for (int l = 0; l < cfg_.depth; ++l) {
      df = block_backward(dec_[l], fc.dec[l], df, fc.hemb, dhemb);
      dskips[l] = df.rightCols(width(l));
      const MatX<S> dup = df.leftCols(width(l + 1));
      h /= 2;
      w /= 2;
      df = detail::upsample2_backward(dup, h, w);
    }
    df = block_backward(mid_, fc.mid, df, fc.hemb, dhemb);
    for (int l = cfg_.depth - 1; l >= 0; --l) {
      h *= 2;
      w *= 2;
      df = detail::avg_pool2_backward(df, h, w);
      df += dskips[l];
      df = block_backward(enc_[l], fc.enc[l], df, fc.hemb, dhemb);
    }
    G(fc2_w_).noalias() += fc.h1 * dhemb.transpose();
    G(fc2_b_).col(0) += dhemb;
    const VecX<S> dh1 = P(fc2_w_) * dhemb;
    const VecX<S> dh1_pre = detail::silu_backward(fc.h1_pre, dh1);
    G(fc1_w_).noalias() += fc.emb * dh1_pre.transpose();
    G(fc1_b_).col(0) += dh1_pre;
  }

  PredictorConfig cfg_;
  std::vector<ParamTensor<S>> params_;
  int fc1_w_ = -1, fc1_b_ = -1, fc2_w_ = -1, fc2_b_ = -1;
  std::vector<BlockWiring> enc_;
  BlockWiring mid_;
  std::vector<BlockWiring> dec_;
  int out_w_ = -1, out_b_ = -1;
};

using NoisePredictor = NoisePredictorT<float>;

}  // namespace hsdiff
