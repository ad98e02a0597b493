#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "hsdiff/errors.hpp"
#include "hsdiff/rng.hpp"

namespace hsdiff {

// Hyperspectral cube with band-major storage: band planes are contiguous,
// each plane row-major height x width. Values are nominally in [0, 1].
template <typename Scalar>
class CubeT {
 public:
  using Plane =
      Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Flat = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  CubeT() = default;

  CubeT(int height, int width, int bands)
      : height_(height), width_(width), bands_(bands) {
    if (height < 1 || width < 1 || bands < 1)
      throw ArgumentError("cube dimensions must be positive");
    data_ = Flat::Zero(static_cast<Eigen::Index>(height) * width * bands);
  }

  static CubeT constant(int height, int width, int bands, Scalar value) {
    CubeT c(height, width, bands);
    c.data_.setConstant(value);
    return c;
  }

  int height() const { return height_; }
  int width() const { return width_; }
  int bands() const { return bands_; }
  Eigen::Index size() const { return data_.size(); }

  Flat& flat() { return data_; }
  const Flat& flat() const { return data_; }

  Scalar& operator()(int row, int col, int band) {
    return data_[plane_size() * band + static_cast<Eigen::Index>(row) * width_ + col];
  }
  Scalar operator()(int row, int col, int band) const {
    return data_[plane_size() * band + static_cast<Eigen::Index>(row) * width_ + col];
  }

  Eigen::Map<Plane> band(int b) {
    return Eigen::Map<Plane>(data_.data() + plane_size() * b, height_, width_);
  }
  Eigen::Map<const Plane> band(int b) const {
    return Eigen::Map<const Plane>(data_.data() + plane_size() * b, height_,
                                   width_);
  }

  bool same_shape(const CubeT& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           bands_ == other.bands_;
  }

  bool all_finite() const { return data_.allFinite(); }

  template <typename T>
  CubeT<T> cast() const {
    CubeT<T> out(height_, width_, bands_);
    out.flat() = data_.template cast<T>();
    return out;
  }

 private:
  Eigen::Index plane_size() const {
    return static_cast<Eigen::Index>(height_) * width_;
  }

  int height_ = 0;
  int width_ = 0;
  int bands_ = 0;
  Flat data_;
};

using HsiCube = CubeT<float>;

template <typename Scalar>
void require_same_shape(const CubeT<Scalar>& a, const CubeT<Scalar>& b,
                        const char* what) {
  if (!a.same_shape(b))
    throw ArgumentError(std::string(what) + ": cube shapes differ");
}

// Fill with i.i.d. standard normal draws, band-major order.
template <typename Scalar>
CubeT<Scalar> gaussian_cube(int height, int width, int bands, Rng& rng) {
  CubeT<Scalar> c(height, width, bands);
  for (Eigen::Index i = 0; i < c.size(); ++i)
    c.flat()[i] = static_cast<Scalar>(rng.gaussian());
  return c;
}

template <typename Scalar>
CubeT<Scalar> clamp01(CubeT<Scalar> cube) {
  cube.flat() = cube.flat().cwiseMax(Scalar{0}).cwiseMin(Scalar{1});
  return cube;
}

// Affine map [lo, hi] -> [0, 1] with clamping outside the range.
template <typename Scalar>
CubeT<Scalar> normalize(const CubeT<Scalar>& cube, double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("normalize: lo must be < hi");
  CubeT<Scalar> out(cube.height(), cube.width(), cube.bands());
  const double inv = 1.0 / (hi - lo);
  out.flat() = ((cube.flat().template cast<double>() - lo) * inv)
                   .cwiseMax(0.0)
                   .cwiseMin(1.0)
                   .template cast<Scalar>();
  return out;
}

// Rescale so the cube's own extremes map to 0 and 1.
template <typename Scalar>
CubeT<Scalar> minmax_normalize(const CubeT<Scalar>& cube) {
  const double lo = static_cast<double>(cube.flat().minCoeff());
  const double hi = static_cast<double>(cube.flat().maxCoeff());
  if (!(lo < hi))
    throw ValueError("constant cube: min-max normalization undefined");
  return normalize(cube, lo, hi);
}

// Square training patches cut from a cube: spatial windows tile with the
// given stride, each paired with one contiguous band window drawn from the
// seed.
struct PatchSpec {
  int patch_size = 32;
  int stride = 32;
  int band_count = 8;
};

template <typename Scalar>
void validate_patch_spec(const PatchSpec& spec, const CubeT<Scalar>& cube) {
  if (spec.patch_size < 1 || spec.stride < 1 || spec.band_count < 1)
    throw ArgumentError("patch spec fields must be positive");
  if (spec.patch_size > cube.height() || spec.patch_size > cube.width())
    throw ArgumentError("patch_size exceeds cube spatial extent");
  if (spec.band_count > cube.bands())
    throw ArgumentError("band_count exceeds cube bands");
}

// Window origins along one axis: 0, stride, 2*stride, ... while the window
// still fits.
inline std::vector<int> window_origins(int extent, int window, int stride) {
  std::vector<int> origins;
  for (int o = 0; o + window <= extent; o += stride) origins.push_back(o);
  return origins;
}

template <typename Scalar>
std::vector<CubeT<Scalar>> extract_patches(const CubeT<Scalar>& cube,
                                           const PatchSpec& spec,
                                           std::uint64_t seed) {
  validate_patch_spec(spec, cube);
  const auto rows = window_origins(cube.height(), spec.patch_size, spec.stride);
  const auto cols = window_origins(cube.width(), spec.patch_size, spec.stride);
  Rng rng(seed);
  std::vector<CubeT<Scalar>> patches;
  patches.reserve(rows.size() * cols.size());
  const int band_span = cube.bands() - spec.band_count + 1;
  for (int r0 : rows) {
    for (int c0 : cols) {
      const int b0 = static_cast<int>(rng.uniform_int(band_span));
      CubeT<Scalar> patch(spec.patch_size, spec.patch_size, spec.band_count);
      for (int b = 0; b < spec.band_count; ++b)
        patch.band(b) = cube.band(b0 + b).block(r0, c0, spec.patch_size,
                                                spec.patch_size);
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

}  // namespace hsdiff
