#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "simpx/ray_geometry.hpp"
#include "simpx/volume.hpp"

namespace simpx {

/// Row-major 2D scalar image.
class Image2 {
 public:
  Image2() = default;
  Image2(std::size_t rows, std::size_t cols, double fill = 0.0);
  Image2(std::size_t rows, std::size_t cols, std::vector<double> data);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  [[nodiscard]] std::span<const double> values() const& { return data_; }
  std::span<double> values() & { return data_; }
  void values() && = delete;  // span would dangle

  friend bool operator==(const Image2&, const Image2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Simulated panoramic image of opacities 1 - T: row j is axial slice j,
/// column i is ray i of the fan. Every pixel lies in [0, 1).
class SimPXImage {
 public:
  SimPXImage() = default;
  /// Throws ValueError if a pixel is outside [0, 1).
  explicit SimPXImage(Image2 pixels);

  [[nodiscard]] std::size_t height() const { return pixels_.rows(); }
  [[nodiscard]] std::size_t width() const { return pixels_.cols(); }
  [[nodiscard]] double at(std::size_t row, std::size_t col) const { return pixels_.at(row, col); }
  [[nodiscard]] const Image2& image() const { return pixels_; }
  [[nodiscard]] std::span<const double> values() const& { return pixels_.values(); }
  void values() && = delete;

  friend bool operator==(const SimPXImage&, const SimPXImage&) = default;

 private:
  Image2 pixels_;
};

struct RenderConfig {
  double beta = 0.02;
  std::size_t n_samples = 200;
  double delta = 1.0;
  std::size_t width = 256;
  std::size_t height = 128;
  Interpolation interpolation = Interpolation::trilinear;

  void validate() const;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
    else comp_ += (v - t) + sum_;
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// T = exp(-sum_i beta * sigma_i * delta); 1 for an empty list.
double transmittance(std::span<const double> densities, double delta, double beta);
/// 1 - T, evaluated without cancellation.
double opacity_from_optical_depth(double optical_depth);

/// Interpolation weight of one voxel for one sample point.
struct Tap {
  std::uint32_t index;  // flat index within an axial slice
  double weight;
};

/// Sparse per-slice projection operator of a sampled fan: for each ray, the
/// list of samples and, for each sample, the voxels its interpolation reads
/// with strictly positive weight. The same operator is applied to every
/// axial slice.
class SliceProjector {
 public:
  SliceProjector(const RayFan& fan, std::size_t ny, std::size_t nx, Interpolation interp);

  [[nodiscard]] std::size_t rays() const { return ray_begin_.size() - 1; }
  [[nodiscard]] std::size_t ny() const { return ny_; }
  [[nodiscard]] std::size_t nx() const { return nx_; }
  [[nodiscard]] std::size_t samples(std::size_t ray) const {
    return ray_begin_[ray + 1] - ray_begin_[ray];
  }

  /// Compensated sum of the interpolated sample values of `ray` over `slice`.
  [[nodiscard]] double line_sum(std::size_t ray, std::span<const double> slice) const;
  /// Interpolated value of each sample, in walk order.
  [[nodiscard]] std::vector<double> sample_values(std::size_t ray,
                                                  std::span<const double> slice) const;
  /// slice[v] += value * (total interpolation weight of v over all samples of `ray`).
  void scatter(std::size_t ray, double value, std::span<double> slice) const;
  /// Visits each voxel of the slice the ray touches, once per ray, in first-touch order.
  template <typename Fn>
  void for_each_touched(std::size_t ray, std::vector<std::uint32_t>& stamp, std::uint32_t mark,
                        Fn&& fn) const {
    for (std::size_t s = ray_begin_[ray]; s < ray_begin_[ray + 1]; ++s) {
      for (std::size_t t = tap_begin_[s]; t < tap_begin_[s + 1]; ++t) {
        const std::uint32_t v = taps_[t].index;
        if (stamp[v] != mark) {
          stamp[v] = mark;
          fn(v);
        }
      }
    }
  }

 private:
  std::size_t ny_ = 0;
  std::size_t nx_ = 0;
  std::vector<std::size_t> ray_begin_;  // into sample arrays
  std::vector<std::size_t> tap_begin_;  // per sample, into taps_
  std::vector<Tap> taps_;
};

/// Checks fan / volume / config compatibility; throws DimsError.
void check_render_shapes(const Dims& dims, const RayFan& fan, const RenderConfig& cfg);

/// Pixel (j, i) = 1 - transmittance of ray i on axial slice j.
SimPXImage render_simpx(const DensityVolume& vol, const RayFan& fan, const RenderConfig& cfg);
/// Same, for a raw density field with a prebuilt projector; used by the solver.
Image2 render_field(std::span<const double> field, const Dims& dims, const SliceProjector& proj,
                    const RenderConfig& cfg);

enum class MipAxis { axial, sagittal, coronal };
const char* to_string(MipAxis axis);

/// Per-pixel maximum along an axis.
///   axial    -> rows ny, cols nx (max over z)
///   sagittal -> rows nz, cols ny (max over x)
///   coronal  -> rows nz, cols nx (max over y)
Image2 mip(const DensityVolume& vol, MipAxis axis);

struct MipResult {
  Image2 image;
  std::vector<std::size_t> argmax;  // flat voxel index per pixel, first index on ties
};
MipResult mip_with_argmax(std::span<const double> field, const Dims& dims, MipAxis axis);

}  // namespace simpx
