#include "simpx/renderer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "simpx/error.hpp"
#include "simpx/parallel.hpp"

namespace simpx {

Image2::Image2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Image2::Image2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimsError("image data length " + std::to_string(data_.size()) + " does not match " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

SimPXImage::SimPXImage(Image2 pixels) : pixels_(std::move(pixels)) {
  const auto v = pixels_.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0 && v[i] < 1.0)) {
      throw ValueError("SimPX pixel " + std::to_string(i) + " = " + std::to_string(v[i]) +
                       " outside [0, 1)");
    }
  }
}

void RenderConfig::validate() const {
  if (!(beta > 0.0)) throw ValueError("render: beta must be > 0");
  if (n_samples < 1) throw ValueError("render: n_samples must be >= 1");
  if (!(delta > 0.0)) throw ValueError("render: delta must be > 0");
  if (width < 1 || height < 1) throw ValueError("render: image width and height must be >= 1");
}

double transmittance(std::span<const double> densities, double delta, double beta) {
  CompensatedSum sum;
  for (double s : densities) sum.add(s);
  return std::exp(-beta * delta * sum.value());
}

double opacity_from_optical_depth(double optical_depth) { return -std::expm1(-optical_depth); }

// Projector --------------------------------------------------------------------

namespace {

struct AxisTap {
  std::size_t i0, i1;
  double w1;
};

AxisTap axis_tap(double coord, std::size_t n) {
  const double u = coord - 0.5;
  const double f0 = std::floor(u);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  const auto i0 = static_cast<std::ptrdiff_t>(f0);
  return {static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i0, 0, last)),
          static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i0 + 1, 0, last)), u - f0};
}

}  // namespace

SliceProjector::SliceProjector(const RayFan& fan, std::size_t ny, std::size_t nx,
                               Interpolation interp)
    : ny_(ny), nx_(nx) {
  if (ny * nx > std::numeric_limits<std::uint32_t>::max()) {
    throw DimsError("axial slice too large for the projector index type");
  }
  ray_begin_.reserve(fan.rays.size() + 1);
  ray_begin_.push_back(0);
  tap_begin_.push_back(0);
  for (const Ray& ray : fan.rays) {
    for (const Vec2& p : ray.samples) {
      std::array<Tap, 4> local{};
      std::size_t n = 0;
      const auto add = [&](std::size_t y, std::size_t x, double w) {
        if (!(w > 0.0)) return;
        const auto idx = static_cast<std::uint32_t>(y * nx + x);
        for (std::size_t k = 0; k < n; ++k) {
          if (local[k].index == idx) {
            local[k].weight += w;
            return;
          }
        }
        local[n++] = {idx, w};
      };
      if (interp == Interpolation::nearest) {
        add(std::min(static_cast<std::size_t>(p.y), ny - 1),
            std::min(static_cast<std::size_t>(p.x), nx - 1), 1.0);
      } else {
        const AxisTap tx = axis_tap(p.x, nx);
        const AxisTap ty = axis_tap(p.y, ny);
        add(ty.i0, tx.i0, (1.0 - ty.w1) * (1.0 - tx.w1));
        add(ty.i0, tx.i1, (1.0 - ty.w1) * tx.w1);
        add(ty.i1, tx.i0, ty.w1 * (1.0 - tx.w1));
        add(ty.i1, tx.i1, ty.w1 * tx.w1);
      }
      taps_.insert(taps_.end(), local.begin(), local.begin() + static_cast<std::ptrdiff_t>(n));
      tap_begin_.push_back(taps_.size());
    }
    ray_begin_.push_back(tap_begin_.size() - 1);
  }
}

std::vector<double> SliceProjector::sample_values(std::size_t ray,
                                                  std::span<const double> slice) const {
  std::vector<double> out;
  out.reserve(samples(ray));
  for (std::size_t s = ray_begin_[ray]; s < ray_begin_[ray + 1]; ++s) {
    double v = 0.0;
    for (std::size_t t = tap_begin_[s]; t < tap_begin_[s + 1]; ++t) {
      v += taps_[t].weight * slice[taps_[t].index];
    }
    out.push_back(v);
  }
  return out;
}

double SliceProjector::line_sum(std::size_t ray, std::span<const double> slice) const {
  CompensatedSum sum;
  for (std::size_t s = ray_begin_[ray]; s < ray_begin_[ray + 1]; ++s) {
    double v = 0.0;
    for (std::size_t t = tap_begin_[s]; t < tap_begin_[s + 1]; ++t) {
      v += taps_[t].weight * slice[taps_[t].index];
    }
    sum.add(v);
  }
  return sum.value();
}

void SliceProjector::scatter(std::size_t ray, double value, std::span<double> slice) const {
  for (std::size_t s = ray_begin_[ray]; s < ray_begin_[ray + 1]; ++s) {
    for (std::size_t t = tap_begin_[s]; t < tap_begin_[s + 1]; ++t) {
      slice[taps_[t].index] += value * taps_[t].weight;
    }
  }
}

// Rendering -------------------------------------------------------------------

void check_render_shapes(const Dims& dims, const RayFan& fan, const RenderConfig& cfg) {
  cfg.validate();
  require_valid(dims);
  if (fan.width() != cfg.width) {
    throw DimsError("fan has " + std::to_string(fan.width()) + " rays but image width is " +
                    std::to_string(cfg.width));
  }
  if (dims.nz < cfg.height) {
    throw DimsError("volume has " + std::to_string(dims.nz) + " axial slices, image height is " +
                    std::to_string(cfg.height));
  }
  if (fan.grid_nx != dims.nx || fan.grid_ny != dims.ny) {
    throw DimsError("fan was sampled on a " + std::to_string(fan.grid_ny) + "x" +
                    std::to_string(fan.grid_nx) + " axial grid, volume slices are " +
                    std::to_string(dims.ny) + "x" + std::to_string(dims.nx));
  }
  for (const Ray& r : fan.rays) {
    if (r.samples.size() > cfg.n_samples) {
      throw DimsError("fan rays carry more samples than the configured n_samples");
    }
  }
}

Image2 render_field(std::span<const double> field, const Dims& dims, const SliceProjector& proj,
                    const RenderConfig& cfg) {
  Image2 img(cfg.height, proj.rays());
  const std::size_t slice = dims.slice_size();
  parallel::for_each_index(cfg.height, [&](std::size_t j) {
    const auto s = field.subspan(j * slice, slice);
    for (std::size_t i = 0; i < proj.rays(); ++i) {
      img.at(j, i) = opacity_from_optical_depth(cfg.beta * cfg.delta * proj.line_sum(i, s));
    }
  });
  return img;
}

SimPXImage render_simpx(const DensityVolume& vol, const RayFan& fan, const RenderConfig& cfg) {
  check_render_shapes(vol.dims(), fan, cfg);
  const SliceProjector proj(fan, vol.dims().ny, vol.dims().nx, cfg.interpolation);
  Image2 img = render_field(vol.values(), vol.dims(), proj, cfg);
  for (double p : img.values()) {
    if (!(p < 1.0)) {
      throw NumericError("transmittance underflowed to 0; beta * density * path length is too large");
    }
  }
  return SimPXImage(std::move(img));
}

// MIP ---------------------------------------------------------------------------

const char* to_string(MipAxis axis) {
  switch (axis) {
    case MipAxis::axial: return "axial";
    case MipAxis::sagittal: return "sagittal";
    case MipAxis::coronal: return "coronal";
  }
  return "?";
}

MipResult mip_with_argmax(std::span<const double> field, const Dims& d, MipAxis axis) {
  MipResult out;
  std::size_t rows = 0, cols = 0, depth = 0;
  switch (axis) {
    case MipAxis::axial: rows = d.ny; cols = d.nx; depth = d.nz; break;
    case MipAxis::sagittal: rows = d.nz; cols = d.ny; depth = d.nx; break;
    case MipAxis::coronal: rows = d.nz; cols = d.nx; depth = d.ny; break;
  }
  const auto flat = [&](std::size_t r, std::size_t c, std::size_t k) -> std::size_t {
    switch (axis) {
      case MipAxis::axial: return (k * d.ny + r) * d.nx + c;
      case MipAxis::sagittal: return (r * d.ny + c) * d.nx + k;
      case MipAxis::coronal: return (r * d.ny + k) * d.nx + c;
    }
    return 0;
  };
  out.image = Image2(rows, cols);
  out.argmax.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t best = flat(r, c, 0);
      for (std::size_t k = 1; k < depth; ++k) {
        const std::size_t idx = flat(r, c, k);
        if (field[idx] > field[best]) best = idx;
      }
      out.image.at(r, c) = field[best];
      out.argmax[r * cols + c] = best;
    }
  }
  return out;
}

Image2 mip(const DensityVolume& vol, MipAxis axis) {
  return mip_with_argmax(vol.values(), vol.dims(), axis).image;
}

}  // namespace simpx
