#include "simpx/backproject.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simpx/error.hpp"
#include "simpx/parallel.hpp"

namespace simpx {

namespace {

void check_fan(const RayFan& fan, const Dims& dims) {
  require_valid(dims);
  if (fan.grid_nx != dims.nx || fan.grid_ny != dims.ny) {
    throw DimsError("fan was sampled on a " + std::to_string(fan.grid_ny) + "x" +
                    std::to_string(fan.grid_nx) + " axial grid, volume slices are " +
                    std::to_string(dims.ny) + "x" + std::to_string(dims.nx));
  }
}

}  // namespace

Grid3 crossing_counts(const RayFan& fan, const Dims& dims, Interpolation interp) {
  check_fan(fan, dims);
  const SliceProjector proj(fan, dims.ny, dims.nx, interp);
  std::vector<double> slice_counts(dims.slice_size(), 0.0);
  std::vector<std::uint32_t> stamp(dims.slice_size(), 0);
  for (std::size_t r = 0; r < proj.rays(); ++r) {
    proj.for_each_touched(r, stamp, static_cast<std::uint32_t>(r + 1),
                          [&](std::uint32_t v) { slice_counts[v] += 1.0; });
  }
  Grid3 counts(dims, 0.0);
  auto out = counts.values();
  for (std::size_t z = 0; z < dims.nz; ++z) {
    std::copy(slice_counts.begin(), slice_counts.end(),
              out.begin() + static_cast<std::ptrdiff_t>(z * dims.slice_size()));
  }
  return counts;
}

BackProjectionMap aggregate_rho(const RayFan& fan, const Image2& candidates, const Dims& dims,
                                Interpolation interp) {
  check_fan(fan, dims);
  if (candidates.rows() != dims.nz || candidates.cols() != fan.width()) {
    throw DimsError("candidate image is " + std::to_string(candidates.rows()) + "x" +
                    std::to_string(candidates.cols()) + ", expected " + std::to_string(dims.nz) +
                    "x" + std::to_string(fan.width()));
  }
  const SliceProjector proj(fan, dims.ny, dims.nx, interp);
  BackProjectionMap map{crossing_counts(fan, dims, interp), Grid3(dims, 0.0)};
  const std::size_t slice = dims.slice_size();
  const auto counts = map.counts.values();
  auto rho = map.rho.values();
  // Each slice is summed by one worker in ray order, so the result does not
  // depend on the thread count.
  parallel::for_each_index(dims.nz, [&](std::size_t z) {
    std::vector<std::uint32_t> stamp(slice, 0);
    auto out = rho.subspan(z * slice, slice);
    for (std::size_t r = 0; r < proj.rays(); ++r) {
      const double c = candidates.at(z, r);
      proj.for_each_touched(r, stamp, static_cast<std::uint32_t>(r + 1),
                            [&](std::uint32_t v) { out[v] += c; });
    }
    for (std::size_t v = 0; v < slice; ++v) {
      const double n = counts[z * slice + v];
      out[v] = n > 0.0 ? out[v] / n : 0.0;
    }
  });
  return map;
}

double invert_pixel_to_candidate(double pixel, std::size_t n_inbounds, double delta, double beta) {
  if (!(pixel >= 0.0)) throw ValueError("pixel value must be >= 0");
  if (!(pixel < 1.0)) throw ValueError("pixel value >= 1 implies zero transmittance");
  if (!(delta > 0.0) || !(beta > 0.0)) throw ValueError("delta and beta must be > 0");
  if (n_inbounds == 0) return 0.0;
  const double sigma = -std::log1p(-pixel) / (beta * static_cast<double>(n_inbounds) * delta);
  return std::clamp(sigma, 0.0, 1.0);
}

Image2 pixel_candidates(const SimPXImage& img, const RayFan& fan, double delta, double beta) {
  if (img.width() != fan.width()) {
    throw DimsError("image width " + std::to_string(img.width()) + " does not match fan width " +
                    std::to_string(fan.width()));
  }
  Image2 out(img.height(), img.width());
  for (std::size_t j = 0; j < img.height(); ++j) {
    for (std::size_t i = 0; i < img.width(); ++i) {
      out.at(j, i) = invert_pixel_to_candidate(img.at(j, i), fan.rays[i].in_bounds_count, delta, beta);
    }
  }
  return out;
}

}  // namespace simpx
