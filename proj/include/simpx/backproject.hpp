#pragma once

#include "simpx/ray_geometry.hpp"
#include "simpx/renderer.hpp"
#include "simpx/volume.hpp"

namespace simpx {

/// Ray-crossing structure of a fan over a volume.
///   counts(x): number of pixels whose ray touches voxel x
///   rho(x):    mean of the per-pixel candidate densities over those pixels,
///              0 where counts(x) = 0
struct BackProjectionMap {
  Grid3 counts;
  Grid3 rho;
};

/// A ray touches a voxel when some sample reads it with positive
/// interpolation weight; repeated touches by one ray count once. The fan is
/// replicated over every axial slice, so all slices share one count map.
Grid3 crossing_counts(const RayFan& fan, const Dims& dims,
                      Interpolation interp = Interpolation::trilinear);

/// candidates has one value per pixel: rows = dims.nz, cols = fan width.
BackProjectionMap aggregate_rho(const RayFan& fan, const Image2& candidates, const Dims& dims,
                                Interpolation interp = Interpolation::trilinear);

/// Density that reproduces `pixel` if it were constant along the in-bounds
/// part of the ray: -ln(1 - pixel) / (beta * n_inbounds * delta), clamped to
/// [0, 1]. Rays with no in-bounds sample carry no information and give 0.
double invert_pixel_to_candidate(double pixel, std::size_t n_inbounds, double delta, double beta);

/// Applies invert_pixel_to_candidate to every pixel with its ray's sample count.
Image2 pixel_candidates(const SimPXImage& img, const RayFan& fan, double delta, double beta);

}  // namespace simpx
