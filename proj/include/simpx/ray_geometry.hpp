#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace simpx {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

double norm(Vec2 v);
/// Perpendicular distance from p to the infinite line through a with unit direction d.
double distance_to_line(Vec2 p, Vec2 a, Vec2 d);

/// Trajectory of the rotation center:
///   f(x) = coefficient * (|x| - vertex_distance)^2
/// sampled on [x_min, x_max] every `step`, then mapped onto the axial grid as
/// offset + scale * (x, f(x)). With the defaults the two branches meet at
/// (0, 100) and 21 centers are produced.
struct CenterCurve {
  double coefficient = 0.01;
  double vertex_distance = 100.0;
  double x_min = -50.0;
  double x_max = 50.0;
  double step = 5.0;
  double scale = 1.0;
  Vec2 offset{};

  [[nodiscard]] double f(double x) const;
  /// (x_max - x_min) / step + 1; throws ValueError if that is not a whole number >= 2.
  [[nodiscard]] std::size_t center_count() const;
};

/// Centers in curve units, before scale and offset.
std::vector<Vec2> curve_points(const CenterCurve& curve);
/// Centers on the axial grid.
std::vector<Vec2> make_centers(const CenterCurve& curve);

/// Offset that puts the curve's middle point at (nx / 2, 0.6 * ny).
Vec2 default_offset(const CenterCurve& curve, std::size_t nx, std::size_t ny);

/// Rotation step in degrees for segment i (between centers i and i+1) of the
/// 21-center trajectory: 0.5 near the molars, 1.5 at the incisors, 0.6 elsewhere.
double angle_for_center(std::size_t i);
/// The 20-entry schedule built from angle_for_center.
std::vector<double> default_angle_schedule();

struct Ray {
  Vec2 origin;     // start point of the walk
  Vec2 pivot;      // center point the ray was rotated about
  Vec2 direction;  // unit length
  double angle_deg = 0.0;
  std::size_t segment = 0;
  double delta = 0.0;
  std::vector<Vec2> samples;  // retained in-bounds sample points, in walk order
  std::vector<double> sample_t;  // walk parameter of each retained sample
  std::size_t in_bounds_count = 0;
};

struct RayFan {
  std::vector<Ray> rays;  // column order, left to right
  std::vector<Vec2> centers;
  std::vector<double> angle_schedule;
  std::size_t raw_count = 0;   // rays produced before trim/pad
  std::size_t pad_front = 0;   // duplicated copies of the first raw ray
  std::size_t pad_back = 0;
  std::size_t trim_front = 0;  // raw rays dropped from the front
  std::size_t trim_back = 0;
  // Axial extents the samples were clipped to; 0 while unsampled.
  std::size_t grid_nx = 0;
  std::size_t grid_ny = 0;

  [[nodiscard]] bool adjusted() const { return raw_count != rays.size(); }
  [[nodiscard]] std::size_t width() const { return rays.size(); }
};

/// Angle (degrees) of the ray perpendicular to the chord from the first to
/// the last center.
double default_initial_angle(const std::vector<Vec2>& centers);

/// Sweeps rays through each center. Segment i starts from the previous
/// segment's final direction and rotates by angle_schedule[i] towards the
/// line c_i -> c_{i+1}, stopping before it would pass that line; the line
/// itself is then emitted. Segment 0 also emits its starting ray. The result
/// is trimmed, or padded by repeating the edge rays, to exactly `width` rays
/// (split evenly, odd remainder at the back). Ray origins sit
/// `start_distance` behind their pivot. Throws ValueError on degenerate
/// segments or bad parameters.
RayFan extract_rays(const std::vector<Vec2>& centers, const std::vector<double>& angle_schedule,
                    double initial_angle_deg, std::size_t width, double start_distance);

/// Walks from ray.origin along ray.direction at spacing delta and keeps the
/// first n_samples points lying in [0, nx] x [0, ny].
Ray sample_points(Ray ray, std::size_t n_samples, double delta, std::size_t nx, std::size_t ny);

/// Everything needed to rebuild a fan; unset optionals use the defaults above.
struct GeometryConfig {
  CenterCurve curve;
  bool auto_offset = true;
  std::optional<double> initial_angle_deg;
  std::map<std::size_t, double> theta_overrides;  // segment -> degrees
  double angular_oversample = 1.0;                // divides every rotation step
  std::size_t grid_nx = 256;
  std::size_t grid_ny = 256;
  std::size_t width = 256;
  std::size_t n_samples = 200;
  double delta = 1.0;

  /// The geometry scaled to an n x n axial grid (curve scale n / 256).
  static GeometryConfig for_grid(std::size_t nx, std::size_t ny);
  [[nodiscard]] std::vector<double> schedule(std::size_t segments) const;
};

/// make_centers + extract_rays + sample_points, with the start distance set to
/// the diagonal of the axial grid.
RayFan build_fan(const GeometryConfig& cfg);

}  // namespace simpx
