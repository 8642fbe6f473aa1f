#include "simpx/ray_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "simpx/error.hpp"

namespace simpx {

namespace {

constexpr double kAngleEps = 1e-9;  // degrees

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

Vec2 unit_at(double deg) { return {std::cos(to_rad(deg)), std::sin(to_rad(deg))}; }

}  // namespace

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double distance_to_line(Vec2 p, Vec2 a, Vec2 d) {
  const Vec2 r = p - a;
  return std::abs(r.x * d.y - r.y * d.x);
}

double CenterCurve::f(double x) const {
  const double u = std::abs(x) - vertex_distance;
  return coefficient * u * u;
}

std::size_t CenterCurve::center_count() const {
  if (!(step > 0.0)) throw ValueError("center curve: step must be > 0");
  if (!(x_max > x_min)) throw ValueError("center curve: x_max must exceed x_min");
  const double intervals = (x_max - x_min) / step;
  const double whole = std::round(intervals);
  if (std::abs(intervals - whole) > 1e-9 * std::max(1.0, whole)) {
    throw ValueError("center curve: x range is not a whole number of steps");
  }
  return static_cast<std::size_t>(whole) + 1;
}

std::vector<Vec2> curve_points(const CenterCurve& curve) {
  const std::size_t n = curve.center_count();
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = curve.x_min + curve.step * static_cast<double>(i);
    pts.push_back({x, curve.f(x)});
  }
  return pts;
}

std::vector<Vec2> make_centers(const CenterCurve& curve) {
  if (!(curve.scale > 0.0)) throw ValueError("center curve: scale must be > 0");
  auto pts = curve_points(curve);
  for (Vec2& p : pts) p = curve.offset + curve.scale * p;
  return pts;
}

Vec2 default_offset(const CenterCurve& curve, std::size_t nx, std::size_t ny) {
  const double mid_x = 0.5 * (curve.x_min + curve.x_max);
  return {0.5 * static_cast<double>(nx) - curve.scale * mid_x,
          0.6 * static_cast<double>(ny) - curve.scale * curve.f(mid_x)};
}

double angle_for_center(std::size_t i) {
  if (i > 19) {
    throw ValueError("angle_for_center: segment index " + std::to_string(i) +
                     " outside 0..19");
  }
  if (i == 0 || i == 1 || i == 18 || i == 19) return 0.5;
  if (i == 10) return 1.5;
  return 0.6;
}

std::vector<double> default_angle_schedule() {
  std::vector<double> s(20);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = angle_for_center(i);
  return s;
}

double default_initial_angle(const std::vector<Vec2>& centers) {
  if (centers.size() < 2) throw ValueError("need at least two centers");
  const Vec2 chord = centers.back() - centers.front();
  return to_deg(std::atan2(chord.y, chord.x)) + 90.0;
}

RayFan extract_rays(const std::vector<Vec2>& centers, const std::vector<double>& angle_schedule,
                    double initial_angle_deg, std::size_t width, double start_distance) {
  if (centers.size() < 2) throw ValueError("extract_rays: need at least two centers");
  const std::size_t segments = centers.size() - 1;
  if (angle_schedule.size() != segments) {
    throw ValueError("extract_rays: angle schedule has " + std::to_string(angle_schedule.size()) +
                     " entries for " + std::to_string(segments) + " segments");
  }
  if (width < segments) throw ValueError("extract_rays: width smaller than segment count");
  if (!(start_distance > 0.0)) throw ValueError("extract_rays: start distance must be > 0");

  std::vector<Ray> raw;
  const auto emit = [&](std::size_t seg, double angle) {
    Ray r;
    r.pivot = centers[seg];
    r.angle_deg = angle;
    r.direction = unit_at(angle);
    r.origin = r.pivot - start_distance * r.direction;
    r.segment = seg;
    raw.push_back(std::move(r));
  };

  double angle = initial_angle_deg;
  emit(0, angle);
  for (std::size_t i = 0; i < segments; ++i) {
    const Vec2 chord = centers[i + 1] - centers[i];
    if (norm(chord) == 0.0) {
      throw ValueError("extract_rays: centers " + std::to_string(i) + " and " +
                       std::to_string(i + 1) + " coincide");
    }
    const double theta = angle_schedule[i];
    if (!(theta > 0.0)) throw ValueError("extract_rays: rotation steps must be > 0");
    // The connecting line has two headings; take the one nearest the current ray.
    double target = to_deg(std::atan2(chord.y, chord.x));
    target += 180.0 * std::round((angle - target) / 180.0);
    const double gap = target - angle;
    const double sign = gap < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 1; static_cast<double>(k) * theta < std::abs(gap) - kAngleEps; ++k) {
      emit(i, angle + sign * static_cast<double>(k) * theta);
    }
    if (std::abs(gap) > kAngleEps) emit(i, target);
    angle = target;
  }

  RayFan fan;
  fan.centers = centers;
  fan.angle_schedule = angle_schedule;
  fan.raw_count = raw.size();
  if (raw.size() >= width) {
    const std::size_t excess = raw.size() - width;
    fan.trim_front = excess / 2;
    fan.trim_back = excess - fan.trim_front;
    fan.rays.assign(raw.begin() + static_cast<std::ptrdiff_t>(fan.trim_front),
                    raw.end() - static_cast<std::ptrdiff_t>(fan.trim_back));
  } else {
    const std::size_t missing = width - raw.size();
    fan.pad_front = missing / 2;
    fan.pad_back = missing - fan.pad_front;
    fan.rays.reserve(width);
    fan.rays.insert(fan.rays.end(), fan.pad_front, raw.front());
    fan.rays.insert(fan.rays.end(), raw.begin(), raw.end());
    fan.rays.insert(fan.rays.end(), fan.pad_back, raw.back());
  }
  return fan;
}

Ray sample_points(Ray ray, std::size_t n_samples, double delta, std::size_t nx, std::size_t ny) {
  if (n_samples < 1) throw ValueError("sample_points: n_samples must be >= 1");
  if (!(delta > 0.0)) throw ValueError("sample_points: delta must be > 0");
  ray.delta = delta;
  ray.samples.clear();
  ray.sample_t.clear();
  ray.in_bounds_count = 0;

  const double ext_x = static_cast<double>(nx);
  const double ext_y = static_cast<double>(ny);
  const auto inside = [&](Vec2 p) { return p.x >= 0.0 && p.x <= ext_x && p.y >= 0.0 && p.y <= ext_y; };

  // Slab clip gives the parameter interval; the walk below applies the
  // in-bounds test itself, the interval only bounds how far to look.
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::infinity();
  const auto clip = [&](double o, double d, double hi) {
    if (d == 0.0) {
      if (o < 0.0 || o > hi) t_hi = -1.0;
      return;
    }
    double a = (0.0 - o) / d, b = (hi - o) / d;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
  };
  clip(ray.origin.x, ray.direction.x, ext_x);
  clip(ray.origin.y, ray.direction.y, ext_y);
  if (t_hi < t_lo) return ray;

  const auto k_first = static_cast<std::size_t>(std::max(0.0, std::floor(t_lo / delta) - 1.0));
  const auto k_last = static_cast<std::size_t>(std::floor(t_hi / delta) + 1.0);
  for (std::size_t k = k_first; k <= k_last && ray.samples.size() < n_samples; ++k) {
    const double t = static_cast<double>(k) * delta;
    const Vec2 p = ray.origin + t * ray.direction;
    if (inside(p)) {
      ray.samples.push_back(p);
      ray.sample_t.push_back(t);
    } else if (!ray.samples.empty()) {
      break;
    }
  }
  ray.in_bounds_count = ray.samples.size();
  return ray;
}

GeometryConfig GeometryConfig::for_grid(std::size_t nx, std::size_t ny) {
  GeometryConfig cfg;
  cfg.grid_nx = nx;
  cfg.grid_ny = ny;
  cfg.curve.scale = static_cast<double>(std::min(nx, ny)) / 256.0;
  return cfg;
}

std::vector<double> GeometryConfig::schedule(std::size_t segments) const {
  if (!(angular_oversample > 0.0)) throw ValueError("angular_oversample must be > 0");
  std::vector<double> s(segments, 0.6);
  if (segments == 20) s = default_angle_schedule();
  for (const auto& [i, theta] : theta_overrides) {
    if (i >= segments) {
      throw ValueError("theta override for segment " + std::to_string(i) + " but only " +
                       std::to_string(segments) + " segments exist");
    }
    s[i] = theta;
  }
  for (double& v : s) v /= angular_oversample;
  return s;
}

RayFan build_fan(const GeometryConfig& cfg) {
  if (cfg.grid_nx < 1 || cfg.grid_ny < 1) throw ValueError("geometry: grid extents must be >= 1");
  CenterCurve curve = cfg.curve;
  if (cfg.auto_offset) curve.offset = default_offset(curve, cfg.grid_nx, cfg.grid_ny);
  const auto centers = make_centers(curve);
  const double initial = cfg.initial_angle_deg.value_or(default_initial_angle(centers));
  const double diag = std::hypot(static_cast<double>(cfg.grid_nx), static_cast<double>(cfg.grid_ny));
  RayFan fan = extract_rays(centers, cfg.schedule(centers.size() - 1), initial, cfg.width, diag);
  for (Ray& r : fan.rays) r = sample_points(std::move(r), cfg.n_samples, cfg.delta, cfg.grid_nx, cfg.grid_ny);
  fan.grid_nx = cfg.grid_nx;
  fan.grid_ny = cfg.grid_ny;
  return fan;
}

}  // namespace simpx
