#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simpx/error.hpp"
#include "simpx/ray_geometry.hpp"

using namespace simpx;

namespace {

// Ray count per segment for the default trajectory, derived without the
// implementation: on the left branch the chord over [x, x+5] has slope
// 0.02 (x + 100) + 0.05 (mirrored on the right), so chord headings are
// atan(slope). A segment with gap g and step t emits ceil(g / t) - 1
// intermediate rays plus the connecting ray.
std::vector<std::size_t> oracle_rays_per_segment() {
  const auto heading = [](int seg) {
    const double x = -50.0 + 5.0 * seg;
    const double rad = x < 0.0 ? std::atan(0.02 * (x + 100.0) + 0.05)
                               : std::numbers::pi - std::atan(0.02 * (100.0 - x - 5.0) + 0.05);
    return rad * 180.0 / std::numbers::pi;
  };
  const double theta[20] = {0.5, 0.5, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6,
                            1.5, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6, 0.5, 0.5};
  std::vector<std::size_t> counts;
  double prev = 90.0;  // perpendicular to the horizontal chord c0 -> c20
  for (int i = 0; i < 20; ++i) {
    const double gap = std::abs(heading(i) - prev);
    std::size_t n = static_cast<std::size_t>(std::ceil(gap / theta[i])) - 1 + 1;
    if (i == 0) n += 1;  // starting ray
    counts.push_back(n);
    prev = heading(i);
  }
  return counts;
}

}  // namespace

TEST_CASE("center curve") {
  const CenterCurve curve;
  CHECK(curve.center_count() == 21);
  const auto pts = curve_points(curve);
  REQUIRE(pts.size() == 21);
  CHECK(pts[10].x == 0.0);
  CHECK(pts[10].y == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(pts[0].x == -50.0);
  CHECK(pts[0].y == doctest::Approx(25.0).epsilon(1e-15));
  for (std::size_t i = 0; i < 21; ++i) {
    CHECK(pts[i].x == -pts[20 - i].x);
    CHECK(pts[i].y == pts[20 - i].y);
  }

  CenterCurve placed = curve;
  placed.offset = default_offset(curve, 256, 256);
  const auto centers = make_centers(placed);
  CHECK(centers[10].x == doctest::Approx(128.0));
  CHECK(centers[10].y == doctest::Approx(153.6));
  CHECK(centers[0].x == doctest::Approx(78.0));
  CHECK(centers[0].y == doctest::Approx(78.6));

  CenterCurve bad;
  bad.step = 7.0;
  CHECK_THROWS_AS((void)bad.center_count(), ValueError);
  bad.step = 0.0;
  CHECK_THROWS_AS((void)bad.center_count(), ValueError);
}

TEST_CASE("angle schedule") {
  CHECK(angle_for_center(0) == 0.5);
  CHECK(angle_for_center(1) == 0.5);
  CHECK(angle_for_center(18) == 0.5);
  CHECK(angle_for_center(19) == 0.5);
  CHECK(angle_for_center(10) == 1.5);
  CHECK(angle_for_center(5) == 0.6);
  CHECK(angle_for_center(11) == 0.6);
  CHECK_THROWS_AS(angle_for_center(20), ValueError);

  GeometryConfig cfg;
  cfg.angular_oversample = 2.0;
  cfg.theta_overrides[3] = 1.0;
  const auto s = cfg.schedule(20);
  CHECK(s[0] == 0.25);
  CHECK(s[3] == 0.5);
  CHECK(s[10] == 0.75);
  cfg.theta_overrides[25] = 1.0;
  CHECK_THROWS_AS((void)cfg.schedule(20), ValueError);
}

TEST_CASE("two centers with one full rotation step") {
  const std::vector<Vec2> c{{0.0, 0.0}, {10.0, 10.0}};
  // Start vertical; the connecting line is at 45 degrees, 45 degrees away.
  const RayFan fan = extract_rays(c, {45.0}, 90.0, 2, 100.0);
  REQUIRE(fan.raw_count == 2);
  REQUIRE(fan.rays.size() == 2);
  CHECK(fan.rays[0].angle_deg == 90.0);
  CHECK(fan.rays[1].angle_deg == doctest::Approx(45.0));
  CHECK_FALSE(fan.adjusted());

  CHECK_THROWS_AS(extract_rays({{1.0, 1.0}, {1.0, 1.0}}, {0.5}, 0.0, 2, 10.0), ValueError);
  CHECK_THROWS_AS(extract_rays({{1.0, 1.0}}, {}, 0.0, 2, 10.0), ValueError);
  CHECK_THROWS_AS(extract_rays(c, {0.5, 0.5}, 0.0, 2, 10.0), ValueError);
}

TEST_CASE("default fan") {
  const RayFan fan = build_fan(GeometryConfig{});
  const auto oracle = oracle_rays_per_segment();
  std::size_t raw = 0;
  for (std::size_t n : oracle) raw += n;
  CHECK(raw == 193);
  CHECK(fan.raw_count == raw);
  CHECK(fan.rays.size() == 256);
  CHECK(fan.adjusted());
  CHECK(fan.pad_front == 31);
  CHECK(fan.pad_back == 32);

  // Per-segment counts of the unpadded construction match the oracle.
  std::vector<std::size_t> per(20, 0);
  for (std::size_t i = fan.pad_front; i < fan.rays.size() - fan.pad_back; ++i) {
    ++per[fan.rays[i].segment];
  }
  CHECK(per == oracle);

  for (const Ray& r : fan.rays) {
    CHECK(norm(r.direction) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(norm(r.direction) - 1.0) < 1e-9);
    CHECK(distance_to_line(fan.centers[r.segment], r.origin, r.direction) < 1e-9);
    CHECK(distance_to_line(r.pivot, r.origin, r.direction) < 1e-9);
  }
  // Every connecting ray also passes through the next center.
  for (std::size_t i = fan.pad_front; i + 1 < fan.rays.size() - fan.pad_back; ++i) {
    const Ray& r = fan.rays[i];
    if (fan.rays[i + 1].segment != r.segment) {
      CHECK(distance_to_line(fan.centers[r.segment + 1], r.origin, r.direction) < 1e-9);
    }
  }
}

TEST_CASE("more rays per degree near the molars") {
  const RayFan fan = build_fan(GeometryConfig{});
  std::vector<std::size_t> per(20, 0);
  for (std::size_t i = fan.pad_front; i < fan.rays.size() - fan.pad_back; ++i) {
    ++per[fan.rays[i].segment];
  }
  // Angular span of segment i = |heading after - heading before|.
  std::vector<double> span(20);
  double prev = fan.rays[fan.pad_front].angle_deg;
  std::size_t k = fan.pad_front;
  for (std::size_t seg = 0; seg < 20; ++seg) {
    while (k < fan.rays.size() - fan.pad_back && fan.rays[k].segment == seg) ++k;
    const double end = fan.rays[k - 1].angle_deg;
    span[seg] = std::abs(end - prev);
    prev = end;
  }
  const double incisor = static_cast<double>(per[10]) / span[10];
  for (std::size_t s : {0, 1, 18, 19}) {
    CAPTURE(s);
    CHECK(static_cast<double>(per[s]) / span[s] >= incisor);
  }
}

TEST_CASE("sample_points") {
  SUBCASE("fully inside a large grid") {
    Ray r;
    r.origin = {10.0, 10.0};
    r.direction = {std::cos(0.3), std::sin(0.3)};
    const Ray s = sample_points(r, 200, 1.0, 1000, 1000);
    REQUIRE(s.samples.size() == 200);
    CHECK(s.in_bounds_count == 200);
    CHECK(s.samples.front() == r.origin);
    for (std::size_t k = 0; k + 1 < s.samples.size(); ++k) {
      CHECK(std::abs(norm(s.samples[k + 1] - s.samples[k]) - 1.0) < 1e-9);
      CHECK(s.sample_t[k + 1] > s.sample_t[k]);
    }
  }
  SUBCASE("never enters") {
    Ray r;
    r.origin = {-10.0, -10.0};
    r.direction = {-1.0, 0.0};
    CHECK(sample_points(r, 200, 1.0, 64, 64).samples.empty());
    r.direction = {0.0, 1.0};
    CHECK(sample_points(r, 200, 1.0, 64, 64).samples.empty());
  }
  SUBCASE("enters after some outside steps") {
    Ray r;
    r.origin = {-3.5, 10.0};
    r.direction = {1.0, 0.0};
    const Ray s = sample_points(r, 5, 1.0, 64, 64);
    REQUIRE(s.samples.size() == 5);
    CHECK(s.samples.front().x == 0.5);  // steps at -3.5, -2.5, -1.5, -0.5 are outside
    CHECK(s.sample_t.front() == 4.0);
  }
  SUBCASE("exits early") {
    Ray r;
    r.origin = {0.0, 5.0};
    r.direction = {1.0, 0.0};
    const Ray s = sample_points(r, 200, 1.0, 16, 16);
    CHECK(s.in_bounds_count == 17);  // x = 0..16 inclusive
    CHECK(s.samples.back().x == 16.0);
  }
  SUBCASE("spacing delta") {
    Ray r;
    r.origin = {-100.0, -80.0};
    r.direction = {0.8, 0.6};
    const Ray s = sample_points(r, 50, 0.37, 64, 64);
    REQUIRE(s.samples.size() == 50);
    for (std::size_t k = 0; k + 1 < s.samples.size(); ++k) {
      CHECK(std::abs(norm(s.samples[k + 1] - s.samples[k]) - 0.37) < 1e-9);
    }
  }
  Ray r;
  CHECK_THROWS_AS(sample_points(r, 0, 1.0, 4, 4), ValueError);
  CHECK_THROWS_AS(sample_points(r, 1, 0.0, 4, 4), ValueError);
}

TEST_CASE("sampled default fan obeys the sampling rule") {
  for (std::size_t n : {256, 64, 8}) {
    CAPTURE(n);
    const RayFan fan = build_fan(GeometryConfig::for_grid(n, n));
    CHECK(fan.rays.size() == 256);
    for (const Ray& r : fan.rays) {
      CHECK(r.samples.size() <= 200);
      CHECK(r.in_bounds_count == r.samples.size());
      for (const Vec2& p : r.samples) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= static_cast<double>(n));
        CHECK(p.y >= 0.0);
        CHECK(p.y <= static_cast<double>(n));
      }
      for (std::size_t k = 0; k + 1 < r.samples.size(); ++k) {
        CHECK(std::abs(norm(r.samples[k + 1] - r.samples[k]) - 1.0) < 1e-9);
      }
    }
  }
  // On 256 x 256 the default rays all keep their full 200 samples.
  const RayFan fan = build_fan(GeometryConfig{});
  for (const Ray& r : fan.rays) CHECK(r.in_bounds_count == 200);
}

TEST_CASE("fan construction is deterministic") {
  const RayFan a = build_fan(GeometryConfig{});
  const RayFan b = build_fan(GeometryConfig{});
  REQUIRE(a.rays.size() == b.rays.size());
  for (std::size_t i = 0; i < a.rays.size(); ++i) {
    CHECK(a.rays[i].origin == b.rays[i].origin);
    CHECK(a.rays[i].direction == b.rays[i].direction);
    CHECK(a.rays[i].samples == b.rays[i].samples);
  }
}

TEST_CASE("trim when the raw fan is wider than requested") {
  GeometryConfig cfg;
  cfg.width = 101;
  const RayFan fan = build_fan(cfg);
  CHECK(fan.rays.size() == 101);
  CHECK(fan.raw_count == 193);
  CHECK(fan.trim_front == 46);
  CHECK(fan.trim_back == 46);
}
