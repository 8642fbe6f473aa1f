#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "simpx/backproject.hpp"
#include "simpx/error.hpp"
#include "simpx/renderer.hpp"

using namespace simpx;

namespace {

// One ray along the row of voxel centers y = row + 0.5, sampled at x centers.
RayFan row_fan(std::size_t n, std::size_t row, std::size_t n_samples) {
  Ray r;
  r.origin = {0.5, static_cast<double>(row) + 0.5};
  r.direction = {1.0, 0.0};
  RayFan fan;
  fan.rays.push_back(sample_points(r, n_samples, 1.0, n, n));
  fan.raw_count = 1;
  fan.grid_nx = n;
  fan.grid_ny = n;
  return fan;
}

RayFan empty_fan(std::size_t n) {
  Ray r;
  r.origin = {-10.0, -10.0};
  r.direction = {-1.0, 0.0};
  RayFan fan;
  fan.rays.push_back(sample_points(r, 10, 1.0, n, n));
  fan.raw_count = 1;
  fan.grid_nx = n;
  fan.grid_ny = n;
  return fan;
}

}  // namespace

TEST_CASE("counts for a ray that never enters") {
  const Grid3 c = crossing_counts(empty_fan(8), {3, 8, 8});
  for (double v : c.values()) CHECK(v == 0.0);
  const auto m = aggregate_rho(empty_fan(8), Image2(3, 1, 0.5), {3, 8, 8});
  for (double v : m.rho.values()) CHECK(v == 0.0);
}

TEST_CASE("counts for one ray along a voxel row") {
  const Dims d{2, 8, 8};
  for (Interpolation interp : {Interpolation::trilinear, Interpolation::nearest}) {
    const Grid3 c = crossing_counts(row_fan(8, 3, 8), d, interp);
    for (std::size_t z = 0; z < d.nz; ++z)
      for (std::size_t y = 0; y < d.ny; ++y)
        for (std::size_t x = 0; x < d.nx; ++x) CHECK(c.at(z, y, x) == (y == 3 ? 1.0 : 0.0));
  }
  // Two identical rays: each voxel is crossed by two pixels.
  RayFan twice = row_fan(8, 3, 8);
  twice.rays.push_back(twice.rays.front());
  CHECK(crossing_counts(twice, d).at(1, 3, 4) == 2.0);
}

TEST_CASE("repeated touches by one ray count once") {
  // Off-center samples at spacing 0.5 read each voxel several times.
  Ray r;
  r.origin = {0.25, 4.2};
  r.direction = {1.0, 0.0};
  RayFan fan;
  fan.rays.push_back(sample_points(r, 16, 0.5, 8, 8));
  fan.grid_nx = fan.grid_ny = 8;
  const Grid3 c = crossing_counts(fan, {1, 8, 8});
  for (double v : c.values()) CHECK((v == 0.0 || v == 1.0));
  CHECK(c.at(0, 3, 5) == 1.0);
  CHECK(c.at(0, 4, 5) == 1.0);
}

TEST_CASE("default fan crosses the arch more than the periphery") {
  const RayFan fan = build_fan(GeometryConfig::for_grid(64, 64));
  const Grid3 c = crossing_counts(fan, {1, 64, 64});
  double arch = 0.0, edge = 0.0;
  std::size_t n_arch = 0, n_edge = 0;
  for (std::size_t y = 0; y < 64; ++y) {
    for (std::size_t x = 0; x < 64; ++x) {
      const double v = c.at(0, y, x);
      if (y >= 24 && y < 40 && x >= 24 && x < 40) {
        arch += v;
        ++n_arch;
      } else if (y < 4 || x < 4 || x >= 60) {
        edge += v;
        ++n_edge;
      }
    }
  }
  CHECK(arch / static_cast<double>(n_arch) > edge / static_cast<double>(n_edge));
  // Every slice shares the same map.
  const Grid3 c3 = crossing_counts(fan, {3, 64, 64});
  for (std::size_t y = 0; y < 64; ++y)
    for (std::size_t x = 0; x < 64; ++x) {
      CHECK(c3.at(0, y, x) == c.at(0, y, x));
      CHECK(c3.at(2, y, x) == c.at(0, y, x));
    }
}

TEST_CASE("rho aggregation") {
  const Dims d{2, 8, 8};
  SUBCASE("constant candidates") {
    const auto m = aggregate_rho(row_fan(8, 3, 8), Image2(2, 1, 0.3), d);
    for (std::size_t x = 0; x < 8; ++x) {
      CHECK(m.rho.at(0, 3, x) == doctest::Approx(0.3));
      CHECK(m.rho.at(1, 2, x) == 0.0);
    }
  }
  SUBCASE("mean over crossing pixels") {
    RayFan fan = row_fan(8, 3, 8);
    fan.rays.push_back(fan.rays.front());
    Image2 cand(2, 2);
    cand.at(0, 0) = 0.2;
    cand.at(0, 1) = 0.6;
    cand.at(1, 0) = 0.9;
    cand.at(1, 1) = 0.9;
    const auto m = aggregate_rho(fan, cand, d);
    CHECK(m.rho.at(0, 3, 5) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(m.rho.at(1, 3, 5) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(m.counts.at(0, 3, 5) == 2.0);
  }
  SUBCASE("rho lies within the candidate range; counts ignore candidates") {
    const RayFan fan = build_fan(GeometryConfig::for_grid(32, 32));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 0.7);
    Image2 cand(4, fan.width());
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < fan.width(); ++i) cand.at(j, i) = u(rng);
    const auto m = aggregate_rho(fan, cand, {4, 32, 32});
    for (std::size_t k = 0; k < m.rho.values().size(); ++k) {
      if (m.counts.values()[k] > 0) {
        CHECK(m.rho.values()[k] >= 0.1 - 1e-12);
        CHECK(m.rho.values()[k] <= 0.7 + 1e-12);
      } else {
        CHECK(m.rho.values()[k] == 0.0);
      }
    }
    const auto other = aggregate_rho(fan, Image2(4, fan.width(), 0.0), {4, 32, 32});
    CHECK(other.counts == m.counts);
    CHECK(m.counts == crossing_counts(fan, {4, 32, 32}));
  }
  CHECK_THROWS_AS(aggregate_rho(row_fan(8, 3, 8), Image2(3, 1), d), DimsError);
  CHECK_THROWS_AS(crossing_counts(row_fan(8, 3, 8), {2, 9, 8}), DimsError);
}

TEST_CASE("pixel inversion") {
  CHECK(invert_pixel_to_candidate(0.0, 200, 1.0, 0.02) == 0.0);
  // pixel = 1 - exp(-beta * sigma * n * delta) inverts to sigma.
  const double p = 1.0 - std::exp(-0.02 * 0.4 * 200);
  CHECK(invert_pixel_to_candidate(p, 200, 1.0, 0.02) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(invert_pixel_to_candidate(0.999999, 200, 1.0, 0.02) == 1.0);  // clamped
  CHECK(invert_pixel_to_candidate(0.5, 0, 1.0, 0.02) == 0.0);
  CHECK_THROWS_AS((void)invert_pixel_to_candidate(1.0, 200, 1.0, 0.02), ValueError);
}

TEST_CASE("uniform volume round trip through rho") {
  const RayFan fan = build_fan(GeometryConfig::for_grid(48, 48));
  RenderConfig cfg;
  cfg.height = 3;
  const Dims d{3, 48, 48};
  const auto img = render_simpx(DensityVolume::filled(d, 0.4), fan, cfg);
  const auto m = aggregate_rho(fan, pixel_candidates(img, fan, cfg.delta, cfg.beta), d);
  std::size_t covered = 0;
  for (std::size_t k = 0; k < m.rho.values().size(); ++k) {
    if (m.counts.values()[k] > 0) {
      ++covered;
      CHECK(std::abs(m.rho.values()[k] - 0.4) <= 0.02 * 0.4);
    }
  }
  CHECK(covered > 0);
}
