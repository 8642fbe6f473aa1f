#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "simpx/error.hpp"
#include "simpx/image_io.hpp"
#include "simpx/parallel.hpp"
#include "simpx/renderer.hpp"

using namespace simpx;

namespace {

struct Scene {
  RayFan fan;
  RenderConfig cfg;
};

Scene scene_for(std::size_t n, std::size_t nz) {
  Scene s{build_fan(GeometryConfig::for_grid(n, n)), RenderConfig{}};
  s.cfg.height = nz;
  return s;
}

}  // namespace

TEST_CASE("transmittance closed forms") {
  CHECK(transmittance(std::vector<double>{0.0, 0.0, 0.0}, 1.0, 0.7) == 1.0);
  CHECK(transmittance(std::vector<double>{}, 1.0, 0.7) == 1.0);

  // sigma = 2, delta = 0.5, beta = 1: exp(-1).
  const double t = transmittance(std::vector<double>{2.0}, 0.5, 1.0);
  CHECK(t == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(1.0 - t == doctest::Approx(0.63212055882855767).epsilon(1e-15));
  CHECK(opacity_from_optical_depth(1.0) == doctest::Approx(0.63212055882855767).epsilon(1e-15));
}

TEST_CASE("transmittance properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(1 + rng() % 300);
    for (double& v : s) v = u(rng);
    const double beta = 0.001 + 0.05 * u(rng);
    const double delta = 0.1 + 2.0 * u(rng);
    const double t = transmittance(s, delta, beta);
    CHECK(t > 0.0);
    CHECK(t <= 1.0);

    // Concatenation.
    const std::size_t cut = rng() % (s.size() + 1);
    const std::vector<double> a(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(cut));
    const std::vector<double> b(s.begin() + static_cast<std::ptrdiff_t>(cut), s.end());
    CHECK(transmittance(a, delta, beta) * transmittance(b, delta, beta) ==
          doctest::Approx(t).epsilon(1e-13));

    // Permutation.
    std::vector<double> p = s;
    std::shuffle(p.begin(), p.end(), rng);
    CHECK(std::abs(transmittance(p, delta, beta) - t) <= 1e-12);

    // Monotone in every sample.
    std::vector<double> up = s;
    up[rng() % up.size()] += 0.01;
    CHECK(transmittance(up, delta, beta) < t);
  }
}

TEST_CASE("render zero and uniform volumes") {
  const Scene sc = scene_for(32, 6);
  const auto zero = render_simpx(DensityVolume::filled({6, 32, 32}, 0.0), sc.fan, sc.cfg);
  CHECK(zero.height() == 6);
  CHECK(zero.width() == 256);
  for (double p : zero.values()) CHECK(p == 0.0);

  const double c = 0.5;
  const auto uni = render_simpx(DensityVolume::filled({6, 32, 32}, c), sc.fan, sc.cfg);
  for (std::size_t j = 0; j < uni.height(); ++j) {
    for (std::size_t i = 0; i < uni.width(); ++i) {
      const double n = static_cast<double>(sc.fan.rays[i].in_bounds_count);
      CHECK(uni.at(j, i) == doctest::Approx(1.0 - std::exp(-sc.cfg.beta * c * n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform volume at full resolution: identical full-ray pixels") {
  const RayFan fan = build_fan(GeometryConfig{});
  RenderConfig cfg;
  cfg.height = 2;
  const auto img = render_simpx(DensityVolume::filled({2, 256, 256}, 0.5), fan, cfg);
  const double expected = 1.0 - std::exp(-0.02 * 0.5 * 200 * 1.0);
  CHECK(expected == doctest::Approx(0.8646647167633873));
  const double first = img.at(0, 0);
  for (double p : img.values()) {
    CHECK(p == first);
    CHECK(std::abs(p - expected) < 1e-12);
  }
}

TEST_CASE("beta-density scaling identity") {
  const Scene sc = scene_for(48, 8);
  const auto vol = make_phantom("jaw-arch", {8, 48, 48}, 3);
  std::vector<double> half(vol.values().begin(), vol.values().end());
  for (double& v : half) v /= 2.0;
  RenderConfig doubled = sc.cfg;
  doubled.beta *= 2.0;
  const auto a = render_simpx(vol, sc.fan, sc.cfg);
  const auto b = render_simpx(DensityVolume(vol.dims(), half), sc.fan, doubled);
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    CHECK(std::abs(a.values()[k] - b.values()[k]) <= 1e-12);
  }
}

TEST_CASE("render matches direct trilinear sampling") {
  const Scene sc = scene_for(24, 3);
  const auto vol = make_phantom("sphere-set", {3, 24, 24}, 9);
  const auto img = render_simpx(vol, sc.fan, sc.cfg);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < sc.fan.rays.size(); i += 17) {
      std::vector<double> s;
      for (const Vec2& p : sc.fan.rays[i].samples) {
        s.push_back(sample_trilinear(vol, {p.x, p.y, static_cast<double>(j) + 0.5}));
      }
      const double expect = 1.0 - transmittance(s, sc.cfg.delta, sc.cfg.beta);
      CHECK(img.at(j, i) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  // Nearest-neighbour mode reads through sample_nearest.
  RenderConfig near = sc.cfg;
  near.interpolation = Interpolation::nearest;
  const auto img_n = render_simpx(vol, sc.fan, near);
  std::vector<double> s;
  for (const Vec2& p : sc.fan.rays[100].samples) s.push_back(sample_nearest(vol, {p.x, p.y, 1.5}));
  CHECK(img_n.at(1, 100) == doctest::Approx(1.0 - transmittance(s, 1.0, near.beta)).epsilon(1e-12));
}

TEST_CASE("render monotonicity and range") {
  const Scene sc = scene_for(16, 2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.9);
  std::vector<double> v(2 * 16 * 16);
  for (double& x : v) x = u(rng);
  const DensityVolume base({2, 16, 16}, v);
  const auto a = render_simpx(base, sc.fan, sc.cfg);
  for (double p : a.values()) {
    CHECK(p >= 0.0);
    CHECK(p < 1.0);
  }
  v[16 * 16 + 8 * 16 + 8] += 0.1;  // slice 1, center voxel
  const auto b = render_simpx(DensityVolume({2, 16, 16}, v), sc.fan, sc.cfg);
  bool any_up = false;
  for (std::size_t k = 0; k < a.values().size(); ++k) {
    CHECK(b.values()[k] >= a.values()[k]);
    any_up = any_up || b.values()[k] > a.values()[k];
  }
  CHECK(any_up);
  for (std::size_t i = 0; i < 256; ++i) CHECK(a.at(0, i) == b.at(0, i));
}

TEST_CASE("render shape errors") {
  const Scene sc = scene_for(16, 4);
  const auto vol = DensityVolume::filled({4, 16, 16}, 0.1);
  RenderConfig cfg = sc.cfg;
  cfg.width = 100;
  CHECK_THROWS_AS(render_simpx(vol, sc.fan, cfg), DimsError);
  cfg = sc.cfg;
  cfg.height = 5;
  CHECK_THROWS_AS(render_simpx(vol, sc.fan, cfg), DimsError);
  CHECK_THROWS_AS(render_simpx(DensityVolume::filled({4, 17, 16}, 0.1), sc.fan, sc.cfg), DimsError);
  cfg = sc.cfg;
  cfg.beta = 0.0;
  CHECK_THROWS_AS(render_simpx(vol, sc.fan, cfg), ValueError);
}

TEST_CASE("render is independent of thread count") {
  const Scene sc = scene_for(40, 12);
  const auto vol = make_phantom("jaw-arch", {12, 40, 40}, 1);
  parallel::set_threads(1);
  const auto a = render_simpx(vol, sc.fan, sc.cfg);
  parallel::set_threads(5);
  const auto b = render_simpx(vol, sc.fan, sc.cfg);
  parallel::set_threads(0);
  CHECK(a == b);
}

TEST_CASE("maximum intensity projections") {
  const Dims d{5, 6, 7};
  const auto c = DensityVolume::filled(d, 0.25);
  for (MipAxis axis : {MipAxis::axial, MipAxis::sagittal, MipAxis::coronal}) {
    const Image2 m = mip(c, axis);
    for (double v : m.values()) CHECK(v == 0.25);
  }

  const auto delta = make_phantom("single-voxel:1,2,3,0.8", d, 0);
  const Image2 ax = mip(delta, MipAxis::axial);
  const Image2 sag = mip(delta, MipAxis::sagittal);
  const Image2 cor = mip(delta, MipAxis::coronal);
  CHECK(ax.rows() == 6);
  CHECK(ax.cols() == 7);
  CHECK(sag.rows() == 5);
  CHECK(sag.cols() == 6);
  CHECK(cor.rows() == 5);
  CHECK(cor.cols() == 7);
  const auto nonzero = [](const Image2& img) {
    return std::count_if(img.values().begin(), img.values().end(), [](double v) { return v != 0; });
  };
  CHECK(nonzero(ax) == 1);
  CHECK(nonzero(sag) == 1);
  CHECK(nonzero(cor) == 1);
  const double stored = static_cast<float>(0.8);
  CHECK(ax.at(2, 3) == stored);
  CHECK(sag.at(1, 2) == stored);
  CHECK(cor.at(1, 3) == stored);

  // MIP dominates every slice.
  const auto vol = make_phantom("sphere-set", {9, 10, 11}, 4);
  const Image2 m = mip(vol, MipAxis::axial);
  for (std::size_t z = 0; z < 9; ++z)
    for (std::size_t y = 0; y < 10; ++y)
      for (std::size_t x = 0; x < 11; ++x) CHECK(m.at(y, x) >= vol.at(z, y, x));

  // Ties resolve to the first index along the axis.
  const auto argmax = mip_with_argmax(c.values(), d, MipAxis::axial).argmax;
  CHECK(argmax[0] == 0);
}

TEST_CASE("image files") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto fpath = dir / "simpx_test_img.pimg";
  const auto ppath = dir / "simpx_test_img.pgm";
  Image2 img(2, 3, {0.0, 0.25, 0.5, 0.75, 1.0, 1.5});
  save_image(img, fpath);
  CHECK(load_image(fpath) == img);
  CHECK_THROWS_AS(load_simpx(fpath), ValueError);

  save_pgm16(img, ppath);
  std::ifstream in(ppath, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string header = "P5\n3 2\n65535\n";
  REQUIRE(bytes.size() == header.size() + 12);
  CHECK(bytes.substr(0, header.size()) == header);
  const auto px = [&](std::size_t k) {
    return (static_cast<unsigned>(static_cast<unsigned char>(bytes[header.size() + 2 * k])) << 8) |
           static_cast<unsigned char>(bytes[header.size() + 2 * k + 1]);
  };
  CHECK(px(0) == 0);
  CHECK(px(1) == 16384);  // round(0.25 * 65535) = 16383.75 -> 16384
  CHECK(px(2) == 32768);
  CHECK(px(4) == 65535);
  CHECK(px(5) == 65535);  // clamped

  std::ofstream(fpath, std::ios::binary) << "PIMG1 2 3\n" << std::string(8, '\0');
  CHECK_THROWS_AS(load_image(fpath), FormatError);
  std::filesystem::remove(fpath);
  std::filesystem::remove(ppath);
}
