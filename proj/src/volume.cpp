#include "simpx/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "binary_io.hpp"
#include "simpx/error.hpp"

namespace simpx {

std::string to_string(const Dims& d) {
  return "(" + std::to_string(d.nz) + ", " + std::to_string(d.ny) + ", " + std::to_string(d.nx) +
         ")";
}

void require_valid(const Dims& d) {
  if (!d.valid()) throw DimsError("invalid dims " + to_string(d) + ": every extent must be >= 1");
}

Grid3::Grid3(Dims dims, double fill) : dims_(dims), data_(dims.count(), fill) {}

Grid3::Grid3(Dims dims, std::vector<double> data) : dims_(dims), data_(std::move(data)) {
  if (data_.size() != dims_.count()) {
    throw DimsError("grid data length " + std::to_string(data_.size()) + " does not match dims " +
                    to_string(dims_));
  }
}

double Grid3::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

DensityVolume::DensityVolume(Grid3 grid) : grid_(std::move(grid)) {
  require_valid(grid_.dims());
  const auto vals = grid_.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!(vals[i] >= 0.0 && vals[i] <= 1.0)) {
      throw ValueError("density at flat index " + std::to_string(i) + " is " +
                       std::to_string(vals[i]) + ", outside [0, 1]");
    }
  }
}

DensityVolume::DensityVolume(Dims dims, std::vector<double> data)
    : DensityVolume(Grid3(dims, std::move(data))) {}

DensityVolume DensityVolume::filled(Dims dims, double value) {
  require_valid(dims);
  return DensityVolume(Grid3(dims, value));
}

void AttenuationModel::validate() const {
  if (!(mu_water > 0.0)) throw ValueError("mu_water must be > 0");
  if (!(c != 0.0) || !(beta() > 0.0)) throw ValueError("beta = a / c must be > 0");
}

double hu_to_mu(double hu, const AttenuationModel& model) {
  return model.mu_water * (1.0 + hu / 1000.0);
}

double gray_to_unit(double gray) { return std::clamp((gray + 1000.0) / 4000.0, 0.0, 1.0); }

// Phantoms ------------------------------------------------------------------

namespace {

std::vector<double> split_numbers(const std::string& text, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValueError(what + ": '" + item + "' is not a number");
    }
  }
  return out;
}

std::size_t as_index(double v, const std::string& what) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw ValueError(what + ": voxel index must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

// Uniform double in [0, 1) built from raw engine output, so phantoms do not
// depend on the standard library's distribution implementations.
class UnitRng {
 public:
  explicit UnitRng(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

void check_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValueError(what + ": value must lie in [0, 1]");
}

void paint_sphere(Grid3& g, const Sphere& s) {
  const Dims d = g.dims();
  const double r2 = s.radius * s.radius;
  const auto lo = [](double c, double r) {
    return static_cast<std::size_t>(std::max(0.0, std::floor(c - r - 0.5)));
  };
  const auto hi = [](double c, double r, std::size_t n) {
    return std::min(n, static_cast<std::size_t>(std::max(0.0, std::ceil(c + r + 0.5))));
  };
  for (std::size_t z = lo(s.center.z, s.radius); z < hi(s.center.z, s.radius, d.nz); ++z) {
    for (std::size_t y = lo(s.center.y, s.radius); y < hi(s.center.y, s.radius, d.ny); ++y) {
      for (std::size_t x = lo(s.center.x, s.radius); x < hi(s.center.x, s.radius, d.nx); ++x) {
        const double dx = static_cast<double>(x) + 0.5 - s.center.x;
        const double dy = static_cast<double>(y) + 0.5 - s.center.y;
        const double dz = static_cast<double>(z) + 0.5 - s.center.z;
        if (dx * dx + dy * dy + dz * dz <= r2) {
          double& v = g.at(z, y, x);
          v = std::max(v, s.value);
        }
      }
    }
  }
}

Grid3 sphere_set(const PhantomSpec& spec, Dims dims, std::uint64_t seed) {
  std::vector<Sphere> spheres = spec.spheres;
  if (spheres.empty()) {
    UnitRng rng(seed);
    const double m = static_cast<double>(std::min({dims.nz, dims.ny, dims.nx}));
    for (std::size_t i = 0; i < spec.random_spheres; ++i) {
      Sphere s;
      s.radius = rng.uniform(0.08, 0.16) * m;
      const auto place = [&](std::size_t n) {
        const double ext = static_cast<double>(n);
        const double margin = std::min(s.radius, 0.5 * ext);
        return rng.uniform(margin, ext - margin);
      };
      s.center.x = place(dims.nx);
      s.center.y = place(dims.ny);
      s.center.z = place(dims.nz);
      s.value = rng.uniform(0.3, 1.0);
      spheres.push_back(s);
    }
  }
  Grid3 g(dims, 0.0);
  for (const Sphere& s : spheres) {
    const bool inside = s.center.x >= 0.0 && s.center.x <= static_cast<double>(dims.nx) &&
                        s.center.y >= 0.0 && s.center.y <= static_cast<double>(dims.ny) &&
                        s.center.z >= 0.0 && s.center.z <= static_cast<double>(dims.nz);
    if (!inside) {
      std::ostringstream msg;
      msg << "sphere-set: sphere center (" << s.center.x << ", " << s.center.y << ", "
          << s.center.z << ") lies outside the volume " << to_string(dims);
      throw ValueError(msg.str());
    }
    if (!(s.radius > 0.0)) throw ValueError("sphere-set: sphere radius must be > 0");
    check_unit(s.value, "sphere-set");
    paint_sphere(g, s);
  }
  return g;
}

// Dental arch stand-in laid out for the default panoramic geometry: a soft
// ellipsoidal shell, a bony band along a parabolic arch, and cylindrical teeth
// standing on the arch with their axes along z.
Grid3 jaw_arch(Dims dims, std::uint64_t seed) {
  UnitRng rng(seed);
  Grid3 g(dims, 0.0);
  const double nx = static_cast<double>(dims.nx);
  const double ny = static_cast<double>(dims.ny);
  const double nz = static_cast<double>(dims.nz);

  const double cx = 0.5 * nx;
  const double apex_y = 0.74 * ny;
  const double half_span = 0.30 * nx;
  const double drop = 0.34 * ny;
  const double curvature = drop / (half_span * half_span);
  const auto arch_y = [&](double x) { return apex_y - curvature * (x - cx) * (x - cx); };

  const double shell_t = 0.04 * std::min(nx, ny);
  const double band_half = 0.05 * std::min(nx, ny);
  const double tooth_r0 = 0.025 * std::min(nx, ny);
  const double z_lo = 0.30 * nz, z_hi = 0.70 * nz;

  constexpr int kTeeth = 16;
  struct Tooth {
    double x, y, r, value;
  };
  std::vector<Tooth> teeth;
  for (int k = 0; k < kTeeth; ++k) {
    const double u = -1.0 + 2.0 * (static_cast<double>(k) + 0.5) / kTeeth;
    const double x = cx + u * half_span;
    teeth.push_back({x, arch_y(x), tooth_r0 * rng.uniform(0.85, 1.15), rng.uniform(0.8, 0.95)});
  }

  for (std::size_t z = 0; z < dims.nz; ++z) {
    const double pz = static_cast<double>(z) + 0.5;
    for (std::size_t y = 0; y < dims.ny; ++y) {
      const double py = static_cast<double>(y) + 0.5;
      for (std::size_t x = 0; x < dims.nx; ++x) {
        const double px = static_cast<double>(x) + 0.5;
        double v = 0.0;

        const double ex = (px - cx) / (0.46 * nx);
        const double ey = (py - 0.5 * ny) / (0.46 * ny);
        const double ez = (pz - 0.5 * nz) / (0.46 * nz);
        const double rr = std::sqrt(ex * ex + ey * ey + ez * ez);
        const double scale = 0.46 * std::min({nx, ny, nz});
        if (rr <= 1.0 && rr >= 1.0 - shell_t / scale) v = 0.35;
        else if (rr < 1.0) v = 0.08;

        if (std::abs(px - cx) <= half_span + tooth_r0 && pz >= z_lo - 0.1 * nz &&
            pz <= z_hi - 0.1 * nz && std::abs(py - arch_y(px)) <= band_half) {
          v = std::max(v, 0.5);
        }
        if (pz >= z_lo && pz <= z_hi) {
          for (const Tooth& t : teeth) {
            const double dx = px - t.x, dy = py - t.y;
            if (dx * dx + dy * dy <= t.r * t.r) v = std::max(v, t.value);
          }
        }
        g.at(z, y, x) = v;
      }
    }
  }
  return g;
}

}  // namespace

PhantomSpec PhantomSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  PhantomSpec spec;
  if (name == "uniform") {
    const auto v = split_numbers(args, ',', "uniform");
    if (v.size() != 1) throw ValueError("uniform: expected uniform:<value>");
    check_unit(v[0], "uniform");
    spec.kind = Kind::uniform;
    spec.value = v[0];
  } else if (name == "single-voxel") {
    const auto v = split_numbers(args, ',', "single-voxel");
    if (v.size() != 4) throw ValueError("single-voxel: expected single-voxel:<z>,<y>,<x>,<value>");
    spec.kind = Kind::single_voxel;
    spec.vz = as_index(v[0], "single-voxel");
    spec.vy = as_index(v[1], "single-voxel");
    spec.vx = as_index(v[2], "single-voxel");
    check_unit(v[3], "single-voxel");
    spec.value = v[3];
  } else if (name == "sphere-set") {
    spec.kind = Kind::sphere_set;
    if (args.empty()) {
      spec.random_spheres = 6;
    } else if (args.find(',') == std::string::npos) {
      const auto v = split_numbers(args, ',', "sphere-set");
      spec.random_spheres = as_index(v.at(0), "sphere-set count");
      if (spec.random_spheres == 0) throw ValueError("sphere-set: count must be >= 1");
    } else {
      std::string list = args;
      std::replace(list.begin(), list.end(), ';', '/');
      std::stringstream ss(list);
      for (std::string item; std::getline(ss, item, '/');) {
        const auto v = split_numbers(item, ',', "sphere-set");
        if (v.size() != 5) throw ValueError("sphere-set: each sphere is <x>,<y>,<z>,<r>,<v>");
        spec.spheres.push_back({{v[0], v[1], v[2]}, v[3], v[4]});
      }
    }
  } else if (name == "jaw-arch") {
    if (!args.empty()) throw ValueError("jaw-arch takes no parameters");
    spec.kind = Kind::jaw_arch;
  } else {
    throw ValueError("unknown phantom kind '" + name +
                     "' (expected uniform, single-voxel, sphere-set or jaw-arch)");
  }
  return spec;
}

DensityVolume make_phantom(const PhantomSpec& spec, Dims dims, std::uint64_t seed) {
  require_valid(dims);
  Grid3 g;
  switch (spec.kind) {
    case PhantomSpec::Kind::uniform:
      check_unit(spec.value, "uniform");
      g = Grid3(dims, spec.value);
      break;
    case PhantomSpec::Kind::single_voxel:
      if (spec.vz >= dims.nz || spec.vy >= dims.ny || spec.vx >= dims.nx) {
        throw ValueError("single-voxel: index lies outside the volume " + to_string(dims));
      }
      check_unit(spec.value, "single-voxel");
      g = Grid3(dims, 0.0);
      g.at(spec.vz, spec.vy, spec.vx) = spec.value;
      break;
    case PhantomSpec::Kind::sphere_set:
      g = sphere_set(spec, dims, seed);
      break;
    case PhantomSpec::Kind::jaw_arch:
      g = jaw_arch(dims, seed);
      break;
  }
  for (double& v : g.values()) v = to_f32(v);
  return DensityVolume(std::move(g));
}

DensityVolume make_phantom(const std::string& descriptor, Dims dims, std::uint64_t seed) {
  return make_phantom(PhantomSpec::parse(descriptor), dims, seed);
}

// Sampling -------------------------------------------------------------------

namespace {

struct AxisTap {
  std::size_t i0, i1;
  double w1;  // weight of i1; i0 gets 1 - w1
};

AxisTap axis_tap(double coord, std::size_t n) {
  const double u = coord - 0.5;
  const double f0 = std::floor(u);
  const double w1 = u - f0;
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  auto i0 = static_cast<std::ptrdiff_t>(f0);
  auto i1 = i0 + 1;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, last);
  i1 = std::clamp<std::ptrdiff_t>(i1, 0, last);
  return {static_cast<std::size_t>(i0), static_cast<std::size_t>(i1), w1};
}

bool inside_box(const Dims& d, Point3 p) {
  return p.x >= 0.0 && p.x <= static_cast<double>(d.nx) && p.y >= 0.0 &&
         p.y <= static_cast<double>(d.ny) && p.z >= 0.0 && p.z <= static_cast<double>(d.nz);
}

}  // namespace

double sample_trilinear(const DensityVolume& vol, Point3 p) {
  const Dims& d = vol.dims();
  if (!inside_box(d, p)) return 0.0;
  const AxisTap tx = axis_tap(p.x, d.nx);
  const AxisTap ty = axis_tap(p.y, d.ny);
  const AxisTap tz = axis_tap(p.z, d.nz);
  const auto lerp = [](double a, double b, double w) { return a + w * (b - a); };
  const auto row = [&](std::size_t z, std::size_t y) {
    return lerp(vol.at(z, y, tx.i0), vol.at(z, y, tx.i1), tx.w1);
  };
  const auto plane = [&](std::size_t z) { return lerp(row(z, ty.i0), row(z, ty.i1), ty.w1); };
  return lerp(plane(tz.i0), plane(tz.i1), tz.w1);
}

double sample_nearest(const DensityVolume& vol, Point3 p) {
  const Dims& d = vol.dims();
  if (!inside_box(d, p)) return 0.0;
  const auto idx = [](double c, std::size_t n) {
    return std::min(static_cast<std::size_t>(c), n - 1);
  };
  return vol.at(idx(p.z, d.nz), idx(p.y, d.ny), idx(p.x, d.nx));
}

// I/O ------------------------------------------------------------------------

void save_grid(const Grid3& grid, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  const Dims& d = grid.dims();
  out << "PVOL1 " << d.nz << ' ' << d.ny << ' ' << d.nx << '\n';
  detail::write_f32_le(out, grid.values());
  detail::finish_write(out, path);
}

Grid3 load_grid(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  const std::string what = "PVOL1 '" + path.string() + "'";
  const auto tokens = detail::read_header(in, what);
  if (tokens.size() != 4 || tokens[0] != "PVOL1") {
    throw FormatError(what + ": malformed header, expected 'PVOL1 <nz> <ny> <nx>'");
  }
  const Dims d{detail::parse_extent(tokens[1], what), detail::parse_extent(tokens[2], what),
               detail::parse_extent(tokens[3], what)};
  if (!d.valid()) throw DimsError(what + ": invalid dims " + to_string(d));
  return Grid3(d, detail::read_f32_le(in, d.count(), what));
}

void save_volume(const DensityVolume& vol, const std::filesystem::path& path) {
  save_grid(vol.grid(), path);
}

DensityVolume load_volume(const std::filesystem::path& path) {
  return DensityVolume(load_grid(path));
}

}  // namespace simpx
