#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace simpx {

/// Voxel counts, slowest axis first. Storage is z-major, then y, then x.
struct Dims {
  std::size_t nz = 0;
  std::size_t ny = 0;
  std::size_t nx = 0;

  [[nodiscard]] std::size_t count() const { return nz * ny * nx; }
  [[nodiscard]] std::size_t slice_size() const { return ny * nx; }
  [[nodiscard]] bool valid() const { return nz >= 1 && ny >= 1 && nx >= 1; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& d);

/// Throws ValueError unless every component is >= 1.
void require_valid(const Dims& d);

/// Continuous position in voxel units. Voxel (z, y, x) occupies
/// [x, x+1) x [y, y+1) x [z, z+1); its center is at +0.5 on each axis.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Unconstrained scalar field on a voxel grid. Used for gradients, counts and
/// intermediate densities, which do not obey the [0, 1] density range.
class Grid3 {
 public:
  Grid3() = default;
  explicit Grid3(Dims dims, double fill = 0.0);
  Grid3(Dims dims, std::vector<double> data);

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  [[nodiscard]] std::size_t index(std::size_t z, std::size_t y, std::size_t x) const {
    return (z * dims_.ny + y) * dims_.nx + x;
  }
  [[nodiscard]] double at(std::size_t z, std::size_t y, std::size_t x) const {
    return data_[index(z, y, x)];
  }
  double& at(std::size_t z, std::size_t y, std::size_t x) { return data_[index(z, y, x)]; }

  [[nodiscard]] std::span<const double> values() const& { return data_; }
  std::span<double> values() & { return data_; }
  void values() && = delete;  // span would dangle
  [[nodiscard]] double sum() const;

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  Dims dims_{};
  std::vector<double> data_;
};

/// Normalized density field: every value lies in [0, 1]. Immutable once built.
class DensityVolume {
 public:
  DensityVolume() = default;
  /// Throws ValueError on invalid dims or out-of-range / non-finite values.
  explicit DensityVolume(Grid3 grid);
  DensityVolume(Dims dims, std::vector<double> data);
  static DensityVolume filled(Dims dims, double value);

  [[nodiscard]] const Dims& dims() const { return grid_.dims(); }
  [[nodiscard]] const Grid3& grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const& { return grid_.values(); }
  void values() && = delete;
  [[nodiscard]] double at(std::size_t z, std::size_t y, std::size_t x) const {
    return grid_.at(z, y, x);
  }

  friend bool operator==(const DensityVolume&, const DensityVolume&) = default;

 private:
  Grid3 grid_;
};

/// Affine map between CBCT gray values / Hounsfield units and linear
/// attenuation. Source intensity and the constant path term are normalized
/// away (their product is fixed to 1), leaving beta = a / c as the only
/// rendering scale.
struct AttenuationModel {
  double mu_water = 0.2;  // 1/cm near 70 keV
  double a = 1.0;
  double b = 0.0;
  double c = 50.0;

  [[nodiscard]] double beta() const { return a / c; }
  /// mu = a * sigma + b
  [[nodiscard]] double mu_from_density(double sigma) const { return a * sigma + b; }
  void validate() const;
};

/// mu = mu_water * (1 + HU / 1000).
double hu_to_mu(double hu, const AttenuationModel& model);

/// Linear map of a CBCT gray value in [-1000, 3000] onto [0, 1], clamped.
/// A convenience; not a calibrated conversion.
double gray_to_unit(double gray);

// Phantoms ------------------------------------------------------------------

struct Sphere {
  Point3 center;  // voxel units
  double radius = 0.0;
  double value = 1.0;
};

/// Parsed phantom descriptor. Textual forms:
///   uniform:<c>
///   single-voxel:<z>,<y>,<x>,<value>
///   sphere-set            six random spheres drawn from the seed
///   sphere-set:<n>        n random spheres
///   sphere-set:<x>,<y>,<z>,<r>,<v>[/<x>,<y>,<z>,<r>,<v>...]
///   jaw-arch
struct PhantomSpec {
  enum class Kind { uniform, single_voxel, sphere_set, jaw_arch };
  Kind kind = Kind::uniform;
  double value = 0.0;
  std::size_t vz = 0, vy = 0, vx = 0;
  std::size_t random_spheres = 0;
  std::vector<Sphere> spheres;

  static PhantomSpec parse(const std::string& text);
};

/// Deterministic in (spec, dims, seed). Values are rounded to float32 so a
/// PVOL1 round trip reproduces them bit for bit.
DensityVolume make_phantom(const PhantomSpec& spec, Dims dims, std::uint64_t seed);
DensityVolume make_phantom(const std::string& descriptor, Dims dims, std::uint64_t seed);

// Sampling -------------------------------------------------------------------

enum class Interpolation { trilinear, nearest };

/// Trilinear interpolation between voxel centers. Points outside the bounding
/// box [0, nx] x [0, ny] x [0, nz] read as 0; inside it, neighbor indices are
/// clamped to the grid so boundary half-voxels take the edge value.
double sample_trilinear(const DensityVolume& vol, Point3 p);
/// Value of the voxel containing p; 0 outside the bounding box.
double sample_nearest(const DensityVolume& vol, Point3 p);

// I/O ------------------------------------------------------------------------

/// "PVOL1 <nz> <ny> <nx>\n" followed by nz*ny*nx little-endian float32.
void save_grid(const Grid3& grid, const std::filesystem::path& path);
Grid3 load_grid(const std::filesystem::path& path);
void save_volume(const DensityVolume& vol, const std::filesystem::path& path);
/// Also enforces the density range.
DensityVolume load_volume(const std::filesystem::path& path);

}  // namespace simpx
