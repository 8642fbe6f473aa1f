#pragma once

#include <span>
#include <string>

#include "simpx/volume.hpp"

namespace simpx::metrics {

inline constexpr double kPsnrCap = 99.0;
inline constexpr double kDiceThreshold = 0.2;
inline constexpr std::size_t kSsimWindow = 7;

struct MetricsReport {
  double psnr = 0.0;  // dB
  double ssim = 0.0;  // percent
  double dice = 0.0;  // percent
  double mse = 0.0;
  double threshold = kDiceThreshold;

  /// "psnr=<v> ssim=<v> dice=<v> mse=<v> threshold=<v>"
  [[nodiscard]] std::string line() const;
  /// One key=value pair per line.
  [[nodiscard]] std::string key_values() const;
};

/// Mean of squared voxel differences.
double volume_mse(const Grid3& a, const Grid3& b);
/// 10 log10(peak^2 / mse); kPsnrCap when the volumes are identical.
double psnr(const Grid3& a, const Grid3& b, double peak = 1.0);
/// PSNR restricted to voxels where mask > 0.
double psnr_masked(const Grid3& a, const Grid3& b, const Grid3& mask, double peak = 1.0);
/// Dice overlap of {v > threshold} sets, in percent; 100 when both are empty.
double dice(const Grid3& a, const Grid3& b, double threshold = kDiceThreshold);
/// Mean SSIM over axial slices with a 7x7 uniform window (valid positions
/// only, sample covariance), k1 = 0.01, k2 = 0.03, in percent.
double ssim(const Grid3& a, const Grid3& b, double dynamic_range = 1.0);

/// All four metrics; ssim is NaN when slices are smaller than the window.
MetricsReport evaluate(const Grid3& a, const Grid3& b, double threshold = kDiceThreshold);

inline double volume_mse(const DensityVolume& a, const DensityVolume& b) {
  return volume_mse(a.grid(), b.grid());
}
inline double psnr(const DensityVolume& a, const DensityVolume& b, double peak = 1.0) {
  return psnr(a.grid(), b.grid(), peak);
}
inline double dice(const DensityVolume& a, const DensityVolume& b,
                   double threshold = kDiceThreshold) {
  return dice(a.grid(), b.grid(), threshold);
}
inline double ssim(const DensityVolume& a, const DensityVolume& b) { return ssim(a.grid(), b.grid()); }

}  // namespace simpx::metrics
