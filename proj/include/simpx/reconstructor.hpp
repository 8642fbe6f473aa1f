#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simpx/metrics.hpp"
#include "simpx/ray_geometry.hpp"
#include "simpx/renderer.hpp"
#include "simpx/volume.hpp"

namespace simpx {

enum class InitKind { zeros, rho_backprojection };

struct ReconConfig {
  double lambda1 = 10.0;  // weight of the MIP term
  std::size_t max_iters = 200;
  double step_size = 1.0;  // first trial step
  double backtrack_factor = 0.5;
  std::size_t max_halvings = 40;
  bool spectral_step = true;  // Barzilai-Borwein trial step after the first iteration
  double armijo = 1e-4;
  InitKind init = InitKind::rho_backprojection;
  double tol = 1e-10;  // stop when the relative loss decrease falls below this
  double lower = 0.0;
  double upper = 1.0;

  void validate() const;
};

/// Maximum intensity projections a reconstruction is compared against.
struct TargetMips {
  Image2 axial;
  Image2 sagittal;
  Image2 coronal;

  static TargetMips of(const DensityVolume& vol);
};

struct LossTerms {
  double total = 0.0;
  double mse_img = 0.0;  // sum over pixels of (render(est) - target)^2
  double mse_mip = 0.0;  // sum over the three MIPs of (mip(est) - target)^2
};

/// Forward model and its adjoint for a fixed fan and volume shape. The volume
/// has one axial slice per image row.
class ReconProblem {
 public:
  ReconProblem(const RayFan& fan, const Dims& dims, const RenderConfig& render);

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] const SliceProjector& projector() const { return proj_; }
  [[nodiscard]] const RenderConfig& render_config() const { return render_; }

  [[nodiscard]] LossTerms loss(std::span<const double> est, const Image2& target,
                               const TargetMips* mips, double lambda1) const;
  /// Writes d(total)/d(est) into grad (overwritten) and returns the loss.
  LossTerms loss_and_gradient(std::span<const double> est, const Image2& target,
                              const TargetMips* mips, double lambda1,
                              std::span<double> grad) const;

 private:
  void check(std::span<const double> est, const Image2& target, const TargetMips* mips) const;
  double image_term(std::span<const double> est, const Image2& target,
                    std::span<double> grad) const;
  double mip_term(std::span<const double> est, const TargetMips& mips, double lambda1,
                  std::span<double> grad) const;

  Dims dims_;
  RenderConfig render_;
  SliceProjector proj_;
};

/// total = image term + lambda1 * MIP term (MIP term 0 without targets).
LossTerms loss(const DensityVolume& est, const SimPXImage& target,
               const std::optional<TargetMips>& target_mips, const RayFan& fan,
               const RenderConfig& render, const ReconConfig& cfg);

/// Analytic gradient of `loss`. Pixel p with transmittance T and residual r
/// contributes 2 r T beta delta to each sample it reads, spread through the
/// interpolation weights; MIP residuals go to the argmax voxel.
Grid3 gradient(const DensityVolume& est, const SimPXImage& target,
               const std::optional<TargetMips>& target_mips, const RayFan& fan,
               const RenderConfig& render, const ReconConfig& cfg);

struct IterationRecord {
  std::size_t iter = 0;
  LossTerms loss;
  double step = 0.0;
};

struct ReconReport {
  std::vector<IterationRecord> history;  // entry 0 is the initial point
  std::size_t iterations_run = 0;
  std::string stop_reason;
  std::optional<metrics::MetricsReport> final_metrics;
  std::optional<double> psnr_covered;  // PSNR over voxels some ray touches

  /// "iter total mse_img mse_mip step", one line per entry.
  [[nodiscard]] std::string text() const;
};

struct ReconResult {
  DensityVolume volume;
  ReconReport report;
};

/// Initial estimate for `init`: zeros, or the clamped mean of per-pixel
/// uniform-ray candidates over each voxel's crossing pixels.
Grid3 initial_estimate(const SimPXImage& target, const RayFan& fan, const RenderConfig& render,
                       InitKind init);

/// Projected gradient descent on [lower, upper] with Armijo backtracking.
/// Throws NumericError on a non-finite loss.
ReconResult reconstruct(const SimPXImage& target, const RayFan& fan, const RenderConfig& render,
                        const ReconConfig& cfg,
                        const std::optional<DensityVolume>& ground_truth = std::nullopt,
                        const std::optional<TargetMips>& target_mips = std::nullopt);

}  // namespace simpx
