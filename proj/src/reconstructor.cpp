#include "simpx/reconstructor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "simpx/backproject.hpp"
#include "simpx/error.hpp"
#include "simpx/parallel.hpp"

namespace simpx {

void ReconConfig::validate() const {
  if (!(lambda1 >= 0.0)) throw ValueError("recon: lambda1 must be >= 0");
  if (max_iters < 1) throw ValueError("recon: max_iters must be >= 1");
  if (!(step_size > 0.0)) throw ValueError("recon: step_size must be > 0");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw ValueError("recon: backtrack factor must lie in (0, 1)");
  }
  if (!(lower < upper)) throw ValueError("recon: clamp box is empty");
  if (!(tol >= 0.0)) throw ValueError("recon: tol must be >= 0");
}

TargetMips TargetMips::of(const DensityVolume& vol) {
  return {mip(vol, MipAxis::axial), mip(vol, MipAxis::sagittal), mip(vol, MipAxis::coronal)};
}

// Problem ---------------------------------------------------------------------

ReconProblem::ReconProblem(const RayFan& fan, const Dims& dims, const RenderConfig& render)
    : dims_(dims), render_(render), proj_(fan, dims.ny, dims.nx, render.interpolation) {
  check_render_shapes(dims, fan, render);
  if (render.height != dims.nz) {
    throw DimsError("image height " + std::to_string(render.height) + " must equal nz " +
                    std::to_string(dims.nz) + " for reconstruction");
  }
}

void ReconProblem::check(std::span<const double> est, const Image2& target,
                         const TargetMips* mips) const {
  if (est.size() != dims_.count()) throw DimsError("estimate size does not match problem dims");
  if (target.rows() != render_.height || target.cols() != proj_.rays()) {
    throw DimsError("target image is " + std::to_string(target.rows()) + "x" +
                    std::to_string(target.cols()) + ", expected " +
                    std::to_string(render_.height) + "x" + std::to_string(proj_.rays()));
  }
  if (mips != nullptr) {
    const auto expect = [](const Image2& m, std::size_t r, std::size_t c, const char* name) {
      if (m.rows() != r || m.cols() != c) {
        throw DimsError(std::string("target ") + name + " MIP has the wrong shape");
      }
    };
    expect(mips->axial, dims_.ny, dims_.nx, "axial");
    expect(mips->sagittal, dims_.nz, dims_.ny, "sagittal");
    expect(mips->coronal, dims_.nz, dims_.nx, "coronal");
  }
}

double ReconProblem::image_term(std::span<const double> est, const Image2& target,
                                std::span<double> grad) const {
  const std::size_t slice = dims_.slice_size();
  const double bd = render_.beta * render_.delta;
  std::vector<double> row_loss(render_.height, 0.0);
  parallel::for_each_index(render_.height, [&](std::size_t j) {
    const auto s = est.subspan(j * slice, slice);
    CompensatedSum acc;
    for (std::size_t i = 0; i < proj_.rays(); ++i) {
      const double depth = bd * proj_.line_sum(i, s);
      const double r = opacity_from_optical_depth(depth) - target.at(j, i);
      acc.add(r * r);
      if (!grad.empty() && r != 0.0) {
        proj_.scatter(i, 2.0 * r * std::exp(-depth) * bd, grad.subspan(j * slice, slice));
      }
    }
    row_loss[j] = acc.value();
  });
  CompensatedSum total;
  for (double v : row_loss) total.add(v);
  return total.value();
}

double ReconProblem::mip_term(std::span<const double> est, const TargetMips& mips, double lambda1,
                              std::span<double> grad) const {
  CompensatedSum total;
  const auto one = [&](MipAxis axis, const Image2& target) {
    const MipResult m = mip_with_argmax(est, dims_, axis);
    const auto v = m.image.values();
    const auto t = target.values();
    for (std::size_t p = 0; p < v.size(); ++p) {
      const double r = v[p] - t[p];
      total.add(r * r);
      if (!grad.empty()) grad[m.argmax[p]] += 2.0 * lambda1 * r;
    }
  };
  one(MipAxis::axial, mips.axial);
  one(MipAxis::sagittal, mips.sagittal);
  one(MipAxis::coronal, mips.coronal);
  return total.value();
}

LossTerms ReconProblem::loss(std::span<const double> est, const Image2& target,
                             const TargetMips* mips, double lambda1) const {
  check(est, target, mips);
  LossTerms out;
  out.mse_img = image_term(est, target, {});
  if (mips != nullptr) out.mse_mip = mip_term(est, *mips, lambda1, {});
  out.total = out.mse_img + lambda1 * out.mse_mip;
  return out;
}

LossTerms ReconProblem::loss_and_gradient(std::span<const double> est, const Image2& target,
                                          const TargetMips* mips, double lambda1,
                                          std::span<double> grad) const {
  check(est, target, mips);
  if (grad.size() != est.size()) throw DimsError("gradient buffer size mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  LossTerms out;
  out.mse_img = image_term(est, target, grad);
  if (mips != nullptr) out.mse_mip = mip_term(est, *mips, lambda1, grad);
  out.total = out.mse_img + lambda1 * out.mse_mip;
  return out;
}

namespace {

Dims recon_dims(const SimPXImage& target, const RayFan& fan) {
  return {target.height(), fan.grid_ny, fan.grid_nx};
}

RenderConfig fitted(const RenderConfig& render, const Dims& dims) {
  RenderConfig r = render;
  r.height = dims.nz;
  return r;
}

}  // namespace

LossTerms loss(const DensityVolume& est, const SimPXImage& target,
               const std::optional<TargetMips>& target_mips, const RayFan& fan,
               const RenderConfig& render, const ReconConfig& cfg) {
  const ReconProblem problem(fan, est.dims(), render);
  return problem.loss(est.values(), target.image(), target_mips ? &*target_mips : nullptr,
                      cfg.lambda1);
}

Grid3 gradient(const DensityVolume& est, const SimPXImage& target,
               const std::optional<TargetMips>& target_mips, const RayFan& fan,
               const RenderConfig& render, const ReconConfig& cfg) {
  const ReconProblem problem(fan, est.dims(), render);
  Grid3 g(est.dims(), 0.0);
  problem.loss_and_gradient(est.values(), target.image(), target_mips ? &*target_mips : nullptr,
                            cfg.lambda1, g.values());
  return g;
}

// Report ------------------------------------------------------------------------

std::string ReconReport::text() const {
  std::ostringstream ss;
  ss << std::setprecision(17);
  for (const auto& rec : history) {
    ss << rec.iter << ' ' << rec.loss.total << ' ' << rec.loss.mse_img << ' ' << rec.loss.mse_mip
       << ' ' << rec.step << '\n';
  }
  return ss.str();
}

// Solver ------------------------------------------------------------------------

Grid3 initial_estimate(const SimPXImage& target, const RayFan& fan, const RenderConfig& render,
                       InitKind init) {
  const Dims dims = recon_dims(target, fan);
  if (init == InitKind::zeros) return Grid3(dims, 0.0);
  const Image2 cand = pixel_candidates(target, fan, render.delta, render.beta);
  return aggregate_rho(fan, cand, dims, render.interpolation).rho;
}

ReconResult reconstruct(const SimPXImage& target, const RayFan& fan, const RenderConfig& render,
                        const ReconConfig& cfg, const std::optional<DensityVolume>& ground_truth,
                        const std::optional<TargetMips>& target_mips) {
  cfg.validate();
  const Dims dims = recon_dims(target, fan);
  const RenderConfig rcfg = fitted(render, dims);
  const ReconProblem problem(fan, dims, rcfg);
  const TargetMips* mips = target_mips ? &*target_mips : nullptr;
  const Image2& y = target.image();
  if (ground_truth && ground_truth->dims() != dims) {
    throw DimsError("ground truth dims " + to_string(ground_truth->dims()) +
                    " do not match reconstruction dims " + to_string(dims));
  }

  const auto finite_or_throw = [](const LossTerms& l, std::size_t iter) {
    if (!std::isfinite(l.total)) {
      std::ostringstream msg;
      msg << "non-finite loss at iteration " << iter << " (image term " << l.mse_img
          << ", MIP term " << l.mse_mip << ")";
      throw NumericError(msg.str());
    }
  };

  Grid3 x = initial_estimate(target, fan, rcfg, cfg.init);
  for (double& v : x.values()) v = std::clamp(v, cfg.lower, cfg.upper);
  const std::size_t n = x.size();
  std::vector<double> g(n), g_new(n), x_trial(n);

  ReconReport report;
  LossTerms cur = problem.loss_and_gradient(x.values(), y, mips, cfg.lambda1, g);
  finite_or_throw(cur, 0);
  report.history.push_back({0, cur, 0.0});

  double step = cfg.step_size;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    report.iterations_run = it;
    const auto xv = x.values();

    // Projected-gradient stationarity: nothing moves under a unit step.
    bool stationary = cur.total == 0.0;
    if (!stationary) {
      stationary = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::clamp(xv[i] - g[i], cfg.lower, cfg.upper) != xv[i]) {
          stationary = false;
          break;
        }
      }
    }
    if (stationary) {
      report.history.push_back({it, cur, 0.0});
      report.stop_reason = "stationary";
      break;
    }

    bool accepted = false;
    LossTerms trial;
    double alpha = step;
    for (std::size_t h = 0; h <= cfg.max_halvings; ++h, alpha *= cfg.backtrack_factor) {
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        x_trial[i] = std::clamp(xv[i] - alpha * g[i], cfg.lower, cfg.upper);
        decrease += g[i] * (x_trial[i] - xv[i]);
      }
      trial = problem.loss(x_trial, y, mips, cfg.lambda1);
      if (std::isfinite(trial.total) && trial.total <= cur.total + cfg.armijo * decrease &&
          trial.total < cur.total) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      finite_or_throw(trial, it);
      report.history.push_back({it, cur, 0.0});
      report.stop_reason = "line search found no decrease";
      break;
    }

    const LossTerms next = problem.loss_and_gradient(x_trial, y, mips, cfg.lambda1, g_new);
    finite_or_throw(next, it);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = x_trial[i] - xv[i];
      ss += s * s;
      sy += s * (g_new[i] - g[i]);
    }
    std::copy(x_trial.begin(), x_trial.end(), xv.begin());
    g.swap(g_new);
    const double rel = (cur.total - next.total) / cur.total;
    cur = next;
    report.history.push_back({it, cur, alpha});

    if (cfg.spectral_step && sy > 0.0) {
      step = std::clamp(ss / sy, 1e-12, 1e12);
    } else {
      step = std::min(alpha / cfg.backtrack_factor, 1e12);
    }
    if (cur.total == 0.0 || rel < cfg.tol) {
      report.stop_reason = cur.total == 0.0 ? "zero loss" : "relative decrease below tol";
      break;
    }
    if (it == cfg.max_iters) report.stop_reason = "max iterations";
  }

  DensityVolume vol(std::move(x));
  if (ground_truth) {
    report.final_metrics = metrics::evaluate(vol.grid(), ground_truth->grid());
    const Grid3 counts = crossing_counts(fan, dims, rcfg.interpolation);
    report.psnr_covered = metrics::psnr_masked(vol.grid(), ground_truth->grid(), counts);
  }
  return {std::move(vol), std::move(report)};
}

}  // namespace simpx
