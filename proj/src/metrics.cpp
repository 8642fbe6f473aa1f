#include "simpx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "simpx/error.hpp"

namespace simpx::metrics {

namespace {

void same_dims(const Grid3& a, const Grid3& b, const char* what) {
  if (a.dims() != b.dims()) {
    throw DimsError(std::string(what) + ": dims " + to_string(a.dims()) + " vs " +
                    to_string(b.dims()));
  }
}

double psnr_from_mse(double mse, double peak) {
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

}  // namespace

std::string MetricsReport::line() const {
  return "psnr=" + fmt(psnr) + " ssim=" + fmt(ssim) + " dice=" + fmt(dice) + " mse=" + fmt(mse) +
         " threshold=" + fmt(threshold);
}

std::string MetricsReport::key_values() const {
  return "psnr=" + fmt(psnr) + "\nssim=" + fmt(ssim) + "\ndice=" + fmt(dice) + "\nmse=" + fmt(mse) +
         "\nthreshold=" + fmt(threshold) + "\n";
}

double volume_mse(const Grid3& a, const Grid3& b) {
  same_dims(a, b, "mse");
  const auto va = a.values(), vb = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = va[i] - vb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(va.size());
}

double psnr(const Grid3& a, const Grid3& b, double peak) {
  same_dims(a, b, "psnr");
  return psnr_from_mse(volume_mse(a, b), peak);
}

double psnr_masked(const Grid3& a, const Grid3& b, const Grid3& mask, double peak) {
  same_dims(a, b, "psnr");
  same_dims(a, mask, "psnr mask");
  const auto va = a.values(), vb = b.values(), vm = mask.values();
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (vm[i] > 0.0) {
      const double d = va[i] - vb[i];
      acc += d * d;
      ++n;
    }
  }
  if (n == 0) throw ValueError("psnr: mask selects no voxels");
  return psnr_from_mse(acc / static_cast<double>(n), peak);
}

double dice(const Grid3& a, const Grid3& b, double threshold) {
  same_dims(a, b, "dice");
  const auto va = a.values(), vb = b.values();
  std::size_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const bool ia = va[i] > threshold;
    const bool ib = vb[i] > threshold;
    na += ia;
    nb += ib;
    both += ia && ib;
  }
  if (na + nb == 0) return 100.0;
  return 200.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

double ssim(const Grid3& a, const Grid3& b, double dynamic_range) {
  same_dims(a, b, "ssim");
  const Dims d = a.dims();
  const std::size_t w = kSsimWindow;
  if (d.ny < w || d.nx < w) {
    throw DimsError("ssim: axial slices " + std::to_string(d.ny) + "x" + std::to_string(d.nx) +
                    " are smaller than the 7x7 window");
  }
  const double c1 = std::pow(0.01 * dynamic_range, 2);
  const double c2 = std::pow(0.03 * dynamic_range, 2);
  const double n = static_cast<double>(w * w);
  const double cov_norm = n / (n - 1.0);

  double total = 0.0;
  for (std::size_t z = 0; z < d.nz; ++z) {
    double slice_sum = 0.0;
    std::size_t windows = 0;
    for (std::size_t y0 = 0; y0 + w <= d.ny; ++y0) {
      for (std::size_t x0 = 0; x0 + w <= d.nx; ++x0) {
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (std::size_t y = y0; y < y0 + w; ++y) {
          for (std::size_t x = x0; x < x0 + w; ++x) {
            const double pa = a.at(z, y, x), pb = b.at(z, y, x);
            sa += pa;
            sb += pb;
            saa += pa * pa;
            sbb += pb * pb;
            sab += pa * pb;
          }
        }
        const double ma = sa / n, mb = sb / n;
        const double va = cov_norm * (saa / n - ma * ma);
        const double vb = cov_norm * (sbb / n - mb * mb);
        const double vab = cov_norm * (sab / n - ma * mb);
        slice_sum += ((2 * ma * mb + c1) * (2 * vab + c2)) /
                     ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++windows;
      }
    }
    total += slice_sum / static_cast<double>(windows);
  }
  return 100.0 * total / static_cast<double>(d.nz);
}

MetricsReport evaluate(const Grid3& a, const Grid3& b, double threshold) {
  MetricsReport r;
  r.mse = volume_mse(a, b);
  r.psnr = psnr_from_mse(r.mse, 1.0);
  const Dims d = a.dims();
  r.ssim = d.ny >= kSsimWindow && d.nx >= kSsimWindow ? ssim(a, b)
                                                      : std::numeric_limits<double>::quiet_NaN();
  r.dice = dice(a, b, threshold);
  r.threshold = threshold;
  return r;
}

}  // namespace simpx::metrics
