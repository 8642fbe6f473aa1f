#include "simpx/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "simpx/backproject.hpp"
#include "simpx/error.hpp"
#include "simpx/geometry_config.hpp"
#include "simpx/image_io.hpp"
#include "simpx/metrics.hpp"
#include "simpx/parallel.hpp"
#include "simpx/ray_geometry.hpp"
#include "simpx/reconstructor.hpp"
#include "simpx/renderer.hpp"
#include "simpx/volume.hpp"

namespace simpx::cli {

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool deterministic = false;
};

Dims parse_dims(const std::string& text) {
  std::vector<std::size_t> v;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw ValueError("--dims expects nz,ny,nx with non-negative integers, got '" + text + "'");
    }
    v.push_back(static_cast<std::size_t>(std::stoull(item)));
  }
  if (v.size() != 3) throw ValueError("--dims expects nz,ny,nx, got '" + text + "'");
  const Dims d{v[0], v[1], v[2]};
  require_valid(d);
  return d;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

ScanSetup setup_from(const std::string& geometry_path,
                     std::optional<std::pair<std::size_t, std::size_t>> grid, KeyValues* kv_out) {
  KeyValues kv;
  if (!geometry_path.empty()) kv = load_key_values(geometry_path);
  if (kv_out != nullptr) *kv_out = kv;
  return make_scan_setup(kv, grid);
}

std::string raymap_text(const RayFan& fan, const ScanSetup& s) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "RAYFAN1 " << fan.width() << ' ' << s.geometry.n_samples << ' ' << s.geometry.delta << '\n';
  for (std::size_t i = 0; i < fan.rays.size(); ++i) {
    const Ray& r = fan.rays[i];
    o << i << ' ' << r.origin.x << ' ' << r.origin.y << ' ' << r.direction.x << ' '
      << r.direction.y << ' ' << r.in_bounds_count << '\n';
  }
  return o.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Panoramic X-ray simulation and reconstruction toolkit", "simpx"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--seed", globals.seed, "Random seed for phantoms");
  app.add_option("--threads", globals.threads, "Worker threads (0 = all cores)");
  app.add_flag("--deterministic", globals.deterministic,
               "Thread-count independent reductions (always on; accepted for scripts)");

  // phantom
  std::string ph_kind, ph_dims, ph_out;
  auto* phantom = app.add_subcommand("phantom", "Generate a synthetic density volume");
  phantom->add_option("--kind", ph_kind, "uniform:<c> | single-voxel:z,y,x,v | sphere-set[:...] | jaw-arch")->required();
  phantom->add_option("--dims", ph_dims, "nz,ny,nx")->required();
  phantom->add_option("--out", ph_out, "Output PVOL1 file")->required();

  // render
  std::string r_vol, r_out, r_geom;
  std::optional<double> r_beta, r_delta;
  std::optional<std::size_t> r_samples, r_width, r_height;
  auto* render = app.add_subcommand("render", "Render a SimPX image from a volume");
  render->add_option("--vol", r_vol, "Input PVOL1 volume")->required();
  render->add_option("--out", r_out, "Output PIMG1 image")->required();
  render->add_option("--beta", r_beta, "Attenuation scale");
  render->add_option("--delta", r_delta, "Sample spacing (voxels)");
  render->add_option("--samples", r_samples, "Samples per ray");
  render->add_option("--width", r_width, "Image width (rays)");
  render->add_option("--height", r_height, "Image height (axial slices)");
  render->add_option("--geometry", r_geom, "Geometry key=value file");

  // raymap
  std::string rm_geom, rm_out;
  auto* raymap = app.add_subcommand("raymap", "Export the ray fan as text");
  raymap->add_option("--geometry", rm_geom, "Geometry key=value file");
  raymap->add_option("--out", rm_out, "Output text file")->required();

  // backproject
  std::string bp_img, bp_geom, bp_counts, bp_rho;
  auto* backproject = app.add_subcommand("backproject", "Crossing counts and intermediate density");
  backproject->add_option("--img", bp_img, "Input PIMG1 SimPX image")->required();
  backproject->add_option("--geometry", bp_geom, "Geometry key=value file");
  backproject->add_option("--out-counts", bp_counts, "Output PVOL1 counts")->required();
  backproject->add_option("--out-rho", bp_rho, "Output PVOL1 intermediate density")->required();

  // reconstruct
  std::string rc_img, rc_geom, rc_init = "rho", rc_out, rc_report, rc_truth;
  ReconConfig rc_cfg;
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Recover a volume from a SimPX image");
  reconstruct_cmd->add_option("--img", rc_img, "Input PIMG1 SimPX image")->required();
  reconstruct_cmd->add_option("--geometry", rc_geom, "Geometry key=value file");
  reconstruct_cmd->add_option("--iters", rc_cfg.max_iters, "Maximum iterations");
  reconstruct_cmd->add_option("--step", rc_cfg.step_size, "Initial step size");
  reconstruct_cmd->add_option("--lambda1", rc_cfg.lambda1, "MIP loss weight");
  reconstruct_cmd->add_option("--init", rc_init, "zeros | rho")->check(CLI::IsMember({"zeros", "rho"}));
  reconstruct_cmd->add_option("--out", rc_out, "Output PVOL1 volume")->required();
  reconstruct_cmd->add_option("--report", rc_report, "Output loss history")->required();
  reconstruct_cmd->add_option("--truth", rc_truth, "Ground-truth PVOL1 volume for metrics");

  // metrics
  std::string m_a, m_b, m_out;
  double m_threshold = metrics::kDiceThreshold;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compare two volumes");
  metrics_cmd->add_option("--a", m_a, "First PVOL1 volume")->required();
  metrics_cmd->add_option("--b", m_b, "Second PVOL1 volume")->required();
  metrics_cmd->add_option("--threshold", m_threshold, "Dice binarization threshold");
  metrics_cmd->add_option("--out", m_out, "Also write key=value metrics here");

  // export
  std::string e_img, e_vol, e_format, e_out;
  auto* export_cmd = app.add_subcommand("export", "Convert an image (or a volume's axial MIP)");
  auto* e_img_opt = export_cmd->add_option("--img", e_img, "Input PIMG1 image");
  auto* e_vol_opt = export_cmd->add_option("--vol", e_vol, "Input PVOL1 volume (axial MIP is exported)");
  e_img_opt->excludes(e_vol_opt);
  export_cmd->add_option("--format", e_format, "pgm | float")->required()->check(CLI::IsMember({"pgm", "float"}));
  export_cmd->add_option("--out", e_out, "Output file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << '\n';
    return kUsage;
  }

  try {
    parallel::set_threads(globals.threads);

    if (*phantom) {
      save_volume(make_phantom(ph_kind, parse_dims(ph_dims), globals.seed), ph_out);
    } else if (*render) {
      const DensityVolume vol = load_volume(r_vol);
      KeyValues kv;
      ScanSetup s = setup_from(r_geom, std::make_pair(vol.dims().nx, vol.dims().ny), &kv);
      if (r_beta) s.render.beta = *r_beta;
      if (r_delta) s.render.delta = s.geometry.delta = *r_delta;
      if (r_samples) s.render.n_samples = s.geometry.n_samples = *r_samples;
      if (r_width) s.render.width = s.geometry.width = *r_width;
      if (r_height) s.render.height = *r_height;
      else if (!kv.contains("height")) s.render.height = vol.dims().nz;
      const RayFan fan = build_fan(s.geometry);
      save_image(render_simpx(vol, fan, s.render).image(), r_out);
    } else if (*raymap) {
      const ScanSetup s = setup_from(rm_geom, std::nullopt, nullptr);
      write_text(rm_out, raymap_text(build_fan(s.geometry), s));
    } else if (*backproject) {
      const SimPXImage img = load_simpx(bp_img);
      const ScanSetup s = setup_from(bp_geom, std::nullopt, nullptr);
      const RayFan fan = build_fan(s.geometry);
      const Dims dims{img.height(), s.geometry.grid_ny, s.geometry.grid_nx};
      const Image2 cand = pixel_candidates(img, fan, s.render.delta, s.render.beta);
      const BackProjectionMap map = aggregate_rho(fan, cand, dims, s.render.interpolation);
      save_grid(map.counts, bp_counts);
      save_grid(map.rho, bp_rho);
    } else if (*reconstruct_cmd) {
      const SimPXImage img = load_simpx(rc_img);
      ScanSetup s = setup_from(rc_geom, std::nullopt, nullptr);
      s.render.height = img.height();
      rc_cfg.init = rc_init == "zeros" ? InitKind::zeros : InitKind::rho_backprojection;
      std::optional<DensityVolume> truth;
      if (!rc_truth.empty()) truth = load_volume(rc_truth);
      const RayFan fan = build_fan(s.geometry);
      const ReconResult res = reconstruct(img, fan, s.render, rc_cfg, truth);
      save_volume(res.volume, rc_out);
      write_text(rc_report, res.report.text());
      out << "iterations=" << res.report.iterations_run << " stop=\"" << res.report.stop_reason
          << "\"\n";
      if (res.report.final_metrics) out << res.report.final_metrics->line() << '\n';
      if (res.report.psnr_covered) out << "psnr_covered=" << *res.report.psnr_covered << '\n';
    } else if (*metrics_cmd) {
      const DensityVolume a = load_volume(m_a);
      const DensityVolume b = load_volume(m_b);
      if (a.dims() != b.dims()) {
        throw DimsError("volumes differ in shape: " + to_string(a.dims()) + " vs " +
                        to_string(b.dims()));
      }
      const metrics::MetricsReport rep = metrics::evaluate(a.grid(), b.grid(), m_threshold);
      out << rep.line() << '\n';
      if (!m_out.empty()) write_text(m_out, rep.key_values());
    } else if (*export_cmd) {
      Image2 img;
      if (!e_img.empty()) img = load_image(e_img);
      else if (!e_vol.empty()) img = mip(load_volume(e_vol), MipAxis::axial);
      else throw ValueError("export needs --img or --vol");
      if (e_format == "pgm") save_pgm16(img, e_out);
      else save_image(img, e_out);
    }
  } catch (const IoError& e) {
    err << "error[io]: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    err << "error[format]: " << e.what() << '\n';
    return kFormat;
  } catch (const DimsError& e) {
    err << "error[dims]: " << e.what() << '\n';
    return kDims;
  } catch (const ValueError& e) {
    err << "error[value]: " << e.what() << '\n';
    return kValue;
  } catch (const NumericError& e) {
    err << "error[numeric]: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace simpx::cli
