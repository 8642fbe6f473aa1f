#include "simpx/geometry_config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "simpx/error.hpp"

namespace simpx {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ValueError("geometry key '" + key + "': '" + v + "' is not a number");
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ValueError("geometry key '" + key + "': '" + v + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(std::stoull(v));
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("geometry line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw FormatError("geometry line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw FormatError("geometry line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

ScanSetup make_scan_setup(const KeyValues& kv,
                          std::optional<std::pair<std::size_t, std::size_t>> grid) {
  std::size_t nx = grid ? grid->first : 256;
  std::size_t ny = grid ? grid->second : 256;
  if (auto it = kv.find("grid_nx"); it != kv.end()) nx = to_count(it->first, it->second);
  if (auto it = kv.find("grid_ny"); it != kv.end()) ny = to_count(it->first, it->second);
  if (nx < 1 || ny < 1) throw ValueError("geometry: grid extents must be >= 1");

  ScanSetup s;
  s.geometry = GeometryConfig::for_grid(nx, ny);
  GeometryConfig& g = s.geometry;
  RenderConfig& r = s.render;
  bool has_ox = false, has_oy = false;
  for (const auto& [key, value] : kv) {
    if (key == "grid_nx" || key == "grid_ny") continue;
    if (key == "coefficient") g.curve.coefficient = to_double(key, value);
    else if (key == "vertex_distance") g.curve.vertex_distance = to_double(key, value);
    else if (key == "x_min") g.curve.x_min = to_double(key, value);
    else if (key == "x_max") g.curve.x_max = to_double(key, value);
    else if (key == "step") g.curve.step = to_double(key, value);
    else if (key == "scale") g.curve.scale = to_double(key, value);
    else if (key == "offset_x") { g.curve.offset.x = to_double(key, value); has_ox = true; }
    else if (key == "offset_y") { g.curve.offset.y = to_double(key, value); has_oy = true; }
    else if (key == "initial_angle") g.initial_angle_deg = to_double(key, value);
    else if (key == "angular_oversample") g.angular_oversample = to_double(key, value);
    else if (key.rfind("theta.", 0) == 0) g.theta_overrides[to_count(key, key.substr(6))] = to_double(key, value);
    else if (key == "width") g.width = r.width = to_count(key, value);
    else if (key == "height") r.height = to_count(key, value);
    else if (key == "n_samples") g.n_samples = r.n_samples = to_count(key, value);
    else if (key == "delta") g.delta = r.delta = to_double(key, value);
    else if (key == "beta") r.beta = to_double(key, value);
    else if (key == "interpolation") {
      if (value == "trilinear") r.interpolation = Interpolation::trilinear;
      else if (value == "nearest") r.interpolation = Interpolation::nearest;
      else throw ValueError("geometry key 'interpolation': expected trilinear or nearest");
    } else {
      throw ValueError("geometry: unknown key '" + key + "'");
    }
  }
  if (has_ox != has_oy) throw ValueError("geometry: offset_x and offset_y must be given together");
  g.auto_offset = !has_ox;
  return s;
}

std::string to_text(const ScanSetup& s) {
  const GeometryConfig& g = s.geometry;
  const RenderConfig& r = s.render;
  std::ostringstream o;
  o << std::setprecision(17);
  o << "grid_nx = " << g.grid_nx << "\ngrid_ny = " << g.grid_ny << '\n';
  o << "coefficient = " << g.curve.coefficient << "\nvertex_distance = " << g.curve.vertex_distance
    << "\nx_min = " << g.curve.x_min << "\nx_max = " << g.curve.x_max << "\nstep = " << g.curve.step
    << "\nscale = " << g.curve.scale << '\n';
  if (!g.auto_offset) {
    o << "offset_x = " << g.curve.offset.x << "\noffset_y = " << g.curve.offset.y << '\n';
  }
  if (g.initial_angle_deg) o << "initial_angle = " << *g.initial_angle_deg << '\n';
  for (const auto& [i, t] : g.theta_overrides) o << "theta." << i << " = " << t << '\n';
  o << "angular_oversample = " << g.angular_oversample << '\n';
  o << "width = " << g.width << "\nheight = " << r.height << "\nn_samples = " << g.n_samples
    << "\ndelta = " << g.delta << "\nbeta = " << r.beta << "\ninterpolation = "
    << (r.interpolation == Interpolation::nearest ? "nearest" : "trilinear") << '\n';
  return o.str();
}

}  // namespace simpx
