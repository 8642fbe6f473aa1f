#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "simpx/ray_geometry.hpp"
#include "simpx/renderer.hpp"

namespace simpx {

/// Ray fan plus rendering parameters, as read from a geometry file.
struct ScanSetup {
  GeometryConfig geometry;
  RenderConfig render;
};

/// Geometry file: one "key = value" per line, '#' starts a comment.
/// Recognized keys:
///   coefficient vertex_distance x_min x_max step scale
///   offset_x offset_y initial_angle theta.<segment> angular_oversample
///   grid_nx grid_ny width height n_samples delta beta interpolation
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::filesystem::path& path);

/// Starts from the defaults for the axial grid (the file's grid_nx/grid_ny,
/// else `grid`, else 256 x 256; curve scale follows the grid unless `scale`
/// is given) and applies every key. Throws ValueError on unknown keys or bad
/// values.
ScanSetup make_scan_setup(const KeyValues& kv,
                          std::optional<std::pair<std::size_t, std::size_t>> grid = std::nullopt);

/// Writes every key, so the file round-trips through make_scan_setup.
std::string to_text(const ScanSetup& setup);

}  // namespace simpx
