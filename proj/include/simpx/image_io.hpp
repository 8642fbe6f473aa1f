#pragma once

#include <filesystem>

#include "simpx/renderer.hpp"

namespace simpx {

/// "PIMG1 <h> <w>\n" followed by h*w little-endian float32, row-major.
void save_image(const Image2& img, const std::filesystem::path& path);
Image2 load_image(const std::filesystem::path& path);
/// load_image plus the SimPX pixel range check.
SimPXImage load_simpx(const std::filesystem::path& path);

/// Binary 16-bit PGM (P5, maxval 65535, most significant byte first).
/// Pixel values are scaled by 65535, rounded and clamped to [0, 65535].
void save_pgm16(const Image2& img, const std::filesystem::path& path);

}  // namespace simpx
