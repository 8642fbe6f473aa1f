#include "simpx/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "binary_io.hpp"
#include "simpx/error.hpp"

namespace simpx {

void save_image(const Image2& img, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "PIMG1 " << img.rows() << ' ' << img.cols() << '\n';
  detail::write_f32_le(out, img.values());
  detail::finish_write(out, path);
}

Image2 load_image(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  const std::string what = "PIMG1 '" + path.string() + "'";
  const auto tokens = detail::read_header(in, what);
  if (tokens.size() != 3 || tokens[0] != "PIMG1") {
    throw FormatError(what + ": malformed header, expected 'PIMG1 <h> <w>'");
  }
  const std::size_t h = detail::parse_extent(tokens[1], what);
  const std::size_t w = detail::parse_extent(tokens[2], what);
  if (h == 0 || w == 0) throw DimsError(what + ": image extents must be >= 1");
  return Image2(h, w, detail::read_f32_le(in, h * w, what));
}

SimPXImage load_simpx(const std::filesystem::path& path) { return SimPXImage(load_image(path)); }

void save_pgm16(const Image2& img, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "P5\n" << img.cols() << ' ' << img.rows() << "\n65535\n";
  std::vector<char> buf(img.size() * 2);
  const auto v = img.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double scaled = std::isfinite(v[i]) ? std::round(v[i] * 65535.0) : 0.0;
    const auto q = static_cast<unsigned>(std::clamp(scaled, 0.0, 65535.0));
    buf[2 * i] = static_cast<char>((q >> 8) & 0xFF);
    buf[2 * i + 1] = static_cast<char>(q & 0xFF);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  detail::finish_write(out, path);
}

}  // namespace simpx
