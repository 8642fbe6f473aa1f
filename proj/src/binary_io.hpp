#pragma once

// Little-endian float32 payloads and single-line text headers shared by the
// PVOL1 and PIMG1 readers/writers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "simpx/error.hpp"

namespace simpx::detail {

inline std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0x000000FFu) << 24) | ((v & 0x0000FF00u) << 8) | ((v & 0x00FF0000u) >> 8) |
        ((v & 0xFF000000u) >> 24);
  }
  return v;
}

inline void write_f32_le(std::ostream& os, std::span<const double> values) {
  std::vector<char> buf(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto f = static_cast<float>(values[i]);
    const std::uint32_t le = to_little_endian(std::bit_cast<std::uint32_t>(f));
    std::memcpy(buf.data() + 4 * i, &le, 4);
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline std::vector<double> read_f32_le(std::istream& is, std::size_t count,
                                       const std::string& what) {
  std::vector<char> buf(count * 4);
  is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  const auto got = static_cast<std::size_t>(is.gcount());
  if (got != buf.size()) {
    throw FormatError(what + ": size mismatch, header declares " + std::to_string(count) +
                      " values but payload holds " + std::to_string(got / 4));
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError(what + ": size mismatch, payload longer than header declares");
  }
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t le = 0;
    std::memcpy(&le, buf.data() + 4 * i, 4);
    out[i] = static_cast<double>(std::bit_cast<float>(to_little_endian(le)));
  }
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

/// Reads the header line (without the newline) and splits it on whitespace.
inline std::vector<std::string> read_header(std::istream& is, const std::string& what) {
  std::string line;
  char ch = 0;
  while (is.get(ch)) {
    if (ch == '\n') break;
    line.push_back(ch);
    if (line.size() > 256) throw FormatError(what + ": malformed header");
  }
  if (ch != '\n') throw FormatError(what + ": malformed header (no newline)");
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  for (std::string t; ss >> t;) tokens.push_back(t);
  return tokens;
}

inline std::size_t parse_extent(const std::string& token, const std::string& what) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos ||
      token.size() > 9) {
    throw FormatError(what + ": malformed header extent '" + token + "'");
  }
  return static_cast<std::size_t>(std::stoull(token));
}

}  // namespace simpx::detail
