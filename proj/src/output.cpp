#include "twinbeam/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twinbeam {

std::string tool_version() { return TWINBEAM_VERSION; }

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value == 0.0 ? 0.0 : value);
  return buf;
}

std::string format_exact(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value == 0.0 ? 0.0 : value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> provenance_lines(const std::string& config_hash) {
  return {"twinbeam " + tool_version(), "config-hash " + config_hash};
}

void write_pgm(const std::filesystem::path& path, const GridGeometry& geometry,
               const std::vector<double>& values, int bit_depth, const std::string& config_hash) {
  if (bit_depth != 8 && bit_depth != 16) throw std::invalid_argument("PGM bit depth must be 8 or 16");
  const auto n = geometry.resolution;
  if (values.size() != n * n) throw std::invalid_argument("PGM pixel count does not match the grid");

  const int top = bit_depth == 8 ? 255 : 65535;
  const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  const double scale = peak > 0.0 ? top / peak : 0.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n";
  for (const auto& line : provenance_lines(config_hash)) out << "# " << line << "\n";
  out << "# extent-um " << format_number(geometry.extent_um) << "\n";
  out << n << " " << n << "\n" << top << "\n";
  for (double v : values) {
    const auto q = static_cast<unsigned>(std::clamp(std::lround(v * scale), 0L, static_cast<long>(top)));
    if (bit_depth == 8) {
      out.put(static_cast<char>(q));
    } else {
      out.put(static_cast<char>(q >> 8));
      out.put(static_cast<char>(q & 0xff));
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  PgmImage img;
  std::string magic;
  std::getline(in, magic);
  if (magic != "P5") throw std::runtime_error("not a binary PGM: " + path.string());
  std::string line;
  while (in.peek() == '#') {
    std::getline(in, line);
    img.comments.push_back(line.substr(line.size() > 1 ? 2 : 1));
  }
  in >> img.width >> img.height >> img.max_value;
  in.get();
  const bool wide = img.max_value > 255;
  img.pixels.resize(img.width * img.height);
  for (auto& px : img.pixels) {
    const int hi = in.get();
    px = static_cast<std::uint16_t>(wide ? (hi << 8) | in.get() : hi);
  }
  if (!in) throw std::runtime_error("truncated PGM: " + path.string());
  return img;
}

}  // namespace twinbeam
