#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "twinbeam/lg_mode.hpp"

namespace twinbeam {

std::string tool_version();

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

/// 9 significant digits, '.' decimal separator; the CSV number format.
std::string format_number(double value);
/// Shortest representation that round-trips through parsing.
std::string format_exact(double value);

/// Provenance lines (without comment markers) embedded in every output file.
std::vector<std::string> provenance_lines(const std::string& config_hash);

/// Binary PGM (P5), row-major, scaled so the image maximum maps to the top
/// code. 16-bit samples are big-endian. Provenance goes into '#' header lines.
void write_pgm(const std::filesystem::path& path, const GridGeometry& geometry,
               const std::vector<double>& values, int bit_depth, const std::string& config_hash);

struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  int max_value = 0;
  std::vector<std::string> comments;
  std::vector<std::uint16_t> pixels;
};

PgmImage read_pgm(const std::filesystem::path& path);

}  // namespace twinbeam
