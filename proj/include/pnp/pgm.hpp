#pragma once

#include "pnp/forward_models.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pnp {

/// Malformed input; offset() is the byte position where parsing failed.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Binary graymap (P5). Samples are 8-bit when maxval < 256, else 16-bit big-endian.
struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 65535;
  std::vector<std::uint16_t> samples;  // row-major
};

PgmImage parse_pgm(std::string_view bytes);
std::string encode_pgm(const PgmImage& img);

PgmImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const PgmImage& img);

/// Linear map of [lo, hi] onto [0, 65535], clamped and rounded.
PgmImage quantize_pgm(const Image& img, double lo, double hi);

/// samples / maxval, in [0, 1].
Image pgm_to_unit_image(const PgmImage& pgm);

}  // namespace pnp
