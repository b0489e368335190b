#pragma once

#include "pnp/forward_models.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace pnp {

enum class PhantomKind { Blobs, Checker, FromPgm };

PhantomKind parse_phantom_kind(const std::string& name);

struct PhantomSpec {
  PhantomKind kind = PhantomKind::Blobs;
  int grid = 32;
  std::uint64_t seed = 0;
  int checker_block = 0;           // 0: grid / 4
  std::filesystem::path pgm_path;  // FromPgm only
};

/// Values in [0, 1]. FromPgm images of a different size are resampled by nearest neighbor.
Image phantom_generate(const PhantomSpec& spec);

/// Linear map of [0, 1] onto the permittivity contrast [0, f_max].
Image to_contrast(const Image& unit, double f_max, double physical_extent);

inline constexpr double kDefaultContrast = 0.05;

}  // namespace pnp
