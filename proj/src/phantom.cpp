#include "pnp/phantom.hpp"

#include "pnp/pgm.hpp"

#include <cmath>

namespace pnp {

PhantomKind parse_phantom_kind(const std::string& name) {
  if (name == "blobs") return PhantomKind::Blobs;
  if (name == "checker") return PhantomKind::Checker;
  if (name == "pgm") return PhantomKind::FromPgm;
  throw ConfigError("unknown phantom kind '" + name + "' (expected blobs, checker or pgm)");
}

namespace {

Image blobs(int grid, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> count_dist(3, 6);
  std::uniform_real_distribution<double> center(0.2 * grid, 0.8 * grid);
  std::uniform_real_distribution<double> width(0.05 * grid, 0.15 * grid);
  std::uniform_real_distribution<double> amplitude(0.5, 1.0);
  Image img = Image::zeros(grid, grid);
  const int count = count_dist(rng);
  for (int b = 0; b < count; ++b) {
    const double cr = center(rng);
    const double cc = center(rng);
    const double w = width(rng);
    const double a = amplitude(rng);
    for (int r = 0; r < grid; ++r)
      for (int c = 0; c < grid; ++c) {
        const double dr = r + 0.5 - cr;
        const double dc = c + 0.5 - cc;
        img.at(r, c) += a * std::exp(-(dr * dr + dc * dc) / (2.0 * w * w));
      }
  }
  img.pixels = img.pixels.cwiseMax(0.0).cwiseMin(1.0);
  return img;
}

Image checker(int grid, int block) {
  if (block <= 0) block = std::max(1, grid / 4);
  Image img = Image::zeros(grid, grid);
  for (int r = 0; r < grid; ++r)
    for (int c = 0; c < grid; ++c) img.at(r, c) = ((r / block) + (c / block)) % 2 == 0 ? 1.0 : 0.0;
  return img;
}

Image resample_nearest(const Image& src, int grid) {
  if (src.width == grid && src.height == grid) return src;
  Image out = Image::zeros(grid, grid);
  for (int r = 0; r < grid; ++r)
    for (int c = 0; c < grid; ++c) {
      const int sr = std::min(src.height - 1, static_cast<int>((r + 0.5) * src.height / grid));
      const int sc = std::min(src.width - 1, static_cast<int>((c + 0.5) * src.width / grid));
      out.at(r, c) = src.at(sr, sc);
    }
  return out;
}

}  // namespace

Image phantom_generate(const PhantomSpec& spec) {
  if (spec.grid < 8) throw ConfigError("phantom_generate: grid must be at least 8");
  switch (spec.kind) {
    case PhantomKind::Blobs: return blobs(spec.grid, spec.seed);
    case PhantomKind::Checker: return checker(spec.grid, spec.checker_block);
    case PhantomKind::FromPgm: return resample_nearest(pgm_to_unit_image(read_pgm(spec.pgm_path)), spec.grid);
  }
  throw ConfigError("phantom_generate: unknown kind");
}

Image to_contrast(const Image& unit, double f_max, double physical_extent) {
  if (!(f_max > 0.0)) throw ConfigError("to_contrast: f_max must be positive");
  return Image(unit.pixels * f_max, unit.width, unit.height, physical_extent);
}

}  // namespace pnp
