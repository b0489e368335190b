#include "pnp/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pnp {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

namespace {

class HeaderLexer {
public:
  explicit HeaderLexer(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto ch = static_cast<unsigned char>(bytes_[pos_]);
      if (std::isspace(ch)) {
        ++pos_;
      } else if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000) throw ParseError(std::string("PGM: ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("PGM: expected ") + what, start);
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

PgmImage parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw ParseError("PGM: expected magic P5", 0);
  HeaderLexer lex(bytes.substr(0));
  lex.advance();
  lex.advance();
  PgmImage img;
  const std::size_t width_at = lex.pos();
  img.width = static_cast<int>(lex.number("width"));
  img.height = static_cast<int>(lex.number("height"));
  if (img.width <= 0 || img.height <= 0) throw ParseError("PGM: image dimensions must be positive", width_at);
  const std::size_t maxval_at = lex.pos();
  img.maxval = static_cast<int>(lex.number("maxval"));
  if (img.maxval <= 0 || img.maxval > 65535) throw ParseError("PGM: maxval must lie in [1, 65535]", maxval_at);
  if (lex.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[lex.pos()])))
    throw ParseError("PGM: expected single whitespace after maxval", lex.pos());
  std::size_t pos = lex.pos() + 1;

  const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  const std::size_t width_bytes = img.maxval < 256 ? 1 : 2;
  if (bytes.size() - pos < count * width_bytes)
    throw ParseError("PGM: truncated raster, expected " + std::to_string(count * width_bytes) + " bytes",
                     bytes.size());
  img.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint16_t v = 0;
    if (width_bytes == 1) {
      v = static_cast<unsigned char>(bytes[pos]);
    } else {
      v = static_cast<std::uint16_t>((static_cast<unsigned char>(bytes[pos]) << 8) |
                                     static_cast<unsigned char>(bytes[pos + 1]));
    }
    if (v > img.maxval) throw ParseError("PGM: sample exceeds maxval", pos);
    img.samples[i] = v;
    pos += width_bytes;
  }
  return img;
}

std::string encode_pgm(const PgmImage& img) {
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535 ||
      img.samples.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
    throw ConfigError("encode_pgm: inconsistent image");
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                    std::to_string(img.maxval) + "\n";
  for (auto v : img.samples) {
    if (img.maxval < 256) {
      out.push_back(static_cast<char>(v & 0xff));
    } else {
      out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    }
  }
  return out;
}

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pgm(ss.str());
}

void write_pgm(const std::filesystem::path& path, const PgmImage& img) {
  const std::string bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

PgmImage quantize_pgm(const Image& img, double lo, double hi) {
  PgmImage out;
  out.width = img.width;
  out.height = img.height;
  out.maxval = 65535;
  out.samples.resize(img.size());
  const double span = hi - lo;
  for (std::size_t i = 0; i < img.size(); ++i) {
    double t = span > 0.0 ? (img.pixels[static_cast<Eigen::Index>(i)] - lo) / span : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    out.samples[i] = static_cast<std::uint16_t>(std::lround(t * 65535.0));
  }
  return out;
}

Image pgm_to_unit_image(const PgmImage& pgm) {
  RealVec px(static_cast<Eigen::Index>(pgm.samples.size()));
  for (std::size_t i = 0; i < pgm.samples.size(); ++i)
    px[static_cast<Eigen::Index>(i)] = static_cast<double>(pgm.samples[i]) / pgm.maxval;
  return Image(std::move(px), pgm.width, pgm.height);
}

}  // namespace pnp
