#include "flowsim/image_io.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "flowsim/error.hpp"

#if FLOWSIM_HAVE_PNG
#include <png.h>
#endif

namespace flowsim {

namespace {

// Cursor over a PGM header: whitespace and '#' comments separate tokens.
class PgmReader {
 public:
  explicit PgmReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  int read_int(const char* what) {
    skip_separators();
    if (pos_ >= bytes_.size() || !std::isdigit(peek())) {
      throw Error(ErrorKind::MalformedImage, std::string("expected ") + what + " in PGM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(peek())) {
      value = value * 10 + (peek() - '0');
      if (value > 1'000'000) {
        throw Error(ErrorKind::MalformedImage, std::string(what) + " out of range");
      }
      ++pos_;
    }
    return static_cast<int>(value);
  }

  // P5: exactly one whitespace byte separates maxval from the raster.
  void consume_single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(peek())) {
      throw Error(ErrorKind::MalformedImage, "missing separator before PGM raster");
    }
    ++pos_;
  }

  std::size_t position() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }
  std::byte byte_at(std::size_t i) const { return bytes_[i]; }

  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const int c = peek();
      if (c == '#') {
        while (pos_ < bytes_.size() && peek() != '\n' && peek() != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

 private:
  int peek() const { return static_cast<unsigned char>(bytes_[pos_]); }

  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

GrayImage decode_pgm(std::span<const std::byte> bytes) {
  if (bytes.size() < 2 || static_cast<char>(bytes[0]) != 'P' ||
      (static_cast<char>(bytes[1]) != '2' && static_cast<char>(bytes[1]) != '5')) {
    throw Error(ErrorKind::MalformedImage, "missing P2/P5 magic number");
  }
  const bool binary = static_cast<char>(bytes[1]) == '5';
  PgmReader reader(bytes.subspan(2));
  const int width = reader.read_int("width");
  const int height = reader.read_int("height");
  const int maxval = reader.read_int("maxval");
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::MalformedImage, "PGM dimensions must be positive");
  }
  if (maxval != 255) {
    throw Error(ErrorKind::UnsupportedFormat,
                "only maxval 255 is supported, got " + std::to_string(maxval));
  }

  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> luminance;
  luminance.reserve(count);
  if (binary) {
    reader.consume_single_whitespace();
    if (reader.size() - reader.position() < count) {
      throw Error(ErrorKind::MalformedImage, "truncated PGM raster");
    }
    for (std::size_t i = 0; i < count; ++i) {
      luminance.push_back(static_cast<std::uint8_t>(reader.byte_at(reader.position() + i)));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      reader.skip_separators();
      if (reader.position() >= reader.size()) {
        throw Error(ErrorKind::MalformedImage, "truncated PGM raster");
      }
      const int v = reader.read_int("sample");
      if (v > maxval) throw Error(ErrorKind::MalformedImage, "sample exceeds maxval");
      luminance.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return GrayImage(width, height, std::move(luminance));
}

#if FLOWSIM_HAVE_PNG
GrayImage decode_png(std::span<const std::byte> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorKind::MalformedImage, std::string("PNG: ") + image.message);
  }
  // Composite any alpha onto white, then weight the channels ourselves so the
  // luminance rule is independent of libpng's gamma handling.
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&image, &white, rgb.data(), 0, nullptr)) {
    throw Error(ErrorKind::MalformedImage, std::string("PNG: ") + image.message);
  }
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  std::vector<std::uint8_t> luminance(static_cast<std::size_t>(width) *
                                      static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < luminance.size(); ++i) {
    const double y = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2];
    luminance[i] = static_cast<std::uint8_t>(std::lround(y));
  }
  return GrayImage(width, height, std::move(luminance));
}
#endif

}  // namespace

bool png_supported() { return FLOWSIM_HAVE_PNG != 0; }

std::optional<ImageFormat> detect_format(std::span<const std::byte> bytes) {
  if (bytes.size() >= 2 && static_cast<char>(bytes[0]) == 'P' &&
      (static_cast<char>(bytes[1]) == '2' || static_cast<char>(bytes[1]) == '5')) {
    return ImageFormat::Pgm;
  }
  static constexpr unsigned char kPngMagic[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (bytes.size() >= sizeof(kPngMagic) &&
      std::memcmp(bytes.data(), kPngMagic, sizeof(kPngMagic)) == 0) {
    return ImageFormat::Png;
  }
  return std::nullopt;
}

GrayImage decode_image(std::span<const std::byte> bytes, ImageFormat format) {
  switch (format) {
    case ImageFormat::Pgm:
      return decode_pgm(bytes);
    case ImageFormat::Png:
#if FLOWSIM_HAVE_PNG
      return decode_png(bytes);
#else
      throw Error(ErrorKind::UnsupportedFormat, "built without PNG support");
#endif
  }
  throw Error(ErrorKind::UnsupportedFormat, "unknown image format");
}

GrayImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto bytes = std::as_bytes(std::span<const char>(raw));
  const auto format = detect_format(bytes);
  if (!format) {
    throw Error(ErrorKind::UnsupportedFormat, path.string() + " is neither PGM nor PNG");
  }
  try {
    return decode_image(bytes, *format);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string encode_pgm(const GrayImage& img, PgmEncoding encoding) {
  std::string out = encoding == PgmEncoding::Binary ? "P5\n" : "P2\n";
  out += std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  if (encoding == PgmEncoding::Binary) {
    for (auto v : img.pixels()) out.push_back(static_cast<char>(v));
    return out;
  }
  // Netpbm asks for lines of at most 70 characters in plain files.
  std::size_t line = 0;
  for (auto v : img.pixels()) {
    const std::string token = std::to_string(v);
    if (line > 0 && line + 1 + token.size() > 70) {
      out += '\n';
      line = 0;
    } else if (line > 0) {
      out += ' ';
      ++line;
    }
    out += token;
    line += token.size();
  }
  out += '\n';
  return out;
}

GrayImage to_gray(const BinaryImage& img) {
  GrayImage out(img.width(), img.height(), 255);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y)) out.set(x, y, 0);
    }
  }
  return out;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path, PgmEncoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  const auto data = encode_pgm(img, encoding);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

}  // namespace flowsim
