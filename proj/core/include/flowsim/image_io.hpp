#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "flowsim/raster.hpp"

namespace flowsim {

enum class ImageFormat { Pgm, Png };
enum class PgmEncoding { Ascii, Binary };

/// True when the library was built with libpng.
bool png_supported();

/// Sniffs the magic bytes; nullopt when neither PGM nor PNG.
std::optional<ImageFormat> detect_format(std::span<const std::byte> bytes);

/// PGM P2/P5 with maxval 255 only. PNG colour input is reduced to luminance
/// with Rec.601 weights, rounded to nearest.
GrayImage decode_image(std::span<const std::byte> bytes, ImageFormat format);

GrayImage read_image(const std::filesystem::path& path);

std::string encode_pgm(const GrayImage& img, PgmEncoding encoding = PgmEncoding::Binary);

/// Foreground is written black (0) on white (255).
GrayImage to_gray(const BinaryImage& img);

void write_pgm(const GrayImage& img, const std::filesystem::path& path,
               PgmEncoding encoding = PgmEncoding::Binary);

}  // namespace flowsim
