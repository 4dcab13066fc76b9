#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace flowsim {

struct Point {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Point&, const Point&) = default;
};

/// Inclusive pixel bounds.
struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;

  int width() const { return max_x - min_x + 1; }
  int height() const { return max_y - min_y + 1; }
  bool contains(Point p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// 8-bit luminance raster, row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 255);
  GrayImage(int width, int height, std::vector<std::uint8_t> luminance);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  void set(int x, int y, std::uint8_t value) { pixels_[index(x, y)] = value; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Foreground/background raster. Out-of-range reads through `get` are
/// background, which is the convention every neighbourhood operator relies on.
class BinaryImage {
 public:
  BinaryImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool at(int x, int y) const { return cells_[index(x, y)] != 0; }
  bool get(int x, int y) const { return in_bounds(x, y) && at(x, y); }
  bool at(Point p) const { return at(p.x, p.y); }
  bool get(Point p) const { return get(p.x, p.y); }
  void set(int x, int y, bool value) { cells_[index(x, y)] = value ? 1 : 0; }
  void set(Point p, bool value) { set(p.x, p.y, value); }

  std::size_t foreground_count() const;
  bool empty() const { return foreground_count() == 0; }

  /// Number of foreground pixels among the eight neighbours of (x, y).
  int neighbor_count(int x, int y) const;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> cells_;
};

enum class Connectivity { Four, Eight };

struct ConnectedComponent {
  int label = 0;
  std::vector<Point> pixels;  // raster order
  BoundingBox bounding_box;

  std::size_t area() const { return pixels.size(); }

  friend bool operator==(const ConnectedComponent&, const ConnectedComponent&) = default;
};

struct FixedThreshold {
  int value = 128;
};
struct OtsuThreshold {};
using ThresholdMode = std::variant<FixedThreshold, OtsuThreshold>;

/// Threshold t maximising the between-class variance of the histogram, in the
/// same `luminance < t` convention used by `binarize`.
int otsu_threshold(const GrayImage& img);

/// Dark ink is foreground: foreground(p) = luminance(p) < t.
BinaryImage binarize(const GrayImage& img, ThresholdMode mode = OtsuThreshold{});

GrayImage invert(const GrayImage& img);

/// Components in raster-scan order of their first pixel; labels start at 1.
std::vector<ConnectedComponent> label_components(const BinaryImage& img,
                                                 Connectivity connectivity = Connectivity::Eight);

/// Renders the given pixels into an otherwise empty image of the given size.
BinaryImage to_image(std::span<const Point> pixels, int width, int height);

}  // namespace flowsim
