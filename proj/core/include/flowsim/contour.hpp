#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "flowsim/raster.hpp"

namespace flowsim {

/// Freeman 8-direction code: 0 = east, counter-clockwise in a y-up frame, so
/// 2 is north (y - 1 in image coordinates) and 6 is south.
inline constexpr std::array<int, 8> kFreemanDx = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr std::array<int, 8> kFreemanDy = {0, -1, -1, -1, 0, 1, 1, 1};

struct ChainCode {
  Point start;
  std::vector<std::uint8_t> moves;

  /// Pixels visited, starting at `start`; one more entry than `moves`.
  std::vector<Point> points() const;
  /// Sum of move vectors; (0,0) for a closed boundary.
  Point displacement() const;

  friend bool operator==(const ChainCode&, const ChainCode&) = default;
};

struct PointD {
  double x = 0.0;
  double y = 0.0;
};

/// Radial statistics of one filled shape.
///   max_radius (A) - largest centroid-to-boundary distance
///   min_radius (B) - smallest centroid-to-boundary distance
///   area (C)       - pixel count of the filled shape
struct ShapeMeasurement {
  PointD centroid;
  double max_radius = 0.0;
  double min_radius = 0.0;
  std::size_t area = 0;
  ChainCode boundary;
};

struct CannyConfig {
  double gaussian_sigma = 1.0;
  /// Hysteresis thresholds as fractions of the largest gradient magnitude.
  double low_threshold = 0.1;
  double high_threshold = 0.3;
};

inline constexpr std::size_t kMinMeasurableArea = 9;

BinaryImage canny_edges(const GrayImage& img, const CannyConfig& cfg = {});

/// Sobel gradient of the Gaussian-smoothed image. `sector` quantises the
/// gradient direction to 0, 45, 90 or 135 degrees (values 0..3); the
/// neighbour offsets along each sector are kSectorDx/kSectorDy.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> magnitude;
  std::vector<std::uint8_t> sector;

  double at(int x, int y) const {
    return magnitude[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(x)];
  }
};

inline constexpr std::array<int, 4> kSectorDx = {1, 1, 0, -1};
inline constexpr std::array<int, 4> kSectorDy = {0, 1, 1, 1};

GradientField compute_gradient(const GrayImage& img, const CannyConfig& cfg = {});

/// Moore neighbour tracing of the outer boundary, clockwise on screen,
/// starting from the top-most then left-most pixel.
ChainCode trace_boundary(const ConnectedComponent& component, const BinaryImage& img);

/// Throws DegenerateShape below kMinMeasurableArea pixels.
ShapeMeasurement measure_shape(const ConnectedComponent& component, const BinaryImage& img);

}  // namespace flowsim
