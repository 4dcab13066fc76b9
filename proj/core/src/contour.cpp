#include "flowsim/contour.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "flowsim/error.hpp"

namespace flowsim {

namespace {

int freeman_code(int dx, int dy) {
  for (int d = 0; d < 8; ++d) {
    if (kFreemanDx[d] == dx && kFreemanDy[d] == dy) return d;
  }
  return -1;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : kernel) v /= sum;
  return kernel;
}

// Separable convolution with clamp-to-edge borders.
std::vector<double> smooth(const GrayImage& img, double sigma) {
  const int w = img.width();
  const int h = img.height();
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  auto idx = [w](int x, int y) {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
  };

  std::vector<double> horizontal(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int sx = std::clamp(x + k, 0, w - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] * img.at(sx, y);
      }
      horizontal[idx(x, y)] = acc;
    }
  }
  std::vector<double> out(horizontal.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const int sy = std::clamp(y + k, 0, h - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] * horizontal[idx(x, sy)];
      }
      out[idx(x, y)] = acc;
    }
  }
  return out;
}

void validate(const CannyConfig& cfg) {
  if (!(cfg.gaussian_sigma > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "gaussian_sigma must be positive");
  }
  if (!(cfg.low_threshold > 0.0 && cfg.low_threshold < cfg.high_threshold)) {
    throw Error(ErrorKind::InvalidArgument, "Canny thresholds need 0 < low < high");
  }
}

}  // namespace

std::vector<Point> ChainCode::points() const {
  std::vector<Point> out;
  out.reserve(moves.size() + 1);
  Point p = start;
  out.push_back(p);
  for (auto m : moves) {
    p.x += kFreemanDx[m];
    p.y += kFreemanDy[m];
    out.push_back(p);
  }
  return out;
}

Point ChainCode::displacement() const {
  Point d;
  for (auto m : moves) {
    d.x += kFreemanDx[m];
    d.y += kFreemanDy[m];
  }
  return d;
}

GradientField compute_gradient(const GrayImage& img, const CannyConfig& cfg) {
  validate(cfg);
  const int w = img.width();
  const int h = img.height();
  const auto smoothed = smooth(img, cfg.gaussian_sigma);
  auto s = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return smoothed[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                    static_cast<std::size_t>(x)];
  };

  GradientField field;
  field.width = w;
  field.height = h;
  field.magnitude.resize(smoothed.size());
  field.sector.resize(smoothed.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (s(x + 1, y - 1) + 2.0 * s(x + 1, y) + s(x + 1, y + 1)) -
                        (s(x - 1, y - 1) + 2.0 * s(x - 1, y) + s(x - 1, y + 1));
      const double gy = (s(x - 1, y + 1) + 2.0 * s(x, y + 1) + s(x + 1, y + 1)) -
                        (s(x - 1, y - 1) + 2.0 * s(x, y - 1) + s(x + 1, y - 1));
      const auto i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                     static_cast<std::size_t>(x);
      field.magnitude[i] = std::hypot(gx, gy);
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      field.sector[i] = static_cast<std::uint8_t>(static_cast<int>(std::floor((angle + 22.5) / 45.0)) % 4);
    }
  }
  return field;
}

BinaryImage canny_edges(const GrayImage& img, const CannyConfig& cfg) {
  const GradientField field = compute_gradient(img, cfg);
  const int w = field.width;
  const int h = field.height;
  const double max_magnitude = *std::max_element(field.magnitude.begin(), field.magnitude.end());
  BinaryImage edges(w, h);
  if (max_magnitude <= 0.0) return edges;

  // Non-maximum suppression. On a two-pixel plateau (a step edge centred
  // between columns) the pixel on the negative side of the gradient wins.
  std::vector<double> thinned(field.magnitude.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                     static_cast<std::size_t>(x);
      const double m = field.magnitude[i];
      if (m <= 0.0) continue;
      const int dx = kSectorDx[field.sector[i]];
      const int dy = kSectorDy[field.sector[i]];
      const double ahead = (x + dx >= 0 && x + dx < w && y + dy >= 0 && y + dy < h)
                               ? field.at(x + dx, y + dy)
                               : 0.0;
      const double behind = (x - dx >= 0 && x - dx < w && y - dy >= 0 && y - dy < h)
                                ? field.at(x - dx, y - dy)
                                : 0.0;
      if (m >= ahead && m > behind) thinned[i] = m;
    }
  }

  const double high = cfg.high_threshold * max_magnitude;
  const double low = cfg.low_threshold * max_magnitude;
  std::deque<Point> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                     static_cast<std::size_t>(x);
      if (thinned[i] >= high) {
        edges.set(x, y, true);
        queue.push_back({x, y});
      }
    }
  }
  while (!queue.empty()) {
    const Point p = queue.front();
    queue.pop_front();
    for (int d = 0; d < 8; ++d) {
      const int nx = p.x + kFreemanDx[d];
      const int ny = p.y + kFreemanDy[d];
      if (!edges.in_bounds(nx, ny) || edges.at(nx, ny)) continue;
      const auto i = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) +
                     static_cast<std::size_t>(nx);
      if (thinned[i] >= low) {
        edges.set(nx, ny, true);
        queue.push_back({nx, ny});
      }
    }
  }
  return edges;
}

ChainCode trace_boundary(const ConnectedComponent& component, const BinaryImage& img) {
  (void)img;
  ChainCode chain;
  if (component.pixels.empty()) return chain;

  // Work on a mask holding only this component so touching neighbours in
  // `img` cannot leak into the trace.
  const BoundingBox& box = component.bounding_box;
  const int mw = box.width() + 2;
  const int mh = box.height() + 2;
  BinaryImage mask(mw, mh);
  for (const auto& p : component.pixels) mask.set(p.x - box.min_x + 1, p.y - box.min_y + 1, true);

  const Point start = *std::min_element(
      component.pixels.begin(), component.pixels.end(),
      [](const Point& a, const Point& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
  chain.start = start;
  const Point s{start.x - box.min_x + 1, start.y - box.min_y + 1};

  // Moore tracing: from the backtrack neighbour, scan clockwise on screen
  // (decreasing Freeman code) for the next foreground pixel.
  auto step = [&](Point c, int backtrack_dir, Point& next, int& next_backtrack) {
    for (int k = 1; k <= 8; ++k) {
      const int d = ((backtrack_dir - k) % 8 + 8) % 8;
      const Point n{c.x + kFreemanDx[d], c.y + kFreemanDy[d]};
      if (!mask.get(n)) continue;
      const int prev = (d + 1) % 8;
      const Point b{c.x + kFreemanDx[prev], c.y + kFreemanDy[prev]};
      next = n;
      next_backtrack = freeman_code(b.x - n.x, b.y - n.y);
      return d;
    }
    return -1;
  };

  Point first_next;
  int backtrack = 4;  // west of the start pixel is background
  int next_backtrack = 0;
  const int first_move = step(s, backtrack, first_next, next_backtrack);
  if (first_move < 0) return chain;

  chain.moves.push_back(static_cast<std::uint8_t>(first_move));
  Point current = first_next;
  backtrack = next_backtrack;
  const std::size_t limit = 4 * component.area() + 8;
  while (chain.moves.size() < limit) {
    Point next;
    const int move = step(current, backtrack, next, next_backtrack);
    if (current == s && next == first_next) break;
    chain.moves.push_back(static_cast<std::uint8_t>(move));
    current = next;
    backtrack = next_backtrack;
  }
  return chain;
}

ShapeMeasurement measure_shape(const ConnectedComponent& component, const BinaryImage& img) {
  if (component.area() < kMinMeasurableArea) {
    throw Error(ErrorKind::DegenerateShape,
                "component " + std::to_string(component.label) + " has only " +
                    std::to_string(component.area()) + " pixels");
  }
  ShapeMeasurement m;
  m.area = component.area();
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : component.pixels) {
    sx += p.x;
    sy += p.y;
  }
  m.centroid = {sx / static_cast<double>(m.area), sy / static_cast<double>(m.area)};
  m.boundary = trace_boundary(component, img);

  // Distances run from the centroid to where the ray through a boundary
  // pixel's centre leaves that pixel's unit square, i.e. to the outline of
  // the area that C counts.
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& p : m.boundary.points()) {
    const double dx = p.x - m.centroid.x;
    const double dy = p.y - m.centroid.y;
    const double d = std::hypot(dx, dy);
    const double exit = d > 0.0 ? 0.5 * d / std::max(std::abs(dx), std::abs(dy)) : 0.5;
    lo = std::min(lo, d + exit);
    hi = std::max(hi, d + exit);
  }
  m.min_radius = lo;
  m.max_radius = hi;
  return m;
}

}  // namespace flowsim
