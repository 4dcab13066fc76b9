#include "flowsim/raster.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "flowsim/error.hpp"

namespace flowsim {

namespace {

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

// Union-find over provisional labels; the smaller root wins so resolution
// is independent of merge order.
class LabelForest {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> luminance)
    : width_(width), height_(height), pixels_(std::move(luminance)) {
  check_dimensions(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::InvalidArgument, "luminance buffer does not match dimensions");
  }
}

BinaryImage::BinaryImage(int width, int height) : width_(width), height_(height) {
  check_dimensions(width, height);
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryImage::foreground_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

int BinaryImage::neighbor_count(int x, int y) const {
  int n = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if ((dx != 0 || dy != 0) && get(x + dx, y + dy)) ++n;
    }
  }
  return n;
}

int otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (auto v : img.pixels()) hist[v] += 1.0;

  const double total = static_cast<double>(img.pixels().size());
  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[i];

  // Class 0 holds levels [0, k]; the first k with maximal variance wins.
  double weight0 = 0.0;
  double sum0 = 0.0;
  double best_variance = -1.0;
  int best_k = 0;
  for (int k = 0; k < 255; ++k) {
    weight0 += hist[k];
    sum0 += k * hist[k];
    const double weight1 = total - weight0;
    double variance = 0.0;
    if (weight0 > 0.0 && weight1 > 0.0) {
      const double mean0 = sum0 / weight0;
      const double mean1 = (sum_all - sum0) / weight1;
      variance = weight0 * weight1 * (mean0 - mean1) * (mean0 - mean1);
    }
    if (variance > best_variance) {
      best_variance = variance;
      best_k = k;
    }
  }
  return best_k + 1;
}

BinaryImage binarize(const GrayImage& img, ThresholdMode mode) {
  int threshold = 0;
  if (const auto* fixed = std::get_if<FixedThreshold>(&mode)) {
    if (fixed->value < 0 || fixed->value > 255) {
      throw Error(ErrorKind::InvalidArgument,
                  "fixed threshold must lie in [0,255], got " + std::to_string(fixed->value));
    }
    threshold = fixed->value;
  } else {
    threshold = otsu_threshold(img);
  }

  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y) < threshold) out.set(x, y, true);
    }
  }
  return out;
}

GrayImage invert(const GrayImage& img) {
  std::vector<std::uint8_t> inverted(img.pixels().begin(), img.pixels().end());
  for (auto& v : inverted) v = static_cast<std::uint8_t>(255 - v);
  return GrayImage(img.width(), img.height(), std::move(inverted));
}

std::vector<ConnectedComponent> label_components(const BinaryImage& img,
                                                 Connectivity connectivity) {
  const int w = img.width();
  const int h = img.height();
  std::vector<int> provisional(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  auto at = [&](int x, int y) -> int& {
    return provisional[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                       static_cast<std::size_t>(x)];
  };

  // First pass: provisional labels from the already-visited half of the
  // neighbourhood (W, NW, N, NE for 8-connectivity; W, N for 4).
  LabelForest forest;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.at(x, y)) continue;
      int label = -1;
      auto visit = [&](int nx, int ny) {
        if (!img.get(nx, ny)) return;
        const int other = at(nx, ny);
        if (label < 0) {
          label = other;
        } else {
          forest.unite(label, other);
        }
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (connectivity == Connectivity::Eight) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      at(x, y) = label < 0 ? forest.make() : label;
    }
  }

  // Second pass: resolve roots and number components by first appearance.
  std::vector<ConnectedComponent> components;
  std::vector<int> root_to_index;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!img.at(x, y)) continue;
      const int root = forest.find(at(x, y));
      if (static_cast<std::size_t>(root) >= root_to_index.size()) {
        root_to_index.resize(static_cast<std::size_t>(root) + 1, -1);
      }
      int& index = root_to_index[static_cast<std::size_t>(root)];
      if (index < 0) {
        index = static_cast<int>(components.size());
        ConnectedComponent c;
        c.label = index + 1;
        c.bounding_box = {x, y, x, y};
        components.push_back(std::move(c));
      }
      auto& c = components[static_cast<std::size_t>(index)];
      c.pixels.push_back({x, y});
      auto& box = c.bounding_box;
      box.min_x = std::min(box.min_x, x);
      box.max_x = std::max(box.max_x, x);
      box.max_y = y;
    }
  }
  return components;
}

BinaryImage to_image(std::span<const Point> pixels, int width, int height) {
  BinaryImage out(width, height);
  for (const auto& p : pixels) out.set(p, true);
  return out;
}

}  // namespace flowsim
