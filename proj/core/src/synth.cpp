#include "flowsim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flowsim/error.hpp"

namespace flowsim {

namespace {

Vec2 half_extent(const NodeSpec& n) {
  switch (n.role) {
    case FlowchartRole::Connector: return {n.size.x, n.size.x};
    case FlowchartRole::StartStop: return {n.size.x, n.size.y};
    case FlowchartRole::Process: return {n.size.x / 2.0, n.size.y / 2.0};
    case FlowchartRole::Decision: return {n.size.x, n.size.y};
  }
  return {};
}

double rhombus_apothem(double p, double q) { return p * q / std::hypot(p, q); }

// Top-left fill rule: a pixel centre exactly on the boundary belongs to the
// shape only on its upper (or, at mid-height, left) side.
bool within(double value, double limit, bool tie_in) {
  return value < limit || (value == limit && tie_in);
}

// Whether offset (dx, dy) from the node centre lies inside the shape after
// shrinking it inwards by `inset` pixels.
bool inside(const NodeSpec& n, double dx, double dy, double inset) {
  const bool tie_in = dy < 0.0 || (dy == 0.0 && dx < 0.0);
  switch (n.role) {
    case FlowchartRole::Connector: {
      const double r = n.size.x - inset;
      return r > 0.0 && within(dx * dx + dy * dy, r * r, tie_in);
    }
    case FlowchartRole::StartStop: {
      const double a = n.size.x - inset;
      const double b = n.size.y - inset;
      if (a <= 0.0 || b <= 0.0) return false;
      return within(dx * dx * b * b + dy * dy * a * a, a * a * b * b, tie_in);
    }
    case FlowchartRole::Process:
      return within(std::abs(dx), n.size.x / 2.0 - inset, dx < 0.0) &&
             within(std::abs(dy), n.size.y / 2.0 - inset, dy < 0.0);
    case FlowchartRole::Decision: {
      const double apothem = rhombus_apothem(n.size.x, n.size.y);
      const double k = (apothem - inset) / apothem;
      if (k <= 0.0) return false;
      const double p = k * n.size.x;
      const double q = k * n.size.y;
      return within(std::abs(dx) * q + std::abs(dy) * p, p * q, tie_in);
    }
  }
  return false;
}

// Distance from the centre to the (inset) boundary along unit direction u.
double boundary_distance(const NodeSpec& n, Vec2 u, double inset) {
  const double ux = std::abs(u.x);
  const double uy = std::abs(u.y);
  switch (n.role) {
    case FlowchartRole::Connector:
      return n.size.x - inset;
    case FlowchartRole::StartStop: {
      const double a = n.size.x - inset;
      const double b = n.size.y - inset;
      return 1.0 / std::sqrt((ux / a) * (ux / a) + (uy / b) * (uy / b));
    }
    case FlowchartRole::Process: {
      const double hx = n.size.x / 2.0 - inset;
      const double hy = n.size.y / 2.0 - inset;
      double t = std::numeric_limits<double>::infinity();
      if (ux > 0.0) t = std::min(t, hx / ux);
      if (uy > 0.0) t = std::min(t, hy / uy);
      return t;
    }
    case FlowchartRole::Decision: {
      const double apothem = rhombus_apothem(n.size.x, n.size.y);
      const double k = (apothem - inset) / apothem;
      return 1.0 / (ux / (k * n.size.x) + uy / (k * n.size.y));
    }
  }
  return 0.0;
}

// Half extents of the largest axis-aligned box safely inside the shape.
Vec2 inscribed_half_box(const NodeSpec& n) {
  switch (n.role) {
    case FlowchartRole::Connector: return {n.size.x / std::numbers::sqrt2, n.size.x / std::numbers::sqrt2};
    case FlowchartRole::StartStop: return {n.size.x / std::numbers::sqrt2, n.size.y / std::numbers::sqrt2};
    case FlowchartRole::Process: return {n.size.x / 2.0, n.size.y / 2.0};
    case FlowchartRole::Decision: return {n.size.x / 2.0, n.size.y / 2.0};
  }
  return {};
}

class Raster {
 public:
  explicit Raster(const Canvas& c)
      : width_(c.width),
        height_(c.height),
        tags_(static_cast<std::size_t>(c.width) * static_cast<std::size_t>(c.height),
              PixelTag::Background) {}

  void paint(int x, int y, PixelTag tag) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
    tags_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
          static_cast<std::size_t>(x)] = tag;
  }

  std::vector<PixelTag> release() { return std::move(tags_); }

 private:
  int width_;
  int height_;
  std::vector<PixelTag> tags_;
};

void draw_node(Raster& raster, const NodeSpec& n, int stroke) {
  const Vec2 half = half_extent(n);
  const int x0 = static_cast<int>(std::floor(n.center.x - half.x)) - 1;
  const int x1 = static_cast<int>(std::ceil(n.center.x + half.x)) + 1;
  const int y0 = static_cast<int>(std::floor(n.center.y - half.y)) - 1;
  const int y1 = static_cast<int>(std::ceil(n.center.y + half.y)) + 1;
  // Scanline fill: each row is tested pixel-centre by pixel-centre.
  for (int y = y0; y <= y1; ++y) {
    const double dy = y + 0.5 - n.center.y;
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - n.center.x;
      if (!inside(n, dx, dy, 0.0)) continue;
      if (n.filled) {
        raster.paint(x, y, PixelTag::NodeFill);
      } else if (!inside(n, dx, dy, stroke)) {
        raster.paint(x, y, PixelTag::NodeOutline);
      }
    }
  }
}

// Bresenham line stamped with a square brush of the stroke width.
void draw_segment(Raster& raster, Vec2 a, Vec2 b, int stroke) {
  int x0 = static_cast<int>(std::floor(a.x));
  int y0 = static_cast<int>(std::floor(a.y));
  const int x1 = static_cast<int>(std::floor(b.x));
  const int y1 = static_cast<int>(std::floor(b.y));
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  const int lo = -(stroke - 1) / 2;
  const int hi = stroke / 2;
  while (true) {
    for (int oy = lo; oy <= hi; ++oy) {
      for (int ox = lo; ox <= hi; ++ox) raster.paint(x0 + ox, y0 + oy, PixelTag::Edge);
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void fill_triangle(Raster& raster, Vec2 a, Vec2 b, Vec2 c) {
  const auto cross = [](Vec2 p, Vec2 q, Vec2 r) {
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  };
  const int x0 = static_cast<int>(std::floor(std::min({a.x, b.x, c.x})));
  const int x1 = static_cast<int>(std::ceil(std::max({a.x, b.x, c.x})));
  const int y0 = static_cast<int>(std::floor(std::min({a.y, b.y, c.y})));
  const int y1 = static_cast<int>(std::ceil(std::max({a.y, b.y, c.y})));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 p{x + 0.5, y + 0.5};
      const double d1 = cross(a, b, p);
      const double d2 = cross(b, c, p);
      const double d3 = cross(c, a, p);
      const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
      const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
      if (!(has_neg && has_pos)) raster.paint(x, y, PixelTag::Edge);
    }
  }
}

Vec2 unit(Vec2 from, Vec2 to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return {1.0, 0.0};
  return {dx / len, dy / len};
}

constexpr double kArrowLength = 10.0;
constexpr double kArrowHalfWidth = 5.0;

void draw_edge(Raster& raster, const Layout& layout, const EdgeSpec& e) {
  const NodeSpec& src = layout.nodes[e.from];
  const NodeSpec& dst = layout.nodes[e.to];
  const int stroke = layout.stroke_width;
  const Vec2 first_target = e.waypoints.empty() ? dst.center : e.waypoints.front();
  const Vec2 last_source = e.waypoints.empty() ? src.center : e.waypoints.back();

  // Lines start and end just inside the node stroke so the ink connects.
  const Vec2 out_dir = unit(src.center, first_target);
  const double start_r = boundary_distance(src, out_dir, stroke) + 0.5;
  const Vec2 start{src.center.x + out_dir.x * start_r, src.center.y + out_dir.y * start_r};

  const Vec2 in_dir = unit(dst.center, last_source);  // pointing out of the target
  const double end_r = boundary_distance(dst, in_dir, stroke) + 0.5;
  const Vec2 end{dst.center.x + in_dir.x * end_r, dst.center.y + in_dir.y * end_r};

  std::vector<Vec2> path;
  path.push_back(start);
  path.insert(path.end(), e.waypoints.begin(), e.waypoints.end());
  path.push_back(end);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) draw_segment(raster, path[i], path[i + 1], stroke);

  if (e.arrowhead) {
    const double tip_r = boundary_distance(dst, in_dir, 0.0);
    const Vec2 tip{dst.center.x + in_dir.x * tip_r, dst.center.y + in_dir.y * tip_r};
    const Vec2 base{tip.x + in_dir.x * kArrowLength, tip.y + in_dir.y * kArrowLength};
    const Vec2 perp{-in_dir.y, in_dir.x};
    fill_triangle(raster, tip,
                  {base.x + perp.x * kArrowHalfWidth, base.y + perp.y * kArrowHalfWidth},
                  {base.x - perp.x * kArrowHalfWidth, base.y - perp.y * kArrowHalfWidth});
  }
}

void draw_label(Raster& raster, const NodeSpec& n, const LabelSpec& label, int stroke) {
  const Vec2 box = inscribed_half_box(n);
  const double margin = stroke + 4.0;
  const int half_w = static_cast<int>(std::floor(box.x - margin));
  const int half_h = static_cast<int>(std::floor(box.y - margin));
  if (half_w < 2 || half_h < 2) return;

  SynthRng rng(label.seed);
  struct Glyph {
    int w;
    int h;
  };
  std::vector<Glyph> glyphs;
  int total = 0;
  for (int i = 0; i < label.glyphs; ++i) {
    const Glyph g{rng.uniform_int(3, 8), std::min(rng.uniform_int(3, 8), 2 * half_h)};
    const int needed = total + (glyphs.empty() ? 0 : 2) + g.w;
    if (needed > 2 * half_w) break;
    glyphs.push_back(g);
    total = needed;
  }

  int x = static_cast<int>(std::floor(n.center.x)) - total / 2;
  const int cy = static_cast<int>(std::floor(n.center.y));
  for (const auto& g : glyphs) {
    const int y = cy - g.h / 2;
    for (int gy = 0; gy < g.h; ++gy) {
      for (int gx = 0; gx < g.w; ++gx) raster.paint(x + gx, y + gy, PixelTag::Text);
    }
    x += g.w + 2;
  }
}

void validate(const Layout& layout) {
  if (layout.canvas.width < 1 || layout.canvas.height < 1) {
    throw Error(ErrorKind::LayoutInvalid, "canvas must have positive dimensions");
  }
  if (layout.stroke_width < 1) throw Error(ErrorKind::LayoutInvalid, "stroke width must be >= 1");
  constexpr double kMargin = 2.0;
  for (std::size_t i = 0; i < layout.nodes.size(); ++i) {
    const auto& n = layout.nodes[i];
    const Vec2 h = half_extent(n);
    if (!(h.x > layout.stroke_width && h.y > layout.stroke_width)) {
      throw Error(ErrorKind::LayoutInvalid,
                  "node " + std::to_string(i) + " is not larger than the stroke width");
    }
    if (n.center.x - h.x < kMargin || n.center.y - h.y < kMargin ||
        n.center.x + h.x > layout.canvas.width - kMargin ||
        n.center.y + h.y > layout.canvas.height - kMargin) {
      throw Error(ErrorKind::LayoutInvalid, "node " + std::to_string(i) + " leaves the canvas");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& m = layout.nodes[j];
      const Vec2 g = half_extent(m);
      if (std::abs(n.center.x - m.center.x) < h.x + g.x &&
          std::abs(n.center.y - m.center.y) < h.y + g.y) {
        throw Error(ErrorKind::LayoutInvalid,
                    "nodes " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }
  for (const auto& e : layout.edges) {
    if (e.from >= layout.nodes.size() || e.to >= layout.nodes.size() || e.from == e.to) {
      throw Error(ErrorKind::LayoutInvalid, "edge refers to a missing node");
    }
  }
}

}  // namespace

std::string_view to_string(PixelTag tag) {
  switch (tag) {
    case PixelTag::Background: return "background";
    case PixelTag::NodeOutline: return "node_outline";
    case PixelTag::NodeFill: return "node_fill";
    case PixelTag::Edge: return "edge";
    case PixelTag::Text: return "text";
  }
  return "background";
}

std::array<std::size_t, kPixelTagCount> GroundTruth::tag_counts() const {
  std::array<std::size_t, kPixelTagCount> counts{};
  for (auto t : provenance) ++counts[static_cast<std::size_t>(t)];
  return counts;
}

NodeTruth analytic_truth(const NodeSpec& n) {
  NodeTruth t;
  t.role = n.role;
  switch (n.role) {
    case FlowchartRole::Connector:
      t.max_radius = t.min_radius = n.size.x;
      t.area = std::numbers::pi * n.size.x * n.size.x;
      break;
    case FlowchartRole::StartStop:
      t.max_radius = std::max(n.size.x, n.size.y);
      t.min_radius = std::min(n.size.x, n.size.y);
      t.area = std::numbers::pi * n.size.x * n.size.y;
      break;
    case FlowchartRole::Process:
      t.max_radius = std::hypot(n.size.x, n.size.y) / 2.0;
      t.min_radius = std::min(n.size.x, n.size.y) / 2.0;
      t.area = n.size.x * n.size.y;
      break;
    case FlowchartRole::Decision:
      t.max_radius = std::max(n.size.x, n.size.y);
      t.min_radius = rhombus_apothem(n.size.x, n.size.y);
      t.area = 2.0 * n.size.x * n.size.y;
      break;
  }
  return t;
}

RenderedFigure render(const Layout& layout) {
  validate(layout);
  Raster raster(layout.canvas);
  for (const auto& n : layout.nodes) draw_node(raster, n, layout.stroke_width);
  for (const auto& e : layout.edges) draw_edge(raster, layout, e);
  for (const auto& n : layout.nodes) {
    if (n.label) draw_label(raster, n, *n.label, layout.stroke_width);
  }

  GroundTruth truth;
  truth.width = layout.canvas.width;
  truth.height = layout.canvas.height;
  truth.provenance = raster.release();
  for (const auto& n : layout.nodes) {
    truth.nodes.push_back(analytic_truth(n));
    ++truth.vector[n.role];
  }

  std::vector<std::uint8_t> luminance(truth.provenance.size(), 255);
  for (std::size_t i = 0; i < luminance.size(); ++i) {
    if (truth.provenance[i] != PixelTag::Background) luminance[i] = 0;
  }
  return {GrayImage(layout.canvas.width, layout.canvas.height, std::move(luminance)),
          std::move(truth)};
}

NodeSpec random_node(SynthRng& rng, FlowchartRole role, Vec2 center,
                     const CorpusConstraints& constraints) {
  NodeSpec n;
  n.role = role;
  n.center = center;
  switch (role) {
    case FlowchartRole::Connector: {
      const double r = rng.uniform_int(32, 45);
      n.size = {r, r};
      break;
    }
    case FlowchartRole::StartStop:
      n.size = {static_cast<double>(rng.uniform_int(48, 65)),
                static_cast<double>(rng.uniform_int(20, 32))};
      break;
    case FlowchartRole::Process: {
      const double w = rng.uniform_int(90, 130);
      // Safe aspects stay below the ellipse band, which starts near 0.69.
      const double aspect = constraints.safe_shapes ? rng.uniform(0.45, 0.6) : rng.uniform(0.45, 1.0);
      n.size = {w, std::round(w * aspect)};
      break;
    }
    case FlowchartRole::Decision: {
      const double p = rng.uniform_int(50, 65);
      n.size = {p, std::round(p * rng.uniform(0.55, 0.85))};
      break;
    }
  }
  return n;
}

Layout random_layout(SynthRng& rng, const CorpusConstraints& constraints) {
  const int count = rng.uniform_int(constraints.min_nodes, constraints.max_nodes);
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  constexpr int kPad = 10;
  constexpr int kJitter = 6;
  const int cell = constraints.cell_size;

  Layout layout;
  layout.stroke_width = constraints.stroke_width;
  layout.canvas = {cols * cell + 2 * kPad, rows * cell + 2 * kPad};
  for (int i = 0; i < count; ++i) {
    const int row = i / cols;
    const int col = row % 2 == 0 ? i % cols : cols - 1 - i % cols;
    const Vec2 center{kPad + cell * col + cell / 2.0 + rng.uniform_int(-kJitter, kJitter),
                      kPad + cell * row + cell / 2.0 + rng.uniform_int(-kJitter, kJitter)};
    const auto role = kAllRoles[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    NodeSpec node = random_node(rng, role, center, constraints);
    if (constraints.labels) {
      LabelSpec label;
      label.glyphs = rng.uniform_int(1, 4);
      label.seed = (static_cast<std::uint64_t>(rng.next_u32()) << 32) | rng.next_u32();
      node.label = label;
    }
    layout.nodes.push_back(node);
  }
  if (constraints.edges) {
    for (int i = 0; i + 1 < count; ++i) {
      layout.edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1), {}, true});
    }
  }
  return layout;
}

std::vector<Layout> generate_layouts(std::uint64_t seed, std::size_t count,
                                     const CorpusConstraints& constraints) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "corpus size must be at least 1");
  if (constraints.min_nodes < 1 || constraints.max_nodes < constraints.min_nodes) {
    throw Error(ErrorKind::InvalidArgument, "node count range is empty");
  }
  SynthRng rng(seed);
  std::vector<Layout> layouts;
  layouts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) layouts.push_back(random_layout(rng, constraints));
  return layouts;
}

std::vector<RenderedFigure> generate_corpus(std::uint64_t seed, std::size_t count,
                                            const CorpusConstraints& constraints) {
  std::vector<RenderedFigure> out;
  for (const auto& layout : generate_layouts(seed, count, constraints)) out.push_back(render(layout));
  return out;
}

}  // namespace flowsim
