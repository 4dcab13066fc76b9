#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flowsim/classify.hpp"
#include "flowsim/raster.hpp"

namespace flowsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Simulated text: a row of small filled blobs inside the node.
struct LabelSpec {
  int glyphs = 3;
  std::uint64_t seed = 0;

  friend bool operator==(const LabelSpec&, const LabelSpec&) = default;
};

/// `size` depends on the role:
///   Connector  - size.x is the circle radius
///   StartStop  - ellipse semi-axes (x, y)
///   Process    - rectangle width and height
///   Decision   - rhombus half-diagonals (x, y)
struct NodeSpec {
  FlowchartRole role = FlowchartRole::Process;
  Vec2 center;
  Vec2 size;
  bool filled = false;
  std::optional<LabelSpec> label;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

/// A flow line from node `from` to node `to`, routed through `waypoints`.
/// Endpoints are placed on the node outlines automatically.
struct EdgeSpec {
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<Vec2> waypoints;
  bool arrowhead = true;

  friend bool operator==(const EdgeSpec&, const EdgeSpec&) = default;
};

struct Canvas {
  int width = 0;
  int height = 0;

  friend bool operator==(const Canvas&, const Canvas&) = default;
};

struct Layout {
  Canvas canvas;
  int stroke_width = 2;
  std::vector<NodeSpec> nodes;
  std::vector<EdgeSpec> edges;

  friend bool operator==(const Layout&, const Layout&) = default;
};

enum class PixelTag : std::uint8_t { Background, NodeOutline, NodeFill, Edge, Text };
inline constexpr std::size_t kPixelTagCount = 5;

std::string_view to_string(PixelTag tag);

/// Analytic radial statistics of the continuous shape (not the raster).
struct NodeTruth {
  FlowchartRole role = FlowchartRole::Process;
  double max_radius = 0.0;
  double min_radius = 0.0;
  double area = 0.0;
};

struct GroundTruth {
  FeatureVector vector;
  std::vector<NodeTruth> nodes;
  int width = 0;
  int height = 0;
  /// What each pixel was drawn as; edges overwrite outline pixels they cross.
  std::vector<PixelTag> provenance;

  PixelTag tag_at(int x, int y) const {
    return provenance[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
  }
  std::array<std::size_t, kPixelTagCount> tag_counts() const;
};

struct RenderedFigure {
  GrayImage image;
  GroundTruth truth;
};

NodeTruth analytic_truth(const NodeSpec& node);

/// Ink is 0 on a 255 background. Pixel (x, y) is inked when its centre
/// (x + 0.5, y + 0.5) falls inside the primitive. Throws LayoutInvalid for
/// nodes outside the canvas (2 px margin), overlapping node boxes, or bad
/// edge indices.
RenderedFigure render(const Layout& layout);

/// Deterministic generator for corpora: a 64-bit linear congruential
/// generator (multiplier 6364136223846793005, increment
/// 1442695040888963407, modulus 2^64), with outputs taken from the high
/// 32 bits. Range mapping is done here rather than through <random>
/// distributions so the stream is identical across standard libraries.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(engine_() >> 32); }
  /// Uniform in [0, 1).
  double uniform() { return next_u32() / 4294967296.0; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>((static_cast<std::uint64_t>(next_u32()) * span) >> 32);
  }

 private:
  std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL,
                                  1442695040888963407ULL, 0ULL>
      engine_;
};

struct CorpusConstraints {
  int min_nodes = 3;
  int max_nodes = 15;
  /// Keep rectangles out of the aspect band where the ellipse test fires
  /// first (short/long side ratio roughly 0.69-0.89, which contains 3:4).
  bool safe_shapes = true;
  bool edges = true;
  bool labels = true;
  int stroke_width = 2;
  int cell_size = 180;
};

/// Random node of the given role centred at `center`. Every size keeps the
/// smallest shape dimension at 40 px or more and the node inside a
/// constraints.cell_size cell with room for arrows.
NodeSpec random_node(SynthRng& rng, FlowchartRole role, Vec2 center,
                     const CorpusConstraints& constraints = {});

/// Nodes on a grid, chained in boustrophedon order by straight arrows so
/// that flow lines never cross or enclose a region.
Layout random_layout(SynthRng& rng, const CorpusConstraints& constraints = {});

std::vector<Layout> generate_layouts(std::uint64_t seed, std::size_t count,
                                     const CorpusConstraints& constraints = {});
std::vector<RenderedFigure> generate_corpus(std::uint64_t seed, std::size_t count,
                                            const CorpusConstraints& constraints = {});

/// Layout files: see docs/layout-format.md.
Layout layout_from_json(const std::string& text);
std::string layout_to_json(const Layout& layout);
/// Vector, per-node analytics and a provenance summary.
std::string truth_to_json(const GroundTruth& truth);

}  // namespace flowsim
