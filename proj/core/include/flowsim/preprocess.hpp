#pragma once

#include <cstddef>

#include "flowsim/raster.hpp"

namespace flowsim {

struct PreprocessConfig {
  /// Components smaller than this (strictly) are treated as text.
  std::size_t text_area_max = 150;
  /// Upper bound on endpoint-erosion passes.
  std::size_t prune_iterations_max = 10000;
  /// Also drop strokes that bridge two loops, keeping only pixels that border
  /// an enclosed background region.
  bool keep_loops_only = true;
};

struct PreprocessReport {
  std::size_t removed_stroke_pixels = 0;
  std::size_t removed_text_components = 0;
  std::size_t skeleton_pixels = 0;

  friend bool operator==(const PreprocessReport&, const PreprocessReport&) = default;
};

struct PreprocessResult {
  BinaryImage image;
  PreprocessReport report;
};

/// Zhang-Suen thinning run to convergence, followed by removal of any
/// remaining 2x2 blocks through simple-point deletion. A component that would
/// disappear within one sub-iteration keeps one pixel.
BinaryImage thin(const BinaryImage& img);

/// True if the image contains a 2x2 all-foreground block.
bool has_square_block(const BinaryImage& img);

/// Flow lines and arrowheads are open curves and erode away from their
/// endpoints; node outlines are closed and survive. Throws NotThinned when
/// the input still has 2x2 blocks.
BinaryImage remove_open_strokes(const BinaryImage& img, const PreprocessConfig& cfg = {});

PreprocessResult remove_text(const BinaryImage& img, const PreprocessConfig& cfg = {});

/// thin -> remove_open_strokes -> remove_text, in that order.
PreprocessResult preprocess(const BinaryImage& img, const PreprocessConfig& cfg = {});

/// Background regions (4-connected) that cannot reach the image border.
BinaryImage enclosed_background(const BinaryImage& img);

}  // namespace flowsim
