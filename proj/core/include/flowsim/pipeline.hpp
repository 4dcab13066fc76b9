#pragma once

#include <filesystem>

#include "flowsim/classify.hpp"
#include "flowsim/contour.hpp"
#include "flowsim/preprocess.hpp"
#include "flowsim/raster.hpp"

namespace flowsim {

/// Everything that turns a figure image into a feature vector. Database
/// figures and queries must go through the same configuration to be
/// comparable.
struct PipelineConfig {
  ThresholdMode threshold = OtsuThreshold{};
  /// Invert light-on-dark input before binarising.
  bool invert = false;
  /// Skip Zhang-Suen when the input is already a one-pixel skeleton.
  bool thin = true;
  /// Localise shapes on Canny edges of the grayscale figure instead of the
  /// binarised ink.
  bool from_edges = false;
  PreprocessConfig preprocess;
  ClassifierConfig classifier;
  CannyConfig canny;
};

/// Intermediate images are kept so they can be dumped for inspection.
struct FigureAnalysis {
  BinaryImage binary;
  BinaryImage skeleton;
  BinaryImage strokes_removed;
  BinaryImage outlines;
  PreprocessReport report;
  FeatureExtraction features;
};

FigureAnalysis analyze_figure(const GrayImage& img, const PipelineConfig& cfg = {});

/// Removes components lying inside the filled interior of another
/// component. Canny traces both sides of an ink stroke, which yields an
/// inner loop nested in each outer one.
BinaryImage drop_nested_loops(const BinaryImage& img);

/// Writes binary.pgm, skeleton.pgm, strokes_removed.pgm and outlines.pgm.
void dump_stages(const FigureAnalysis& analysis, const std::filesystem::path& dir);

}  // namespace flowsim
