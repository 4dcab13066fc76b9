#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowsim/contour.hpp"
#include "flowsim/raster.hpp"

namespace flowsim {

/// Geometric scores of one measured shape. Each ratio is 1 for the ideal
/// continuous shape it tests for:
///   circle_score    = A - B
///   ellipse_ratio   = C / (pi * A * B)
///   rectangle_ratio = C / (4 * B * sqrt(A^2 - B^2))
///   diamond_ratio   = C * sqrt(A^2 - B^2) / (2 * A^2 * B)
/// The last two are undefined when A == B and then hold no value.
struct ShapeRatios {
  double circle_score = 0.0;
  /// (A - B) / A, used only by the relative circle test.
  double relative_circle_score = 0.0;
  double ellipse_ratio = 0.0;
  std::optional<double> rectangle_ratio;
  std::optional<double> diamond_ratio;
};

enum class ShapeClass { Circle, Ellipse, Rectangle, Diamond, Unknown };
enum class FlowchartRole { Connector, StartStop, Decision, Process };

inline constexpr std::array<FlowchartRole, 4> kAllRoles = {
    FlowchartRole::Connector, FlowchartRole::StartStop, FlowchartRole::Decision,
    FlowchartRole::Process};

std::string_view to_string(ShapeClass c);
std::string_view to_string(FlowchartRole r);
/// Accepts the snake_case names used in JSON ("connector", "start_stop", ...).
std::optional<FlowchartRole> role_from_string(std::string_view name);

/// One row of the metadata table: how many nodes of each role a figure has.
struct FeatureVector {
  int connector = 0;
  int start_stop = 0;
  int decision = 0;
  int process = 0;

  int total() const { return connector + start_stop + decision + process; }
  bool is_zero() const { return total() == 0; }
  int& operator[](FlowchartRole role);
  int operator[](FlowchartRole role) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct ClassifierConfig {
  /// Absolute pixel tolerance on A - B for circles.
  double circle_tolerance = 10.0;
  double ratio_low = 0.95;
  double ratio_high = 1.05;
  /// When false, the circle test runs first and the remaining classes are
  /// decided by whichever in-band ratio lies closest to 1.
  bool strict_order = true;
  /// Use (A - B) / A < circle_tolerance instead of the absolute test; the
  /// tolerance is then a fraction (0.1 is a sensible value).
  bool relative_circle = false;
};

void validate(const ClassifierConfig& cfg);

/// Fills the interior of a closed outline: every pixel not reachable from
/// outside the component's bounding box. Throws NotClosed if nothing is
/// enclosed.
ConnectedComponent fill_outline(const ConnectedComponent& outline, const BinaryImage& img);

/// Throws DegenerateMeasurement if A or B is zero.
ShapeRatios compute_ratios(const ShapeMeasurement& m);

ShapeClass classify(const ShapeRatios& r, const ClassifierConfig& cfg = {});

/// Circle -> Connector, Ellipse -> StartStop, Rectangle -> Process,
/// Diamond -> Decision. Throws UnclassifiedShape for Unknown.
FlowchartRole role_of(ShapeClass c);

struct ShapeDiagnostic {
  int label = 0;
  std::optional<ShapeMeasurement> measurement;
  std::optional<ShapeRatios> ratios;
  ShapeClass shape_class = ShapeClass::Unknown;
  std::optional<FlowchartRole> role;
  /// Why the shape could not be measured, empty otherwise.
  std::string note;
};

struct FeatureExtraction {
  FeatureVector vector;
  std::vector<ShapeDiagnostic> shapes;  // ordered by component label
};

/// Runs fill -> measure -> ratios -> classify -> role for every component of
/// a preprocessed (outline-only) image. Unknown shapes appear in `shapes`
/// but not in `vector`.
FeatureExtraction extract_feature_vector(const BinaryImage& img, const ClassifierConfig& cfg = {});

}  // namespace flowsim
