#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flowsim/classify.hpp"
#include "flowsim/error.hpp"
#include "flowsim/pipeline.hpp"
#include "flowsim/synth.hpp"
#include "test_util.hpp"

namespace flowsim {
namespace {

constexpr double kPi = std::numbers::pi;

ShapeMeasurement measurement(double a, double b, std::size_t c) {
  ShapeMeasurement m;
  m.max_radius = a;
  m.min_radius = b;
  m.area = c;
  return m;
}

NodeSpec node(FlowchartRole role, Vec2 center, Vec2 size) {
  NodeSpec n;
  n.role = role;
  n.center = center;
  n.size = size;
  return n;
}

TEST(FillOutline, RectangleOutline) {
  const auto img = test::rect_outline(20, 20, 3, 4, 10, 6);
  const auto filled = fill_outline(label_components(img).front(), img);
  EXPECT_EQ(filled.area(), 60u);
  EXPECT_EQ(filled.pixels.front(), (Point{3, 4}));
}

TEST(FillOutline, SinglePixelIsNotClosed) {
  BinaryImage img(5, 5);
  img.set(2, 2, true);
  try {
    fill_outline(label_components(img).front(), img);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotClosed);
  }
}

TEST(FillOutline, IgnoresOtherComponents) {
  // A smaller loop inside a larger one: the outer fill still covers the
  // whole interior.
  auto img = test::rect_outline(30, 30, 2, 2, 20, 20);
  const auto inner = test::rect_outline(30, 30, 8, 8, 6, 6);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 30; ++x) {
      if (inner.at(x, y)) img.set(x, y, true);
    }
  }
  const auto comps = label_components(img);
  EXPECT_EQ(fill_outline(comps.front(), img).area(), 400u);
}

TEST(FillOutline, RenderedDiamondArea) {
  for (Vec2 pq : {Vec2{50, 30}, Vec2{60, 45}, Vec2{40, 40}}) {
    Layout layout;
    layout.canvas = {200, 200};
    layout.nodes = {node(FlowchartRole::Decision, {100, 100}, pq)};
    const auto img = binarize(render(layout).image);
    const auto comps = label_components(img);
    ASSERT_EQ(comps.size(), 1u);
    const double expected = 2.0 * pq.x * pq.y;
    EXPECT_NEAR(static_cast<double>(fill_outline(comps.front(), img).area()), expected,
                0.02 * expected);
  }
}

TEST(Ratios, AnalyticEllipse) {
  // C is an integer pixel count, so compare against the rounded analytic area.
  const double c = std::round(kPi * 1800.0);
  const auto r = compute_ratios(measurement(60, 30, static_cast<std::size_t>(c)));
  EXPECT_NEAR(r.ellipse_ratio, c / (kPi * 1800.0), 1e-12);
  EXPECT_NEAR(r.ellipse_ratio, 1.0, 1e-4);
}

TEST(Ratios, AnalyticRectangle) {
  const auto r = compute_ratios(measurement(std::sqrt(2000.0), 20, 3200));
  ASSERT_TRUE(r.rectangle_ratio);
  EXPECT_NEAR(*r.rectangle_ratio, 1.0, 1e-12);
  EXPECT_NEAR(r.ellipse_ratio, 3200.0 / (kPi * std::sqrt(2000.0) * 20.0), 1e-12);
  EXPECT_NEAR(r.ellipse_ratio, 1.138, 1e-3);
}

TEST(Ratios, AnalyticRhombus) {
  const auto r = compute_ratios(measurement(50, 1500.0 / std::sqrt(3400.0), 3000));
  ASSERT_TRUE(r.diamond_ratio);
  EXPECT_NEAR(*r.diamond_ratio, 1.0, 1e-12);
}

TEST(Ratios, CircleHasNoRectangleOrDiamondRatio) {
  const auto r = compute_ratios(measurement(20, 20, 1257));
  EXPECT_FALSE(r.rectangle_ratio);
  EXPECT_FALSE(r.diamond_ratio);
  EXPECT_DOUBLE_EQ(r.circle_score, 0.0);
}

TEST(Ratios, DegenerateMeasurement) {
  EXPECT_THROW(compute_ratios(measurement(0, 0, 10)), Error);
  EXPECT_THROW(compute_ratios(measurement(10, 0, 10)), Error);
}

TEST(Classify, Circle) {
  const auto r = compute_ratios(measurement(50.3, 49.7, 7854));
  EXPECT_NEAR(r.circle_score, 0.6, 1e-12);
  EXPECT_EQ(classify(r), ShapeClass::Circle);
}

TEST(Classify, RectangleFallsThroughEllipse) {
  EXPECT_EQ(classify(compute_ratios(measurement(std::sqrt(2000.0), 20, 3200))), ShapeClass::Rectangle);
}

TEST(Classify, ThreeByFourRectangleReadsAsEllipse) {
  const auto r = compute_ratios(measurement(50, 30, 4800));
  EXPECT_NEAR(r.ellipse_ratio, 4800.0 / (kPi * 1500.0), 1e-12);
  ASSERT_TRUE(r.rectangle_ratio);
  EXPECT_NEAR(*r.rectangle_ratio, 1.0, 1e-12);
  EXPECT_EQ(classify(r), ShapeClass::Ellipse);

  ClassifierConfig closest;
  closest.strict_order = false;
  EXPECT_EQ(classify(r, closest), ShapeClass::Rectangle);
}

TEST(Classify, Diamond) {
  EXPECT_EQ(classify(compute_ratios(measurement(50, 1500.0 / std::sqrt(3400.0), 3000))),
            ShapeClass::Diamond);
}

TEST(Classify, OpenIntervalBounds) {
  ShapeRatios r;
  r.circle_score = 50;
  r.ellipse_ratio = 1.05;
  EXPECT_EQ(classify(r), ShapeClass::Unknown);
  r.ellipse_ratio = 0.95;
  EXPECT_EQ(classify(r), ShapeClass::Unknown);
  r.ellipse_ratio = 0.9501;
  EXPECT_EQ(classify(r), ShapeClass::Ellipse);
  r.circle_score = 10;
  r.ellipse_ratio = 2;
  EXPECT_EQ(classify(r), ShapeClass::Unknown);
  r.circle_score = 9.999;
  EXPECT_EQ(classify(r), ShapeClass::Circle);
}

TEST(Classify, RelativeCircleTest) {
  // Large ellipse-like shape whose absolute A - B exceeds 10 but is close in
  // relative terms.
  auto m = measurement(200, 185, static_cast<std::size_t>(kPi * 200 * 185));
  ClassifierConfig rel;
  rel.relative_circle = true;
  rel.circle_tolerance = 0.1;
  EXPECT_EQ(classify(compute_ratios(m), rel), ShapeClass::Circle);
  EXPECT_EQ(classify(compute_ratios(m)), ShapeClass::Ellipse);
}

TEST(Classify, RejectsBadConfig) {
  ClassifierConfig cfg;
  cfg.ratio_low = 1.1;
  cfg.ratio_high = 1.0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(Roles, Mapping) {
  EXPECT_EQ(role_of(ShapeClass::Circle), FlowchartRole::Connector);
  EXPECT_EQ(role_of(ShapeClass::Ellipse), FlowchartRole::StartStop);
  EXPECT_EQ(role_of(ShapeClass::Rectangle), FlowchartRole::Process);
  EXPECT_EQ(role_of(ShapeClass::Diamond), FlowchartRole::Decision);
  try {
    role_of(ShapeClass::Unknown);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnclassifiedShape);
  }
}

TEST(Roles, NamesRoundTrip) {
  for (auto role : kAllRoles) EXPECT_EQ(role_from_string(to_string(role)), role);
  EXPECT_FALSE(role_from_string("terminal"));
}

TEST(FeatureVector, EmptyImage) {
  const auto fe = extract_feature_vector(BinaryImage(20, 20));
  EXPECT_TRUE(fe.vector.is_zero());
  EXPECT_TRUE(fe.shapes.empty());
}

TEST(FeatureVector, UnknownShapesStayOutOfTheVector) {
  // An open stroke cannot be filled: it shows up as a diagnostic only.
  BinaryImage img(40, 10);
  for (int x = 2; x < 30; ++x) img.set(x, 4, true);
  const auto fe = extract_feature_vector(img);
  EXPECT_TRUE(fe.vector.is_zero());
  ASSERT_EQ(fe.shapes.size(), 1u);
  EXPECT_EQ(fe.shapes[0].shape_class, ShapeClass::Unknown);
  EXPECT_FALSE(fe.shapes[0].note.empty());
}

TEST(FeatureVector, NineNodeFlowchart) {
  Layout layout;
  layout.canvas = {740, 560};
  const std::vector<std::pair<FlowchartRole, Vec2>> spec = {
      {FlowchartRole::StartStop, {55, 26}}, {FlowchartRole::Process, {110, 55}},
      {FlowchartRole::Decision, {55, 40}},  {FlowchartRole::Process, {100, 50}},
      {FlowchartRole::Process, {120, 60}},  {FlowchartRole::Decision, {60, 36}},
      {FlowchartRole::Process, {96, 48}},   {FlowchartRole::Connector, {36, 36}},
      {FlowchartRole::StartStop, {60, 28}}};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Vec2 center{130.0 + 240.0 * static_cast<double>(i % 3),
                      95.0 + 185.0 * static_cast<double>(i / 3)};
    auto n = node(spec[i].first, center, spec[i].second);
    n.label = LabelSpec{3, i + 100};
    layout.nodes.push_back(n);
    if (i > 0) layout.edges.push_back({i - 1, i, {}, true});
  }
  const auto fig = render(layout);
  const auto fe = analyze_figure(fig.image).features;
  EXPECT_EQ(fe.vector.connector, 1);
  EXPECT_EQ(fe.vector.start_stop, 2);
  EXPECT_EQ(fe.vector.decision, 2);
  EXPECT_EQ(fe.vector.process, 4);
  EXPECT_EQ(fe.vector, fig.truth.vector);
}

TEST(FeatureVector, ElevenActivities) {
  SynthRng rng(1);
  Layout layout;
  layout.canvas = {4 * 180 + 20, 3 * 180 + 20};
  for (int i = 0; i < 11; ++i) {
    const Vec2 center{10 + 180 * (i % 4) + 90.0, 10 + 180 * (i / 4) + 90.0};
    layout.nodes.push_back(random_node(rng, kAllRoles[static_cast<std::size_t>(i % 4)], center));
  }
  const auto fe = analyze_figure(render(layout).image).features;
  EXPECT_EQ(fe.vector.total(), 11);
}

}  // namespace
}  // namespace flowsim
