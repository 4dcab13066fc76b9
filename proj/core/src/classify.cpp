#include "flowsim/classify.hpp"

#include <cmath>
#include <deque>
#include <numbers>

#include "flowsim/error.hpp"

namespace flowsim {

std::string_view to_string(ShapeClass c) {
  switch (c) {
    case ShapeClass::Circle: return "circle";
    case ShapeClass::Ellipse: return "ellipse";
    case ShapeClass::Rectangle: return "rectangle";
    case ShapeClass::Diamond: return "diamond";
    case ShapeClass::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(FlowchartRole r) {
  switch (r) {
    case FlowchartRole::Connector: return "connector";
    case FlowchartRole::StartStop: return "start_stop";
    case FlowchartRole::Decision: return "decision";
    case FlowchartRole::Process: return "process";
  }
  return "process";
}

std::optional<FlowchartRole> role_from_string(std::string_view name) {
  for (auto r : kAllRoles) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

int& FeatureVector::operator[](FlowchartRole role) {
  switch (role) {
    case FlowchartRole::Connector: return connector;
    case FlowchartRole::StartStop: return start_stop;
    case FlowchartRole::Decision: return decision;
    case FlowchartRole::Process: return process;
  }
  return process;
}

int FeatureVector::operator[](FlowchartRole role) const {
  return const_cast<FeatureVector&>(*this)[role];
}

void validate(const ClassifierConfig& cfg) {
  if (!(cfg.ratio_low > 0.0 && cfg.ratio_low < 1.0 && cfg.ratio_high > 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "classifier band must satisfy 0 < low < 1 < high");
  }
  if (!(cfg.circle_tolerance > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "circle_tolerance must be positive");
  }
}

ConnectedComponent fill_outline(const ConnectedComponent& outline, const BinaryImage& img) {
  (void)img;
  const BoundingBox& box = outline.bounding_box;
  const int mw = box.width() + 2;
  const int mh = box.height() + 2;
  BinaryImage mask(mw, mh);
  for (const auto& p : outline.pixels) mask.set(p.x - box.min_x + 1, p.y - box.min_y + 1, true);

  // 4-connected flood from the padded frame; an 8-connected outline blocks it.
  BinaryImage outside(mw, mh);
  std::deque<Point> queue{{0, 0}};
  outside.set(0, 0, true);
  while (!queue.empty()) {
    const Point p = queue.front();
    queue.pop_front();
    for (const auto& [dx, dy] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
      const Point n{p.x + dx, p.y + dy};
      if (!mask.in_bounds(n.x, n.y) || mask.at(n) || outside.at(n)) continue;
      outside.set(n, true);
      queue.push_back(n);
    }
  }

  ConnectedComponent filled;
  filled.label = outline.label;
  filled.bounding_box = box;
  bool enclosed_any = false;
  for (int y = 1; y < mh - 1; ++y) {
    for (int x = 1; x < mw - 1; ++x) {
      if (outside.at(x, y)) continue;
      if (!mask.at(x, y)) enclosed_any = true;
      filled.pixels.push_back({x - 1 + box.min_x, y - 1 + box.min_y});
    }
  }
  if (!enclosed_any) {
    throw Error(ErrorKind::NotClosed,
                "component " + std::to_string(outline.label) + " encloses no interior");
  }
  return filled;
}

ShapeRatios compute_ratios(const ShapeMeasurement& m) {
  const double a = m.max_radius;
  const double b = m.min_radius;
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorKind::DegenerateMeasurement, "radial distances must be positive");
  }
  const double c = static_cast<double>(m.area);
  ShapeRatios r;
  r.circle_score = a - b;
  r.relative_circle_score = (a - b) / a;
  r.ellipse_ratio = c / (std::numbers::pi * a * b);
  const double spread = a * a - b * b;
  if (spread > 0.0) {
    const double root = std::sqrt(spread);
    r.rectangle_ratio = c / (4.0 * b * root);
    r.diamond_ratio = c * root / (2.0 * a * a * b);
  }
  return r;
}

ShapeClass classify(const ShapeRatios& r, const ClassifierConfig& cfg) {
  const auto in_band = [&](double v) { return v > cfg.ratio_low && v < cfg.ratio_high; };
  const auto candidate = [&](const std::optional<double>& v) { return v && in_band(*v); };

  const double circle_score = cfg.relative_circle ? r.relative_circle_score : r.circle_score;
  if (circle_score < cfg.circle_tolerance) return ShapeClass::Circle;

  if (cfg.strict_order) {
    if (in_band(r.ellipse_ratio)) return ShapeClass::Ellipse;
    if (candidate(r.rectangle_ratio)) return ShapeClass::Rectangle;
    if (candidate(r.diamond_ratio)) return ShapeClass::Diamond;
    return ShapeClass::Unknown;
  }

  ShapeClass best = ShapeClass::Unknown;
  double best_distance = 0.0;
  auto consider = [&](const std::optional<double>& v, ShapeClass c) {
    if (!candidate(v)) return;
    const double distance = std::abs(*v - 1.0);
    if (best == ShapeClass::Unknown || distance < best_distance) {
      best = c;
      best_distance = distance;
    }
  };
  consider(r.ellipse_ratio, ShapeClass::Ellipse);
  consider(r.rectangle_ratio, ShapeClass::Rectangle);
  consider(r.diamond_ratio, ShapeClass::Diamond);
  return best;
}

FlowchartRole role_of(ShapeClass c) {
  switch (c) {
    case ShapeClass::Circle: return FlowchartRole::Connector;
    case ShapeClass::Ellipse: return FlowchartRole::StartStop;
    case ShapeClass::Rectangle: return FlowchartRole::Process;
    case ShapeClass::Diamond: return FlowchartRole::Decision;
    case ShapeClass::Unknown: break;
  }
  throw Error(ErrorKind::UnclassifiedShape, "unknown shapes have no flowchart role");
}

FeatureExtraction extract_feature_vector(const BinaryImage& img, const ClassifierConfig& cfg) {
  validate(cfg);
  FeatureExtraction out;
  for (const auto& component : label_components(img)) {
    ShapeDiagnostic diag;
    diag.label = component.label;
    try {
      const auto filled = fill_outline(component, img);
      diag.measurement = measure_shape(filled, img);
      diag.ratios = compute_ratios(*diag.measurement);
      diag.shape_class = classify(*diag.ratios, cfg);
    } catch (const Error& e) {
      diag.note = e.what();
    }
    if (diag.shape_class != ShapeClass::Unknown) {
      diag.role = role_of(diag.shape_class);
      ++out.vector[*diag.role];
    }
    out.shapes.push_back(std::move(diag));
  }
  return out;
}

}  // namespace flowsim
