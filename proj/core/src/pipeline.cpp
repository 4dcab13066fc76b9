#include "flowsim/pipeline.hpp"

#include <algorithm>
#include <system_error>

#include "flowsim/error.hpp"
#include "flowsim/image_io.hpp"

namespace flowsim {

FigureAnalysis analyze_figure(const GrayImage& img, const PipelineConfig& cfg) {
  const GrayImage source = cfg.invert ? invert(img) : img;
  BinaryImage binary = cfg.from_edges ? canny_edges(source, cfg.canny)
                                      : binarize(source, cfg.threshold);
  BinaryImage skeleton = cfg.thin ? thin(binary) : binary;
  BinaryImage strokes_removed = remove_open_strokes(skeleton, cfg.preprocess);
  PreprocessResult cleaned = remove_text(strokes_removed, cfg.preprocess);
  if (cfg.from_edges) cleaned.image = drop_nested_loops(cleaned.image);

  cleaned.report.skeleton_pixels = skeleton.foreground_count();
  cleaned.report.removed_stroke_pixels =
      skeleton.foreground_count() - strokes_removed.foreground_count();

  FeatureExtraction features = extract_feature_vector(cleaned.image, cfg.classifier);
  return FigureAnalysis{std::move(binary),         std::move(skeleton),
                        std::move(strokes_removed), std::move(cleaned.image),
                        cleaned.report,             std::move(features)};
}

BinaryImage drop_nested_loops(const BinaryImage& img) {
  const auto components = label_components(img);
  std::vector<ConnectedComponent> filled;
  filled.reserve(components.size());
  for (const auto& c : components) {
    try {
      filled.push_back(fill_outline(c, img));
    } catch (const Error&) {
      filled.push_back(c);
    }
  }

  const auto raster_less = [](const Point& a, const Point& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  };
  BinaryImage out = img;
  for (std::size_t j = 0; j < components.size(); ++j) {
    const Point probe = components[j].pixels.front();
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (i == j || filled[j].area() >= filled[i].area()) continue;
      if (!filled[i].bounding_box.contains(probe)) continue;
      if (std::binary_search(filled[i].pixels.begin(), filled[i].pixels.end(), probe, raster_less)) {
        for (const auto& p : components[j].pixels) out.set(p, false);
        break;
      }
    }
  }
  return out;
}

void dump_stages(const FigureAnalysis& analysis, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  write_pgm(to_gray(analysis.binary), dir / "binary.pgm");
  write_pgm(to_gray(analysis.skeleton), dir / "skeleton.pgm");
  write_pgm(to_gray(analysis.strokes_removed), dir / "strokes_removed.pgm");
  write_pgm(to_gray(analysis.outlines), dir / "outlines.pgm");
}

}  // namespace flowsim
