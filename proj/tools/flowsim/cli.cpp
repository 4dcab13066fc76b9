#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowsim/error.hpp"
#include "flowsim/image_io.hpp"
#include "flowsim/index.hpp"
#include "flowsim/pipeline.hpp"
#include "flowsim/search.hpp"
#include "flowsim/synth.hpp"

namespace flowsim::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct PipelineFlags {
  std::size_t text_area_max = PreprocessConfig{}.text_area_max;
  bool no_thin = false;
  bool otsu = false;
  std::optional<int> fixed_threshold;
  bool invert = false;
  bool from_edges = false;
  bool relative_circle = false;
  bool strict_order = ClassifierConfig{}.strict_order;

  PipelineConfig config() const {
    PipelineConfig cfg;
    if (fixed_threshold) cfg.threshold = FixedThreshold{*fixed_threshold};
    cfg.invert = invert;
    cfg.thin = !no_thin;
    cfg.from_edges = from_edges;
    cfg.preprocess.text_area_max = text_area_max;
    cfg.classifier.strict_order = strict_order;
    if (relative_circle) {
      cfg.classifier.relative_circle = true;
      cfg.classifier.circle_tolerance = 0.1;
    }
    return cfg;
  }
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--text-area-max", f.text_area_max,
                  "Components with fewer pixels are treated as text")
      ->capture_default_str();
  cmd->add_flag("--no-thin", f.no_thin, "Input is already a one-pixel skeleton");
  auto* otsu = cmd->add_flag("--otsu", f.otsu, "Otsu threshold (default)");
  auto* fixed = cmd->add_option("--fixed-threshold", f.fixed_threshold,
                                "Ink is luminance below this value");
  otsu->excludes(fixed);
  cmd->add_flag("--invert", f.invert, "Input is light ink on a dark background");
  cmd->add_flag("--from-edges", f.from_edges, "Locate shapes on Canny edges");
  cmd->add_flag("--relative-circle", f.relative_circle,
                "Circle test on (A-B)/A with tolerance 0.1 instead of A-B < 10");
  cmd->add_option("--strict-order", f.strict_order,
                  "First matching ratio wins (false: closest to 1)")
      ->capture_default_str();
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

ordered_json vector_json(const FeatureVector& v) {
  return {{"connector", v.connector},
          {"start_stop", v.start_stop},
          {"decision", v.decision},
          {"process", v.process}};
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return kUsage;
    case ErrorKind::MalformedImage:
    case ErrorKind::UnsupportedFormat:
    case ErrorKind::MalformedIndex:
    case ErrorKind::MalformedReport:
    case ErrorKind::DuplicatePath:
    case ErrorKind::NotFound:
    case ErrorKind::IoFailure:
    case ErrorKind::LayoutInvalid:
      return kDataError;
    default:
      return kInternal;
  }
}

struct IndexArgs {
  fs::path figures;
  fs::path out;
  std::optional<fs::path> preprocessed_dir;
  bool verbose = false;
};

int cmd_index(const IndexArgs& a, const PipelineFlags& flags, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  FigureStore store;
  store.preprocessed_dir = a.preprocessed_dir;
  std::vector<std::string> warnings;
  const auto db = index_directory(a.figures, flags.config(), store, 0, &warnings);
  save_index(db, a.out);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  if (a.verbose) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    err << "indexed " << db.size() << " figures in " << std::fixed << std::setprecision(3)
        << dt.count() << " s\n";
  }
  ordered_json summary;
  summary["indexed"] = db.size();
  summary["out"] = a.out.generic_string();
  out << summary.dump(2) << "\n";
  return kOk;
}

struct QueryArgs {
  fs::path index;
  fs::path image;
  std::optional<std::size_t> top_k;
  double threshold = SearchConfig{}.threshold;
  std::string format = "json";
};

int cmd_query(const QueryArgs& a, const PipelineFlags& flags, std::ostream& out, std::ostream& err) {
  SearchConfig search;
  search.threshold = a.threshold;
  search.top_k = a.top_k;
  validate(search);
  const auto db = load_index(a.index);
  const auto report = query(db, read_image(a.image), flags.config(), search);
  if (report.empty_query) err << "warning: EmptyQuery: no shapes recognised in " << a.image.string() << "\n";
  out << (a.format == "csv" ? report_to_csv(report) : report_to_json(report));
  return kOk;
}

struct ShapesArgs {
  fs::path image;
  std::optional<fs::path> dump_stages;
};

int cmd_shapes(const ShapesArgs& a, const PipelineFlags& flags, std::ostream& out) {
  const auto analysis = analyze_figure(read_image(a.image), flags.config());
  if (a.dump_stages) dump_stages(analysis, *a.dump_stages);

  ordered_json doc;
  doc["shapes"] = ordered_json::array();
  for (const auto& s : analysis.features.shapes) {
    ordered_json shape;
    shape["label"] = s.label;
    if (s.measurement) {
      const auto& m = *s.measurement;
      shape["centroid"] = ordered_json::array({m.centroid.x, m.centroid.y});
      shape["A"] = m.max_radius;
      shape["B"] = m.min_radius;
      shape["C"] = m.area;
      shape["chain_length"] = m.boundary.moves.size();
    }
    shape["class"] = std::string(to_string(s.shape_class));
    shape["role"] = s.role ? ordered_json(std::string(to_string(*s.role))) : ordered_json(nullptr);
    if (!s.note.empty()) shape["note"] = s.note;
    doc["shapes"].push_back(std::move(shape));
  }
  doc["vector"] = vector_json(analysis.features.vector);
  doc["preprocess"] = {{"skeleton_pixels", analysis.report.skeleton_pixels},
                       {"removed_stroke_pixels", analysis.report.removed_stroke_pixels},
                       {"removed_text_components", analysis.report.removed_text_components}};
  out << doc.dump(2) << "\n";
  return kOk;
}

struct SynthArgs {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::optional<fs::path> spec;
  fs::path out;
  bool unsafe_shapes = false;
};

std::string figure_name(std::size_t id, std::size_t count) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(count).size());
  std::string s = std::to_string(id);
  return std::string(width - std::min(width, s.size()), '0') + s;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.spec) {
    const auto fig = render(layout_from_json(read_text(*a.spec)));
    write_pgm(fig.image, a.out);
    out << truth_to_json(fig.truth);
    return kOk;
  }
  if (!a.seed || !a.count) {
    throw Error(ErrorKind::InvalidArgument, "synth needs either --spec or both --seed and --count");
  }
  CorpusConstraints constraints;
  constraints.safe_shapes = !a.unsafe_shapes;
  const auto corpus = generate_corpus(*a.seed, *a.count, constraints);
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + a.out.string() + ": " + ec.message());

  ordered_json listing = ordered_json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto name = figure_name(i + 1, corpus.size());
    write_pgm(corpus[i].image, a.out / (name + ".pgm"));
    write_text(a.out / (name + ".truth.json"), truth_to_json(corpus[i].truth));
    ordered_json entry;
    entry["image"] = (a.out / (name + ".pgm")).generic_string();
    entry["vector"] = vector_json(corpus[i].truth.vector);
    listing.push_back(std::move(entry));
  }
  out << listing.dump(2) << "\n";
  return kOk;
}

struct ReportArgs {
  fs::path results;
  fs::path out;
};

int cmd_report(const ReportArgs& a) {
  const auto sims = similarities_from_report_json(read_text(a.results));
  write_text(a.out, rank_curve_csv(sims));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flowchart figure similarity search", "flowsim"};
  app.require_subcommand(1);

  PipelineFlags flags;

  IndexArgs index_args;
  auto* index = app.add_subcommand("index", "Build an index from a directory of figures");
  index->add_option("--figures", index_args.figures, "Directory of .pgm/.png figures")->required();
  index->add_option("--out", index_args.out, "Index file (JSON lines)")->required();
  index->add_option("--preprocessed-dir", index_args.preprocessed_dir,
                    "Also store preprocessed outlines here");
  index->add_flag("--verbose", index_args.verbose, "Timing on standard error");
  add_pipeline_flags(index, flags);

  QueryArgs query_args;
  auto* query_cmd = app.add_subcommand("query", "Rank indexed figures against a query figure");
  query_cmd->add_option("--index", query_args.index, "Index file")->required();
  query_cmd->add_option("--image", query_args.image, "Query figure")->required();
  query_cmd->add_option("--top-k", query_args.top_k, "Keep at most this many matches");
  query_cmd->add_option("--threshold", query_args.threshold, "Minimum similarity (exclusive)")
      ->capture_default_str();
  query_cmd->add_option("--format", query_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_pipeline_flags(query_cmd, flags);

  ShapesArgs shapes_args;
  auto* shapes = app.add_subcommand("shapes", "List the shapes found in one figure");
  shapes->add_option("--image", shapes_args.image, "Figure")->required();
  shapes->add_option("--dump-stages", shapes_args.dump_stages, "Write per-stage PGMs here");
  add_pipeline_flags(shapes, flags);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Render synthetic flowcharts with ground truth");
  auto* seed = synth->add_option("--seed", synth_args.seed, "Corpus seed");
  auto* count = synth->add_option("--count", synth_args.count, "Number of figures");
  auto* spec = synth->add_option("--spec", synth_args.spec, "Layout JSON to render");
  synth->add_option("--out", synth_args.out, "Output directory, or .pgm path with --spec")->required();
  synth->add_flag("--unsafe-shapes", synth_args.unsafe_shapes,
                  "Allow rectangle aspects that read as ellipses");
  spec->excludes(seed)->excludes(count);

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Rank-vs-similarity CSV from a query report");
  report->add_option("--results", report_args.results, "Query report JSON")->required();
  report->add_option("--out", report_args.out, "CSV output")->required();

  std::vector<const char*> argv;
  argv.push_back("flowsim");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*index) return cmd_index(index_args, flags, out, err);
    if (*query_cmd) return cmd_query(query_args, flags, out, err);
    if (*shapes) return cmd_shapes(shapes_args, flags, out);
    if (*synth) return cmd_synth(synth_args, out);
    if (*report) return cmd_report(report_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace flowsim::cli
