// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flowsim/classify.hpp"
#include "flowsim/contour.hpp"
#include "flowsim/image_io.hpp"
#include "flowsim/index.hpp"
#include "flowsim/pipeline.hpp"
#include "flowsim/preprocess.hpp"
#include "flowsim/search.hpp"
#include "flowsim/synth.hpp"
#include "moore_oracle.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace flowsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool proportional(const FeatureVector& a, const FeatureVector& b) {
  // a ∥ b with both non-zero: every 2×2 cross product vanishes.
  if (a.is_zero() || b.is_zero()) return false;
  const int u[] = {a.connector, a.start_stop, a.decision, a.process};
  const int v[] = {b.connector, b.start_stop, b.decision, b.process};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (u[i] * v[j] != u[j] * v[i]) return false;
    }
  }
  return true;
}

double brute_cosine(const FeatureVector& a, const FeatureVector& b) {
  const long double u[] = {1.0L * a.connector, 1.0L * a.start_stop, 1.0L * a.decision, 1.0L * a.process};
  const long double v[] = {1.0L * b.connector, 1.0L * b.start_stop, 1.0L * b.decision, 1.0L * b.process};
  long double dot = 0, nu = 0, nv = 0;
  for (int i = 0; i < 4; ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) return 0.0;
  return static_cast<double>(dot / std::sqrt(nu * nv));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr std::uint64_t kRetrievalSeed = 20;
constexpr std::uint64_t kPipelineSeed = 42;

struct Shared {
  test::TempDir dir;
  fs::path figures() const { return dir.path() / "figures"; }
  std::vector<RenderedFigure> corpus;
  MetadataDatabase db;
};

Outcome exact_match(Shared& s) {
  const auto t0 = std::chrono::steady_clock::now();
  s.corpus = generate_corpus(kRetrievalSeed, 20);
  fs::create_directories(s.figures());
  for (std::size_t i = 0; i < s.corpus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%03zu.pgm", i + 1);
    write_pgm(s.corpus[i].image, s.figures() / name);
  }
  s.db = index_directory(s.figures());
  if (s.db.size() != 20) return {false, "indexed " + std::to_string(s.db.size()) + " figures"};

  // The queried member must be the only record with its vector direction,
  // otherwise an earlier record ties at 1.0 and wins on id.
  int member = -1;
  for (std::size_t i = 0; i < s.corpus.size() && member < 0; ++i) {
    const auto& v = s.corpus[i].truth.vector;
    bool unique = true;
    for (std::size_t j = 0; j < s.corpus.size(); ++j) {
      if (j != i && proportional(v, s.corpus[j].truth.vector)) unique = false;
    }
    if (unique) member = static_cast<int>(i);
  }
  if (member < 0) return {false, "no member with a unique vector direction"};

  const auto image = read_image(s.figures() / s.db.records()[static_cast<std::size_t>(member)].source_path);
  const auto report = query(s.db, image);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (report.matches.empty()) return {false, "no matches"};
  const auto& top = report.matches.front();
  const int expected_id = s.db.records()[static_cast<std::size_t>(member)].figure_id;
  const bool ok = std::abs(top.similarity - 1.0) <= 1e-9 && top.figure_id == expected_id && secs < 10.0;
  return {ok, "query id " + std::to_string(expected_id) + " rank-1 id " + std::to_string(top.figure_id) +
                  fmt(" similarity %.12f", top.similarity) + fmt(" runtime %.2fs", secs)};
}

Outcome descending_curve(const Shared& s) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> count(0, 8);
  std::size_t checked = 0, retained = 0;
  for (int q = 0; q < 100; ++q) {
    FeatureVector v;
    do {
      v = {count(rng), count(rng), count(rng), count(rng)};
    } while (v.is_zero());
    const auto matches = rank(s.db, QueryVector(v));
    for (std::size_t i = 0; i < matches.size(); ++i) {
      if (matches[i].similarity <= 0.3) return {false, "retained value at or below 0.3"};
      if (i > 0 && matches[i].similarity > matches[i - 1].similarity) {
        return {false, "increase at query " + std::to_string(q)};
      }
    }
    // Nothing above the threshold may be left out.
    std::size_t expected = 0;
    for (const auto& r : s.db.records()) expected += brute_cosine(v, r.vector) > 0.3;
    if (expected != matches.size()) return {false, "missing matches at query " + std::to_string(q)};
    ++checked;
    retained += matches.size();
  }
  return {true, std::to_string(checked) + " queries, " + std::to_string(retained) + " retained matches"};
}

Outcome partial_match(const Shared& s) {
  const auto candidates = generate_corpus(kRetrievalSeed + 1, 20);
  for (const auto& fig : candidates) {
    bool matches_record = false;
    for (const auto& r : s.db.records()) matches_record |= proportional(fig.truth.vector, r.vector);
    if (matches_record) continue;
    const auto report = query(s.db, fig.image);
    const double top = report.matches.empty() ? 0.0 : report.matches.front().similarity;
    return {top > 0.0 && top < 1.0, fmt("top similarity %.4f", top)};
  }
  return {false, "no candidate query without a matching record"};
}

Outcome ratio_fidelity() {
  struct Case {
    FlowchartRole role;
    Vec2 size;
  };
  const Case cases[] = {{FlowchartRole::Connector, {50, 50}},
                        {FlowchartRole::StartStop, {60, 30}},
                        {FlowchartRole::Process, {80, 40}},
                        {FlowchartRole::Decision, {50, 30}}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    Layout layout;
    layout.canvas = {220, 220};
    NodeSpec n;
    n.role = c.role;
    n.center = {110, 110};
    n.size = c.size;
    layout.nodes = {n};
    const auto image = render(layout).image;

    // Filled rendered outline, measured directly.
    const auto bin = binarize(image);
    const auto filled = fill_outline(label_components(bin).front(), bin);
    const auto filled_img = to_image(filled.pixels, bin.width(), bin.height());
    const auto direct = compute_ratios(measure_shape(label_components(filled_img).front(), filled_img));

    // Same figure through the whole pipeline.
    const auto analysis = analyze_figure(image);
    if (analysis.features.shapes.size() != 1 || !analysis.features.shapes[0].ratios) {
      ok = false;
      detail += std::string(to_string(c.role)) + " not measured by pipeline; ";
      continue;
    }
    const auto piped = *analysis.features.shapes[0].ratios;

    const auto check = [&](const ShapeRatios& r) -> std::pair<bool, double> {
      switch (c.role) {
        case FlowchartRole::Connector: return {r.circle_score < 2.0, r.circle_score};
        case FlowchartRole::StartStop: return {std::abs(r.ellipse_ratio - 1.0) <= 0.05, r.ellipse_ratio};
        case FlowchartRole::Process:
          return {r.rectangle_ratio && std::abs(*r.rectangle_ratio - 1.0) <= 0.05, r.rectangle_ratio.value_or(0)};
        case FlowchartRole::Decision:
          return {r.diamond_ratio && std::abs(*r.diamond_ratio - 1.0) <= 0.05, r.diamond_ratio.value_or(0)};
      }
      return {false, 0.0};
    };
    const auto [d_ok, d_val] = check(direct);
    const auto [p_ok, p_val] = check(piped);
    ok = ok && d_ok && p_ok;
    detail += std::string(to_string(c.role)) + fmt(" %.4f", d_val) + fmt("/%.4f; ", p_val);
  }
  return {ok, detail + "(filled outline / pipeline)"};
}

Outcome classifier_accuracy() {
  SynthRng rng(7);
  int correct = 0;
  int per_role[4] = {};
  for (std::size_t k = 0; k < kAllRoles.size(); ++k) {
    for (int i = 0; i < 100; ++i) {
      Layout layout;
      layout.canvas = {200, 200};
      layout.nodes = {random_node(rng, kAllRoles[k], {100, 100})};
      const auto fe = analyze_figure(render(layout).image).features;
      const bool hit = fe.vector.total() == 1 && fe.vector[kAllRoles[k]] == 1;
      correct += hit;
      per_role[k] += hit;
    }
  }
  Layout collision;
  collision.canvas = {200, 200};
  NodeSpec n;
  n.role = FlowchartRole::Process;
  n.center = {100, 100};
  n.size = {60, 80};
  collision.nodes = {n};
  const auto fe = analyze_figure(render(collision).image).features;
  const bool collision_ok = fe.shapes.size() == 1 && fe.shapes[0].shape_class == ShapeClass::Ellipse;

  std::string detail = std::to_string(correct) + "/400 (";
  for (std::size_t k = 0; k < 4; ++k) {
    detail += std::string(to_string(kAllRoles[k])) + " " + std::to_string(per_role[k]) + (k < 3 ? ", " : ")");
  }
  detail += std::string("; 60x80 rectangle reads ") +
            (fe.shapes.empty() ? "nothing" : std::string(to_string(fe.shapes[0].shape_class)));
  return {correct >= 380 && collision_ok, detail};
}

Outcome cosine_oracle() {
  std::mt19937 rng(1000);
  std::uniform_int_distribution<int> v(0, 20);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const FeatureVector a{v(rng), v(rng), v(rng), v(rng)};
    const FeatureVector b{v(rng), v(rng), v(rng), v(rng)};
    worst = std::max(worst, std::abs(cosine_similarity(a, b) - brute_cosine(a, b)));
  }
  bool exact = true;
  for (int i = 0; i < 1000; ++i) {
    const FeatureVector a{v(rng), v(rng), v(rng), v(rng)};
    if (!a.is_zero()) exact &= cosine_similarity(a, a) == 1.0;
    const FeatureVector x{a.connector, a.start_stop, 0, 0};
    const FeatureVector y{0, 0, a.decision, a.process};
    exact &= cosine_similarity(x, y) == 0.0;
  }
  return {worst <= 1e-12 && exact, fmt("max deviation %.3g", worst) + (exact ? "" : ", exact cases differ")};
}

Outcome thinning(const std::vector<RenderedFigure>& corpus) {
  std::size_t figures = 0;
  for (const auto& fig : corpus) {
    const auto bin = binarize(fig.image);
    const auto once = thin(bin);
    if (!(thin(once) == once)) return {false, "not idempotent on figure " + std::to_string(figures)};
    if (has_square_block(once)) return {false, "2x2 block on figure " + std::to_string(figures)};
    if (label_components(once).size() != label_components(bin).size()) {
      return {false, "component count changed on figure " + std::to_string(figures)};
    }
    ++figures;
  }
  return {true, std::to_string(figures) + " figures"};
}

Outcome chain_closure(const std::vector<RenderedFigure>& corpus) {
  const auto rect = test::filled_rect(20, 20, 4, 5, 10, 6);
  const auto chain = trace_boundary(label_components(rect).front(), rect);
  const auto oracle = test::reference_moore(rect, {4, 5});
  bool ok = chain.moves.size() == 28 && oracle.size() == 28;
  auto pts = chain.points();
  pts.pop_back();
  ok = ok && pts == oracle;

  std::size_t traced = 0;
  for (const auto& fig : corpus) {
    const auto bin = binarize(fig.image);
    for (const auto& c : label_components(bin)) {
      if (!(trace_boundary(c, bin).displacement() == Point{0, 0})) {
        return {false, "open chain for component " + std::to_string(c.label)};
      }
      ++traced;
    }
    const auto outlines = analyze_figure(fig.image).outlines;
    for (const auto& c : label_components(outlines)) {
      if (!(trace_boundary(c, outlines).displacement() == Point{0, 0})) return {false, "open outline chain"};
      ++traced;
    }
  }
  return {ok, "10x6 chain " + std::to_string(chain.moves.size()) + ", oracle " + std::to_string(oracle.size()) +
                  ", " + std::to_string(traced) + " closed boundaries"};
}

Outcome end_to_end(const std::vector<RenderedFigure>& corpus) {
  std::size_t vectors_ok = 0, clean = 0;
  for (const auto& fig : corpus) {
    const auto a = analyze_figure(fig.image);
    vectors_ok += a.features.vector == fig.truth.vector;
    bool all_tagged = true;
    for (int y = 0; y < a.skeleton.height(); ++y) {
      for (int x = 0; x < a.skeleton.width(); ++x) {
        if (a.skeleton.at(x, y) && !a.outlines.at(x, y)) {
          const auto tag = fig.truth.tag_at(x, y);
          all_tagged &= tag == PixelTag::Edge || tag == PixelTag::Text;
        }
      }
    }
    clean += all_tagged;
  }
  const std::size_t n = corpus.size();
  return {vectors_ok * 100 >= n * 90 && clean * 100 >= n * 95,
          "vectors " + std::to_string(vectors_ok) + "/" + std::to_string(n) + ", removed pixels tagged on " +
              std::to_string(clean) + "/" + std::to_string(n)};
}

Outcome persistence(const Shared& s) {
  const auto a = s.dir.path() / "a.jsonl";
  const auto b = s.dir.path() / "b.jsonl";
  save_index(s.db, a);
  const bool round_trip = load_index(a) == s.db;
  save_index(index_directory(s.figures(), {}, {}, 1), b);
  const bool deterministic = slurp(a) == slurp(b) && !slurp(a).empty();
  return {round_trip && deterministic, std::string("round trip ") + (round_trip ? "identical" : "differs") +
                                           ", reindex " + (deterministic ? "byte-identical" : "differs")};
}

}  // namespace

int main() {
  Shared shared;
  const auto pipeline_corpus = generate_corpus(kPipelineSeed, 50);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact-match retrieval", [&] { return exact_match(shared); }},
      {"descending rank curve", [&] { return descending_curve(shared); }},
      {"partial match", [&] { return partial_match(shared); }},
      {"ratio fidelity", [] { return ratio_fidelity(); }},
      {"classifier accuracy", [] { return classifier_accuracy(); }},
      {"cosine oracle", [] { return cosine_oracle(); }},
      {"thinning properties",
       [&] {
         auto all = pipeline_corpus;
         all.insert(all.end(), shared.corpus.begin(), shared.corpus.end());
         return thinning(all);
       }},
      {"chain-code closure", [&] { return chain_closure(pipeline_corpus); }},
      {"end-to-end pipeline", [&] { return end_to_end(pipeline_corpus); }},
      {"persistence", [&] { return persistence(shared); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
