#include "flowsim/search.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>

#include <json.hpp>

#include "flowsim/error.hpp"

namespace flowsim {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json vector_json(const FeatureVector& v) {
  ordered_json out;
  out["connector"] = v.connector;
  out["start_stop"] = v.start_stop;
  out["decision"] = v.decision;
  out["process"] = v.process;
  return out;
}

}  // namespace

void validate(const SearchConfig& cfg) {
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "threshold must lie in [0,1]");
  }
}

QueryVector build_query_vector(const GrayImage& image, const PipelineConfig& cfg) {
  return QueryVector(analyze_figure(image, cfg).features.vector);
}

double cosine_similarity(const FeatureVector& q, const FeatureVector& d) {
  // Integer dot products keep identical and proportional vectors at exactly 1.
  const std::int64_t qs[] = {q.connector, q.start_stop, q.decision, q.process};
  const std::int64_t ds[] = {d.connector, d.start_stop, d.decision, d.process};
  std::int64_t dot = 0;
  std::int64_t qq = 0;
  std::int64_t dd = 0;
  for (int i = 0; i < 4; ++i) {
    dot += qs[i] * ds[i];
    qq += qs[i] * qs[i];
    dd += ds[i] * ds[i];
  }
  if (qq == 0 || dd == 0) return 0.0;
  const double sim =
      static_cast<double>(dot) / std::sqrt(static_cast<double>(qq) * static_cast<double>(dd));
  return std::clamp(sim, 0.0, 1.0);
}

std::vector<RankedMatch> rank(const MetadataDatabase& db, const QueryVector& q,
                              const SearchConfig& cfg) {
  validate(cfg);
  std::vector<RankedMatch> matches;
  for (const auto& record : db.records()) {
    const double sim = cosine_similarity(q.vector(), record.vector);
    if (sim > cfg.threshold) matches.push_back({record.figure_id, sim});
  }
  std::sort(matches.begin(), matches.end(), [](const RankedMatch& a, const RankedMatch& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.figure_id < b.figure_id;
  });
  if (cfg.top_k && matches.size() > *cfg.top_k) matches.resize(*cfg.top_k);
  return matches;
}

double plagiarism_percentage(std::span<const RankedMatch> matches) {
  double best = 0.0;
  for (const auto& m : matches) best = std::max(best, m.similarity);
  return 100.0 * best;
}

QueryReport query(const MetadataDatabase& db, const GrayImage& image,
                  const PipelineConfig& pipeline, const SearchConfig& cfg) {
  const QueryVector q = build_query_vector(image, pipeline);
  const auto matches = rank(db, q, cfg);

  QueryReport report;
  report.query_vector = q.vector();
  report.activity_count = q.activity_count();
  report.empty_query = q.empty();
  report.plagiarism_percentage = plagiarism_percentage(matches);
  for (const auto& m : matches) {
    report.matches.push_back({m.figure_id, m.similarity, get_figure(db, m.figure_id).source_path});
  }
  return report;
}

std::string report_to_json(const QueryReport& report) {
  ordered_json out;
  out["query_vector"] = vector_json(report.query_vector);
  out["activity_count"] = report.activity_count;
  out["matches"] = ordered_json::array();
  for (const auto& m : report.matches) {
    ordered_json match;
    match["figure_id"] = m.figure_id;
    match["similarity"] = m.similarity;
    match["source_path"] = m.source_path;
    out["matches"].push_back(std::move(match));
  }
  out["plagiarism_percentage"] = report.plagiarism_percentage;
  return out.dump(2) + "\n";
}

std::string report_to_csv(const QueryReport& report) {
  std::string out = "rank,figure_id,similarity\n";
  for (std::size_t i = 0; i < report.matches.size(); ++i) {
    out += std::to_string(i + 1) + "," + std::to_string(report.matches[i].figure_id) + "," +
           format_number(report.matches[i].similarity) + "\n";
  }
  return out;
}

std::vector<double> similarities_from_report_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedReport, std::string("not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("matches") || !doc.at("matches").is_array()) {
    throw Error(ErrorKind::MalformedReport, "report has no 'matches' array");
  }
  std::vector<double> out;
  for (const auto& m : doc.at("matches")) {
    if (!m.is_object() || !m.contains("similarity") || !m.at("similarity").is_number()) {
      throw Error(ErrorKind::MalformedReport, "match without numeric similarity");
    }
    const double s = m.at("similarity").get<double>();
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorKind::MalformedReport, "similarity outside [0,1]");
    }
    out.push_back(s);
  }
  return out;
}

std::string rank_curve_csv(std::span<const double> similarities) {
  std::string out = "rank,similarity\n";
  for (std::size_t i = 0; i < similarities.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_number(similarities[i]) + "\n";
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace flowsim
