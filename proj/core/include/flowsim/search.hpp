#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowsim/classify.hpp"
#include "flowsim/index.hpp"
#include "flowsim/pipeline.hpp"
#include "flowsim/raster.hpp"

namespace flowsim {

class QueryVector {
 public:
  explicit QueryVector(FeatureVector vector) : vector_(vector) {}

  const FeatureVector& vector() const { return vector_; }
  /// Number of recognised nodes ("activities") in the query figure.
  int activity_count() const { return vector_.total(); }
  bool empty() const { return vector_.is_zero(); }

 private:
  FeatureVector vector_;
};

struct RankedMatch {
  int figure_id = 0;
  double similarity = 0.0;

  friend bool operator==(const RankedMatch&, const RankedMatch&) = default;
};

struct SearchConfig {
  /// Matches must score strictly above this.
  double threshold = 0.3;
  std::optional<std::size_t> top_k;
};

void validate(const SearchConfig& cfg);

/// Same pipeline as indexing. An empty result is legal; check `empty()`.
QueryVector build_query_vector(const GrayImage& image, const PipelineConfig& cfg = {});

/// dot(q, d) / (|q| |d|), clamped to [0, 1]; 0 when either vector is zero.
double cosine_similarity(const FeatureVector& q, const FeatureVector& d);

/// Descending similarity, ties by ascending figure id.
std::vector<RankedMatch> rank(const MetadataDatabase& db, const QueryVector& q,
                              const SearchConfig& cfg = {});

/// 100 x best similarity; 0 for no matches.
double plagiarism_percentage(std::span<const RankedMatch> matches);

struct ReportedMatch {
  int figure_id = 0;
  double similarity = 0.0;
  std::string source_path;
};

struct QueryReport {
  FeatureVector query_vector;
  int activity_count = 0;
  std::vector<ReportedMatch> matches;
  double plagiarism_percentage = 0.0;
  bool empty_query = false;
};

QueryReport query(const MetadataDatabase& db, const GrayImage& image,
                  const PipelineConfig& pipeline = {}, const SearchConfig& cfg = {});

/// Machine-readable forms of a report. JSON is
/// {query_vector, activity_count, matches: [{figure_id, similarity,
/// source_path}], plagiarism_percentage}.
std::string report_to_json(const QueryReport& report);
std::string report_to_csv(const QueryReport& report);

/// Reads the `matches` similarities back out of report JSON; throws
/// MalformedReport.
std::vector<double> similarities_from_report_json(const std::string& text);

/// `rank,similarity` CSV with one row per match.
std::string rank_curve_csv(std::span<const double> similarities);

/// Shortest decimal text that round-trips the value.
std::string format_number(double value);

}  // namespace flowsim
