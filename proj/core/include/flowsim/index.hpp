#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "flowsim/classify.hpp"
#include "flowsim/pipeline.hpp"

namespace flowsim {

struct FigureRecord {
  int figure_id = 0;
  std::string source_path;
  std::optional<std::string> preprocessed_path;
  FeatureVector vector;

  friend bool operator==(const FigureRecord&, const FigureRecord&) = default;
};

/// The metadata table: records kept in strictly ascending id order.
class MetadataDatabase {
 public:
  MetadataDatabase() = default;

  /// Throws InvalidArgument unless the id is positive and larger than every
  /// existing id, and every count is non-negative.
  void append(FigureRecord record);

  const std::vector<FigureRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  int next_id() const { return records_.empty() ? 1 : records_.back().figure_id + 1; }

  const FigureRecord* find(int figure_id) const;
  const FigureRecord* find_source(const std::string& source_path) const;

  friend bool operator==(const MetadataDatabase&, const MetadataDatabase&) = default;

 private:
  std::vector<FigureRecord> records_;
};

/// Preprocessed images go to `<dir>/<id>.pgm`.
struct FigureStore {
  std::optional<std::filesystem::path> preprocessed_dir;
};

/// Decodes, preprocesses and classifies one figure and appends it under the
/// next free id. Throws DuplicatePath (db unchanged) if the source is
/// already indexed.
FigureRecord add_figure(MetadataDatabase& db, const std::filesystem::path& source,
                        const PipelineConfig& cfg = {}, const FigureStore& store = {});

/// Figure files in `dir` (PGM, plus PNG when supported), sorted by name.
std::vector<std::filesystem::path> list_figures(const std::filesystem::path& dir);

/// Indexes every figure of `dir` in file-name order. Figures are analysed on
/// up to `threads` workers; ids and writes stay in file-name order. Skipped
/// duplicates are reported through `warnings`.
MetadataDatabase index_directory(const std::filesystem::path& dir, const PipelineConfig& cfg = {},
                                 const FigureStore& store = {}, unsigned threads = 0,
                                 std::vector<std::string>* warnings = nullptr);

/// JSON lines, one record per line, LF terminated.
std::string serialize_index(const MetadataDatabase& db);
void save_index(const MetadataDatabase& db, const std::filesystem::path& path);

/// Throws MalformedIndex naming the 1-based line on any defect.
MetadataDatabase parse_index(std::istream& in);
MetadataDatabase load_index(const std::filesystem::path& path);

/// Throws NotFound.
const FigureRecord& get_figure(const MetadataDatabase& db, int figure_id);

}  // namespace flowsim
