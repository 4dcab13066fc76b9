#include "flowsim/index.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "flowsim/error.hpp"
#include "flowsim/image_io.hpp"

namespace flowsim {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Analyzed {
  BinaryImage outlines;
  FeatureVector vector;
};

Analyzed analyze_file(const std::filesystem::path& source, const PipelineConfig& cfg) {
  FigureAnalysis analysis = analyze_figure(read_image(source), cfg);
  return {std::move(analysis.outlines), analysis.features.vector};
}

FigureRecord commit(MetadataDatabase& db, const std::filesystem::path& source,
                    const Analyzed& analyzed, const FigureStore& store) {
  FigureRecord record;
  record.figure_id = db.next_id();
  record.source_path = source.generic_string();
  record.vector = analyzed.vector;
  if (store.preprocessed_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*store.preprocessed_dir, ec);
    if (ec) {
      throw Error(ErrorKind::IoFailure,
                  "cannot create " + store.preprocessed_dir->string() + ": " + ec.message());
    }
    const auto target = *store.preprocessed_dir / (std::to_string(record.figure_id) + ".pgm");
    write_pgm(to_gray(analyzed.outlines), target);
    record.preprocessed_path = target.generic_string();
  }
  db.append(record);
  return record;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::MalformedIndex, "line " + std::to_string(line) + ": " + what);
}

int read_count(const nlohmann::json& obj, const char* field, std::size_t line) {
  if (!obj.contains(field)) malformed(line, std::string("missing field '") + field + "'");
  const auto& v = obj.at(field);
  if (!v.is_number_integer()) malformed(line, std::string("field '") + field + "' is not an integer");
  const auto n = v.get<long long>();
  if (n < 0) malformed(line, std::string("negative count in '") + field + "'");
  if (n > 1'000'000'000) malformed(line, std::string("count out of range in '") + field + "'");
  return static_cast<int>(n);
}

}  // namespace

void MetadataDatabase::append(FigureRecord record) {
  if (record.figure_id < 1) {
    throw Error(ErrorKind::InvalidArgument, "figure ids start at 1");
  }
  if (!records_.empty() && record.figure_id <= records_.back().figure_id) {
    throw Error(ErrorKind::InvalidArgument,
                "figure id " + std::to_string(record.figure_id) + " is not ascending");
  }
  for (auto role : kAllRoles) {
    if (record.vector[role] < 0) throw Error(ErrorKind::InvalidArgument, "negative count");
  }
  records_.push_back(std::move(record));
}

const FigureRecord* MetadataDatabase::find(int figure_id) const {
  const auto it = std::lower_bound(
      records_.begin(), records_.end(), figure_id,
      [](const FigureRecord& r, int id) { return r.figure_id < id; });
  return it != records_.end() && it->figure_id == figure_id ? &*it : nullptr;
}

const FigureRecord* MetadataDatabase::find_source(const std::string& source_path) const {
  const auto it = std::find_if(records_.begin(), records_.end(), [&](const FigureRecord& r) {
    return r.source_path == source_path;
  });
  return it != records_.end() ? &*it : nullptr;
}

FigureRecord add_figure(MetadataDatabase& db, const std::filesystem::path& source,
                        const PipelineConfig& cfg, const FigureStore& store) {
  if (db.find_source(source.generic_string())) {
    throw Error(ErrorKind::DuplicatePath, source.generic_string() + " is already indexed");
  }
  return commit(db, source, analyze_file(source, cfg), store);
}

std::vector<std::filesystem::path> list_figures(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot list " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm" || (ext == ".png" && png_supported())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

MetadataDatabase index_directory(const std::filesystem::path& dir, const PipelineConfig& cfg,
                                 const FigureStore& store, unsigned threads,
                                 std::vector<std::string>* warnings) {
  const auto files = list_figures(dir);
  std::vector<std::optional<Analyzed>> results(files.size());
  std::vector<std::exception_ptr> failures(files.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        results[i] = analyze_file(files[i], cfg);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(files.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  MetadataDatabase db;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
    if (db.find_source(files[i].generic_string())) {
      if (warnings) warnings->push_back(files[i].generic_string() + " is already indexed");
      continue;
    }
    commit(db, files[i], *results[i], store);
  }
  return db;
}

std::string serialize_index(const MetadataDatabase& db) {
  std::string out;
  for (const auto& r : db.records()) {
    ordered_json line;
    line["figure_id"] = r.figure_id;
    line["connector"] = r.vector.connector;
    line["start_stop"] = r.vector.start_stop;
    line["decision"] = r.vector.decision;
    line["process"] = r.vector.process;
    line["source_path"] = r.source_path;
    line["preprocessed_path"] =
        r.preprocessed_path ? ordered_json(*r.preprocessed_path) : ordered_json(nullptr);
    out += line.dump();
    out += '\n';
  }
  return out;
}

void save_index(const MetadataDatabase& db, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  const auto text = serialize_index(db);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

MetadataDatabase parse_index(std::istream& in) {
  MetadataDatabase db;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      malformed(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) malformed(line_no, "record is not a JSON object");

    FigureRecord record;
    if (!obj.contains("figure_id") || !obj.at("figure_id").is_number_integer()) {
      malformed(line_no, "missing or non-integer figure_id");
    }
    const auto id = obj.at("figure_id").get<long long>();
    if (id < 1 || id > 2'000'000'000) malformed(line_no, "figure_id must be a positive integer");
    record.figure_id = static_cast<int>(id);
    if (db.find(record.figure_id)) {
      malformed(line_no, "duplicate figure_id " + std::to_string(id));
    }
    if (!db.empty() && record.figure_id < db.records().back().figure_id) {
      malformed(line_no, "figure_id " + std::to_string(id) + " is out of ascending order");
    }
    record.vector.connector = read_count(obj, "connector", line_no);
    record.vector.start_stop = read_count(obj, "start_stop", line_no);
    record.vector.decision = read_count(obj, "decision", line_no);
    record.vector.process = read_count(obj, "process", line_no);
    if (!obj.contains("source_path") || !obj.at("source_path").is_string()) {
      malformed(line_no, "missing or non-string source_path");
    }
    record.source_path = obj.at("source_path").get<std::string>();
    if (obj.contains("preprocessed_path")) {
      const auto& pp = obj.at("preprocessed_path");
      if (pp.is_string()) {
        record.preprocessed_path = pp.get<std::string>();
      } else if (!pp.is_null()) {
        malformed(line_no, "preprocessed_path must be a string or null");
      }
    }
    db.append(std::move(record));
  }
  return db;
}

MetadataDatabase load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return parse_index(in);
}

const FigureRecord& get_figure(const MetadataDatabase& db, int figure_id) {
  if (const auto* r = db.find(figure_id)) return *r;
  throw Error(ErrorKind::NotFound, "no figure with id " + std::to_string(figure_id));
}

}  // namespace flowsim
