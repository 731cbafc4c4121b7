#include "regions/records.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "regions/error.hpp"
#include "regions/model_io.hpp"

namespace regions {

using nlohmann::json;

namespace {

template <class T>
T field(const json& record, const char* name) {
  if (!record.contains(name)) throw FormatError(std::string("record lacks field '") + name + "'");
  try {
    return record.at(name).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("record field '") + name + "': " + e.what());
  }
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json trace_record(const SegmentTask& task, std::size_t segment_in_path, const RegionTrace& trace) {
  json r;
  r["segment_id"] = task.segment_id;
  r["path_id"] = task.path_id;
  r["segment"] = segment_in_path;
  r["density"] = trace.density();
  r["boundaries_t"] = trace.boundaries;
  json terms = json::array();
  for (const auto& rec : trace.records) {
    if (rec.termination != Termination::none) terms.push_back(termination_name(rec.termination));
  }
  r["terminations"] = terms;
  std::vector<double> steps = trace.step_lengths();
  if (steps.empty()) {
    r["lambda_min"] = nullptr;
    r["lambda_median"] = nullptr;
  } else {
    std::sort(steps.begin(), steps.end());
    r["lambda_min"] = nullable(steps.front());
    r["lambda_median"] = nullable(steps[(steps.size() - 1) / 2]);
  }
  r["start_on_boundary"] = trace.start_on_boundary;
  r["iterations"] = trace.iterations;
  if (!trace.error.empty()) r["error"] = trace.error;
  return r;
}

RegionTrace trace_from_record(const json& record, const Network& net, const SegmentTask& task) {
  RegionTrace trace;
  if (record.contains("error")) {
    trace.error = field<std::string>(record, "error");
    return trace;
  }
  trace.boundaries = field<std::vector<double>>(record, "boundaries_t");
  if (trace.boundaries.size() < 2 || trace.boundaries.front() != 0.0 ||
      trace.boundaries.back() != 1.0) {
    throw FormatError("boundaries_t must run from 0 to 1");
  }
  for (std::size_t i = 1; i < trace.boundaries.size(); ++i) {
    if (!(trace.boundaries[i] > trace.boundaries[i - 1])) {
      throw FormatError("boundaries_t is not strictly increasing");
    }
  }
  if (field<std::size_t>(record, "density") != trace.density()) {
    throw FormatError("density disagrees with boundaries_t");
  }
  for (const auto& name : field<std::vector<std::string>>(record, "terminations")) {
    try {
      trace.termination = parse_termination(name);
    } catch (const InputError& e) {
      throw FormatError(e.what());
    }
  }
  trace.start_on_boundary = record.value("start_on_boundary", false);
  trace.iterations = record.value("iterations", std::size_t{0});
  for (std::size_t i = 0; i + 1 < trace.boundaries.size(); ++i) {
    const double mid = 0.5 * (trace.boundaries[i] + trace.boundaries[i + 1]);
    trace.patterns.push_back(activation_pattern(net, task.point_at(mid)));
  }
  return trace;
}

json deviation_record(const DeviationScore& score) {
  json r;
  r["path_id"] = score.path_id;
  r["density"] = score.density;
  r["deviation_l2"] = score.l2;
  r["deviation_per_logit"] = score.per_logit;
  r["partial"] = score.partial;
  return r;
}

DeviationScore deviation_from_record(const json& record) {
  DeviationScore s;
  s.path_id = field<std::size_t>(record, "path_id");
  s.density = field<std::size_t>(record, "density");
  s.l2 = field<double>(record, "deviation_l2");
  s.per_logit = field<std::vector<double>>(record, "deviation_per_logit");
  s.partial = field<bool>(record, "partial");
  return s;
}

std::vector<json> read_jsonl(std::istream& in, const std::string& source) {
  std::vector<json> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw FormatError(source + ":" + std::to_string(number) + ": " + e.what());
    }
    if (!out.back().is_object()) {
      throw FormatError(source + ":" + std::to_string(number) + ": expected a JSON object");
    }
  }
  return out;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_jsonl(in, path.string());
}

void write_jsonl(std::ostream& out, std::span<const json> records) {
  for (const auto& r : records) out << r.dump() << '\n';
}

void write_paths(std::span<const PathSpec> paths, const std::filesystem::path& index_path) {
  namespace fs = std::filesystem;
  const fs::path dir = index_path.parent_path().empty() ? fs::path(".") : index_path.parent_path();
  fs::create_directories(dir);
  const std::string stem = index_path.stem().string();
  json index;
  index["paths"] = json::array();
  for (const auto& path : paths) {
    json entry;
    entry["path_id"] = path.path_id;
    json files = json::array();
    for (std::size_t a = 0; a < path.anchors.size(); ++a) {
      const std::string name =
          stem + "_p" + std::to_string(path.path_id) + "_a" + std::to_string(a) + ".rten";
      write_tensor(path.anchors[a], dir / name);
      files.push_back(name);
    }
    entry["anchors"] = files;
    entry["r"] = path.radius;
    entry["A"] = path.anchors.size();
    entry["closed"] = path.closed;
    if (path.base_label) entry["base_label"] = *path.base_label;
    index["paths"].push_back(entry);
  }
  std::ofstream out(index_path);
  if (!out) throw FormatError("cannot write " + index_path.string());
  out << index.dump(2) << '\n';
}

std::vector<PathSpec> read_paths(const std::filesystem::path& index_path) {
  std::ifstream in(index_path);
  if (!in) throw FormatError("cannot open " + index_path.string());
  json index;
  try {
    index = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(index_path.string() + ": " + e.what());
  }
  if (!index.contains("paths") || !index["paths"].is_array()) {
    throw FormatError(index_path.string() + ": missing 'paths' array");
  }
  const auto dir = index_path.parent_path();
  std::vector<PathSpec> out;
  for (const auto& entry : index["paths"]) {
    PathSpec path;
    path.path_id = field<std::size_t>(entry, "path_id");
    path.radius = field<double>(entry, "r");
    path.closed = field<bool>(entry, "closed");
    if (entry.contains("base_label")) path.base_label = field<int>(entry, "base_label");
    for (const auto& name : field<std::vector<std::string>>(entry, "anchors")) {
      path.anchors.push_back(read_tensor(dir / name));
    }
    if (path.anchors.size() != field<std::size_t>(entry, "A")) {
      throw FormatError("path " + std::to_string(path.path_id) + ": anchor count disagrees with A");
    }
    if (path.anchors.size() < 2) {
      throw FormatError("path " + std::to_string(path.path_id) + ": fewer than 2 anchors");
    }
    out.push_back(std::move(path));
  }
  return out;
}

}  // namespace regions
