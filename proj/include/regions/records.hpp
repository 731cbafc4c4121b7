#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "regions/deviation.hpp"
#include "regions/discovery.hpp"
#include "regions/paths.hpp"

namespace regions {

/// One trace line: {segment_id, path_id, segment, density, boundaries_t,
/// terminations, lambda_min, lambda_median, start_on_boundary, iterations}
/// plus "error" for segments that could not be evaluated. `segment` is the
/// index of the segment within its path.
nlohmann::json trace_record(const SegmentTask& task, std::size_t segment_in_path,
                            const RegionTrace& trace);

/// Rebuilds a trace from its record; region patterns are re-sampled at the
/// interval midpoints exactly as discovery does.
RegionTrace trace_from_record(const nlohmann::json& record, const Network& net,
                              const SegmentTask& task);

/// {path_id, density, deviation_l2, deviation_per_logit, partial}
nlohmann::json deviation_record(const DeviationScore& score);
DeviationScore deviation_from_record(const nlohmann::json& record);

/// Parses one JSON object per non-empty line; errors name the line number.
std::vector<nlohmann::json> read_jsonl(std::istream& in, const std::string& source);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(std::ostream& out, std::span<const nlohmann::json> records);

/// Writes every anchor as an RTEN file next to `index_path` and an index
/// {"paths": [{path_id, anchors: [file, ...], r, A, closed}]}.
void write_paths(std::span<const PathSpec> paths, const std::filesystem::path& index_path);
std::vector<PathSpec> read_paths(const std::filesystem::path& index_path);

}  // namespace regions
