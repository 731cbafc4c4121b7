#pragma once

#include <span>
#include <vector>

#include "regions/deviation.hpp"
#include "regions/discovery.hpp"
#include "regions/paths.hpp"

namespace regions {

struct PathMeasurements {
  std::vector<SegmentTask> tasks;
  std::vector<RegionTrace> traces;     // one per task
  std::vector<DeviationScore> paths;   // one per path, in path order
};

/// Per-path scores from per-segment traces. Segments whose trace failed are
/// left out of the sum and mark their path partial.
std::vector<DeviationScore> score_paths(const Network& net, std::span<const SegmentTask> tasks,
                                        std::span<const RegionTrace> traces);

/// Traces every segment of every path and scores each path.
PathMeasurements measure_paths(const Network& net, std::span<const PathSpec> paths,
                               double tau = kDefaultTau, const BatchOptions& options = {});

}  // namespace regions
