#include "regions/pipeline.hpp"

#include "regions/error.hpp"
#include "regions/log.hpp"

namespace regions {

std::vector<DeviationScore> score_paths(const Network& net, std::span<const SegmentTask> tasks,
                                        std::span<const RegionTrace> traces) {
  if (tasks.size() != traces.size()) throw InputError("one trace per segment task required");
  std::vector<DeviationScore> out;
  std::vector<DeviationScore> pending;
  bool failed = false;
  auto flush = [&] {
    if (pending.empty()) return;
    DeviationScore total = path_deviation(pending);
    total.partial = total.partial || failed;
    out.push_back(std::move(total));
    pending.clear();
    failed = false;
  };
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!pending.empty() && pending.front().path_id != tasks[i].path_id) flush();
    if (!traces[i].error.empty()) {
      logger().warn("segment {}: {}", tasks[i].segment_id, traces[i].error);
      failed = true;
      DeviationScore empty;
      empty.path_id = tasks[i].path_id;
      empty.segment_id = tasks[i].segment_id;
      empty.per_logit.assign(net.output_dim(), 0.0);
      empty.partial = true;
      pending.push_back(std::move(empty));
      continue;
    }
    pending.push_back(absolute_deviation(net, tasks[i], traces[i]));
  }
  flush();
  return out;
}

PathMeasurements measure_paths(const Network& net, std::span<const PathSpec> paths, double tau,
                               const BatchOptions& options) {
  PathMeasurements m;
  m.tasks = segment_tasks(paths, tau);
  if (m.tasks.empty()) return m;
  m.traces = trace_batch(net, m.tasks, options);
  m.paths = score_paths(net, m.tasks, m.traces);
  return m;
}

}  // namespace regions
