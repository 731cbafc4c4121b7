#include "regions/discovery.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "engine.hpp"
#include "regions/error.hpp"

namespace regions {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// State of one point on the segment: its pattern and the nearest boundary ahead.
struct Scan {
  ActivationPattern pattern;
  double lambda = kInf;
  std::vector<std::size_t> ties;        // units reaching their hyperplane at `lambda`
  std::vector<std::size_t> zero_units;  // units with an exactly-zero preactivation
};

// Propagates x and d together. Units listed in `resolved` (sorted) are on
// their hyperplane: their state is the one just past x along d, and they are
// not candidates for the next crossing. Candidates must exceed `floor`.
Scan scan_point(const Network& net, std::span<const double> x, std::span<const double> d,
                const std::vector<std::size_t>& resolved, double floor) {
  Scan scan;
  scan.pattern = ActivationPattern(net.neuron_count());
  auto is_resolved = [&](std::size_t bit) {
    return !resolved.empty() && std::binary_search(resolved.begin(), resolved.end(), bit);
  };

  auto gate = [&](std::size_t bit, double z, double dz) {
    bool on = z > 0.0;
    if (dz != 0.0 && is_resolved(bit)) on = dz > 0.0;
    if (on) scan.pattern.set(bit, true);
    return on;
  };

  struct CandidateObserver : detail::NoObserver {
    Scan* scan;
    double floor;
    const std::vector<std::size_t>* resolved;
    void on_relu(std::size_t, std::size_t offset, std::span<const double> z,
                 std::span<const double> dz) {
      for (std::size_t j = 0; j < z.size(); ++j) {
        const std::size_t bit = offset + j;
        if (z[j] == 0.0) scan->zero_units.push_back(bit);
        if (std::abs(dz[j]) < kParallelTolerance) continue;
        if (!resolved->empty() && std::binary_search(resolved->begin(), resolved->end(), bit)) {
          continue;
        }
        const double lambda = -z[j] / dz[j];
        if (!(lambda > floor)) continue;
        if (lambda < scan->lambda) {
          scan->lambda = lambda;
          scan->ties.assign(1, bit);
        } else if (lambda == scan->lambda) {
          scan->ties.push_back(bit);
        }
      }
    }
  };

  detail::propagate(net, x, d, gate, CandidateObserver{{}, &scan, floor, &resolved});
  return scan;
}

}  // namespace

SegmentTask SegmentTask::make(std::vector<double> x0, std::vector<double> x1, double tau,
                              std::size_t segment_id, std::size_t path_id) {
  if (x0.empty() || x0.size() != x1.size()) {
    throw InputError("segment endpoints must be non-empty and of equal size");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("tau must be positive and finite");
  SegmentTask task;
  task.unit_dir.resize(x0.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!std::isfinite(x0[i]) || !std::isfinite(x1[i])) {
      throw InputError("segment endpoints must be finite");
    }
    task.unit_dir[i] = x1[i] - x0[i];
    sq += task.unit_dir[i] * task.unit_dir[i];
  }
  task.span = std::sqrt(sq);
  if (!(task.span > 0.0)) throw InputError("segment endpoints coincide");
  for (double& v : task.unit_dir) v /= task.span;
  task.x0 = std::move(x0);
  task.x1 = std::move(x1);
  task.tau = tau;
  task.segment_id = segment_id;
  task.path_id = path_id;
  return task;
}

std::vector<double> SegmentTask::point_at(double t) const {
  const double s = t * span;
  std::vector<double> p(x0.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = x0[i] + s * unit_dir[i];
  return p;
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::none:
      return "none";
    case Termination::no_finite_lambda:
      return "no_finite_lambda";
    case Termination::overshoot:
      return "overshoot";
  }
  return "none";
}

Termination parse_termination(std::string_view name) {
  if (name == "none") return Termination::none;
  if (name == "no_finite_lambda") return Termination::no_finite_lambda;
  if (name == "overshoot") return Termination::overshoot;
  throw FormatError("unknown termination '" + std::string(name) + "'");
}

std::vector<double> RegionTrace::step_lengths() const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.termination == Termination::none) out.push_back(r.lambda);
  }
  return out;
}

LambdaResult find_lambda(const Network& net, std::span<const double> x,
                         std::span<const double> unit_dir, double tau) {
  detail::check_input(net, x, "point");
  if (unit_dir.size() != x.size()) throw InputError("direction and point sizes differ");
  const Scan scan = scan_point(net, x, unit_dir, {}, tau);
  LambdaResult r;
  if (!scan.ties.empty()) {
    r.lambda = scan.lambda;
    std::tie(r.layer, r.neuron) = net.locate(scan.ties.front());
  }
  return r;
}

RegionTrace find_linear_regions(const Network& net, const SegmentTask& task) {
  detail::check_input(net, task.x0, "segment start");
  detail::check_input(net, task.x1, "segment end");
  if (task.unit_dir.size() != task.x0.size() || !(task.span > 0.0) || !(task.tau > 0.0)) {
    throw InputError("segment task is not initialised; use SegmentTask::make");
  }
  const std::span<const double> dir(task.unit_dir);
  const ActivationPattern target = activation_pattern(net, task.x1);

  RegionTrace trace;
  trace.boundaries.push_back(0.0);

  std::vector<std::size_t> resolved;
  Scan scan = scan_point(net, task.x0, dir, resolved, 0.0);
  if (!scan.zero_units.empty()) {
    trace.start_on_boundary = true;
    resolved = scan.zero_units;
    scan = scan_point(net, task.x0, dir, resolved, 0.0);
  }

  // Every iteration advances by at least tau.
  const double max_iterations = std::floor(task.span / task.tau) + 1.0;
  double travelled = 0.0;
  while (!(scan.pattern == target)) {
    if (static_cast<double>(++trace.iterations) > max_iterations) {
      throw NumericError("segment " + std::to_string(task.segment_id) +
                         ": iteration bound span/tau + 1 exceeded");
    }
    if (!(scan.lambda < kInf)) {
      CrossingRecord r;
      r.t = travelled / task.span;
      r.lambda = kInf;
      r.pattern_after = scan.pattern;
      r.termination = Termination::no_finite_lambda;
      trace.records.push_back(std::move(r));
      trace.termination = Termination::no_finite_lambda;
      break;
    }
    const bool sub_tau = scan.lambda < task.tau;
    const double step = sub_tau ? task.tau : scan.lambda;
    const double next = travelled + step;
    if (next > task.span) {
      CrossingRecord r;
      r.t = next / task.span;
      r.lambda = step;
      r.pattern_after = scan.pattern;
      if (!scan.ties.empty()) std::tie(r.layer, r.neuron) = net.locate(scan.ties.front());
      r.termination = Termination::overshoot;
      trace.records.push_back(std::move(r));
      trace.termination = Termination::overshoot;
      break;
    }
    travelled = next;
    const std::vector<double> x = task.point_at(travelled / task.span);
    if (sub_tau) {
      resolved.clear();
    } else {
      resolved = scan.ties;
    }
    Scan following = scan_point(net, x, dir, resolved, 0.0);
    if (!sub_tau) {
      CrossingRecord r;
      r.t = travelled / task.span;
      r.lambda = step;
      r.pattern_after = following.pattern;
      std::tie(r.layer, r.neuron) = net.locate(scan.ties.front());
      trace.boundaries.push_back(r.t);
      trace.records.push_back(std::move(r));
    }
    scan = std::move(following);
  }
  if (trace.boundaries.back() < 1.0) trace.boundaries.push_back(1.0);

  trace.patterns.reserve(trace.density());
  for (std::size_t i = 0; i + 1 < trace.boundaries.size(); ++i) {
    const double mid = 0.5 * (trace.boundaries[i] + trace.boundaries[i + 1]);
    trace.patterns.push_back(activation_pattern(net, task.point_at(mid)));
  }
  return trace;
}

std::vector<RegionTrace> trace_batch(const Network& net, std::span<const SegmentTask> tasks,
                                     const BatchOptions& options) {
  if (tasks.empty()) throw InputError("trace_batch needs at least one task");
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  const std::size_t chunks = (tasks.size() + batch - 1) / batch;
  std::vector<RegionTrace> out(tasks.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      const std::size_t end = std::min(tasks.size(), (c + 1) * batch);
      for (std::size_t i = c * batch; i < end; ++i) {
        try {
          out[i] = find_linear_regions(net, tasks[i]);
        } catch (const std::exception& e) {
          out[i] = RegionTrace{};
          out[i].error = e.what();
        }
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, chunks);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

}  // namespace regions
