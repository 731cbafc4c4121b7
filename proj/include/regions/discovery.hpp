#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regions/network.hpp"
#include "regions/pattern.hpp"

namespace regions {

inline constexpr double kDefaultTau = 1e-6;
inline constexpr std::size_t kDefaultBatchSize = 1024;
/// |w^T d| below this is treated as a direction parallel to the hyperplane.
inline constexpr double kParallelTolerance = 1e-300;

/// One straight segment x0 -> x1 to be traced.
///
/// `tau` is a length along the unit direction, in input-space units.
struct SegmentTask {
  std::vector<double> x0;
  std::vector<double> x1;
  std::vector<double> unit_dir;
  double span = 0.0;
  double tau = kDefaultTau;
  std::size_t segment_id = 0;
  std::size_t path_id = 0;

  static SegmentTask make(std::vector<double> x0, std::vector<double> x1, double tau = kDefaultTau,
                          std::size_t segment_id = 0, std::size_t path_id = 0);

  /// Point at parameter t in [0, 1], computed as x0 + (t * span) * unit_dir.
  std::vector<double> point_at(double t) const;
};

enum class Termination { none, no_finite_lambda, overshoot };

std::string_view termination_name(Termination t);
Termination parse_termination(std::string_view name);

struct CrossingRecord {
  double t = 0.0;       // fraction of span
  double lambda = 0.0;  // accepted step, unit-direction units
  ActivationPattern pattern_after;
  std::size_t layer = 0;   // ReLU ordinal of the crossed hyperplane
  std::size_t neuron = 0;  // unit within that layer
  Termination termination = Termination::none;
};

struct RegionTrace {
  /// 0 = t_0 < t_1 < ... < t_D = 1.
  std::vector<double> boundaries;
  /// Accepted crossings, plus a final record when the walk ended abnormally.
  std::vector<CrossingRecord> records;
  /// Pattern sampled at the midpoint of every interval.
  std::vector<ActivationPattern> patterns;
  Termination termination = Termination::none;
  /// x0 had an exactly-zero preactivation; its units were resolved along d.
  bool start_on_boundary = false;
  std::size_t iterations = 0;
  /// Set when evaluation failed for this segment (batch mode only).
  std::string error;

  std::size_t density() const { return boundaries.empty() ? 0 : boundaries.size() - 1; }
  bool complete() const { return termination == Termination::none && error.empty(); }
  /// Accepted step lengths of the non-terminal crossings.
  std::vector<double> step_lengths() const;
};

struct LambdaResult {
  double lambda = std::numeric_limits<double>::infinity();
  std::size_t layer = 0;
  std::size_t neuron = 0;

  bool finite() const { return lambda < std::numeric_limits<double>::infinity(); }
};

/// Smallest displacement along `unit_dir` that crosses one of the hyperplanes
/// bounding the region of `x`, over all ReLU units; candidates not strictly
/// greater than `tau` are dropped. Ties go to the lowest (layer, neuron).
LambdaResult find_lambda(const Network& net, std::span<const double> x,
                         std::span<const double> unit_dir, double tau);

/// Walks the segment region by region until the pattern of x1 is reached.
///
/// Each step lands exactly on the nearest boundary; the units it crosses
/// take their state from the sign of their directional derivative, so the
/// new pattern is that of the region being entered even though the point
/// itself sits on the hyperplane. A boundary closer than tau is stepped over
/// by tau without being recorded.
RegionTrace find_linear_regions(const Network& net, const SegmentTask& task);

struct BatchOptions {
  std::size_t batch_size = kDefaultBatchSize;
  std::size_t workers = 1;
};

/// Traces every task; output order matches input order and each trace is
/// bit-identical to find_linear_regions on the same task. Exceptions from a
/// single task are stored in its trace's `error` field.
std::vector<RegionTrace> trace_batch(const Network& net, std::span<const SegmentTask> tasks,
                                     const BatchOptions& options = {});

}  // namespace regions
