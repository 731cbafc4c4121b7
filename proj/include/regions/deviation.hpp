#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "regions/discovery.hpp"
#include "regions/network.hpp"

namespace regions {

/// Absolute deviation of one segment (or one whole path after aggregation).
struct DeviationScore {
  std::size_t path_id = 0;
  std::size_t segment_id = 0;
  std::size_t density = 0;
  /// Integral of |f^k - a^k| along the segment, per logit; input-distance units.
  std::vector<double> per_logit;
  double l2 = 0.0;
  /// The underlying trace ended abnormally; only the discovered intervals count.
  bool partial = false;
};

/// Endpoint evaluations of every region's affine component.
struct SegmentAffineData {
  std::vector<double> f0_x0;  // f(x0)
  std::vector<double> f1_x1;  // f(x1)
  std::vector<std::vector<double>> region_x0;  // f_e(x0), one per region
  std::vector<std::vector<double>> region_x1;  // f_e(x1), one per region
};

/// a(t) = f(x0) + t (f(x1) - f(x0)), per logit.
std::vector<double> interpolant_at(std::span<const double> f0_x0, std::span<const double> f1_x1,
                                   double t);

/// Exact integral of |c + m t| over [t_a, t_b].
///
/// The integrand changes sign at most once, at Z = -c/m; the interval is
/// split at t* = clamp(Z, t_a, t_b) and each piece, having constant sign,
/// is integrated in closed form.
double region_deviation(double c, double m, double t_a, double t_b);

SegmentAffineData segment_affine_data(const Network& net, const SegmentTask& task,
                                      const RegionTrace& trace);

DeviationScore absolute_deviation(const Network& net, const SegmentTask& task,
                                  const RegionTrace& trace);

/// Sums per-logit deviation and density over the segments of one path and
/// recomputes the l2 aggregate. Throws InputError on mixed path ids.
DeviationScore path_deviation(std::span<const DeviationScore> scores);

}  // namespace regions
