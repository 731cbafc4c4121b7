#include "regions/deviation.hpp"

#include <algorithm>
#include <cmath>

#include "regions/error.hpp"

namespace regions {

std::vector<double> interpolant_at(std::span<const double> f0_x0, std::span<const double> f1_x1,
                                   double t) {
  if (f0_x0.size() != f1_x1.size()) throw InputError("endpoint logit vectors differ in size");
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("interpolation parameter outside [0, 1]");
  std::vector<double> a(f0_x0.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = f0_x0[k] + t * (f1_x1[k] - f0_x0[k]);
  return a;
}

double region_deviation(double c, double m, double t_a, double t_b) {
  if (!(t_a <= t_b)) throw InputError("region interval is reversed");
  double split = t_a;
  if (m != 0.0) split = std::clamp(-c / m, t_a, t_b);
  // integral of c + m t over [lo, hi]
  auto signed_area = [c, m](double lo, double hi) {
    return c * (hi - lo) + m * (hi - lo) * (hi + lo) / 2.0;
  };
  return std::abs(signed_area(t_a, split)) + std::abs(signed_area(split, t_b));
}

SegmentAffineData segment_affine_data(const Network& net, const SegmentTask& task,
                                      const RegionTrace& trace) {
  if (!trace.error.empty()) throw InputError("trace failed: " + trace.error);
  if (trace.patterns.size() != trace.density()) {
    throw InputError("trace has " + std::to_string(trace.patterns.size()) +
                     " region patterns for density " + std::to_string(trace.density()));
  }
  SegmentAffineData data;
  data.f0_x0 = logits(net, task.x0);
  data.f1_x1 = logits(net, task.x1);
  data.region_x0.reserve(trace.patterns.size());
  data.region_x1.reserve(trace.patterns.size());
  for (const auto& pattern : trace.patterns) {
    data.region_x0.push_back(forward_frozen(net, pattern, task.x0));
    data.region_x1.push_back(forward_frozen(net, pattern, task.x1));
  }
  return data;
}

DeviationScore absolute_deviation(const Network& net, const SegmentTask& task,
                                  const RegionTrace& trace) {
  const SegmentAffineData data = segment_affine_data(net, task, trace);
  const std::size_t K = data.f0_x0.size();

  DeviationScore score;
  score.path_id = task.path_id;
  score.segment_id = task.segment_id;
  score.density = trace.density();
  score.partial = !trace.complete();
  score.per_logit.assign(K, 0.0);
  for (std::size_t e = 0; e < trace.density(); ++e) {
    const double t_a = trace.boundaries[e];
    const double t_b = trace.boundaries[e + 1];
    for (std::size_t k = 0; k < K; ++k) {
      const double c = data.region_x0[e][k] - data.f0_x0[k];
      const double m = (data.region_x1[e][k] - data.f1_x1[k]) - c;
      score.per_logit[k] += region_deviation(c, m, t_a, t_b);
    }
  }
  for (double& v : score.per_logit) v *= task.span;
  score.l2 = l2_norm(score.per_logit);
  return score;
}

DeviationScore path_deviation(std::span<const DeviationScore> scores) {
  if (scores.empty()) throw InputError("path_deviation needs at least one segment score");
  DeviationScore total;
  total.path_id = scores.front().path_id;
  total.segment_id = scores.front().segment_id;
  total.per_logit.assign(scores.front().per_logit.size(), 0.0);
  for (const auto& s : scores) {
    if (s.path_id != total.path_id) {
      throw InputError("path_deviation got segments from paths " + std::to_string(total.path_id) +
                       " and " + std::to_string(s.path_id));
    }
    if (s.per_logit.size() != total.per_logit.size()) {
      throw InputError("segment scores have different logit counts");
    }
    for (std::size_t k = 0; k < s.per_logit.size(); ++k) total.per_logit[k] += s.per_logit[k];
    total.density += s.density;
    total.partial = total.partial || s.partial;
  }
  total.l2 = l2_norm(total.per_logit);
  return total;
}

}  // namespace regions
