#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the types needed to hand results across.

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "regions/network.hpp"
#include "regions/toy.hpp"

namespace oracle {

/// Dense ReLU MLP as nested vectors: w[l][o][i], b[l][o].
struct PlainMlp {
  std::vector<std::vector<std::vector<double>>> w;
  std::vector<std::vector<double>> b;
};

/// dims = {input, hidden..., output}; weights N(0, 2/fan_in), biases N(0, bias_sd).
PlainMlp random_mlp(std::mt19937_64& rng, const std::vector<std::size_t>& dims,
                    double bias_sd = 0.5);
/// Same affine maps without any ReLU.
regions::Network to_network(const PlainMlp& mlp, bool with_relu = true);

std::vector<double> naive_logits(const PlainMlp& mlp, std::span<const double> x);
/// On/off state of every hidden unit, bit = preactivation > 0.
std::vector<char> naive_pattern(const PlainMlp& mlp, std::span<const double> x);

std::vector<double> lerp(std::span<const double> x0, std::span<const double> x1, double t);

struct SampledRuns {
  std::size_t runs = 0;              // maximal runs of equal consecutive patterns
  std::size_t single_sample_runs = 0;
};
/// Patterns at t = k/steps, k = 0..steps.
SampledRuns sample_regions(const PlainMlp& mlp, std::span<const double> x0,
                           std::span<const double> x1, std::size_t steps);

/// Boundaries in (0, 1) found by recursive bisection on pattern changes.
/// Exact up to `resolution` because the points sharing a pattern form a
/// convex set, so equal patterns at both ends rule out any interior boundary.
std::vector<double> bisect_boundaries(const PlainMlp& mlp, std::span<const double> x0,
                                      std::span<const double> x1, std::size_t coarse = 64,
                                      double resolution = 1e-14);

/// span * integral over [0, 1] of |f^k(x(t)) - a^k(t)| by the trapezoid rule.
std::vector<double> trapezoid_deviation(const std::function<std::vector<double>(std::span<const double>)>& f,
                                        std::span<const double> x0, std::span<const double> x1,
                                        std::size_t intervals);

/// Closed loop integrated as one curve parametrised by arc length. On each
/// piece between consecutive boundaries both f and the interpolant are
/// affine, so |f - a| is integrated exactly after splitting at its root.
std::vector<double> loop_deviation_exact(const PlainMlp& mlp,
                                         const std::vector<std::vector<double>>& anchors);

/// Central differences of the toy loss with respect to one parameter.
double central_difference(regions::Mlp mlp, std::size_t layer, bool bias, std::size_t index,
                          std::span<const std::vector<double>> points, std::span<const int> labels,
                          double eps);

/// Rank by counting: #smaller + (#equal + 1) / 2.
std::vector<double> naive_ranks(std::span<const double> v);
double naive_pearson(std::span<const double> a, std::span<const double> b);
double naive_ecdf(std::span<const double> v, double x);

}  // namespace oracle
