#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace regions {

/// Right-continuous empirical CDF of a finite sample.
class EcdfSummary {
 public:
  explicit EcdfSummary(std::vector<double> values);

  std::size_t n() const { return sorted_.size(); }
  const std::vector<double>& sorted_values() const { return sorted_; }
  /// Fraction of samples <= x.
  double evaluate(double x) const;
  /// Smallest sample v with evaluate(v) >= q, q in [0, 1].
  double quantile(double q) const;

 private:
  std::vector<double> sorted_;
};

EcdfSummary ecdf(std::span<const double> values);

/// Ranks starting at 1; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of the average ranks. nullopt when either input has
/// zero rank variance, where the coefficient is undefined.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

/// Per-path measures of the same paths under two settings T1 and T2.
struct PairedRun {
  std::vector<std::size_t> path_ids;
  std::vector<double> dev1, dev2;
  std::vector<double> den1, den2;

  /// Throws InputError unless all vectors have the same length.
  void validate() const;
};

enum class PairedMetric { deviation, density };

/// Fraction of paths with metric(T2) - metric(T1) > 0; ties count as not positive.
double positive_fraction(const PairedRun& run, PairedMetric metric);

/// Element at index (n - 1) / 2 of the sorted values.
double lower_median(std::span<const double> values);

struct MedianSummary {
  std::vector<double> medians;  // one per run
  double mean = 0.0;
  /// Population standard deviation of the medians.
  double std = 0.0;
};

MedianSummary median_summary(std::span<const std::vector<double>> runs);

}  // namespace regions
