#include "regions/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regions/error.hpp"

namespace regions {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

EcdfSummary::EcdfSummary(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw InputError("ecdf of an empty sample");
  require_finite(sorted_, "ecdf sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EcdfSummary::evaluate(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EcdfSummary::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("quantile level outside [0, 1]");
  const double n = static_cast<double>(sorted_.size());
  auto k = static_cast<std::size_t>(std::ceil(q * n));
  if (k > 0) --k;
  return sorted_[std::min(k, sorted_.size() - 1)];
}

EcdfSummary ecdf(std::span<const double> values) {
  return EcdfSummary(std::vector<double>(values.begin(), values.end()));
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share rank mean(i+1 .. j+1)
    const double rank = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("spearman inputs differ in length");
  if (a.size() < 2) throw InputError("spearman needs at least two observations");
  require_finite(a, "spearman input");
  require_finite(b, "spearman input");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void PairedRun::validate() const {
  const std::size_t n = dev1.size();
  if (dev2.size() != n || den1.size() != n || den2.size() != n ||
      (!path_ids.empty() && path_ids.size() != n)) {
    throw InputError("paired run has misaligned measure vectors");
  }
}

double positive_fraction(const PairedRun& run, PairedMetric metric) {
  run.validate();
  const auto& first = metric == PairedMetric::deviation ? run.dev1 : run.den1;
  const auto& second = metric == PairedMetric::deviation ? run.dev2 : run.den2;
  if (first.empty()) throw InputError("paired run is empty");
  std::size_t positive = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (second[i] - first[i] > 0.0) ++positive;
  }
  return static_cast<double>(positive) / static_cast<double>(first.size());
}

double lower_median(std::span<const double> values) {
  if (values.empty()) throw InputError("median of an empty run");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

MedianSummary median_summary(std::span<const std::vector<double>> runs) {
  if (runs.empty()) throw InputError("median summary needs at least one run");
  MedianSummary out;
  for (const auto& run : runs) out.medians.push_back(lower_median(run));
  const double n = static_cast<double>(out.medians.size());
  out.mean = std::accumulate(out.medians.begin(), out.medians.end(), 0.0) / n;
  double ss = 0.0;
  for (double m : out.medians) ss += (m - out.mean) * (m - out.mean);
  out.std = std::sqrt(ss / n);
  return out;
}

}  // namespace regions
