// Acceptance suite: one PASS/FAIL line per primary criterion. Exits non-zero
// when a gating criterion fails; the width sweep is reported but not gated.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "regions/deviation.hpp"
#include "regions/discovery.hpp"
#include "regions/model_io.hpp"
#include "regions/paths.hpp"
#include "regions/pipeline.hpp"
#include "regions/records.hpp"
#include "regions/stats.hpp"
#include "regions/toy.hpp"

using namespace regions;

namespace {

const std::filesystem::path kFixtures = REGIONS_FIXTURES;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail, bool gating = true) {
  std::printf("%s %s: %s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
              gating ? "" : " [non-gating]");
  std::fflush(stdout);
  if (!pass && gating) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

std::vector<std::size_t> random_dims(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> width(2, 16);
  return {2, width(rng), width(rng), 3};
}

struct Fixture {
  std::string name;
  Network net;
  std::vector<SegmentTask> tasks;
};

std::vector<std::vector<double>> rows(const Tensor& t) {
  const std::size_t n = t.dims.at(0);
  const std::size_t size = t.numel() / n;
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(t.values.begin() + i * size, t.values.begin() + (i + 1) * size);
  }
  return out;
}

Fixture conv_fixture(const std::string& name) {
  Fixture f{name, load_model(kFixtures / (name + ".manifest.json"), kFixtures / (name + ".weights.bin")), {}};
  const auto inputs = rows(read_tensor(kFixtures / (name + ".inputs.rten")));
  for (std::size_t i = 0; i + 1 < inputs.size(); ++i) {
    f.tasks.push_back(SegmentTask::make(inputs[i], inputs[i + 1], kDefaultTau, i));
  }
  return f;
}

Fixture golden_fixture() {
  const auto dir = kFixtures / "golden";
  Fixture f{"golden", load_model(dir / "toy.manifest.json", dir / "toy.weights.bin"), {}};
  const auto paths = read_paths(dir / "paths.json");
  f.tasks = segment_tasks(paths);
  return f;
}

// A spirals model trained to interpolation with loops around its training points.
Fixture toy_fixture(std::size_t max_tasks) {
  const auto data = make_dataset(DatasetKind::spirals, 64, 3, 0.0, 0);
  TrainConfig config;
  const auto result = train(data, config);
  const auto paths = build_point_loops(data.points, 0.5);
  auto tasks = segment_tasks(paths);
  tasks.resize(std::min(tasks.size(), max_tasks));
  return {"toy", result.network, tasks};
}

void oracle_density() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1001);
  const std::size_t steps = 100000;
  std::size_t total = 0, exact = 0, unexplained = 0;
  for (int n = 0; n < 20; ++n) {
    const auto mlp = oracle::random_mlp(rng, random_dims(rng));
    const auto net = oracle::to_network(mlp);
    for (int s = 0; s < 100; ++s) {
      const auto task = SegmentTask::make(random_point(rng, 2, 3.0), random_point(rng, 2, 3.0));
      const auto trace = find_linear_regions(net, task);
      const auto sampled = oracle::sample_regions(mlp, task.x0, task.x1, steps);
      ++total;
      if (trace.complete() && sampled.runs == trace.density()) {
        ++exact;
        continue;
      }
      bool short_interval = false;
      for (std::size_t i = 1; i < trace.boundaries.size(); ++i) {
        short_interval = short_interval || trace.boundaries[i] - trace.boundaries[i - 1] < 1.0 / steps;
      }
      if (!short_interval && sampled.single_sample_runs == 0) ++unexplained;
    }
  }
  const double rate = static_cast<double>(exact) / static_cast<double>(total);
  const double elapsed = seconds_since(start);
  report(rate >= 0.98 && unexplained == 0 && elapsed <= 300.0, "oracle-density",
         fmt("%zu/%zu exact (%.2f%%, need >= 98%%), %zu mismatches not explained by sub-step regions, %.1f s (limit 300)",
             exact, total, 100.0 * rate, unexplained, elapsed));
}

void trapezoid_deviation() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1002);
  double worst_rel = 0.0, worst_zero = 0.0;
  std::size_t relative_checked = 0, zero_checked = 0;
  for (int s = 0; s < 50; ++s) {
    const auto mlp = oracle::random_mlp(rng, random_dims(rng));
    const auto net = oracle::to_network(mlp);
    const auto task = SegmentTask::make(random_point(rng, 2, 3.0), random_point(rng, 2, 3.0));
    const auto score = absolute_deviation(net, task, find_linear_regions(net, task));
    const auto approx = oracle::trapezoid_deviation(
        [&](std::span<const double> x) { return oracle::naive_logits(mlp, x); }, task.x0, task.x1, 100000);
    for (std::size_t k = 0; k < approx.size(); ++k) {
      const double err = std::abs(score.per_logit[k] - approx[k]);
      if (score.per_logit[k] == 0.0) {
        // single-region segment: the oracle only sums rounding noise, so the
        // relative error is undefined and the value is checked absolutely
        worst_zero = std::max(worst_zero, err);
        ++zero_checked;
      } else {
        worst_rel = std::max(worst_rel, err / approx[k]);
        ++relative_checked;
      }
    }
  }
  const double elapsed = seconds_since(start);
  report(worst_rel <= 1e-6 && worst_zero <= 1e-12 && elapsed <= 120.0, "deviation-vs-trapezoid",
         fmt("50 segments: worst relative error %.3e over %zu non-zero logits (limit 1e-6); "
             "%zu exactly-zero logits with oracle |value| <= %.3e (limit 1e-12); %.1f s (limit 120)",
             worst_rel, relative_checked, zero_checked, worst_zero, elapsed));
}

Network strip_relu(const Network& net) {
  std::vector<Layer> layers;
  for (const auto& l : net.layers()) {
    if (!std::holds_alternative<Relu>(l)) layers.push_back(l);
  }
  return Network(net.input_shape(), layers);
}

void affine_identity() {
  std::mt19937_64 rng(1003);
  std::vector<Fixture> cases;
  for (int n = 0; n < 10; ++n) {
    std::vector<std::size_t> dims{2};
    const int depth = 1 + n % 4;
    for (int l = 0; l < depth; ++l) dims.push_back(3 + (n + l) % 14);
    dims.push_back(3);
    Fixture f{"dense", oracle::to_network(oracle::random_mlp(rng, dims), false), {}};
    for (std::size_t s = 0; s < 20; ++s) {
      f.tasks.push_back(SegmentTask::make(random_point(rng, 2, 3.0), random_point(rng, 2, 3.0)));
    }
    cases.push_back(std::move(f));
  }
  for (const char* name : {"vgg8", "resnet_mini"}) {
    auto f = conv_fixture(name);
    f.net = strip_relu(f.net);
    cases.push_back(std::move(f));
  }
  std::size_t segments = 0, bad_density = 0;
  double worst = 0.0;
  for (const auto& f : cases) {
    for (const auto& task : f.tasks) {
      const auto trace = find_linear_regions(f.net, task);
      const auto score = absolute_deviation(f.net, task, trace);
      ++segments;
      if (trace.density() != 1 || !trace.complete()) ++bad_density;
      for (double v : score.per_logit) worst = std::max(worst, std::abs(v));
    }
  }
  report(bad_density == 0 && worst <= 1e-12, "affine-identity",
         fmt("%zu segments (dense and relu-free conv/residual), %zu with density != 1, max |deviation| %.3e (limit 1e-12)",
             segments, bad_density, worst));
}

void trace_validity(const std::vector<Fixture>& fixtures) {
  std::size_t segments = 0, order = 0, step = 0, frozen = 0, reversal = 0, incomplete = 0;
  double worst_frozen = 0.0, worst_mirror = 0.0;
  for (const auto& f : fixtures) {
    for (const auto& task : f.tasks) {
      ++segments;
      const auto trace = find_linear_regions(f.net, task);
      if (!trace.complete()) ++incomplete;
      for (std::size_t i = 1; i < trace.boundaries.size(); ++i) {
        if (!(trace.boundaries[i] > trace.boundaries[i - 1])) ++order;
      }
      for (double lambda : trace.step_lengths()) {
        if (lambda < task.tau) ++step;
      }
      bool frozen_ok = true;
      for (std::size_t e = 0; e < trace.patterns.size(); ++e) {
        const auto mid = task.point_at(0.5 * (trace.boundaries[e] + trace.boundaries[e + 1]));
        const auto a = logits(f.net, mid);
        const auto b = forward_frozen(f.net, trace.patterns[e], mid);
        for (std::size_t k = 0; k < a.size(); ++k) {
          const double d = std::abs(a[k] - b[k]);
          worst_frozen = std::max(worst_frozen, d);
          frozen_ok = frozen_ok && d <= 1e-8;
        }
      }
      if (!frozen_ok) ++frozen;

      const auto back = find_linear_regions(f.net, SegmentTask::make(task.x1, task.x0, task.tau));
      bool mirrored = back.density() == trace.density();
      // boundaries are fractions of the segment; 10 tau in input units
      const double tol = 10.0 * task.tau / task.span;
      for (std::size_t i = 0; mirrored && i < trace.boundaries.size(); ++i) {
        const double d = std::abs(trace.boundaries[i] - (1.0 - back.boundaries[back.boundaries.size() - 1 - i]));
        worst_mirror = std::max(worst_mirror, d * task.span);
        mirrored = d <= tol;
      }
      if (!mirrored) ++reversal;
    }
  }
  std::string names;
  for (const auto& f : fixtures) names += (names.empty() ? "" : ",") + f.name;
  report(order + step + frozen + reversal + incomplete == 0, "trace-validity",
         fmt("%zu segments (%s): %zu non-increasing, %zu steps < tau, %zu frozen mismatches (worst %.2e, limit 1e-8), "
             "%zu reversal mismatches (worst %.2e, limit 10 tau), %zu incomplete",
             segments, names.c_str(), order, step, frozen, worst_frozen, reversal, worst_mirror, incomplete));
}

void tau_monotonicity(const std::vector<Fixture>& fixtures) {
  std::size_t segments = 0, violations = 0;
  for (const auto& f : fixtures) {
    for (const auto& task : f.tasks) {
      std::size_t previous = 0;
      for (double tau : {1e-3, 1e-4, 1e-6}) {
        const auto trace = find_linear_regions(f.net, SegmentTask::make(task.x0, task.x1, tau));
        if (trace.density() < previous) ++violations;
        previous = trace.density();
      }
      ++segments;
    }
  }
  report(segments >= 100 && violations == 0, "tau-monotonicity",
         fmt("%zu segments, %zu density decreases as tau shrinks over {1e-3, 1e-4, 1e-6}", segments, violations));
}

void gradient_check() {
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::uint64_t seed : {1, 2}) {
    const auto data = make_dataset(DatasetKind::spirals, 48, 3, 0.2, seed);
    TrainConfig config;
    config.widths = {12, 9};
    config.epochs = seed == 1 ? 0 : 50;
    config.seed = seed;
    auto mlp = train(data, config).parameters;
    if (seed == 1) {
      for (auto& l : mlp.layers) {
        for (std::size_t o = 0; o < l.bias.size(); ++o) l.bias[o] = 0.2 * std::cos(0.7 * o);
      }
    }
    Mlp grad;
    loss_and_gradient(mlp, data.points, data.labels, grad);
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
      for (bool bias : {false, true}) {
        const auto& analytic = bias ? grad.layers[l].bias : grad.layers[l].weight;
        for (std::size_t i = 0; i < analytic.size(); ++i) {
          const double numeric = oracle::central_difference(mlp, l, bias, i, data.points, data.labels, 1e-6);
          // relative error with a 1e-3 scale floor for vanishing components
          worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(std::abs(numeric), 1e-3));
          ++checked;
        }
      }
    }
  }
  report(worst <= 1e-5, "gradient-check",
         fmt("%zu parameters, worst relative error %.3e (limit 1e-5)", checked, worst));
}

struct NoiseRun {
  std::uint64_t seed;
  double noise;
  double train_accuracy;
  std::vector<DeviationScore> trained;
  std::vector<DeviationScore> init;
};

std::vector<double> l2s(const std::vector<DeviationScore>& s) {
  std::vector<double> v;
  for (const auto& d : s) v.push_back(d.l2);
  return v;
}

std::vector<double> densities(const std::vector<DeviationScore>& s) {
  std::vector<double> v;
  for (const auto& d : s) v.push_back(static_cast<double>(d.density));
  return v;
}

bool any_partial(const std::vector<DeviationScore>& s) {
  return std::any_of(s.begin(), s.end(), [](const DeviationScore& d) { return d.partial; });
}

std::vector<NoiseRun> noise_runs() {
  // fixed paths: loops around the seed-0 training points
  const auto anchor_data = make_dataset(DatasetKind::spirals, 64, 3, 0.0, 0);
  const auto paths = build_point_loops(anchor_data.points, 0.5);
  std::vector<NoiseRun> runs;
  for (std::uint64_t seed : {0, 1, 2}) {
    for (double noise : {0.0, 0.4}) {
      const auto data = make_dataset(DatasetKind::spirals, 64, 3, noise, seed);
      TrainConfig config;
      config.seed = seed;
      const auto result = train(data, config);
      config.epochs = 0;
      const auto init = train(data, config);
      runs.push_back({seed, noise, result.train_accuracy, measure_paths(result.network, paths).paths,
                      measure_paths(init.network, paths).paths});
    }
  }
  return runs;
}

void noise_analogue(const std::vector<NoiseRun>& runs) {
  std::size_t wins = 0;
  bool interpolated = true, partial = false;
  std::string detail;
  for (std::size_t i = 0; i + 1 < runs.size(); i += 2) {
    const auto& clean = runs[i];
    const auto& noisy = runs[i + 1];
    interpolated = interpolated && clean.train_accuracy == 1.0 && noisy.train_accuracy == 1.0;
    partial = partial || any_partial(clean.trained) || any_partial(noisy.trained);
    const double m0 = lower_median(l2s(clean.trained));
    const double m4 = lower_median(l2s(noisy.trained));
    if (m4 > m0) ++wins;
    detail += fmt("seed %llu: %.4f (0%%) vs %.4f (40%%), acc %.3f/%.3f; ", static_cast<unsigned long long>(clean.seed),
                  m0, m4, clean.train_accuracy, noisy.train_accuracy);
  }
  report(wins == 3 && interpolated && !partial, "noise-analogue",
         detail + fmt("median deviation higher with 40%% noise in %zu/3 seeds (need 3/3)", wins));
}

void trained_vs_init(const std::vector<NoiseRun>& runs) {
  PairedRun pooled;
  std::string detail;
  for (const auto& r : runs) {
    PairedRun run;
    for (std::size_t p = 0; p < r.trained.size(); ++p) {
      run.path_ids.push_back(r.trained[p].path_id);
      run.dev1.push_back(r.init[p].l2);
      run.dev2.push_back(r.trained[p].l2);
      run.den1.push_back(static_cast<double>(r.init[p].density));
      run.den2.push_back(static_cast<double>(r.trained[p].density));
    }
    detail += fmt("seed %llu noise %.1f: density %.2f deviation %.2f; ", static_cast<unsigned long long>(r.seed),
                  r.noise, positive_fraction(run, PairedMetric::density),
                  positive_fraction(run, PairedMetric::deviation));
    for (std::size_t p = 0; p < run.path_ids.size(); ++p) {
      pooled.path_ids.push_back(pooled.path_ids.size());
      pooled.dev1.push_back(run.dev1[p]);
      pooled.dev2.push_back(run.dev2[p]);
      pooled.den1.push_back(run.den1[p]);
      pooled.den2.push_back(run.den2[p]);
    }
  }
  const double den = positive_fraction(pooled, PairedMetric::density);
  const double dev = positive_fraction(pooled, PairedMetric::deviation);
  report(den >= 0.8 && dev >= 0.8, "trained-vs-init",
         detail + fmt("pooled over %zu paths: density %.3f, deviation %.3f (need >= 0.8 for both)",
                      pooled.path_ids.size(), den, dev));
}

void width_sweep_shape() {
  const auto train_set = make_dataset(DatasetKind::spirals, 64, 3, 0.2, 0);
  const auto test_set = make_dataset(DatasetKind::spirals, 512, 3, 0.0, 1000);
  const auto paths = build_point_loops(train_set.points, 0.5);
  TrainConfig config;
  config.epochs = 6000;
  const std::vector<std::size_t> widths{1, 2, 4, 8, 16, 32, 64};
  const auto sweep = width_sweep(train_set, test_set, widths, config);
  std::vector<double> den, dev;
  std::string detail;
  std::size_t first_interpolating = widths.size();
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto scores = measure_paths(sweep[i].network, paths).paths;
    den.push_back(lower_median(densities(scores)));
    dev.push_back(lower_median(l2s(scores)));
    if (sweep[i].train_error == 0.0 && first_interpolating == widths.size()) first_interpolating = i;
    detail += fmt("w%zu: err %.3f den %.0f dev %.4f; ", sweep[i].width, sweep[i].train_error, den.back(), dev.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < den.size(); ++i) monotone = monotone && den[i] >= den[i - 1];
  const auto peak = static_cast<std::size_t>(std::max_element(dev.begin(), dev.end()) - dev.begin());
  const bool interior = peak > 0 && peak + 1 < dev.size();
  // "at or near" the interpolation threshold: within one width step
  const bool near = first_interpolating < widths.size() &&
                    (peak + 1 >= first_interpolating && peak <= first_interpolating + 1);
  report(monotone && interior && near, "width-sweep",
         detail + fmt("density non-decreasing: %s; deviation peak at width %zu, first interpolating width %s",
                      monotone ? "yes" : "no", widths[peak],
                      first_interpolating < widths.size() ? std::to_string(widths[first_interpolating]).c_str()
                                                          : "none"),
         false);
}

}  // namespace

int main() {
  const auto start = Clock::now();
  oracle_density();
  trapezoid_deviation();
  affine_identity();

  std::vector<Fixture> fixtures{golden_fixture(), conv_fixture("vgg8"), conv_fixture("resnet_mini"), toy_fixture(100)};
  std::mt19937_64 rng(1004);
  for (int n = 0; n < 5; ++n) {
    Fixture f{"random-mlp", oracle::to_network(oracle::random_mlp(rng, random_dims(rng))), {}};
    for (std::size_t s = 0; s < 20; ++s) {
      f.tasks.push_back(SegmentTask::make(random_point(rng, 2, 3.0), random_point(rng, 2, 3.0)));
    }
    fixtures.push_back(std::move(f));
  }
  trace_validity(fixtures);
  tau_monotonicity(fixtures);
  gradient_check();

  const auto runs = noise_runs();
  noise_analogue(runs);
  trained_vs_init(runs);
  width_sweep_shape();

  std::printf("acceptance: %d gating failure(s), %.1f s total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
