#include "regions/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "regions/error.hpp"
#include "regions/log.hpp"
#include "regions/model_io.hpp"
#include "regions/pipeline.hpp"
#include "regions/records.hpp"
#include "regions/stats.hpp"
#include "regions/toy.hpp"

namespace regions {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kManifestSuffix = ".manifest.json";
constexpr const char* kWeightsSuffix = ".weights.bin";

struct ModelArgs {
  std::string model;
  std::string weights;
};

// --model accepts either the manifest path or the shared name prefix.
Network load_model_arg(const ModelArgs& args) {
  std::string manifest = args.model;
  std::string weights = args.weights;
  const std::string suffix = kManifestSuffix;
  const bool has_suffix = manifest.size() > suffix.size() &&
                          manifest.compare(manifest.size() - suffix.size(), suffix.size(), suffix) == 0;
  const std::string stem = has_suffix ? manifest.substr(0, manifest.size() - suffix.size()) : manifest;
  if (!has_suffix) manifest = stem + kManifestSuffix;
  if (weights.empty()) weights = stem + kWeightsSuffix;
  return load_model(manifest, weights);
}

void save_model_prefix(const Network& net, const fs::path& dir, const std::string& name) {
  save_model(net, dir / (name + kManifestSuffix), dir / (name + kWeightsSuffix));
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

std::size_t resolve_workers(std::size_t workers) {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Images from RTEN files: C x H x W tensors, or N x C x H x W stacks.
std::vector<Tensor> load_images(const std::vector<std::string>& files) {
  std::vector<Tensor> images;
  for (const auto& file : files) {
    Tensor t = read_tensor(file);
    if (t.dims.size() == 3) {
      images.push_back(std::move(t));
    } else if (t.dims.size() == 4) {
      const std::vector<std::uint64_t> dims(t.dims.begin() + 1, t.dims.end());
      const std::size_t each = element_count(dims);
      for (std::uint64_t n = 0; n < t.dims[0]; ++n) {
        const auto first = t.values.begin() + static_cast<std::ptrdiff_t>(n * each);
        images.emplace_back(dims, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(each)));
      }
    } else {
      throw FormatError(file + ": expected a C x H x W image or an N x C x H x W stack");
    }
  }
  return images;
}

// Rows of an N x d tensor (a single [d] tensor is one point).
std::vector<std::vector<double>> load_points(const std::string& file) {
  const Tensor t = read_tensor(file);
  if (t.dims.size() == 1) return {t.values};
  if (t.dims.size() != 2) throw FormatError(file + ": expected an N x d tensor of points");
  const auto d = static_cast<std::size_t>(t.dims[1]);
  std::vector<std::vector<double>> points;
  for (std::uint64_t n = 0; n < t.dims[0]; ++n) {
    const auto first = t.values.begin() + static_cast<std::ptrdiff_t>(n * d);
    points.emplace_back(first, first + static_cast<std::ptrdiff_t>(d));
  }
  return points;
}

Tensor points_tensor(std::span<const std::vector<double>> points) {
  const std::size_t d = points.empty() ? 0 : points.front().size();
  std::vector<double> values;
  for (const auto& p : points) values.insert(values.end(), p.begin(), p.end());
  return Tensor({points.size(), d}, std::move(values));
}

std::size_t count_anomalies(std::span<const RegionTrace> traces) {
  return static_cast<std::size_t>(std::count_if(traces.begin(), traces.end(), [](const auto& t) {
    return !t.complete();
  }));
}

// Index of each segment within its path, matching segment_tasks() order.
std::vector<std::size_t> segment_positions(std::span<const SegmentTask> tasks) {
  std::vector<std::size_t> pos(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    pos[i] = (i > 0 && tasks[i - 1].path_id == tasks[i].path_id) ? pos[i - 1] + 1 : 0;
  }
  return pos;
}

// ---- paths -----------------------------------------------------------------

struct PathsArgs {
  std::vector<std::string> images;
  std::string noise;
  std::string points;
  bool open = false;
  double radius = kDefaultRadius;
  std::size_t anchors = kDefaultAnchors;
  std::optional<std::size_t> pad;
  std::size_t count = kDefaultPathCount;
  std::uint64_t seed = 0;
  std::size_t shift = 1;
  std::vector<double> mean;
  std::vector<double> std;
  std::string out = "paths.json";
};

int cmd_paths(const PathsArgs& a) {
  CircularPathOptions options;
  options.radius = a.radius;
  options.anchors = a.anchors;
  options.pad = a.pad;
  if (!a.mean.empty() || !a.std.empty()) options.normalization = Normalization{a.mean, a.std};

  std::vector<PathSpec> paths;
  if (!a.points.empty()) {
    paths = build_point_loops(load_points(a.points), a.radius, a.anchors);
  } else if (!a.noise.empty()) {
    const Tensor stats = read_tensor(a.noise);
    if (stats.dims.size() != 4 || stats.dims[0] != 2) {
      throw FormatError(a.noise + ": expected a 2 x C x H x W mean/std tensor");
    }
    const std::vector<std::uint64_t> dims(stats.dims.begin() + 1, stats.dims.end());
    const std::size_t each = element_count(dims);
    const auto mid = stats.values.begin() + static_cast<std::ptrdiff_t>(each);
    const Tensor mean(dims, std::vector<double>(stats.values.begin(), mid));
    const Tensor stddev(dims, std::vector<double>(mid, stats.values.end()));
    paths = build_noise_paths(mean, stddev, a.count, a.seed, options);
  } else if (a.open) {
    paths = build_open_paths(load_images(a.images), a.shift, a.anchors);
  } else {
    paths = build_circular_paths(load_images(a.images), options);
  }
  write_paths(paths, a.out);
  logger().info("wrote {} paths to {}", paths.size(), a.out);
  return kExitOk;
}

// ---- discover --------------------------------------------------------------

struct DiscoverArgs {
  ModelArgs model;
  std::string paths;
  double tau = kDefaultTau;
  std::size_t batch = kDefaultBatchSize;
  std::size_t workers = 1;
  std::string out = "trace.jsonl";
};

int cmd_discover(const DiscoverArgs& a) {
  const Network net = load_model_arg(a.model);
  const auto paths = read_paths(a.paths);
  const auto tasks = segment_tasks(paths, a.tau);
  if (tasks.empty()) throw InputError(a.paths + " contains no segments");
  const auto traces = trace_batch(net, tasks, {a.batch, resolve_workers(a.workers)});
  const auto positions = segment_positions(tasks);

  auto out = open_output(a.out);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    out << trace_record(tasks[i], positions[i], traces[i]).dump() << '\n';
    if (!traces[i].error.empty()) {
      logger().error("segment {}: {}", tasks[i].segment_id, traces[i].error);
    } else if (traces[i].termination != Termination::none) {
      logger().warn("segment {}: terminated by {}", tasks[i].segment_id,
                    termination_name(traces[i].termination));
    }
  }
  const std::size_t anomalies = count_anomalies(traces);
  logger().info("traced {} segments, {} anomalies", tasks.size(), anomalies);
  return anomalies > 0 ? kExitNumeric : kExitOk;
}

// ---- deviation -------------------------------------------------------------

struct DeviationArgs {
  ModelArgs model;
  std::string paths;
  std::string trace;
  std::string out = "deviation.jsonl";
};

int cmd_deviation(const DeviationArgs& a) {
  const Network net = load_model_arg(a.model);
  const auto paths = read_paths(a.paths);
  const auto tasks = segment_tasks(paths);
  const auto positions = segment_positions(tasks);
  const auto records = read_jsonl(fs::path(a.trace));
  if (records.size() != tasks.size()) {
    throw FormatError("trace has " + std::to_string(records.size()) + " segments but paths define " +
                      std::to_string(tasks.size()));
  }
  std::vector<RegionTrace> traces;
  traces.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& r = records[i];
    if (r.value("segment_id", SIZE_MAX) != tasks[i].segment_id ||
        r.value("path_id", SIZE_MAX) != tasks[i].path_id ||
        r.value("segment", SIZE_MAX) != positions[i]) {
      throw FormatError("trace line " + std::to_string(i + 1) + " does not match segment " +
                        std::to_string(tasks[i].segment_id) + " of the paths file");
    }
    traces.push_back(trace_from_record(r, net, tasks[i]));
  }
  const auto scores = score_paths(net, tasks, traces);
  auto out = open_output(a.out);
  std::size_t partial = 0;
  for (const auto& s : scores) {
    out << deviation_record(s).dump() << '\n';
    if (s.partial) ++partial;
  }
  return partial > 0 ? kExitNumeric : kExitOk;
}

// ---- stats -----------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> inputs;
  std::string metric = "ecdf";
  bool include_partial = false;
  std::string out = "stats.csv";
};

struct MeasureTable {
  std::vector<std::size_t> path_ids;
  std::vector<double> density;
  std::vector<double> deviation;
};

MeasureTable load_measures(const std::string& file, bool include_partial) {
  MeasureTable t;
  std::size_t skipped = 0;
  for (const auto& r : read_jsonl(fs::path(file))) {
    const DeviationScore s = deviation_from_record(r);
    if (s.partial && !include_partial) {
      ++skipped;
      continue;
    }
    t.path_ids.push_back(s.path_id);
    t.density.push_back(static_cast<double>(s.density));
    t.deviation.push_back(s.l2);
  }
  if (skipped > 0) logger().warn("{}: excluded {} partial paths", file, skipped);
  if (t.path_ids.empty()) throw InputError(file + " has no complete paths");
  return t;
}

int cmd_stats(const StatsArgs& a) {
  std::vector<MeasureTable> tables;
  for (const auto& f : a.inputs) tables.push_back(load_measures(f, a.include_partial));
  auto out = open_output(a.out);

  if (a.metric == "ecdf") {
    out << "input,measure,value,ecdf\n";
    for (std::size_t i = 0; i < tables.size(); ++i) {
      for (const auto& [name, values] :
           {std::pair{"density", &tables[i].density}, std::pair{"deviation", &tables[i].deviation}}) {
        const EcdfSummary e = ecdf(*values);
        const auto& sorted = e.sorted_values();
        for (std::size_t k = 0; k < sorted.size(); ++k) {
          if (k + 1 < sorted.size() && sorted[k + 1] == sorted[k]) continue;
          out << a.inputs[i] << ',' << name << ',' << sorted[k] << ',' << e.evaluate(sorted[k]) << '\n';
        }
      }
    }
  } else if (a.metric == "spearman") {
    out << "input,n,spearman\n";
    for (std::size_t i = 0; i < tables.size(); ++i) {
      const auto rho = spearman(tables[i].density, tables[i].deviation);
      out << a.inputs[i] << ',' << tables[i].density.size() << ',';
      if (rho) {
        out << *rho << '\n';
      } else {
        out << "undefined\n";
        logger().warn("{}: spearman undefined (constant ranks)", a.inputs[i]);
      }
    }
  } else if (a.metric == "paired") {
    if (tables.size() != 2) throw InputError("paired statistics need exactly two inputs (T1 T2)");
    if (tables[0].path_ids != tables[1].path_ids) {
      throw InputError("paired inputs do not cover the same paths in the same order");
    }
    PairedRun run{tables[0].path_ids, tables[0].deviation, tables[1].deviation, tables[0].density,
                  tables[1].density};
    out << "path_id,density_1,density_2,density_diff,deviation_1,deviation_2,deviation_diff\n";
    for (std::size_t n = 0; n < run.path_ids.size(); ++n) {
      out << run.path_ids[n] << ',' << run.den1[n] << ',' << run.den2[n] << ','
          << run.den2[n] - run.den1[n] << ',' << run.dev1[n] << ',' << run.dev2[n] << ','
          << run.dev2[n] - run.dev1[n] << '\n';
    }
    std::cout << std::setprecision(17) << "metric,positive_fraction,n\n"
              << "density," << positive_fraction(run, PairedMetric::density) << ','
              << run.path_ids.size() << '\n'
              << "deviation," << positive_fraction(run, PairedMetric::deviation) << ','
              << run.path_ids.size() << '\n';
  } else if (a.metric == "medians") {
    out << "measure,runs,mean_of_medians,std_of_medians,medians\n";
    for (const char* name : {"density", "deviation"}) {
      std::vector<std::vector<double>> runs;
      for (const auto& t : tables) runs.push_back(std::string(name) == "density" ? t.density : t.deviation);
      const MedianSummary s = median_summary(runs);
      out << name << ',' << runs.size() << ',' << s.mean << ',' << s.std << ',';
      for (std::size_t k = 0; k < s.medians.size(); ++k) out << (k ? ";" : "") << s.medians[k];
      out << '\n';
    }
  } else {
    throw InputError("unknown metric '" + a.metric + "'");
  }
  return kExitOk;
}

// ---- toy -------------------------------------------------------------------

struct ToyArgs {
  std::string dataset = "spirals";
  std::size_t n = 64;
  std::size_t test_n = 512;
  std::size_t classes = 3;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> widths{64, 64};
  std::vector<std::size_t> sweep{1, 2, 4, 8, 16, 32};
  double lr = 0.02;
  double momentum = 0.9;
  std::size_t epochs = 2000;
  std::size_t batch_size = 16;
  std::optional<double> loss_threshold;
  double loop_radius = 0.5;
  std::size_t anchors = kDefaultAnchors;
  std::size_t loops = 64;
  double tau = kDefaultTau;
  std::size_t workers = 1;
  std::string out = "toy";
};

TrainConfig toy_config(const ToyArgs& a) {
  TrainConfig c;
  c.widths = a.widths;
  c.learning_rate = a.lr;
  c.momentum = a.momentum;
  c.epochs = a.epochs;
  c.batch_size = a.batch_size;
  c.seed = a.seed;
  if (a.loss_threshold) {
    c.loss_threshold = a.loss_threshold;
    c.stop_at_interpolation = false;
  }
  return c;
}

void write_dataset(const ToyDataset& data, const fs::path& dir, const std::string& name) {
  write_tensor(points_tensor(data.points), dir / (name + "_points.rten"));
  const std::vector<double> labels(data.labels.begin(), data.labels.end());
  write_tensor(Tensor({labels.size()}, labels), dir / (name + "_labels.rten"));
}

int cmd_toy_train(const ToyArgs& a) {
  const fs::path dir = a.out;
  fs::create_directories(dir);
  const ToyDataset data = make_dataset(parse_dataset_kind(a.dataset), a.n, a.classes, a.noise, a.seed);
  const TrainResult result = train(data, toy_config(a));
  save_model_prefix(result.network, dir, "model");
  write_dataset(data, dir, "train");
  auto log = open_output(dir / "train_log.csv");
  log << "epoch,loss,accuracy\n";
  for (const auto& e : result.log) log << e.epoch << ',' << e.loss << ',' << e.accuracy << '\n';
  auto metrics = open_output(dir / "metrics.csv");
  metrics << "train_accuracy,epochs\n" << result.train_accuracy << ',' << result.log.size() << '\n';
  logger().info("trained for {} epochs, train accuracy {}", result.log.size(), result.train_accuracy);
  return kExitOk;
}

int cmd_toy_sweep(const ToyArgs& a) {
  const fs::path dir = a.out;
  fs::create_directories(dir);
  const DatasetKind kind = parse_dataset_kind(a.dataset);
  const ToyDataset train_set = make_dataset(kind, a.n, a.classes, a.noise, a.seed);
  const ToyDataset test_set = make_dataset(kind, a.test_n, a.classes, 0.0, a.seed + 1);
  write_dataset(train_set, dir, "train");

  // The same loops around training points are measured for every width.
  const std::size_t loops = std::min(a.loops, train_set.size());
  const std::vector<std::vector<double>> centers(train_set.points.begin(),
                                                 train_set.points.begin() + static_cast<std::ptrdiff_t>(loops));
  const auto paths = build_point_loops(centers, a.loop_radius, a.anchors);
  write_paths(paths, dir / "paths.json");

  const auto entries = width_sweep(train_set, test_set, a.sweep, toy_config(a));
  auto table = open_output(dir / "sweep.csv");
  table << "width,train_error,test_error,epochs,median_density,median_deviation,mean_density,mean_deviation,partial\n";
  std::size_t anomalies = 0;
  for (const auto& e : entries) {
    const std::string name = "width_" + std::to_string(e.width);
    save_model_prefix(e.network, dir, name);
    const PathMeasurements m = measure_paths(e.network, paths, a.tau, {kDefaultBatchSize, resolve_workers(a.workers)});
    std::vector<double> density, deviation;
    std::size_t partial = 0;
    auto dev_out = open_output(dir / (name + "_deviation.jsonl"));
    for (const auto& s : m.paths) {
      dev_out << deviation_record(s).dump() << '\n';
      if (s.partial) {
        ++partial;
        continue;
      }
      density.push_back(static_cast<double>(s.density));
      deviation.push_back(s.l2);
    }
    anomalies += partial;
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    table << e.width << ',' << e.train_error << ',' << e.test_error << ',' << e.epochs_run << ','
          << (density.empty() ? 0.0 : lower_median(density)) << ','
          << (deviation.empty() ? 0.0 : lower_median(deviation)) << ',' << mean(density) << ','
          << mean(deviation) << ',' << partial << '\n';
  }
  return anomalies > 0 ? kExitNumeric : kExitOk;
}

void add_toy_options(CLI::App* cmd, ToyArgs& a) {
  cmd->add_option("--dataset", a.dataset, "spirals or gaussians")->capture_default_str();
  cmd->add_option("--n", a.n, "training points")->capture_default_str();
  cmd->add_option("--classes", a.classes)->capture_default_str();
  cmd->add_option("--noise", a.noise, "fraction of labels resampled")->capture_default_str();
  cmd->add_option("--seed", a.seed)->capture_default_str();
  cmd->add_option("--widths", a.widths, "hidden layer widths")->delimiter(',')->capture_default_str();
  cmd->add_option("--lr", a.lr)->capture_default_str();
  cmd->add_option("--momentum", a.momentum)->capture_default_str();
  cmd->add_option("--epochs", a.epochs)->capture_default_str();
  cmd->add_option("--batch-size", a.batch_size)->capture_default_str();
  cmd->add_option("--loss-threshold", a.loss_threshold,
                  "train until the mean loss drops below this instead of stopping at 100% accuracy");
  cmd->add_option("--out", a.out, "output directory")->capture_default_str();
}

int dispatch(const std::function<int()>& action) {
  try {
    return action();
  } catch (const InputError& e) {
    logger().error("{}", e.what());
    return kExitData;
  } catch (const FormatError& e) {
    logger().error("{}", e.what());
    return kExitData;
  } catch (const NumericError& e) {
    logger().error("{}", e.what());
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    logger().error("{}", e.what());
    return kExitData;
  }
}

}  // namespace

int run_cli(std::span<const std::string> args) {
  CLI::App app{"Linear region enumeration and absolute deviation for ReLU networks", "regions"};
  app.require_subcommand(1);

  PathsArgs paths_args;
  auto* paths = app.add_subcommand("paths", "build closed or open paths and write a path index");
  auto* src = paths->add_option_group("source");
  src->add_option("--images", paths_args.images, "RTEN images (C x H x W or N x C x H x W)");
  src->add_option("--noise", paths_args.noise, "RTEN 2 x C x H x W per-pixel mean and std");
  src->add_option("--points", paths_args.points, "RTEN N x d points; loops in the first two coordinates");
  src->require_option(1);
  paths->add_flag("--open", paths_args.open, "open chains of shifted images instead of loops");
  paths->add_option("--radius", paths_args.radius, "loop radius (pixels or input units)")->capture_default_str();
  paths->add_option("--anchors", paths_args.anchors, "anchors per path")->capture_default_str();
  paths->add_option("--pad", paths_args.pad, "reflection pad in pixels (default ceil(radius))");
  paths->add_option("--count", paths_args.count, "number of noise paths")->capture_default_str();
  paths->add_option("--seed", paths_args.seed)->capture_default_str();
  paths->add_option("--shift", paths_args.shift, "pixels between anchors of open paths")->capture_default_str();
  paths->add_option("--mean", paths_args.mean, "per-channel normalization mean")->delimiter(',');
  paths->add_option("--std", paths_args.std, "per-channel normalization std")->delimiter(',');
  paths->add_option("--out", paths_args.out, "path index JSON")->capture_default_str();

  DiscoverArgs discover_args;
  auto* discover = app.add_subcommand("discover", "trace the linear regions crossed by every segment");
  discover->add_option("--model", discover_args.model.model, "manifest path or model name prefix")->required();
  discover->add_option("--weights", discover_args.model.weights, "weight blob (default derived from --model)");
  discover->add_option("--paths", discover_args.paths, "path index JSON")->required();
  discover->add_option("--tau", discover_args.tau, "minimum step along the unit direction")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  discover->add_option("--batch", discover_args.batch, "segments per work unit")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  discover->add_option("--workers", discover_args.workers, "worker threads (0 = all cores)")->capture_default_str();
  discover->add_option("--out", discover_args.out, "trace JSON-lines")->capture_default_str();

  DeviationArgs deviation_args;
  auto* deviation = app.add_subcommand("deviation", "absolute deviation per path from a trace");
  deviation->add_option("--model", deviation_args.model.model, "manifest path or model name prefix")->required();
  deviation->add_option("--weights", deviation_args.model.weights);
  deviation->add_option("--paths", deviation_args.paths, "path index JSON")->required();
  deviation->add_option("--trace", deviation_args.trace, "trace JSON-lines from discover")->required();
  deviation->add_option("--out", deviation_args.out, "deviation JSON-lines")->capture_default_str();

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "summaries of deviation JSON-lines files");
  stats->add_option("--inputs", stats_args.inputs, "deviation JSON-lines files")->required();
  stats->add_option("--metric", stats_args.metric)
      ->check(CLI::IsMember({"ecdf", "spearman", "paired", "medians"}))
      ->capture_default_str();
  stats->add_flag("--include-partial", stats_args.include_partial, "keep paths with partial traces");
  stats->add_option("--out", stats_args.out, "CSV output")->capture_default_str();

  ToyArgs toy_args;
  auto* toy = app.add_subcommand("toy", "train toy MLPs on synthetic 2-D data");
  toy->require_subcommand(1);
  auto* toy_train = toy->add_subcommand("train", "train one model");
  add_toy_options(toy_train, toy_args);
  auto* toy_sweep = toy->add_subcommand("sweep", "train one model per width and measure each");
  add_toy_options(toy_sweep, toy_args);
  toy_sweep->add_option("--sweep", toy_args.sweep, "widths to train")->delimiter(',')->capture_default_str();
  toy_sweep->add_option("--test-n", toy_args.test_n, "held-out points")->capture_default_str();
  toy_sweep->add_option("--loop-radius", toy_args.loop_radius)->capture_default_str();
  toy_sweep->add_option("--anchors", toy_args.anchors)->capture_default_str();
  toy_sweep->add_option("--loops", toy_args.loops, "training points to loop around")->capture_default_str();
  toy_sweep->add_option("--tau", toy_args.tau)->capture_default_str()->check(CLI::PositiveNumber);
  toy_sweep->add_option("--workers", toy_args.workers)->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (paths->parsed()) return dispatch([&] { return cmd_paths(paths_args); });
  if (discover->parsed()) return dispatch([&] { return cmd_discover(discover_args); });
  if (deviation->parsed()) return dispatch([&] { return cmd_deviation(deviation_args); });
  if (stats->parsed()) return dispatch([&] { return cmd_stats(stats_args); });
  if (toy_train->parsed()) return dispatch([&] { return cmd_toy_train(toy_args); });
  if (toy_sweep->parsed()) return dispatch([&] { return cmd_toy_sweep(toy_args); });
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args);
}

}  // namespace regions
