#include "regions/toy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "regions/error.hpp"
#include "regions/log.hpp"
#include "random.hpp"

namespace regions {

namespace {

constexpr double kGaussianRadius = 3.0;
constexpr double kGaussianSpread = 0.5;
constexpr double kSpiralJitter = 0.15;

std::vector<double> sample_point(DatasetKind kind, std::size_t cls, std::size_t classes,
                                 std::mt19937_64& rng) {
  const double base = 2.0 * std::numbers::pi * static_cast<double>(cls) / static_cast<double>(classes);
  if (kind == DatasetKind::gaussians) {
    const double x = kGaussianRadius * std::cos(base) + kGaussianSpread * detail::standard_normal(rng);
    const double y = kGaussianRadius * std::sin(base) + kGaussianSpread * detail::standard_normal(rng);
    return {x, y};
  }
  const double s = detail::unit_uniform(rng);
  const double r = 0.2 + 3.0 * s;
  const double theta = base + 1.75 * std::numbers::pi * s;
  const double x = r * std::cos(theta) + kSpiralJitter * detail::standard_normal(rng);
  const double y = r * std::sin(theta) + kSpiralJitter * detail::standard_normal(rng);
  return {x, y};
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Activations of every layer for one sample; acts[0] is the input and
// acts[l + 1] the (post-ReLU, except for the last) output of layer l.
void mlp_forward(const Mlp& mlp, std::span<const double> x, std::vector<std::vector<double>>& acts) {
  acts.resize(mlp.layers.size() + 1);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    const auto& layer = mlp.layers[l];
    auto& out = acts[l + 1];
    out.assign(layer.out, 0.0);
    const bool hidden = l + 1 < mlp.layers.size();
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = layer.weight.data() + o * layer.in;
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * acts[l][i];
      acc += layer.bias[o];
      out[o] = hidden ? std::max(acc, 0.0) : acc;
    }
  }
}

// Cross-entropy of one sample; overwrites `logits` with dLoss/dlogits.
double softmax_xent(std::vector<double>& logits, int label) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - peak);
  const double log_z = std::log(z) + peak;
  const double loss = log_z - logits[static_cast<std::size_t>(label)];
  for (double& v : logits) v = std::exp(v - log_z);
  logits[static_cast<std::size_t>(label)] -= 1.0;
  return loss;
}

Mlp zeros_like(const Mlp& mlp) {
  Mlp g = mlp;
  for (auto& layer : g.layers) {
    std::fill(layer.weight.begin(), layer.weight.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
  return g;
}

// Adds the gradient of one sample's loss to `grad`; returns the loss.
double accumulate_sample(const Mlp& mlp, std::span<const double> x, int label, Mlp& grad,
                         std::vector<std::vector<double>>& acts, std::vector<double>& delta,
                         std::vector<double>& next) {
  mlp_forward(mlp, x, acts);
  delta = acts.back();
  const double loss = softmax_xent(delta, label);
  for (std::size_t l = mlp.layers.size(); l-- > 0;) {
    const auto& layer = mlp.layers[l];
    auto& g = grad.layers[l];
    const auto& input = acts[l];
    for (std::size_t o = 0; o < layer.out; ++o) {
      g.bias[o] += delta[o];
      double* grow = g.weight.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) grow[i] += delta[o] * input[i];
    }
    if (l == 0) break;
    next.assign(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = layer.weight.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) next[i] += row[i] * delta[o];
    }
    // input is post-ReLU, so input > 0 exactly where the unit was active
    for (std::size_t i = 0; i < layer.in; ++i) {
      if (!(input[i] > 0.0)) next[i] = 0.0;
    }
    delta.swap(next);
  }
  return loss;
}

void validate_dataset(const ToyDataset& data) {
  if (data.points.empty()) throw InputError("dataset is empty");
  if (data.labels.size() != data.points.size()) throw InputError("dataset labels misaligned");
  for (int y : data.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= data.classes) {
      throw InputError("label " + std::to_string(y) + " outside [0, classes)");
    }
  }
}

}  // namespace

DatasetKind parse_dataset_kind(std::string_view name) {
  if (name == "spirals") return DatasetKind::spirals;
  if (name == "gaussians") return DatasetKind::gaussians;
  throw InputError("unknown dataset kind '" + std::string(name) + "'");
}

ToyDataset make_dataset(DatasetKind kind, std::size_t n, std::size_t classes,
                        double noise_fraction, std::uint64_t seed) {
  if (classes < 2) throw InputError("need at least 2 classes");
  if (n < classes) throw InputError("need n >= classes");
  if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) {
    throw InputError("noise fraction outside [0, 1]");
  }
  ToyDataset data;
  data.kind = kind;
  data.classes = classes;
  data.noise_fraction = noise_fraction;
  data.seed = seed;

  // Separate streams so the clean points do not depend on the noise level.
  std::mt19937_64 point_rng(seed);
  std::mt19937_64 noise_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % classes;
    data.points.push_back(sample_point(kind, cls, classes, point_rng));
    data.clean_labels.push_back(static_cast<int>(cls));
  }
  data.labels = data.clean_labels;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  detail::shuffle(order, noise_rng);
  const auto flips = static_cast<std::size_t>(std::llround(noise_fraction * static_cast<double>(n)));
  data.noisy_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(flips));
  std::sort(data.noisy_indices.begin(), data.noisy_indices.end());
  for (std::size_t i : data.noisy_indices) {
    data.labels[i] = static_cast<int>(detail::uniform_index(noise_rng, classes));
  }
  return data;
}

void TrainConfig::validate() const {
  if (widths.empty()) throw InputError("need at least one hidden layer");
  for (std::size_t w : widths) {
    if (w == 0) throw InputError("hidden widths must be positive");
  }
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InputError("momentum must lie in [0, 1)");
  if (batch_size == 0) throw InputError("batch size must be positive");
  if (loss_threshold && !(*loss_threshold > 0.0)) throw InputError("loss threshold must be positive");
}

Network Mlp::to_network() const {
  if (layers.empty()) throw InputError("MLP has no layers");
  std::vector<regions::Layer> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    out.push_back(Dense{layers[l].in, layers[l].out, layers[l].weight, layers[l].bias});
    if (l + 1 < layers.size()) out.push_back(Relu{});
  }
  return Network(Shape::flat(layers.front().in), std::move(out));
}

Mlp init_mlp(std::size_t input_dim, std::span<const std::size_t> widths, std::size_t classes,
             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mlp mlp;
  std::size_t in = input_dim;
  auto add = [&](std::size_t out) {
    Mlp::Layer layer{in, out, std::vector<double>(in * out), std::vector<double>(out)};
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (double& w : layer.weight) w = scale * detail::standard_normal(rng);
    mlp.layers.push_back(std::move(layer));
    in = out;
  };
  for (std::size_t w : widths) add(w);
  add(classes);
  return mlp;
}

double loss_and_gradient(const Mlp& mlp, std::span<const std::vector<double>> points,
                         std::span<const int> labels, Mlp& gradient) {
  if (points.empty() || points.size() != labels.size()) {
    throw InputError("loss needs matching non-empty points and labels");
  }
  gradient = zeros_like(mlp);
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, next;
  double loss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    loss += accumulate_sample(mlp, points[i], labels[i], gradient, acts, delta, next);
  }
  const double inv = 1.0 / static_cast<double>(points.size());
  for (auto& layer : gradient.layers) {
    for (double& v : layer.weight) v *= inv;
    for (double& v : layer.bias) v *= inv;
  }
  return loss * inv;
}

double zero_one_error(const Network& net, std::span<const std::vector<double>> points,
                      std::span<const int> labels) {
  if (points.empty() || points.size() != labels.size()) {
    throw InputError("error needs matching non-empty points and labels");
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (argmax(logits(net, points[i])) != static_cast<std::size_t>(labels[i])) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(points.size());
}

TrainResult train(const ToyDataset& data, const TrainConfig& config) {
  config.validate();
  validate_dataset(data);
  const std::size_t dim = data.points.front().size();
  Mlp mlp = init_mlp(dim, config.widths, data.classes, config.seed);
  Mlp velocity = zeros_like(mlp);
  Mlp grad = zeros_like(mlp);
  std::mt19937_64 rng(config.seed ^ 0xd1b54a32d192ed03ULL);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, next;
  std::vector<EpochLog> log;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    detail::shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      grad = zeros_like(mlp);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        accumulate_sample(mlp, data.points[i], data.labels[i], grad, acts, delta, next);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        auto step = [&](std::vector<double>& p, std::vector<double>& v, const std::vector<double>& g) {
          for (std::size_t j = 0; j < p.size(); ++j) {
            v[j] = config.momentum * v[j] + g[j] * scale;
            p[j] -= config.learning_rate * v[j];
          }
        };
        step(mlp.layers[l].weight, velocity.layers[l].weight, grad.layers[l].weight);
        step(mlp.layers[l].bias, velocity.layers[l].bias, grad.layers[l].bias);
      }
    }

    EpochLog entry{epoch, 0.0, 0.0};
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      mlp_forward(mlp, data.points[i], acts);
      std::vector<double> out = acts.back();
      if (argmax(out) == static_cast<std::size_t>(data.labels[i])) ++correct;
      entry.loss += softmax_xent(out, data.labels[i]);
    }
    entry.loss /= static_cast<double>(data.size());
    entry.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    if (!std::isfinite(entry.loss)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch));
    }
    logger().debug("epoch {} loss {:.6g} accuracy {:.4f}", epoch, entry.loss, entry.accuracy);
    log.push_back(entry);
    if (config.stop_at_interpolation && correct == data.size()) break;
    if (config.loss_threshold && entry.loss < *config.loss_threshold) break;
  }

  Network net = mlp.to_network();
  const double accuracy = 1.0 - zero_one_error(net, data.points, data.labels);
  return TrainResult{std::move(net), std::move(mlp), std::move(log), accuracy};
}

std::vector<SweepEntry> width_sweep(const ToyDataset& train_set, const ToyDataset& test_set,
                                    std::span<const std::size_t> widths,
                                    const TrainConfig& config) {
  if (widths.empty()) throw InputError("width sweep needs at least one width");
  validate_dataset(test_set);
  std::vector<SweepEntry> out;
  for (std::size_t w : widths) {
    TrainConfig cfg = config;
    std::fill(cfg.widths.begin(), cfg.widths.end(), w);
    TrainResult result = train(train_set, cfg);
    const double train_error = zero_one_error(result.network, train_set.points, train_set.labels);
    const double test_error = zero_one_error(result.network, test_set.points, test_set.labels);
    logger().info("width {}: train error {:.4f}, test error {:.4f}, {} epochs", w, train_error,
                  test_error, result.log.size());
    out.push_back(SweepEntry{w, std::move(result.network), train_error, test_error, result.log.size()});
  }
  return out;
}

}  // namespace regions
