#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "regions/network.hpp"

namespace regions {

enum class DatasetKind { spirals, gaussians };

DatasetKind parse_dataset_kind(std::string_view name);

/// Labelled 2-D points. Point i belongs to generative class i mod classes.
struct ToyDataset {
  DatasetKind kind = DatasetKind::gaussians;
  std::vector<std::vector<double>> points;
  std::vector<int> labels;        // after label noise
  std::vector<int> clean_labels;  // generative rule
  /// Indices whose label was resampled, exactly round(noise_fraction * n) of them.
  std::vector<std::size_t> noisy_indices;
  std::size_t classes = 0;
  double noise_fraction = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

/// Selected labels are redrawn uniformly over all classes, so a redraw may
/// keep the original class.
ToyDataset make_dataset(DatasetKind kind, std::size_t n, std::size_t classes,
                        double noise_fraction, std::uint64_t seed);

struct TrainConfig {
  std::vector<std::size_t> widths{64, 64};
  double learning_rate = 0.02;
  double momentum = 0.9;
  std::size_t epochs = 2000;
  std::size_t batch_size = 16;
  /// Stop once every training point is classified correctly.
  bool stop_at_interpolation = true;
  /// Stop once the mean training loss drops below this value.
  std::optional<double> loss_threshold;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Parameters of a dense ReLU MLP; layer l maps widths[l-1] -> widths[l].
struct Mlp {
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;  // out x in, row-major
    std::vector<double> bias;
  };
  std::vector<Layer> layers;

  Network to_network() const;
};

/// He-normal weights, zero biases.
Mlp init_mlp(std::size_t input_dim, std::span<const std::size_t> widths, std::size_t classes,
             std::uint64_t seed);

/// Mean softmax cross-entropy over the given points and its gradient, laid
/// out like the parameters.
double loss_and_gradient(const Mlp& mlp, std::span<const std::vector<double>> points,
                         std::span<const int> labels, Mlp& gradient);

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  Network network;
  Mlp parameters;
  std::vector<EpochLog> log;
  /// Train accuracy of `network`, evaluated through the inference engine.
  double train_accuracy = 0.0;
};

/// Throws NumericError naming the epoch if the loss becomes non-finite.
TrainResult train(const ToyDataset& data, const TrainConfig& config);

/// Fraction of points whose argmax logit differs from the label.
double zero_one_error(const Network& net, std::span<const std::vector<double>> points,
                      std::span<const int> labels);

struct SweepEntry {
  std::size_t width = 0;
  Network network;
  double train_error = 0.0;
  double test_error = 0.0;
  std::size_t epochs_run = 0;
};

/// One model per width; every hidden layer of config.widths takes that width.
std::vector<SweepEntry> width_sweep(const ToyDataset& train_set, const ToyDataset& test_set,
                                    std::span<const std::size_t> widths,
                                    const TrainConfig& config);

}  // namespace regions
