#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "regions/pattern.hpp"
#include "regions/tensor.hpp"

namespace regions {

/// Fully connected layer; weight is out_features x in_features, row-major.
/// Expects a flat input.
struct Dense {
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  std::vector<double> weight;
  std::vector<double> bias;
};

/// 2-D convolution with zero padding; weight layout [out][in][kh][kw].
struct Conv2d {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::vector<double> weight;
  std::vector<double> bias;
};

/// Average pooling without padding.
struct AvgPool2d {
  std::size_t kernel = 2;
  std::size_t stride = 2;
};

struct Flatten {};

struct Relu {};

/// Stores the current activation under `tag` without changing it.
struct Save {
  std::string tag;
};

/// Adds the activation saved under `tag`, optionally passed through a
/// projection convolution first (strided 1x1 shortcuts).
struct Add {
  std::string tag;
  std::optional<Conv2d> projection;
};

using Layer = std::variant<Dense, Conv2d, AvgPool2d, Flatten, Relu, Save, Add>;

std::string_view kind_name(const Layer& layer);

/// Immutable piecewise-affine network over a flat list of layers.
///
/// Construction validates shapes, parameter counts, finiteness and residual
/// taps; after that every evaluation is a pure function of the inputs and
/// the object can be shared freely between threads.
class Network {
 public:
  struct ReluSlot {
    std::size_t layer_index;  // position in layers()
    std::size_t offset;       // first bit in the activation pattern
    std::size_t width;        // number of units
  };

  Network(Shape input_shape, std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  Shape input_shape() const { return input_shape_; }
  std::size_t input_size() const { return input_shape_.size(); }
  std::size_t output_dim() const { return output_shape().size(); }
  Shape output_shape() const;
  Shape layer_input_shape(std::size_t i) const { return in_shapes_.at(i); }
  Shape layer_output_shape(std::size_t i) const { return out_shapes_.at(i); }

  /// Number of affine (dense/conv) layers.
  std::size_t depth() const { return depth_; }
  /// Total ReLU units, i.e. the activation pattern length.
  std::size_t neuron_count() const { return neuron_count_; }
  const std::vector<ReluSlot>& relu_slots() const { return relu_slots_; }
  /// (relu ordinal, unit within that layer) for a global pattern bit.
  std::pair<std::size_t, std::size_t> locate(std::size_t bit) const;

  /// Tap slot referenced by a save/add layer.
  std::size_t tap_slot(std::size_t layer_index) const { return tap_slots_.at(layer_index); }
  std::size_t tap_count() const { return tap_shapes_.size(); }
  Shape tap_shape(std::size_t slot) const { return tap_shapes_.at(slot); }

 private:
  Shape input_shape_;
  std::vector<Layer> layers_;
  std::vector<Shape> in_shapes_;
  std::vector<Shape> out_shapes_;
  std::vector<std::size_t> tap_slots_;
  std::vector<ReluSlot> relu_slots_;
  std::vector<Shape> tap_shapes_;
  std::size_t depth_ = 0;
  std::size_t neuron_count_ = 0;
};

struct ForwardResult {
  std::vector<double> logits;
  ActivationPattern pattern;
  /// ReLU inputs, one vector per ReLU layer.
  std::vector<std::vector<double>> preacts;
};

/// Point and direction propagated together; the direction follows the
/// frozen pattern of the point.
struct PairResult {
  /// Output of every layer for the point, indexed like Network::layers().
  std::vector<std::vector<double>> layer_x;
  /// Directional image of d at the output of every layer.
  std::vector<std::vector<double>> layer_d;
  /// ReLU inputs and their directional derivatives, one per ReLU layer.
  std::vector<std::vector<double>> preacts;
  std::vector<std::vector<double>> pre_dirs;
  ActivationPattern pattern;
};

ForwardResult forward(const Network& net, std::span<const double> x);

/// Logits only; cheaper than forward() when the pattern is not needed.
std::vector<double> logits(const Network& net, std::span<const double> x);

ActivationPattern activation_pattern(const Network& net, std::span<const double> x);

/// Evaluates the affine component of the region identified by `pattern`:
/// every ReLU is replaced by its fixed 0/1 mask.
std::vector<double> forward_frozen(const Network& net, const ActivationPattern& pattern,
                                   std::span<const double> x);

PairResult forward_pair(const Network& net, std::span<const double> x,
                        std::span<const double> d);

}  // namespace regions
