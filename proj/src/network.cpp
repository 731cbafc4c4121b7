#include "regions/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "engine.hpp"
#include "regions/error.hpp"

namespace regions {

namespace {

struct KindVisitor {
  std::string_view operator()(const Dense&) const { return "dense"; }
  std::string_view operator()(const Conv2d&) const { return "conv2d"; }
  std::string_view operator()(const AvgPool2d&) const { return "avgpool2d"; }
  std::string_view operator()(const Flatten&) const { return "flatten"; }
  std::string_view operator()(const Relu&) const { return "relu"; }
  std::string_view operator()(const Save&) const { return "save"; }
  std::string_view operator()(const Add&) const { return "add"; }
};

[[noreturn]] void layer_error(std::size_t index, const Layer& layer, const std::string& msg) {
  throw InputError("layer " + std::to_string(index) + " (" + std::string(kind_name(layer)) +
                   "): " + msg);
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Shape after a convolution, or nullopt-like {0,0,0} when the geometry is invalid.
Shape conv_output(const Conv2d& c, Shape in) {
  if (c.kernel_h == 0 || c.kernel_w == 0 || c.stride == 0) return {0, 0, 0};
  if (in.height + 2 * c.padding < c.kernel_h || in.width + 2 * c.padding < c.kernel_w) {
    return {0, 0, 0};
  }
  return {c.out_channels, (in.height + 2 * c.padding - c.kernel_h) / c.stride + 1,
          (in.width + 2 * c.padding - c.kernel_w) / c.stride + 1};
}

void validate_conv(std::size_t index, const Layer& layer, const Conv2d& c, Shape in) {
  if (in.channels != c.in_channels) {
    layer_error(index, layer,
                "expects " + std::to_string(c.in_channels) + " input channels, got shape " +
                    in.str());
  }
  if (c.out_channels == 0) layer_error(index, layer, "zero output channels");
  const Shape out = conv_output(c, in);
  if (out.size() == 0) {
    layer_error(index, layer, "kernel/stride/padding produce empty output for input " +
                                  in.str());
  }
  const std::size_t wcount = c.out_channels * c.in_channels * c.kernel_h * c.kernel_w;
  if (c.weight.size() != wcount) {
    layer_error(index, layer,
                "weight has " + std::to_string(c.weight.size()) + " values, expected " +
                    std::to_string(wcount));
  }
  if (c.bias.size() != c.out_channels) {
    layer_error(index, layer,
                "bias has " + std::to_string(c.bias.size()) + " values, expected " +
                    std::to_string(c.out_channels));
  }
  if (!all_finite(c.weight) || !all_finite(c.bias)) {
    layer_error(index, layer, "non-finite parameter");
  }
}

}  // namespace

std::string_view kind_name(const Layer& layer) { return std::visit(KindVisitor{}, layer); }

Network::Network(Shape input_shape, std::vector<Layer> layers)
    : input_shape_(input_shape), layers_(std::move(layers)) {
  if (input_shape_.size() == 0) throw InputError("network input shape is empty");

  std::map<std::string, std::size_t> tags;
  Shape cur = input_shape_;
  in_shapes_.reserve(layers_.size());
  out_shapes_.reserve(layers_.size());
  tap_slots_.assign(layers_.size(), 0);

  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    in_shapes_.push_back(cur);
    if (const auto* dense = std::get_if<Dense>(&layer)) {
      if (!cur.is_flat()) layer_error(i, layer, "input shape " + cur.str() + " is not flat");
      if (cur.size() != dense->in_features) {
        layer_error(i, layer,
                    "expects " + std::to_string(dense->in_features) + " inputs, got " +
                        std::to_string(cur.size()));
      }
      if (dense->out_features == 0) layer_error(i, layer, "zero output features");
      if (dense->weight.size() != dense->in_features * dense->out_features) {
        layer_error(i, layer,
                    "weight has " + std::to_string(dense->weight.size()) +
                        " values, expected " +
                        std::to_string(dense->in_features * dense->out_features));
      }
      if (dense->bias.size() != dense->out_features) {
        layer_error(i, layer,
                    "bias has " + std::to_string(dense->bias.size()) + " values, expected " +
                        std::to_string(dense->out_features));
      }
      if (!all_finite(dense->weight) || !all_finite(dense->bias)) {
        layer_error(i, layer, "non-finite parameter");
      }
      cur = Shape::flat(dense->out_features);
      ++depth_;
    } else if (const auto* conv = std::get_if<Conv2d>(&layer)) {
      validate_conv(i, layer, *conv, cur);
      cur = conv_output(*conv, cur);
      ++depth_;
    } else if (const auto* pool = std::get_if<AvgPool2d>(&layer)) {
      if (pool->kernel == 0 || pool->stride == 0) layer_error(i, layer, "zero kernel or stride");
      if (cur.height < pool->kernel || cur.width < pool->kernel) {
        layer_error(i, layer, "kernel larger than input " + cur.str());
      }
      cur = {cur.channels, (cur.height - pool->kernel) / pool->stride + 1,
             (cur.width - pool->kernel) / pool->stride + 1};
    } else if (std::holds_alternative<Flatten>(layer)) {
      cur = Shape::flat(cur.size());
    } else if (std::holds_alternative<Relu>(layer)) {
      relu_slots_.push_back({i, neuron_count_, cur.size()});
      neuron_count_ += cur.size();
    } else if (const auto* save = std::get_if<Save>(&layer)) {
      if (save->tag.empty()) layer_error(i, layer, "empty tag");
      tags[save->tag] = tap_shapes_.size();
      tap_slots_[i] = tap_shapes_.size();
      tap_shapes_.push_back(cur);
    } else if (const auto* add = std::get_if<Add>(&layer)) {
      auto it = tags.find(add->tag);
      if (it == tags.end()) layer_error(i, layer, "no earlier save for tag '" + add->tag + "'");
      Shape skip = tap_shapes_[it->second];
      if (add->projection) {
        validate_conv(i, layer, *add->projection, skip);
        skip = conv_output(*add->projection, skip);
      }
      if (!(skip == cur)) {
        layer_error(i, layer, "tap '" + add->tag + "' has shape " + skip.str() +
                                  ", current activation is " + cur.str());
      }
      tap_slots_[i] = it->second;
    }
    out_shapes_.push_back(cur);
  }
}

Shape Network::output_shape() const {
  return out_shapes_.empty() ? input_shape_ : out_shapes_.back();
}

std::pair<std::size_t, std::size_t> Network::locate(std::size_t bit) const {
  if (bit >= neuron_count_) throw InputError("pattern bit out of range");
  auto it = std::upper_bound(relu_slots_.begin(), relu_slots_.end(), bit,
                             [](std::size_t b, const ReluSlot& s) { return b < s.offset; });
  const auto ordinal = static_cast<std::size_t>(std::distance(relu_slots_.begin(), it)) - 1;
  return {ordinal, bit - relu_slots_[ordinal].offset};
}

namespace detail {

void dense_apply(const Dense& layer, std::span<const double> in, std::vector<double>& out,
                 bool with_bias) {
  out.assign(layer.out_features, 0.0);
  const double* w = layer.weight.data();
  for (std::size_t o = 0; o < layer.out_features; ++o) {
    const double* row = w + o * layer.in_features;
    double acc = 0.0;
    for (std::size_t i = 0; i < layer.in_features; ++i) acc += row[i] * in[i];
    out[o] = with_bias ? acc + layer.bias[o] : acc;
  }
}

void conv_apply(const Conv2d& layer, Shape in_shape, std::span<const double> in,
                std::vector<double>& out, bool with_bias) {
  const std::size_t oh = (in_shape.height + 2 * layer.padding - layer.kernel_h) / layer.stride + 1;
  const std::size_t ow = (in_shape.width + 2 * layer.padding - layer.kernel_w) / layer.stride + 1;
  const auto H = static_cast<std::ptrdiff_t>(in_shape.height);
  const auto W = static_cast<std::ptrdiff_t>(in_shape.width);
  const auto pad = static_cast<std::ptrdiff_t>(layer.padding);
  out.assign(layer.out_channels * oh * ow, 0.0);
  for (std::size_t oc = 0; oc < layer.out_channels; ++oc) {
    double* dst = out.data() + oc * oh * ow;
    for (std::size_t ic = 0; ic < layer.in_channels; ++ic) {
      const double* src = in.data() + ic * in_shape.height * in_shape.width;
      const double* kern =
          layer.weight.data() + (oc * layer.in_channels + ic) * layer.kernel_h * layer.kernel_w;
      for (std::size_t ky = 0; ky < layer.kernel_h; ++ky) {
        for (std::size_t kx = 0; kx < layer.kernel_w; ++kx) {
          const double k = kern[ky * layer.kernel_w + kx];
          for (std::size_t y = 0; y < oh; ++y) {
            const std::ptrdiff_t sy =
                static_cast<std::ptrdiff_t>(y * layer.stride + ky) - pad;
            if (sy < 0 || sy >= H) continue;
            for (std::size_t x = 0; x < ow; ++x) {
              const std::ptrdiff_t sx =
                  static_cast<std::ptrdiff_t>(x * layer.stride + kx) - pad;
              if (sx < 0 || sx >= W) continue;
              dst[y * ow + x] += k * src[sy * W + sx];
            }
          }
        }
      }
    }
    if (with_bias) {
      for (std::size_t j = 0; j < oh * ow; ++j) dst[j] += layer.bias[oc];
    }
  }
}

void avgpool_apply(const AvgPool2d& layer, Shape in_shape, std::span<const double> in,
                   std::vector<double>& out) {
  const std::size_t oh = (in_shape.height - layer.kernel) / layer.stride + 1;
  const std::size_t ow = (in_shape.width - layer.kernel) / layer.stride + 1;
  const double scale = 1.0 / static_cast<double>(layer.kernel * layer.kernel);
  out.assign(in_shape.channels * oh * ow, 0.0);
  for (std::size_t c = 0; c < in_shape.channels; ++c) {
    const double* src = in.data() + c * in_shape.height * in_shape.width;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (std::size_t ky = 0; ky < layer.kernel; ++ky) {
          const double* row = src + (y * layer.stride + ky) * in_shape.width + x * layer.stride;
          for (std::size_t kx = 0; kx < layer.kernel; ++kx) acc += row[kx];
        }
        out[(c * oh + y) * ow + x] = acc * scale;
      }
    }
  }
}

void check_input(const Network& net, std::span<const double> x, const char* what) {
  if (x.size() != net.input_size()) {
    throw InputError(std::string(what) + " has " + std::to_string(x.size()) +
                     " values, network expects shape " + net.input_shape().str());
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + " contains non-finite values");
  }
}

void check_finite(std::span<const double> v, std::size_t layer_index) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError("non-finite activation after layer " + std::to_string(layer_index));
    }
  }
}

}  // namespace detail

namespace {

struct PlainGate {
  ActivationPattern* pattern;
  bool operator()(std::size_t bit, double z, double) const {
    const bool on = z > 0.0;
    if (on) pattern->set(bit, true);
    return on;
  }
};

struct PreactRecorder : detail::NoObserver {
  std::vector<std::vector<double>>* preacts;
  void on_relu(std::size_t, std::size_t, std::span<const double> z, std::span<const double>) {
    preacts->emplace_back(z.begin(), z.end());
  }
};

}  // namespace

ForwardResult forward(const Network& net, std::span<const double> x) {
  detail::check_input(net, x, "input");
  ForwardResult r;
  r.pattern = ActivationPattern(net.neuron_count());
  r.logits = detail::propagate(net, x, {}, PlainGate{&r.pattern}, PreactRecorder{{}, &r.preacts});
  return r;
}

std::vector<double> logits(const Network& net, std::span<const double> x) {
  detail::check_input(net, x, "input");
  return detail::propagate(
      net, x, {}, [](std::size_t, double z, double) { return z > 0.0; }, detail::NoObserver{});
}

ActivationPattern activation_pattern(const Network& net, std::span<const double> x) {
  detail::check_input(net, x, "input");
  ActivationPattern p(net.neuron_count());
  detail::propagate(net, x, {}, PlainGate{&p}, detail::NoObserver{});
  return p;
}

std::vector<double> forward_frozen(const Network& net, const ActivationPattern& pattern,
                                   std::span<const double> x) {
  if (pattern.size() != net.neuron_count()) {
    throw InputError("pattern has " + std::to_string(pattern.size()) + " bits, network has " +
                     std::to_string(net.neuron_count()) + " ReLU units");
  }
  detail::check_input(net, x, "input");
  return detail::propagate(
      net, x, {}, [&](std::size_t bit, double, double) { return pattern.test(bit); },
      detail::NoObserver{});
}

PairResult forward_pair(const Network& net, std::span<const double> x,
                        std::span<const double> d) {
  detail::check_input(net, x, "input");
  if (d.size() != x.size()) throw InputError("direction and input sizes differ");
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
    throw InputError("direction is all-zero");
  }
  detail::check_input(net, d, "direction");

  struct Recorder {
    PairResult* r;
    void on_relu(std::size_t, std::size_t, std::span<const double> z,
                 std::span<const double> dz) {
      r->preacts.emplace_back(z.begin(), z.end());
      r->pre_dirs.emplace_back(dz.begin(), dz.end());
    }
    void on_layer(std::size_t, std::span<const double> lx, std::span<const double> ld) {
      r->layer_x.emplace_back(lx.begin(), lx.end());
      r->layer_d.emplace_back(ld.begin(), ld.end());
    }
  };

  PairResult r;
  r.pattern = ActivationPattern(net.neuron_count());
  detail::propagate(net, x, d, PlainGate{&r.pattern}, Recorder{&r});
  return r;
}

}  // namespace regions
