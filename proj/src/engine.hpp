#pragma once

// Shared propagation kernel for all evaluation modes. Not part of the
// public interface.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "regions/error.hpp"
#include "regions/network.hpp"

namespace regions::detail {

void dense_apply(const Dense& layer, std::span<const double> in, std::vector<double>& out,
                 bool with_bias);
void conv_apply(const Conv2d& layer, Shape in_shape, std::span<const double> in,
                std::vector<double>& out, bool with_bias);
void avgpool_apply(const AvgPool2d& layer, Shape in_shape, std::span<const double> in,
                   std::vector<double>& out);

void check_input(const Network& net, std::span<const double> x, const char* what);
void check_finite(std::span<const double> v, std::size_t layer_index);

/// Gate: bool operator()(std::size_t bit, double z, double dz) decides the
/// mask of one ReLU unit. Observer receives hooks:
///   on_relu(ordinal, offset, z, dz)  before masking (dz empty without d)
///   on_layer(index, x, d)            after each layer
/// Pass an empty `d` to propagate the point only.
template <class Gate, class Observer>
std::vector<double> propagate(const Network& net, std::span<const double> x_in,
                              std::span<const double> d_in, Gate&& gate, Observer&& obs) {
  const bool with_dir = !d_in.empty();
  std::vector<double> x(x_in.begin(), x_in.end());
  std::vector<double> d(d_in.begin(), d_in.end());
  std::vector<double> tx, td;
  std::vector<std::vector<double>> taps_x(net.tap_count());
  std::vector<std::vector<double>> taps_d(with_dir ? net.tap_count() : 0);

  const auto& layers = net.layers();
  std::size_t relu_ordinal = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& layer = layers[i];
    const Shape in_shape = net.layer_input_shape(i);
    if (const auto* dense = std::get_if<Dense>(&layer)) {
      dense_apply(*dense, x, tx, true);
      x.swap(tx);
      if (with_dir) {
        dense_apply(*dense, d, td, false);
        d.swap(td);
      }
    } else if (const auto* conv = std::get_if<Conv2d>(&layer)) {
      conv_apply(*conv, in_shape, x, tx, true);
      x.swap(tx);
      if (with_dir) {
        conv_apply(*conv, in_shape, d, td, false);
        d.swap(td);
      }
    } else if (const auto* pool = std::get_if<AvgPool2d>(&layer)) {
      avgpool_apply(*pool, in_shape, x, tx);
      x.swap(tx);
      if (with_dir) {
        avgpool_apply(*pool, in_shape, d, td);
        d.swap(td);
      }
    } else if (std::holds_alternative<Relu>(layer)) {
      const auto& slot = net.relu_slots()[relu_ordinal];
      obs.on_relu(relu_ordinal, slot.offset, std::span<const double>(x),
                  with_dir ? std::span<const double>(d) : std::span<const double>());
      for (std::size_t j = 0; j < x.size(); ++j) {
        const bool on = gate(slot.offset + j, x[j], with_dir ? d[j] : 0.0);
        if (!on) {
          x[j] = 0.0;
          if (with_dir) d[j] = 0.0;
        }
      }
      ++relu_ordinal;
    } else if (std::holds_alternative<Save>(layer)) {
      const std::size_t slot = net.tap_slot(i);
      taps_x[slot] = x;
      if (with_dir) taps_d[slot] = d;
    } else if (const auto* add = std::get_if<Add>(&layer)) {
      const std::size_t slot = net.tap_slot(i);
      const std::vector<double>* skip_x = &taps_x[slot];
      const std::vector<double>* skip_d = with_dir ? &taps_d[slot] : nullptr;
      std::vector<double> px, pd;
      if (add->projection) {
        const Shape tap_shape = net.tap_shape(slot);
        conv_apply(*add->projection, tap_shape, *skip_x, px, true);
        skip_x = &px;
        if (with_dir) {
          conv_apply(*add->projection, tap_shape, *skip_d, pd, false);
          skip_d = &pd;
        }
      }
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += (*skip_x)[j];
      if (with_dir) {
        for (std::size_t j = 0; j < d.size(); ++j) d[j] += (*skip_d)[j];
      }
    }
    // Flatten only relabels the shape.
    check_finite(x, i);
    obs.on_layer(i, std::span<const double>(x),
                 with_dir ? std::span<const double>(d) : std::span<const double>());
  }
  return x;
}

struct NoObserver {
  void on_relu(std::size_t, std::size_t, std::span<const double>, std::span<const double>) {}
  void on_layer(std::size_t, std::span<const double>, std::span<const double>) {}
};

}  // namespace regions::detail
