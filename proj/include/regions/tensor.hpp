#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace regions {

/// Activation shape in channels-height-width order. Flat vectors are {d, 1, 1}.
struct Shape {
  std::size_t channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;

  static Shape flat(std::size_t d) { return {d, 1, 1}; }

  std::size_t size() const { return channels * height * width; }
  bool is_flat() const { return height == 1 && width == 1; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense row-major array of doubles with arbitrary rank.
struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::vector<std::uint64_t> dims_in, std::vector<double> values_in);
  explicit Tensor(std::vector<std::uint64_t> dims_in);

  std::size_t numel() const;
  bool operator==(const Tensor&) const = default;
};

std::size_t element_count(std::span<const std::uint64_t> dims);

/// Bitwise equality, so that -0.0 != 0.0 and NaN payloads compare by bits.
bool bit_equal(std::span<const double> a, std::span<const double> b);

double l2_norm(std::span<const double> v);

}  // namespace regions
