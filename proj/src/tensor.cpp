#include "regions/tensor.hpp"

#include <cmath>
#include <cstring>

#include "regions/error.hpp"

namespace regions {

std::string Shape::str() const {
  return std::to_string(channels) + "x" + std::to_string(height) + "x" +
         std::to_string(width);
}

std::size_t element_count(std::span<const std::uint64_t> dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

Tensor::Tensor(std::vector<std::uint64_t> dims_in, std::vector<double> values_in)
    : dims(std::move(dims_in)), values(std::move(values_in)) {
  if (values.size() != element_count(dims)) {
    throw InputError("tensor payload has " + std::to_string(values.size()) +
                     " values, dims imply " + std::to_string(element_count(dims)));
  }
}

Tensor::Tensor(std::vector<std::uint64_t> dims_in)
    : dims(std::move(dims_in)), values(element_count(dims), 0.0) {}

std::size_t Tensor::numel() const { return element_count(dims); }

bool bit_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace regions
