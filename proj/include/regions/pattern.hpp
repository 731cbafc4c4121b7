#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace regions {

/// Concatenated on/off state of every ReLU unit, in layer order.
///
/// Identifies the linear region containing a point. A Zobrist-style digest
/// (xor of per-bit keys) is maintained on every set(), so equality can
/// reject on the digest in O(1) and falls back to the full bit vector when
/// digests match; a digest collision can never merge two regions.
class ActivationPattern {
 public:
  ActivationPattern() = default;
  explicit ActivationPattern(std::size_t bit_count);

  static ActivationPattern all_ones(std::size_t bit_count);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool on);

  std::uint64_t hash() const { return hash_; }
  std::size_t popcount() const;
  /// Number of differing bits; patterns must have equal size.
  std::size_t hamming(const ActivationPattern& other) const;

  /// '0'/'1' string, bit 0 first.
  std::string str() const;
  static ActivationPattern parse(const std::string& bits);

  bool operator==(const ActivationPattern& other) const;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
  std::uint64_t hash_ = 0;
};

}  // namespace regions
