#include "regions/pattern.hpp"

#include <bit>

#include "regions/error.hpp"

namespace regions {

namespace {

// splitmix64 of the bit index
std::uint64_t bit_key(std::uint64_t i) {
  std::uint64_t z = i + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

ActivationPattern::ActivationPattern(std::size_t bit_count)
    : size_(bit_count), words_((bit_count + 63) / 64, 0) {}

ActivationPattern ActivationPattern::all_ones(std::size_t bit_count) {
  ActivationPattern p(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) p.set(i, true);
  return p;
}

void ActivationPattern::set(std::size_t i, bool on) {
  if (test(i) == on) return;
  words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
  hash_ ^= bit_key(i);
}

std::size_t ActivationPattern::popcount() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t ActivationPattern::hamming(const ActivationPattern& other) const {
  if (other.size_ != size_) throw InputError("pattern sizes differ");
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(words_[i] ^ other.words_[i]));
  }
  return n;
}

std::string ActivationPattern::str() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

ActivationPattern ActivationPattern::parse(const std::string& bits) {
  ActivationPattern p(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      p.set(i, true);
    } else if (bits[i] != '0') {
      throw InputError("pattern string may only contain '0' and '1'");
    }
  }
  return p;
}

bool ActivationPattern::operator==(const ActivationPattern& other) const {
  if (size_ != other.size_) return false;
  if (hash_ != other.hash_) return false;
  return words_ == other.words_;
}

}  // namespace regions
