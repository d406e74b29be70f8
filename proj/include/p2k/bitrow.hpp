#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace p2k {

constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

/// A subset of Z/nZ stored as n bits.
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(std::size_t length) : length_(length), words_(words_for(length), 0) {}
  BitRow(std::size_t length, std::span<const std::size_t> members);

  static BitRow full(std::size_t length);

  std::size_t size() const { return length_; }
  bool test(std::size_t i) const { return words_[i >> 6] >> (i & 63) & 1; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  std::size_t count() const;
  std::vector<std::size_t> members() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  /// Inverse image under Z/target -> Z/size(); target must be a multiple of size().
  BitRow lift(std::size_t target) const;

  BitRow& operator&=(const BitRow& other);
  friend BitRow operator&(BitRow a, const BitRow& b) { return a &= b; }
  friend bool operator==(const BitRow&, const BitRow&) = default;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Writes the lift of the length-bit row `src` into `dst` (words_for(target) words).
void lift_words(std::span<const std::uint64_t> src, std::size_t length, std::span<std::uint64_t> dst,
                std::size_t target);

}  // namespace p2k
