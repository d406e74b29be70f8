#include "p2k/bitrow.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "p2k/error.hpp"

namespace p2k {
namespace {

// dst |= src << offset, where src holds `length` bits.
void or_shifted(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src, std::size_t length,
                std::size_t offset) {
  const std::size_t word = offset >> 6;
  const unsigned bit = offset & 63;
  const std::size_t n = words_for(length);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t w = src[i];
    if (i == n - 1 && length % 64) w &= (std::uint64_t{1} << (length % 64)) - 1;
    if (word + i < dst.size()) dst[word + i] |= w << bit;
    if (bit && word + i + 1 < dst.size()) dst[word + i + 1] |= w >> (64 - bit);
  }
}

}  // namespace

BitRow::BitRow(std::size_t length, std::span<const std::size_t> members) : BitRow(length) {
  for (std::size_t m : members) {
    if (m >= length) throw InvalidArgument("bit index " + std::to_string(m) + " outside row of " + std::to_string(length));
    set(m);
  }
}

BitRow BitRow::full(std::size_t length) {
  BitRow r(length);
  std::fill(r.words_.begin(), r.words_.end(), ~std::uint64_t{0});
  if (length % 64) r.words_.back() = (std::uint64_t{1} << (length % 64)) - 1;
  return r;
}

std::size_t BitRow::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

std::vector<std::size_t> BitRow::members() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    for (std::uint64_t bits = words_[w]; bits; bits &= bits - 1) out.push_back(w * 64 + std::countr_zero(bits));
  }
  return out;
}

BitRow BitRow::lift(std::size_t target) const {
  if (length_ == 0 || target % length_) {
    throw InvalidArgument("cannot lift a row over Z/" + std::to_string(length_) + " to Z/" + std::to_string(target));
  }
  BitRow out(target);
  lift_words(words_, length_, out.words_, target);
  return out;
}

BitRow& BitRow::operator&=(const BitRow& other) {
  if (other.length_ != length_) throw InvalidArgument("row length mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

void lift_words(std::span<const std::uint64_t> src, std::size_t length, std::span<std::uint64_t> dst,
                std::size_t target) {
  std::fill(dst.begin(), dst.end(), 0);
  for (std::size_t offset = 0; offset < target; offset += length) or_shifted(dst, src, length, offset);
}

}  // namespace p2k
