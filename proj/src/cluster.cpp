#include "p2k/cluster.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "p2k/modcore.hpp"

namespace p2k {
namespace {

constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

Cluster::Cluster(std::uint64_t product, std::uint32_t order)
    : product_(product), order_(order), stride_(words_for(order)) {
  if (order == 0) throw InvalidArgument("cluster order must be >= 1");
}

Cluster Cluster::trivial() {
  ClusterBuilder b(1, 1);
  b.add(BitRow::full(1), 1);
  return std::move(b).build();
}

BitRow Cluster::row(std::size_t i) const {
  BitRow r(order_);
  auto src = row_words(i);
  std::copy(src.begin(), src.end(), r.words().begin());
  return r;
}

std::uint64_t Cluster::total_multiplicity() const {
  std::uint64_t total = 0;
  for (auto m : multiplicity_) {
    if (__builtin_add_overflow(total, m, &total)) throw Overflow("cluster multiplicities exceed 64 bits");
  }
  return total;
}

ClusterBuilder::ClusterBuilder(std::uint64_t product, std::uint32_t order)
    : cluster_(product, order), slots_(64, kEmpty), mask_(63) {}

std::uint64_t ClusterBuilder::hash(std::span<const std::uint64_t> row) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto w : row) h = mix(h ^ w) + 0x632be59bd9b4e019ULL;
  return h;
}

void ClusterBuilder::grow() {
  std::vector<std::uint32_t> next(slots_.size() * 2, kEmpty);
  const std::uint64_t mask = next.size() - 1;
  for (std::uint32_t id = 0; id < cluster_.size(); ++id) {
    std::uint64_t s = hash(cluster_.row_words(id)) & mask;
    while (next[s] != kEmpty) s = (s + 1) & mask;
    next[s] = id;
  }
  slots_ = std::move(next);
  mask_ = mask;
}

void ClusterBuilder::add(std::span<const std::uint64_t> row, std::uint64_t multiplicity) {
  if (row.size() != cluster_.stride_) throw InvalidArgument("row width does not match cluster order");
  if (multiplicity == 0) return;
  const std::size_t stride = cluster_.stride_;
  std::uint64_t s = hash(row) & mask_;
  while (slots_[s] != kEmpty) {
    const std::uint32_t id = slots_[s];
    if (std::memcmp(cluster_.words_.data() + id * stride, row.data(), stride * sizeof(std::uint64_t)) == 0) {
      auto& m = cluster_.multiplicity_[id];
      if (__builtin_add_overflow(m, multiplicity, &m)) throw Overflow("row multiplicity exceeds 64 bits");
      return;
    }
    s = (s + 1) & mask_;
  }
  if (cluster_.size() >= kEmpty - 1) throw Overflow("cluster exceeds 2^32 distinct rows");
  slots_[s] = static_cast<std::uint32_t>(cluster_.size());
  cluster_.words_.insert(cluster_.words_.end(), row.begin(), row.end());
  cluster_.multiplicity_.push_back(multiplicity);
  if (cluster_.size() * 2 > slots_.size()) grow();
}

void ClusterBuilder::add(const BitRow& row, std::uint64_t multiplicity) {
  if (row.size() != cluster_.order_) throw InvalidArgument("row length does not match cluster order");
  add(row.words(), multiplicity);
}

Cluster ClusterBuilder::build() && {
  cluster_.words_.shrink_to_fit();
  cluster_.multiplicity_.shrink_to_fit();
  return std::move(cluster_);
}

Cluster prime_cluster(std::uint64_t p) {
  if (p < 3 || !is_prime(p)) throw InvalidArgument("prime_cluster needs an odd prime, got " + std::to_string(p));
  const std::uint64_t order = ord2(p);
  if (order > std::numeric_limits<std::uint32_t>::max()) throw UnsupportedRange("ord2(p) too large for a bit row");
  ClusterBuilder b(p, static_cast<std::uint32_t>(order));
  const BitRow full = BitRow::full(order);
  if (p > order) b.add(full, p - order);
  for (std::uint64_t j = 0; j < order; ++j) {
    BitRow r = full;
    r.reset(j);
    b.add(r, 1);
  }
  return std::move(b).build();
}

Cluster augment(const Cluster& c, std::uint32_t target) {
  if (target % c.order()) {
    throw InvalidArgument("cannot augment order " + std::to_string(c.order()) + " to " + std::to_string(target));
  }
  ClusterBuilder b(c.product(), target);
  std::vector<std::uint64_t> lifted(words_for(target));
  for (std::size_t i = 0; i < c.size(); ++i) {
    lift_words(c.row_words(i), c.order(), lifted, target);
    b.add(lifted, c.multiplicity(i));
  }
  return std::move(b).build();
}

Cluster merge(const Cluster& a, const Cluster& b) {
  if (gcd_u64(a.product(), b.product()) != 1) throw InvalidArgument("merge needs clusters over coprime products");
  std::uint64_t product;
  if (__builtin_mul_overflow(a.product(), b.product(), &product)) throw Overflow("cluster product exceeds 64 bits");
  const std::uint64_t order64 = lcm_u64(a.order(), b.order());
  if (order64 > std::numeric_limits<std::uint32_t>::max()) throw UnsupportedRange("merged order too large");
  const auto order = static_cast<std::uint32_t>(order64);

  const Cluster la = augment(a, order);
  const Cluster lb = augment(b, order);
  const std::size_t stride = la.stride();
  ClusterBuilder out(product, order);
  std::vector<std::uint64_t> row(stride);
  for (std::size_t i = 0; i < la.size(); ++i) {
    const auto ra = la.row_words(i);
    for (std::size_t j = 0; j < lb.size(); ++j) {
      const auto rb = lb.row_words(j);
      for (std::size_t w = 0; w < stride; ++w) row[w] = ra[w] & rb[w];
      // multiplicities cannot overflow: their total is the product checked above
      out.add(row, la.multiplicity(i) * lb.multiplicity(j));
    }
  }
  return std::move(out).build();
}

Cluster build_cluster(std::span<const std::uint64_t> primes) {
  Cluster c = Cluster::trivial();
  for (std::uint64_t p : primes) c = merge(c, prime_cluster(p));
  return c;
}

}  // namespace p2k
