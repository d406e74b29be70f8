#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "p2k/bitrow.hpp"

namespace p2k {

/// Deduplicated multiset of subsets of Z/order, one row per distinct subset.
/// For a product M of distinct odd primes, the row I carries multiplicity
/// G_M(I) = #{m mod M : f_M(m) = I}, so multiplicities sum to M.
///
/// Rows are stored contiguously, `stride()` words each.
class Cluster {
 public:
  /// Product 1 over Z/1 with the single full row.
  static Cluster trivial();

  std::uint64_t product() const { return product_; }
  std::uint32_t order() const { return order_; }
  std::size_t size() const { return multiplicity_.size(); }
  std::size_t stride() const { return stride_; }

  std::span<const std::uint64_t> row_words(std::size_t i) const {
    return {words_.data() + i * stride_, stride_};
  }
  BitRow row(std::size_t i) const;
  std::uint64_t multiplicity(std::size_t i) const { return multiplicity_[i]; }
  std::span<const std::uint64_t> multiplicities() const { return multiplicity_; }
  std::span<const std::uint64_t> words() const { return words_; }

  /// Σ multiplicities, checked against 64 bits.
  std::uint64_t total_multiplicity() const;

 private:
  friend class ClusterBuilder;
  Cluster(std::uint64_t product, std::uint32_t order);

  std::uint64_t product_ = 1;
  std::uint32_t order_ = 1;
  std::size_t stride_ = 1;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> multiplicity_;
};

/// Accumulates rows, merging equal rows by summing their multiplicities.
class ClusterBuilder {
 public:
  ClusterBuilder(std::uint64_t product, std::uint32_t order);

  void add(std::span<const std::uint64_t> row, std::uint64_t multiplicity);
  void add(const BitRow& row, std::uint64_t multiplicity);
  std::size_t size() const { return cluster_.size(); }

  Cluster build() &&;

 private:
  std::uint64_t hash(std::span<const std::uint64_t> row) const;
  void grow();

  Cluster cluster_;
  std::vector<std::uint32_t> slots_;
  std::uint64_t mask_ = 0;
};

/// Rows of f_p for a single odd prime p: the full set with multiplicity
/// p - ord2(p) (omitted when zero) and each co-singleton with multiplicity 1.
Cluster prime_cluster(std::uint64_t p);

/// Lifts every row to Z/target; target must be a multiple of c.order().
Cluster augment(const Cluster& c, std::uint32_t target);

/// Pairwise intersection of the lifted rows of two coprime clusters.
Cluster merge(const Cluster& a, const Cluster& b);

/// Folds prime_cluster(p) for each p into the trivial cluster, in order.
Cluster build_cluster(std::span<const std::uint64_t> primes);

}  // namespace p2k
