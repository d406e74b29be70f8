#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "p2k/cluster.hpp"
#include "p2k/modcore.hpp"

namespace p2k {

/// counts[ν] = #{m mod M : |f_M(m)| = ν} for 0 <= ν <= ord2(M).
struct DeltaHistogram {
  BigInt modulus = 1;
  std::uint64_t order = 1;
  std::vector<BigInt> counts;

  BigInt total() const;           // Σ δ(ν), must equal M
  BigInt weighted_total() const;  // Σ ν δ(ν), must equal ord2(M) φ(M)

  /// Throws InvalidArgument if either mass identity fails.
  void check_mass_identities() const;

  friend bool operator==(const DeltaHistogram&, const DeltaHistogram&) = default;
};

/// Histogram of row sizes weighted by multiplicity.
DeltaHistogram histogram(const Cluster& c);

struct CrossOptions {
  unsigned workers = 1;
  std::size_t tile_rows = 8;  // left rows scored against each streamed right row
};

/// Histogram of merge(left, right) without materializing it.
DeltaHistogram cross_histogram(const Cluster& left, const Cluster& right, const CrossOptions& opts = {});

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Direct computation of δ_M by testing m - 2^k against every prime of M.
/// M must be odd, squarefree and at most 10^7.
DeltaHistogram brute_force_delta(std::uint64_t M);

enum class FormulaVariant {
  corrected,  // Σ δ(ν) min(1/(2M), ν / (ord2(M) φ(M) ln 2))
  printed,    // Σ δ(ν) min(1/M, 2ν / (ord2(M) φ(M) ln 2))
};

std::string to_string(FormulaVariant v);
FormulaVariant parse_variant(const std::string& s);

struct Partition {
  std::vector<std::uint64_t> left;
  std::vector<std::uint64_t> right;
};

struct BoundResult {
  std::vector<std::uint64_t> primes;
  Partition partition;
  BigInt modulus = 1;
  std::uint64_t order = 1;
  BigInt phi = 1;
  DeltaHistogram histogram;
  FormulaVariant variant = FormulaVariant::corrected;
  std::string bound;  // decimal, rounded toward +inf
  double value = 0;   // rounded toward +inf
};

inline constexpr unsigned kBoundDigits = 20;
inline constexpr long kBoundPrecisionBits = 256;

/// Upper bound on the upper density from a histogram. Every rounding step is
/// directed so the result is never below the exact value.
BoundResult evaluate_bound(const DeltaHistogram& h, FormulaVariant variant = FormulaVariant::corrected);

/// Splits primes into two halves whose products are as close as possible.
Partition balanced_partition(std::span<const std::uint64_t> primes);

struct EstimateOptions {
  FormulaVariant variant = FormulaVariant::corrected;
  CrossOptions cross;
};

BoundResult run_estimate(std::span<const std::uint64_t> primes, const std::optional<Partition>& partition = std::nullopt,
                         const EstimateOptions& opts = {});

}  // namespace p2k
