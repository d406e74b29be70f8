#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "p2k/covering.hpp"

namespace p2k {

// The arithmetic progression residue (mod modulus).
struct Progression {
  BigInt residue;
  BigInt modulus;

  friend bool operator==(const Progression&, const Progression&) = default;
  friend bool operator<(const Progression& x, const Progression& y) {
    return x.modulus != y.modulus ? x.modulus < y.modulus : x.residue < y.residue;
  }
};

struct CdlProgression {
  Progression ap;
  CoveringSystem system;
  PrimeAssignment assignment;
};

struct ExclusionWitness {
  std::uint64_t prime = 0;
  std::uint64_t k = 0;

  friend bool operator==(const ExclusionWitness&, const ExclusionWitness&) = default;
};

/// Result of checking that no assigned prime c satisfies c + 2^k ≡ a (mod M).
/// k = 0 is excluded by parity (c + 1 is even, a is odd) and never tested.
struct ExclusionCertificate {
  Progression ap;
  std::vector<std::uint64_t> checked_primes;
  std::uint64_t k_period = 0;  // ord2(M / 2)
  bool verdict = false;
  std::vector<ExclusionWitness> witnesses;

  friend bool operator==(const ExclusionCertificate&, const ExclusionCertificate&) = default;
};

CdlProgression derive_progression(const CoveringSystem& c, const PrimeAssignment& asg);

/// Tries every assignment of c's moduli and returns the progression whose
/// modulus equals `modulus`, if any.
std::optional<CdlProgression> derive_progression_with_modulus(const CoveringSystem& c, const BigInt& modulus);

ExclusionCertificate verify_excludes_primes(const Progression& ap, std::span<const std::uint64_t> primes);
ExclusionCertificate verify_excludes_primes(const CdlProgression& p);

/// Covering + valid assignment + derivation consistent + exclusion verdict.
bool membership_in_U_is_certified(const CdlProgression& p);

struct PairCensus {
  std::uint64_t total_pairs = 0;
  std::uint64_t gcd_two_pairs = 0;
  std::uint64_t ordered_gcd_two_pairs = 0;  // (i, j) and (j, i) counted separately

  friend bool operator==(const PairCensus&, const PairCensus&) = default;
};

/// Counts unordered pairs with gcd(M, a_i - a_j) = 2, and the same count over
/// ordered pairs i != j. All moduli must agree.
PairCensus pair_gcd_census(std::span<const Progression> aps);

}  // namespace p2k
