#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "p2k/modcore.hpp"

namespace p2k {

// k ≡ residue (mod modulus) over the exponents k.
struct ResidueClass {
  std::int64_t residue = 0;
  std::int64_t modulus = 1;

  friend auto operator<=>(const ResidueClass&, const ResidueClass&) = default;
};

/// A finite family of residue classes with pairwise distinct moduli, kept
/// sorted by modulus. Construction rejects repeated moduli.
class CoveringSystem {
 public:
  CoveringSystem() = default;
  explicit CoveringSystem(std::vector<ResidueClass> classes);

  const std::vector<ResidueClass>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  std::int64_t lcm() const { return lcm_; }
  std::vector<std::int64_t> moduli() const;

  // Σ 1/d_i as a fraction over lcm(): returns Σ lcm/d_i.
  std::int64_t density_numerator() const;

  friend auto operator<=>(const CoveringSystem&, const CoveringSystem&) = default;

 private:
  std::vector<ResidueClass> classes_;
  std::int64_t lcm_ = 1;
};

struct ModulusPrime {
  std::int64_t modulus = 0;
  std::uint64_t prime = 0;

  friend auto operator<=>(const ModulusPrime&, const ModulusPrime&) = default;
};

/// Injective map modulus -> prime with prime | 2^modulus - 1.
class PrimeAssignment {
 public:
  PrimeAssignment() = default;
  explicit PrimeAssignment(std::vector<ModulusPrime> pairs);

  const std::vector<ModulusPrime>& pairs() const { return pairs_; }
  std::vector<std::uint64_t> primes() const;
  std::optional<std::uint64_t> prime_for(std::int64_t modulus) const;
  bool matches(const CoveringSystem& c) const;

  friend auto operator<=>(const PrimeAssignment&, const PrimeAssignment&) = default;

 private:
  std::vector<ModulusPrime> pairs_;
};

struct CdlSystem {
  CoveringSystem system;
  PrimeAssignment assignment;

  friend auto operator<=>(const CdlSystem&, const CdlSystem&) = default;
};

struct EnumerationReport {
  std::int64_t D = 0;
  std::vector<CdlSystem> systems;
  std::size_t distinct_progression_count = 0;
  std::string note;  // set when the divisor-sum screen rejects D
};

struct EnumerationOptions {
  unsigned workers = 1;
  std::size_t max_systems = 0;  // 0 = exhaustive
};

enum class Minimality { minimal, redundant, not_covering };

bool is_covering(const CoveringSystem& c);
Minimality minimality(const CoveringSystem& c);
inline bool is_minimal(const CoveringSystem& c) { return minimality(c) == Minimality::minimal; }

/// Every injective assignment, ascending lexicographically by prime tuple.
std::vector<PrimeAssignment> find_prime_assignments(std::span<const std::int64_t> moduli);

std::vector<std::int64_t> divisors(std::int64_t n);

/// True when Σ_{d|D} 1/d > 2, the necessary condition for a CDL system with lcm D.
bool passes_divisor_screen(std::int64_t D);

/// All minimal CDL covering systems whose moduli have lcm exactly D.
EnumerationReport enumerate_cdl_systems(std::int64_t D, const EnumerationOptions& opts = {});

/// {1 mod 2} ∪ {2m_i mod 2d_i}. Throws InvalidArgument unless c is a minimal
/// covering without modulus 1.
CoveringSystem double_cover(const CoveringSystem& c);

/// Progression residue for {1 mod 2} ∪ {2^{a_i} mod p_i}; shared with the
/// progressions module.
Congruence cdl_congruence(const CoveringSystem& c, const PrimeAssignment& asg);

}  // namespace p2k
