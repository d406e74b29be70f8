#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "p2k/error.hpp"

namespace p2k {

using BigInt = boost::multiprecision::mpz_int;

template <class Int>
struct PrimePower {
  Int prime;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

template <class Int>
using Factorization = std::vector<PrimePower<Int>>;

// x ≡ residue (mod modulus), 0 <= residue < modulus.
struct Congruence {
  BigInt residue;
  BigInt modulus;

  Congruence() : residue(0), modulus(1) {}
  Congruence(BigInt r, BigInt m);

  bool contains(const BigInt& x) const;
  friend bool operator==(const Congruence&, const Congruence&) = default;
};

// Non-coprime pair handed to crt_solve; first/second index into the input.
class NonCoprimeModuli : public InvalidArgument {
 public:
  NonCoprimeModuli(std::size_t first, std::size_t second);
  std::size_t first;
  std::size_t second;
};

/// Multiplicative order of 2 modulo an odd n >= 1, with ord2(1) = 1.
std::uint64_t ord2(std::uint64_t n);
BigInt ord2(const BigInt& n);

std::uint64_t pow2_mod(std::uint64_t k, std::uint64_t m);
BigInt pow2_mod(const BigInt& k, const BigInt& m);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);

/// Prime factorization with ascending primes. Trial division to 10^7, then the
/// compiled-in Mersenne factor table, then a primality test on the cofactor.
/// Throws UnsupportedRange if a composite cofactor survives all three.
Factorization<std::uint64_t> factorize(std::uint64_t n);
Factorization<BigInt> factorize(const BigInt& n);

std::uint64_t euler_phi(std::uint64_t n);
BigInt euler_phi(const BigInt& n);

bool is_prime(std::uint64_t n);
bool is_prime(const BigInt& n);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b);

/// Solves a system of congruences with pairwise coprime moduli. The result's
/// modulus is the product of the input moduli.
Congruence crt_solve(std::span<const Congruence> conditions);

inline constexpr unsigned kMersenneTableMin = 2;
inline constexpr unsigned kMersenneTableMax = 80;

/// Distinct prime divisors of 2^d - 1, ascending; 2 <= d <= 80.
std::vector<std::uint64_t> mersenne_prime_divisors(unsigned d);

/// The subset of mersenne_prime_divisors(d) whose order of 2 is exactly d.
std::vector<std::uint64_t> primitive_mersenne_divisors(unsigned d);

/// Full factorization of 2^d - 1 from the compiled-in table.
const Factorization<std::uint64_t>& mersenne_factorization(unsigned d);

}  // namespace p2k
