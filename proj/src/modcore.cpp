#include "p2k/modcore.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include <boost/multiprecision/miller_rabin.hpp>

namespace p2k {
namespace {

constexpr std::uint64_t kTrialLimit = 10'000'000;

std::string str(const BigInt& x) { return x.str(); }

bool fits_u64(const BigInt& x) {
  return x >= 0 && x <= BigInt(std::numeric_limits<std::uint64_t>::max());
}

const std::vector<std::uint64_t>& table_primes() {
  static const std::vector<std::uint64_t> primes = [] {
    std::vector<std::uint64_t> out;
    for (unsigned d = kMersenneTableMin; d <= kMersenneTableMax; ++d) {
      for (const auto& pp : mersenne_factorization(d)) out.push_back(pp.prime);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }();
  return primes;
}

template <class Int>
void add_factor(std::map<Int, unsigned>& acc, const Int& p, unsigned e) {
  acc[p] += e;
}

template <class Int>
Factorization<Int> to_factorization(const std::map<Int, unsigned>& acc) {
  Factorization<Int> out;
  out.reserve(acc.size());
  for (const auto& [p, e] : acc) out.push_back({p, e});
  return out;
}

// Divides out every table prime from n; returns what is left.
template <class Int>
Int strip_table_primes(Int n, std::map<Int, unsigned>& acc) {
  for (std::uint64_t p : table_primes()) {
    if (n == 1) break;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) add_factor(acc, Int(p), e);
  }
  return n;
}

void factor_u64_into(std::uint64_t n, std::map<std::uint64_t, unsigned>& acc) {
  unsigned e = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++e;
  }
  if (e) add_factor(acc, std::uint64_t{2}, e);
  std::uint64_t d = 3;
  for (; d <= kTrialLimit && d <= n / d; d += 2) {
    if (n % d) continue;
    e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    add_factor(acc, d, e);
  }
  if (n == 1) return;
  if (d > n / d || is_prime(n)) {
    add_factor(acc, n, 1);
    return;
  }
  n = strip_table_primes(n, acc);
  if (n == 1) return;
  if (!is_prime(n)) throw UnsupportedRange("cannot factor composite cofactor " + std::to_string(n));
  add_factor(acc, n, 1);
}

template <class Int>
Int egcd_inverse(Int a, const Int& m) {
  // inverse of a modulo m, gcd(a, m) = 1 assumed
  Int old_r = a % m, r = m;
  Int old_s = 1, s = 0;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  Int inv = old_s % m;
  if (inv < 0) inv += m;
  return inv;
}

template <class Int>
Int order_of_two(const Int& n) {
  if (n == 1) return Int(1);
  Int result = 1;
  for (const auto& [p, e] : factorize(n)) {
    Int t = p - 1;
    for (const auto& q : factorize(Int(p - 1))) {
      for (unsigned i = 0; i < q.exponent; ++i) {
        if (pow2_mod(Int(t / q.prime), p) != 1) break;
        t /= q.prime;
      }
    }
    Int pe = 1;
    for (unsigned i = 0; i < e; ++i) pe *= p;
    while (pow2_mod(t, pe) != 1) t *= p;
    if constexpr (std::is_same_v<Int, std::uint64_t>) {
      result = lcm_u64(result, t);
    } else {
      result = boost::multiprecision::lcm(result, t);
    }
  }
  return result;
}

}  // namespace

Congruence::Congruence(BigInt r, BigInt m) : residue(std::move(r)), modulus(std::move(m)) {
  if (modulus < 1) throw InvalidArgument("congruence modulus must be >= 1, got " + str(modulus));
  if (residue < 0 || residue >= modulus) {
    throw InvalidArgument("congruence residue " + str(residue) + " outside [0, " + str(modulus) + ")");
  }
}

bool Congruence::contains(const BigInt& x) const {
  BigInt r = x % modulus;
  if (r < 0) r += modulus;
  return r == residue;
}

NonCoprimeModuli::NonCoprimeModuli(std::size_t i, std::size_t j)
    : InvalidArgument("moduli at positions " + std::to_string(i) + " and " + std::to_string(j) +
                      " are not coprime"),
      first(i),
      second(j) {}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  std::uint64_t out;
  if (__builtin_mul_overflow(a / std::gcd(a, b), b, &out)) throw Overflow("lcm exceeds 64 bits");
  return out;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow2_mod(std::uint64_t k, std::uint64_t m) {
  if (m == 0) throw InvalidArgument("pow2_mod: modulus must be >= 1");
  if (m == 1) return 0;
  std::uint64_t result = 1, base = 2 % m;
  while (k) {
    if (k & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    k >>= 1;
  }
  return result;
}

BigInt pow2_mod(const BigInt& k, const BigInt& m) {
  if (m < 1) throw InvalidArgument("pow2_mod: modulus must be >= 1");
  if (k < 0) throw InvalidArgument("pow2_mod: exponent must be >= 0");
  if (m == 1) return 0;
  return boost::multiprecision::powm(BigInt(2), k, m);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  auto pow_mod = [n](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    b %= n;
    while (e) {
      if (e & 1) r = mul_mod(r, b, n);
      b = mul_mod(b, b, n);
      e >>= 1;
    }
    return r;
  };
  // This base set is deterministic for all n < 3.3e24.
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = pow_mod(a, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_prime(const BigInt& n) {
  if (fits_u64(n)) return is_prime(static_cast<std::uint64_t>(n));
  if (n < 2) return false;
  return boost::multiprecision::miller_rabin_test(n, 32);
}

Factorization<std::uint64_t> factorize(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("factorize: n must be >= 1");
  std::map<std::uint64_t, unsigned> acc;
  factor_u64_into(n, acc);
  return to_factorization(acc);
}

Factorization<BigInt> factorize(const BigInt& n) {
  if (n < 1) throw InvalidArgument("factorize: n must be >= 1, got " + str(n));
  std::map<BigInt, unsigned> acc;
  BigInt rest = n;
  if (!fits_u64(rest)) rest = strip_table_primes(rest, acc);
  if (!fits_u64(rest)) {
    for (std::uint64_t d = 2; d <= kTrialLimit && BigInt(d) * d <= rest; d += (d == 2 ? 1 : 2)) {
      unsigned e = 0;
      while (rest % d == 0) {
        rest /= d;
        ++e;
      }
      if (e) add_factor(acc, BigInt(d), e);
      if (fits_u64(rest)) break;
    }
  }
  if (fits_u64(rest)) {
    std::map<std::uint64_t, unsigned> small;
    if (rest > 1) factor_u64_into(static_cast<std::uint64_t>(rest), small);
    for (const auto& [p, e] : small) add_factor(acc, BigInt(p), e);
  } else if (is_prime(rest)) {
    add_factor(acc, rest, 1);
  } else {
    throw UnsupportedRange("cannot factor composite cofactor " + str(rest));
  }
  return to_factorization(acc);
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (const auto& [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

BigInt euler_phi(const BigInt& n) {
  BigInt phi = n;
  for (const auto& [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

std::uint64_t ord2(std::uint64_t n) {
  if (n == 0 || n % 2 == 0) throw InvalidArgument("ord2 needs an odd positive modulus, got " + std::to_string(n));
  return order_of_two(n);
}

BigInt ord2(const BigInt& n) {
  if (n < 1 || n % 2 == 0) throw InvalidArgument("ord2 needs an odd positive modulus, got " + str(n));
  if (fits_u64(n)) return BigInt(ord2(static_cast<std::uint64_t>(n)));
  return order_of_two(n);
}

Congruence crt_solve(std::span<const Congruence> conditions) {
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    for (std::size_t j = i + 1; j < conditions.size(); ++j) {
      if (boost::multiprecision::gcd(conditions[i].modulus, conditions[j].modulus) != 1) {
        throw NonCoprimeModuli(i, j);
      }
    }
  }
  BigInt x = 0, m = 1;
  for (const auto& c : conditions) {
    // x + m*t ≡ residue (mod c.modulus)
    BigInt diff = (c.residue - x) % c.modulus;
    if (diff < 0) diff += c.modulus;
    BigInt t = diff * egcd_inverse(BigInt(m % c.modulus), c.modulus) % c.modulus;
    x += m * t;
    m *= c.modulus;
  }
  return Congruence(x % m, m);
}

std::vector<std::uint64_t> mersenne_prime_divisors(unsigned d) {
  std::vector<std::uint64_t> out;
  for (const auto& pp : mersenne_factorization(d)) out.push_back(pp.prime);
  return out;
}

std::vector<std::uint64_t> primitive_mersenne_divisors(unsigned d) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p : mersenne_prime_divisors(d)) {
    if (ord2(p) == d) out.push_back(p);
  }
  return out;
}

}  // namespace p2k
