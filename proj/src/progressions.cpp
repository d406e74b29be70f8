#include "p2k/progressions.hpp"

namespace p2k {

CdlProgression derive_progression(const CoveringSystem& c, const PrimeAssignment& asg) {
  Congruence cong = cdl_congruence(c, asg);
  return {{cong.residue, cong.modulus}, c, asg};
}

std::optional<CdlProgression> derive_progression_with_modulus(const CoveringSystem& c, const BigInt& modulus) {
  const auto moduli = c.moduli();
  for (const auto& asg : find_prime_assignments(moduli)) {
    BigInt m = 2;
    for (std::uint64_t p : asg.primes()) m *= p;
    if (m == modulus) return derive_progression(c, asg);
  }
  return std::nullopt;
}

ExclusionCertificate verify_excludes_primes(const Progression& ap, std::span<const std::uint64_t> primes) {
  if (ap.modulus < 2 || ap.modulus % 2 != 0) throw InvalidArgument("progression modulus must be even");
  ExclusionCertificate cert;
  cert.ap = ap;
  cert.checked_primes.assign(primes.begin(), primes.end());
  const BigInt half = ap.modulus / 2;
  cert.k_period = static_cast<std::uint64_t>(ord2(half));

  // 2^k mod M for k >= 1 repeats with period ord2(M/2), so k in [1, period] is exhaustive.
  BigInt a = ap.residue % ap.modulus;
  if (a < 0) a += ap.modulus;
  BigInt power = 1;
  for (std::uint64_t k = 1; k <= cert.k_period; ++k) {
    power = (power * 2) % ap.modulus;
    for (std::uint64_t c : primes) {
      if ((BigInt(c) + power) % ap.modulus == a) cert.witnesses.push_back({c, k});
    }
  }
  cert.verdict = cert.witnesses.empty();
  return cert;
}

ExclusionCertificate verify_excludes_primes(const CdlProgression& p) {
  const auto primes = p.assignment.primes();
  return verify_excludes_primes(p.ap, primes);
}

bool membership_in_U_is_certified(const CdlProgression& p) {
  if (!is_covering(p.system)) return false;
  if (!p.assignment.matches(p.system)) return false;
  Congruence expected = cdl_congruence(p.system, p.assignment);
  if (expected.residue != p.ap.residue || expected.modulus != p.ap.modulus) return false;
  return verify_excludes_primes(p).verdict;
}

PairCensus pair_gcd_census(std::span<const Progression> aps) {
  PairCensus census;
  if (aps.empty()) return census;
  const BigInt& m = aps.front().modulus;
  for (const auto& ap : aps) {
    if (ap.modulus != m) throw InvalidArgument("pair_gcd_census: mixed moduli");
  }
  for (std::size_t i = 0; i < aps.size(); ++i) {
    for (std::size_t j = i + 1; j < aps.size(); ++j) {
      BigInt diff = aps[i].residue - aps[j].residue;
      if (diff < 0) diff = -diff;
      ++census.total_pairs;
      if (boost::multiprecision::gcd(m, diff) == 2) ++census.gcd_two_pairs;
    }
  }
  census.ordered_gcd_two_pairs = 2 * census.gcd_two_pairs;
  return census;
}

}  // namespace p2k
