#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "p2k/progressions.hpp"
#include "table_fixtures.hpp"

using namespace p2k;
using namespace p2k::fixtures;

namespace {

const PrimeAssignment kErdosPrimes({{2, 3}, {3, 7}, {4, 5}, {8, 17}, {12, 13}, {24, 241}});

CoveringSystem mod3_system(std::size_t row) {
  std::vector<ResidueClass> cls;
  for (std::size_t i = 0; i < 6; ++i) cls.push_back({kMod3Systems[row][i], kMod3Moduli[i]});
  return CoveringSystem(cls);
}

std::vector<Progression> reference_progressions() {
  std::vector<Progression> out;
  for (const auto& row : kMod3Systems) out.push_back({BigInt(row[6]), BigInt(kErdosModulus)});
  return out;
}

CoveringSystem larger_system(const LargerSystem& s) {
  std::vector<ResidueClass> cls;
  for (std::size_t i = 0; i < s.size; ++i) cls.push_back({s.residues[i], s.moduli[i]});
  return CoveringSystem(cls);
}

}  // namespace

TEST_CASE("derive_progression: Erdos and Chen systems") {
  const auto erdos = derive_progression(mod3_system(0), kErdosPrimes);
  CHECK(erdos.ap.residue == 7629217);
  CHECK(erdos.ap.modulus == kErdosModulus);
  const auto chen = derive_progression(mod3_system(1), kErdosPrimes);
  CHECK(chen.ap.residue == 992077);
}

TEST_CASE("derive_progression: every D = 24 modulus-3 system") {
  for (std::size_t r = 0; r < kMod3Systems.size(); ++r) {
    const auto p = derive_progression(mod3_system(r), kErdosPrimes);
    CHECK_MESSAGE(p.ap.residue == kMod3Systems[r][6], "row " << r);
    // representative is odd, reduced, and matches every assigned congruence
    CHECK(p.ap.residue % 2 == 1);
    CHECK(p.ap.residue < p.ap.modulus);
    for (const auto& cls : p.system.classes()) {
      const auto q = *p.assignment.prime_for(cls.modulus);
      CHECK(BigInt(p.ap.residue % q) == pow2_mod(static_cast<std::uint64_t>(cls.residue), q));
    }
  }
}

TEST_CASE("derive_progression: modulus-6 systems give the same 48 residues") {
  std::set<std::int64_t> t1, t2;
  for (const auto& row : kMod3Systems) t1.insert(row[6]);
  for (const auto& row : kMod6Systems) {
    std::vector<ResidueClass> cls;
    for (std::size_t i = 0; i < 6; ++i) cls.push_back({row[i], kMod6Moduli[i]});
    const auto p = derive_progression_with_modulus(CoveringSystem(cls), BigInt(kErdosModulus));
    REQUIRE(p.has_value());
    CHECK(p->ap.residue == row[6]);
    t2.insert(row[6]);
  }
  CHECK(t1.size() == 48);
  CHECK(t1 == t2);
}

TEST_CASE("derive_progression rejects a mismatched assignment") {
  const PrimeAssignment wrong({{2, 3}, {3, 7}, {4, 5}, {8, 17}, {12, 13}});
  CHECK_THROWS_AS(derive_progression(mod3_system(0), wrong), InvalidArgument);
}

TEST_CASE("larger systems") {
  for (const auto& s : kLargerSystems) {
    const auto c = larger_system(s);
    REQUIRE(c.lcm() == s.D);
    const auto p = derive_progression_with_modulus(c, BigInt(s.modulus));
    REQUIRE_MESSAGE(p.has_value(), "D = " << s.D);
    CHECK_MESSAGE(p->ap.residue == BigInt(s.residue), "D = " << s.D);
    CHECK(verify_excludes_primes(*p).verdict);
    // The D = 36 and D = 72 rows leave residues uncovered as printed
    // (0 mod 36 and 0 mod 72 among them), so the chain cannot certify them.
    const bool printed_covers = s.D != 36 && s.D != 72;
    CHECK_MESSAGE(is_covering(c) == printed_covers, "D = " << s.D);
    CHECK_MESSAGE(membership_in_U_is_certified(*p) == printed_covers, "D = " << s.D);
  }
  const auto d36 = larger_system(kLargerSystems[0]);
  const PrimeAssignment asg({{2, 3}, {3, 7}, {4, 5}, {9, 73}, {12, 13}, {18, 19}, {36, 109}});
  const auto p = derive_progression(d36, asg);
  CHECK(p.ap.residue == 309547193);
  CHECK(p.ap.modulus == 412729590);
}

TEST_CASE("exclusion certificates") {
  for (std::size_t r = 0; r < kMod3Systems.size(); ++r) {
    const auto p = derive_progression(mod3_system(r), kErdosPrimes);
    const auto cert = verify_excludes_primes(p);
    CHECK(cert.verdict);
    CHECK(cert.witnesses.empty());
    CHECK(cert.k_period == 24);
    CHECK(membership_in_U_is_certified(p));
  }
  const auto primes = kErdosPrimes.primes();
  const auto bad = verify_excludes_primes(Progression{7, kErdosModulus}, primes);
  CHECK_FALSE(bad.verdict);
  // 7 = 5 + 2^1 = 3 + 2^2
  const std::vector<ExclusionWitness> want{{3, 2}, {5, 1}};
  auto got = bad.witnesses;
  std::sort(got.begin(), got.end(), [](auto x, auto y) { return x.prime < y.prime; });
  CHECK(got == want);

  const auto chen = verify_excludes_primes(Progression{3292241, kErdosModulus}, primes);
  CHECK(chen.verdict);
}

TEST_CASE("membership fails for a non-covering source") {
  auto p = derive_progression(mod3_system(0), kErdosPrimes);
  std::vector<ResidueClass> cls = p.system.classes();
  cls.back().residue = (cls.back().residue + 1) % cls.back().modulus;
  p.system = CoveringSystem(cls);
  CHECK_FALSE(is_covering(p.system));
  CHECK_FALSE(membership_in_U_is_certified(p));
}

TEST_CASE("derivation soundness over one period") {
  auto check = [](const CdlProgression& p) {
    const auto primes = p.assignment.primes();
    const BigInt half = p.ap.modulus / 2;
    const auto period = static_cast<std::uint64_t>(ord2(half));
    for (std::uint64_t k = 0; k < period; ++k) {
      const BigInt x = p.ap.residue - pow2_mod(BigInt(k), p.ap.modulus);
      bool divisible = false;
      for (auto q : primes) divisible = divisible || x % q == 0;
      CHECK_MESSAGE(divisible, "k = " << k);
    }
  };
  check(derive_progression(mod3_system(0), kErdosPrimes));
  check(derive_progression(mod3_system(17), kErdosPrimes));
  for (const auto& s : kLargerSystems) {
    const auto c = larger_system(s);
    if (is_covering(c)) check(*derive_progression_with_modulus(c, BigInt(s.modulus)));
  }
}

TEST_CASE("exclusion period is exhaustive") {
  for (const auto& s : kLargerSystems) {
    const BigInt M(s.modulus);
    const BigInt period = ord2(BigInt(M / 2));
    CHECK(pow2_mod(BigInt(1 + period), M) == pow2_mod(BigInt(1), M));
  }
  CHECK(pow2_mod(std::uint64_t{25}, std::uint64_t(kErdosModulus)) == 2);
}

TEST_CASE("pair census") {
  const auto aps = reference_progressions();
  // 384 unordered pairs have gcd 2; 768 is the same count over ordered pairs
  CHECK(pair_gcd_census(aps) == PairCensus{1128, 384, 768});

  const std::vector<Progression> one{{7629217, kErdosModulus}};
  CHECK(pair_gcd_census(one) == PairCensus{0, 0, 0});
  // gcd(11184810, 7629217 - 992077) = 122910
  const std::vector<Progression> far{{7629217, kErdosModulus}, {992077, kErdosModulus}};
  CHECK(pair_gcd_census(far) == PairCensus{1, 0, 0});
  const std::vector<Progression> two{{992077, kErdosModulus}, {3292241, kErdosModulus}};
  CHECK(pair_gcd_census(two) == PairCensus{1, 1, 2});

  const std::vector<Progression> mixed{{1, 6}, {1, 10}};
  CHECK_THROWS_AS(pair_gcd_census(mixed), InvalidArgument);

  auto shuffled = aps;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(pair_gcd_census(shuffled) == PairCensus{1128, 384, 768});
  }
}
