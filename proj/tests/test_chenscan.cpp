#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "p2k/chenscan.hpp"
#include "p2k/error.hpp"
#include "p2k/modcore.hpp"
#include "table_fixtures.hpp"

using namespace p2k;

namespace {

std::vector<std::uint64_t> reference_residues() {
  std::vector<std::uint64_t> out;
  for (const auto& row : fixtures::kMod3Systems) out.push_back(static_cast<std::uint64_t>(row[6]));
  std::sort(out.begin(), out.end());
  return out;
}

std::filesystem::path temp_file(const char* name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_CASE("small moduli") {
  const auto v2 = check_even_modulus(2);
  CHECK(v2.covered);
  CHECK(v2.shifts_used == 1);
  CHECK(v2.leftover.empty());

  const auto v4 = check_even_modulus(4);
  CHECK(v4.covered);
  CHECK(v4.shifts_used == 1);

  CHECK_THROWS_AS(check_even_modulus(7), InvalidArgument);
  CHECK_THROWS_AS(check_even_modulus(0), InvalidArgument);
}

TEST_CASE("b = 11184810 leaves the 48 reference residues") {
  const auto v = check_even_modulus(11184810);
  CHECK_FALSE(v.covered);
  CHECK(v.shifts_used == 24);
  CHECK(v.leftover == reference_residues());

  const auto pairs = residual_to_progressions(v);
  REQUIRE(pairs.size() == 48);
  for (const auto& [a, b] : pairs) CHECK(b == 11184810);
}

TEST_CASE("bitset sieve agrees with per-residue gcd loop for b <= 1000") {
  for (std::uint64_t b = 2; b <= 1000; b += 2) {
    const auto v = check_even_modulus(b);
    // running the oracle to the reported stopping shift must leave the same set
    CHECK_MESSAGE(v.leftover == oracle::chen_leftover_by_gcd(b, v.shifts_used), "b = " << b);
    CHECK(v.covered == v.leftover.empty());
    CHECK(v.shifts_used <= shift_bound(b));
    if (v.covered && v.shifts_used > 1) {
      CHECK_FALSE(oracle::chen_leftover_by_gcd(b, v.shifts_used - 1).empty());
    }
  }
}

TEST_CASE("shifts beyond the bound clear nothing new") {
  for (std::uint64_t b : {6ull, 30ull, 210ull, 2310ull, 96ull, 360ull, 5460ull}) {
    const auto m = shift_bound(b);
    std::uint64_t j = 0, odd = b;
    while (odd % 2 == 0) {
      odd /= 2;
      ++j;
    }
    CHECK(m == (j - 1) + ord2(odd));
    CHECK(oracle::chen_leftover_by_gcd(b, m) == oracle::chen_leftover_by_gcd(b, m + 3 * ord2(odd)));
  }
}

TEST_CASE("witness search: every odd class mod b <= 300 contains some p + 2^k") {
  constexpr std::uint64_t kLimit = 10'000'000;
  std::vector<bool> composite(kLimit + 1, false);
  std::vector<std::uint32_t> primes;
  for (std::uint64_t i = 2; i <= kLimit; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= kLimit; j += i) composite[j] = true;
  }
  for (std::uint64_t b = 2; b <= 300; b += 2) {
    std::vector<bool> seen(b, false);
    std::uint64_t remaining = b / 2;
    for (std::uint64_t k = 1; k <= 30 && remaining; ++k) {
      const std::uint64_t shift = (std::uint64_t{1} << k) % b;
      for (auto p : primes) {
        const auto j = (p + shift) % b;
        if (j % 2 == 1 && !seen[j]) {
          seen[j] = true;
          if (--remaining == 0) break;
        }
      }
    }
    CHECK_MESSAGE(remaining == 0, "b = " << b);
  }
}

TEST_CASE("scan_range") {
  CHECK(scan_range(2, 2).uncovered.empty());
  const auto r = scan_range(2, 5000);
  CHECK(r.uncovered.empty());
  CHECK(r.checkpoint == 5000);
  const auto par = scan_range(2, 5000, {.workers = 3});
  CHECK(par.uncovered.empty());
  CHECK_THROWS_AS(scan_range(10, 4), InvalidArgument);

  // a range containing the first uncovered modulus
  const auto big = scan_range(11184808, 11184812);
  REQUIRE(big.uncovered.size() == 1);
  CHECK(big.uncovered.front().b == 11184810);
}

TEST_CASE("checkpoint resume") {
  const auto path = temp_file("p2k_scan_checkpoint.txt");
  ScanOptions opts;
  opts.checkpoint = path;
  opts.chunk = 100;
  const auto first = scan_range(2, 1000, opts);
  CHECK_FALSE(first.resumed);
  REQUIRE(std::filesystem::exists(path));
  {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "last_b=1000");
  }
  std::uint64_t first_seen = 0;
  opts.progress = [&](std::uint64_t b) {
    if (!first_seen) first_seen = b;
  };
  const auto second = scan_range(2, 3000, opts);
  CHECK(second.resumed);
  CHECK(second.checkpoint == 3000);
  CHECK(second.uncovered.empty());
  CHECK(first_seen > 1000);

  // the uncovered verdict survives a resume
  std::filesystem::remove(path);
  opts.progress = nullptr;
  opts.chunk = 2;
  scan_range(11184806, 11184810, opts);
  const auto resumed = scan_range(11184806, 11184814, opts);
  CHECK(resumed.resumed);
  REQUIRE(resumed.uncovered.size() == 1);
  CHECK(resumed.uncovered.front() == check_even_modulus(11184810));
  std::filesystem::remove(path);
}

TEST_CASE("residual_to_progressions rejects covered verdicts") {
  CHECK_THROWS_AS(residual_to_progressions(check_even_modulus(4)), InvalidArgument);
}

TEST_CASE("doubled modulus keeps a superset of the doubled residues") {
  const auto v = check_even_modulus(22369620);
  CHECK_FALSE(v.covered);
  const std::set<std::uint64_t> left(v.leftover.begin(), v.leftover.end());
  for (auto a : reference_residues()) {
    // each class mod 11184810 splits into two classes mod 22369620; both lifts survive
    const bool in_lower = left.count(a) > 0;
    const bool in_upper = left.count(a + 11184810) > 0;
    CHECK((in_lower && in_upper));
  }
}
