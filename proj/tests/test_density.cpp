#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "p2k/cluster.hpp"
#include "p2k/density.hpp"
#include "p2k/error.hpp"

using namespace p2k;

namespace {

std::vector<std::uint64_t> as_u64(const DeltaHistogram& h) {
  std::vector<std::uint64_t> out;
  for (const auto& c : h.counts) out.push_back(static_cast<std::uint64_t>(c));
  return out;
}

DeltaHistogram pipeline(std::vector<std::uint64_t> primes) { return histogram(build_cluster(primes)); }

// Rows as (member list, multiplicity), order-insensitive.
std::multiset<std::pair<std::vector<std::size_t>, std::uint64_t>> rows_of(const Cluster& c) {
  std::multiset<std::pair<std::vector<std::size_t>, std::uint64_t>> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.insert({c.row(i).members(), c.multiplicity(i)});
  return out;
}

// Co-singleton rows plus the full row: the expected cluster of a prime.
std::multiset<std::pair<std::vector<std::size_t>, std::uint64_t>> expected_prime_rows(std::size_t L, std::uint64_t full) {
  std::multiset<std::pair<std::vector<std::size_t>, std::uint64_t>> out;
  std::vector<std::size_t> all(L);
  std::iota(all.begin(), all.end(), 0);
  if (full) out.insert({all, full});
  for (std::size_t j = 0; j < L; ++j) {
    auto r = all;
    r.erase(r.begin() + static_cast<std::ptrdiff_t>(j));
    out.insert({r, 1});
  }
  return out;
}

using Float = boost::multiprecision::cpp_bin_float_100;

// Reference value with plain nearest rounding at ~330 bits.
Float reference_bound(const DeltaHistogram& h, std::uint64_t phi) {
  const Float M = Float(h.modulus.str());
  const Float denom = Float(h.order) * Float(phi) * boost::multiprecision::log(Float(2));
  Float sum = 0;
  for (std::size_t nu = 0; nu < h.counts.size(); ++nu) {
    const Float cap = 1 / (2 * M);
    const Float slope = Float(nu) / denom;
    sum += Float(h.counts[nu].str()) * (cap < slope ? cap : slope);
  }
  return sum;
}

double bound_of(std::vector<std::uint64_t> primes) { return run_estimate(primes).value; }

}  // namespace

TEST_CASE("prime clusters") {
  const auto c3 = prime_cluster(3);
  CHECK(c3.order() == 2);
  CHECK(c3.product() == 3);
  CHECK(rows_of(c3) == expected_prime_rows(2, 1));

  const auto c7 = prime_cluster(7);
  CHECK(c7.order() == 3);
  CHECK(rows_of(c7) == expected_prime_rows(3, 4));

  const auto c5 = prime_cluster(5);
  CHECK(c5.order() == 4);
  CHECK(rows_of(c5) == expected_prime_rows(4, 1));
  CHECK(c5.total_multiplicity() == 5);

  // p = 2^L - 1 would have no full row; 31 has ord 5 and 26 full
  CHECK(prime_cluster(31).total_multiplicity() == 31);

  CHECK_THROWS_AS(prime_cluster(2), InvalidArgument);
  CHECK_THROWS_AS(prime_cluster(9), InvalidArgument);
}

TEST_CASE("prime clusters agree with the direct f_p computation") {
  for (std::uint64_t p : {3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 31ull, 41ull, 73ull}) {
    CHECK(as_u64(histogram(prime_cluster(p))) == oracle::delta_by_gcd(p));
  }
}

TEST_CASE("BitRow lift") {
  const std::vector<std::size_t> one{1};
  const BitRow r(2, one);
  CHECK(r.lift(4).members() == std::vector<std::size_t>{1, 3});
  CHECK(r.lift(2) == r);
  CHECK_THROWS_AS(r.lift(3), InvalidArgument);
  // lifts across word boundaries
  const std::vector<std::size_t> m{0, 70};
  const BitRow wide(72, m);
  const auto lifted = wide.lift(216);
  CHECK(lifted.members() == std::vector<std::size_t>{0, 70, 72, 142, 144, 214});
}

TEST_CASE("augment") {
  const auto c3 = prime_cluster(3);
  const auto a = augment(c3, 4);
  CHECK(a.order() == 4);
  std::multiset<std::pair<std::vector<std::size_t>, std::uint64_t>> want{
      {{0, 1, 2, 3}, 1}, {{1, 3}, 1}, {{0, 2}, 1}};
  CHECK(rows_of(a) == want);
  CHECK(rows_of(augment(c3, 2)) == rows_of(c3));
  CHECK_THROWS_AS(augment(c3, 3), InvalidArgument);
}

TEST_CASE("merge") {
  const auto c15 = merge(prime_cluster(3), prime_cluster(5));
  CHECK(c15.product() == 15);
  CHECK(c15.order() == 4);
  CHECK(c15.total_multiplicity() == 15);
  CHECK(as_u64(histogram(c15)) == oracle::delta_by_gcd(15));

  const auto c7 = prime_cluster(7);
  CHECK(rows_of(merge(c7, Cluster::trivial())) == rows_of(c7));
  CHECK(rows_of(merge(Cluster::trivial(), c7)) == rows_of(c7));
  CHECK_THROWS_AS(merge(prime_cluster(3), prime_cluster(3)), InvalidArgument);

  // merge order does not matter
  const auto a = merge(merge(prime_cluster(3), prime_cluster(5)), prime_cluster(7));
  const auto b = merge(prime_cluster(7), merge(prime_cluster(5), prime_cluster(3)));
  CHECK(rows_of(a) == rows_of(b));
}

TEST_CASE("dedup conservation") {
  // 3 and 5 share many rows once lifted; dedup must merge them without losing mass
  const auto c = merge(prime_cluster(3), prime_cluster(5));
  std::uint64_t pairs = prime_cluster(3).size() * prime_cluster(5).size();
  CHECK(c.size() <= pairs);
  CHECK(c.total_multiplicity() == 15);

  ClusterBuilder builder(15, 4);
  DeltaHistogram raw{15, 4, std::vector<BigInt>(5, 0)};
  const auto a = augment(prime_cluster(3), 4), b = augment(prime_cluster(5), 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto row = a.row(i) & b.row(j);
      raw.counts[row.count()] += a.multiplicity(i) * b.multiplicity(j);
      builder.add(row, a.multiplicity(i) * b.multiplicity(j));
    }
  }
  const auto deduped = std::move(builder).build();
  CHECK(deduped.total_multiplicity() == 15);
  CHECK(histogram(deduped) == raw);
  CHECK(rows_of(deduped) == rows_of(c));
}

TEST_CASE("brute_force_delta") {
  const auto h3 = brute_force_delta(3);
  CHECK(as_u64(h3) == std::vector<std::uint64_t>{0, 2, 1});
  const auto h105 = brute_force_delta(105);
  CHECK(h105.total() == 105);
  CHECK(h105.weighted_total() == 12 * 48);
  CHECK_THROWS_AS(brute_force_delta(45), InvalidArgument);
  CHECK_THROWS_AS(brute_force_delta(10), InvalidArgument);
  CHECK_THROWS_AS(brute_force_delta(10'000'019), UnsupportedRange);
}

TEST_CASE("cluster pipeline equals brute force") {
  for (std::vector<std::uint64_t> ps : {std::vector<std::uint64_t>{3, 5}, {3, 5, 7}, {3, 5, 7, 11}, {3, 5, 7, 13, 17}}) {
    const auto via_merge = pipeline(ps);
    const auto M = std::accumulate(ps.begin(), ps.end(), std::uint64_t{1}, std::multiplies<>());
    CHECK(via_merge == brute_force_delta(M));
    CHECK(as_u64(via_merge) == oracle::delta_by_gcd(M));
    via_merge.check_mass_identities();
  }
}

TEST_CASE("oracle equivalence over small squarefree M") {
  const std::vector<std::uint64_t> pool{3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43};
  // every subset of at most 3 primes with product <= 10^5, plus 4-prime sets from the first 7
  int checked = 0;
  const std::size_t n = pool.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int bits = std::popcount(mask);
    if (bits > 4) continue;
    std::vector<std::uint64_t> ps;
    std::uint64_t M = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        ps.push_back(pool[i]);
        M *= pool[i];
      }
    }
    if (M > 100'000) continue;
    if (bits == 4 && (mask >> 7)) continue;
    CHECK_MESSAGE(pipeline(ps) == brute_force_delta(M), "M = " << M);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("cross_histogram") {
  const auto c3 = prime_cluster(3);
  CHECK(as_u64(cross_histogram(c3, Cluster::trivial())) == std::vector<std::uint64_t>{0, 2, 1});

  const auto l = build_cluster(std::vector<std::uint64_t>{3, 7});
  const auto r = prime_cluster(5);
  CHECK(cross_histogram(l, r) == histogram(merge(l, r)));

  const auto h = cross_histogram(build_cluster(std::vector<std::uint64_t>{3, 5}), build_cluster(std::vector<std::uint64_t>{7, 11}));
  CHECK(h.total() == 1155);
  CHECK(h.weighted_total() == BigInt(60) * 480);
  CHECK(h == brute_force_delta(1155));

  // wider rows exercise the multiword kernel; tiles and workers must not change anything
  const auto L = build_cluster(std::vector<std::uint64_t>{3, 5, 13, 17});
  const auto R = build_cluster(std::vector<std::uint64_t>{7, 73});
  const auto base = cross_histogram(L, R);
  CHECK(base == brute_force_delta(3 * 5 * 13 * 17 * 7 * 73));
  CHECK(cross_histogram(L, R, {.workers = 3, .tile_rows = 5}) == base);
  CHECK(cross_histogram(R, L, {.workers = 2, .tile_rows = 1}) == base);

  CHECK_THROWS_AS(cross_histogram(c3, c3), InvalidArgument);
}

TEST_CASE("partition independence over {3,5,7,11,13}") {
  const std::vector<std::uint64_t> ps{3, 5, 7, 11, 13};
  const auto reference = run_estimate(ps);
  for (unsigned mask = 0; mask < 32; ++mask) {
    Partition part;
    for (std::size_t i = 0; i < ps.size(); ++i) (mask >> i & 1 ? part.left : part.right).push_back(ps[i]);
    const auto r = run_estimate(ps, part);
    CHECK(r.histogram == reference.histogram);
    CHECK(r.bound == reference.bound);
  }
}

TEST_CASE("balanced partition") {
  const std::vector<std::uint64_t> ps{3, 5, 7, 11, 13, 17, 19, 31, 41, 73, 241};
  const auto part = balanced_partition(ps);
  auto prod = [](const std::vector<std::uint64_t>& v) {
    return std::accumulate(v.begin(), v.end(), 1.0L, std::multiplies<>());
  };
  const long double ratio = prod(part.left) / prod(part.right);
  CHECK(ratio > 0.5L);
  CHECK(ratio < 2.0L);
  CHECK(part.left.size() + part.right.size() == ps.size());
}

TEST_CASE("bound fixtures") {
  CHECK(bound_of({3}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bound_of({3, 5}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bound_of({3, 5, 7}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(bound_of({3, 5, 7, 11}) - 0.49807089) <= 1e-8);
  CHECK(std::abs(bound_of({3, 5, 7, 11, 13}) - 0.49621815) <= 1e-8);
  CHECK(std::abs(bound_of({3, 5, 7, 11, 13, 17}) - 0.49252410) <= 1e-8);
  CHECK(std::abs(bound_of({3, 5, 7, 13, 17, 241}) - 0.49243452466582) <= 1e-14);
  CHECK(std::abs(bound_of({3, 5, 7, 11, 17, 19}) - 0.494609133024577) <= 1e-15);
}

TEST_CASE("printed variant is twice the corrected one") {
  const std::vector<std::uint64_t> ps{3, 5, 7, 11};
  const auto c = run_estimate(ps);
  const auto p = run_estimate(ps, std::nullopt, {.variant = FormulaVariant::printed});
  CHECK(p.value == doctest::Approx(2 * c.value).epsilon(1e-14));
  CHECK(parse_variant("printed") == FormulaVariant::printed);
  CHECK(parse_variant(to_string(FormulaVariant::corrected)) == FormulaVariant::corrected);
  CHECK_THROWS_AS(parse_variant("exact"), InvalidArgument);
}

TEST_CASE("upward rounding is sound and tight") {
  for (std::vector<std::uint64_t> ps : {std::vector<std::uint64_t>{3, 5, 7, 11}, {3, 5, 7, 11, 13}, {3, 5, 7, 13, 17, 241}}) {
    const auto r = run_estimate(ps);
    const Float exact = reference_bound(r.histogram, static_cast<std::uint64_t>(r.phi));
    const Float reported(r.bound);
    CHECK(reported >= exact);
    CHECK(reported - exact < Float("1e-12"));
    CHECK(Float(r.value) >= exact);
  }
}

TEST_CASE("estimate error paths") {
  CHECK_THROWS_AS(run_estimate(std::vector<std::uint64_t>{}), InvalidArgument);
  CHECK_THROWS_AS(run_estimate(std::vector<std::uint64_t>{3, 3}), InvalidArgument);
  CHECK_THROWS_AS(run_estimate(std::vector<std::uint64_t>{3, 9}), InvalidArgument);
  const std::vector<std::uint64_t> ps{3, 5, 7};
  CHECK_THROWS_AS(run_estimate(ps, Partition{{3}, {5}}), InvalidArgument);
  CHECK_THROWS_AS(run_estimate(ps, Partition{{3, 5}, {5, 7}}), InvalidArgument);

  DeltaHistogram broken{15, 4, {0, 1, 2, 3, 4}};
  CHECK_THROWS_AS(evaluate_bound(broken), InvalidArgument);
}
