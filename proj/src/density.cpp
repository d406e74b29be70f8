#include "p2k/density.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <future>
#include <mutex>
#include <set>
#include <thread>

#include <mpfr.h>

namespace p2k {
namespace {

using u128 = unsigned __int128;

BigInt from_u128(u128 x) {
  BigInt hi = static_cast<std::uint64_t>(x >> 64);
  return (hi << 64) + static_cast<std::uint64_t>(x);
}

class Real {
 public:
  Real() { mpfr_init2(v_, kBoundPrecisionBits); }
  ~Real() { mpfr_clear(v_); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

std::string to_decimal_up(const Real& x, unsigned digits) {
  mpfr_exp_t exp = 0;
  char* raw = mpfr_get_str(nullptr, &exp, 10, digits, x.get(), MPFR_RNDU);
  std::string mant(raw);
  mpfr_free_str(raw);
  bool neg = !mant.empty() && mant[0] == '-';
  if (neg) mant.erase(0, 1);
  std::string out;
  if (exp <= 0) {
    out = "0." + std::string(static_cast<std::size_t>(-exp), '0') + mant;
  } else if (static_cast<std::size_t>(exp) >= mant.size()) {
    out = mant + std::string(exp - mant.size(), '0') + ".0";
  } else {
    out = mant.substr(0, exp) + "." + mant.substr(exp);
  }
  while (out.size() > 2 && out.back() == '0' && out[out.size() - 2] != '.') out.pop_back();
  return neg ? "-" + out : out;
}

template <std::size_t W>
void cross_tiles(const Cluster& left, const Cluster& right, std::size_t stride, std::size_t bins, std::size_t tile,
                 std::size_t tile_begin, std::size_t tile_end, std::vector<u128>& hist) {
  const std::size_t width = W ? W : stride;
  const std::uint64_t* lw = left.words().data();
  const std::uint64_t* rw = right.words().data();
  const auto lm = left.multiplicities();
  const auto rm = right.multiplicities();
  const std::size_t n_left = left.size(), n_right = right.size();
  std::vector<std::uint64_t> local(tile * bins);

  for (std::size_t t = tile_begin; t < tile_end; ++t) {
    const std::size_t base = t * tile;
    const std::size_t n = std::min(tile, n_left - base);
    std::fill(local.begin(), local.end(), 0);
    for (std::size_t r = 0; r < n_right; ++r) {
      const std::uint64_t* rrow = rw + r * width;
      const std::uint64_t m = rm[r];
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t* lrow = lw + (base + i) * width;
        unsigned nu = 0;
        for (std::size_t w = 0; w < width; ++w) nu += std::popcount(lrow[w] & rrow[w]);
        // Σ over right rows of m is the right product, so this cannot overflow.
        local[i * bins + nu] += m;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const u128 ml = lm[base + i];
      for (std::size_t nu = 0; nu < bins; ++nu) {
        if (local[i * bins + nu]) hist[nu] += ml * local[i * bins + nu];
      }
    }
  }
}

using TileFn = void (*)(const Cluster&, const Cluster&, std::size_t, std::size_t, std::size_t, std::size_t, std::size_t,
                        std::vector<u128>&);

template <std::size_t... Ws>
TileFn pick_kernel(std::size_t stride, std::index_sequence<Ws...>) {
  TileFn fn = &cross_tiles<0>;
  ((stride == Ws + 1 ? (fn = &cross_tiles<Ws + 1>, 0) : 0), ...);
  return fn;
}

void check_prime_set(std::span<const std::uint64_t> primes) {
  if (primes.empty()) throw InvalidArgument("prime set is empty");
  std::set<std::uint64_t> seen;
  for (auto p : primes) {
    if (p < 3 || !is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not an odd prime");
    if (!seen.insert(p).second) throw InvalidArgument("duplicate prime " + std::to_string(p));
  }
}

}  // namespace

BigInt DeltaHistogram::total() const {
  BigInt s = 0;
  for (const auto& c : counts) s += c;
  return s;
}

BigInt DeltaHistogram::weighted_total() const {
  BigInt s = 0;
  for (std::size_t nu = 0; nu < counts.size(); ++nu) s += counts[nu] * nu;
  return s;
}

void DeltaHistogram::check_mass_identities() const {
  if (counts.size() != order + 1) throw InvalidArgument("histogram must have ord2(M) + 1 bins");
  if (BigInt(order) != ord2(modulus)) throw InvalidArgument("histogram order is not ord2(M)");
  if (total() != modulus) throw InvalidArgument("histogram mass " + total().str() + " != M = " + modulus.str());
  const BigInt expected = BigInt(order) * euler_phi(modulus);
  if (weighted_total() != expected) {
    throw InvalidArgument("weighted histogram mass " + weighted_total().str() + " != ord2(M) phi(M) = " + expected.str());
  }
}

DeltaHistogram histogram(const Cluster& c) {
  DeltaHistogram h;
  h.modulus = c.product();
  h.order = c.order();
  h.counts.assign(c.order() + 1, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::size_t nu = 0;
    for (auto w : c.row_words(i)) nu += std::popcount(w);
    h.counts[nu] += c.multiplicity(i);
  }
  return h;
}

DeltaHistogram cross_histogram(const Cluster& left, const Cluster& right, const CrossOptions& opts) {
  if (gcd_u64(left.product(), right.product()) != 1) throw InvalidArgument("cross_histogram needs coprime products");
  const std::uint64_t order64 = lcm_u64(left.order(), right.order());
  if (order64 > std::numeric_limits<std::uint32_t>::max()) throw UnsupportedRange("combined order too large");
  const auto order = static_cast<std::uint32_t>(order64);

  const Cluster l = left.order() == order ? left : augment(left, order);
  const Cluster r = right.order() == order ? right : augment(right, order);
  const std::size_t stride = l.stride();
  const std::size_t bins = order + 1;
  const std::size_t tile = std::max<std::size_t>(1, opts.tile_rows);
  const std::size_t tiles = (l.size() + tile - 1) / tile;
  const TileFn kernel = pick_kernel(stride, std::make_index_sequence<16>{});

  std::vector<u128> hist(bins, 0);
  const unsigned workers = std::max(1u, opts.workers);
  if (workers == 1) {
    kernel(l, r, stride, bins, tile, 0, tiles, hist);
  } else {
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    const std::size_t grain = std::max<std::size_t>(1, tiles / (workers * 16));
    auto work = [&] {
      std::vector<u128> mine(bins, 0);
      for (std::size_t t; (t = next.fetch_add(grain)) < tiles;) {
        kernel(l, r, stride, bins, tile, t, std::min(tiles, t + grain), mine);
      }
      std::lock_guard lock(mu);
      for (std::size_t nu = 0; nu < bins; ++nu) hist[nu] += mine[nu];
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  DeltaHistogram h;
  h.modulus = BigInt(left.product()) * right.product();
  h.order = order;
  h.counts.reserve(bins);
  for (auto c : hist) h.counts.push_back(from_u128(c));
  return h;
}

DeltaHistogram brute_force_delta(std::uint64_t M) {
  if (M == 0 || M % 2 == 0) throw InvalidArgument("brute_force_delta needs an odd M >= 1");
  if (M > kBruteForceLimit) throw UnsupportedRange("brute_force_delta is limited to M <= 10^7");
  std::vector<std::uint64_t> primes;
  for (const auto& [p, e] : factorize(M)) {
    if (e != 1) throw InvalidArgument("brute_force_delta needs a squarefree M");
    primes.push_back(p);
  }
  const std::uint64_t order = ord2(M);

  // powers[q][k] = 2^k mod q
  std::vector<std::vector<std::uint32_t>> powers;
  for (auto q : primes) {
    std::vector<std::uint32_t> pw(order);
    std::uint64_t x = 1 % q;
    for (std::uint64_t k = 0; k < order; ++k, x = x * 2 % q) pw[k] = static_cast<std::uint32_t>(x);
    powers.push_back(std::move(pw));
  }

  std::vector<std::uint64_t> counts(order + 1, 0);
  std::vector<std::uint32_t> residue(primes.size(), 0);
  for (std::uint64_t m = 0; m < M; ++m) {
    std::uint64_t nu = 0;
    for (std::uint64_t k = 0; k < order; ++k) {
      // m - 2^k is a unit iff no prime of M divides it
      bool unit = true;
      for (std::size_t i = 0; i < primes.size() && unit; ++i) unit = residue[i] != powers[i][k];
      nu += unit;
    }
    ++counts[nu];
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (++residue[i] == primes[i]) residue[i] = 0;
    }
  }

  DeltaHistogram h;
  h.modulus = M;
  h.order = order;
  for (auto c : counts) h.counts.emplace_back(c);
  return h;
}

std::string to_string(FormulaVariant v) { return v == FormulaVariant::corrected ? "corrected" : "printed"; }

FormulaVariant parse_variant(const std::string& s) {
  if (s == "corrected") return FormulaVariant::corrected;
  if (s == "printed") return FormulaVariant::printed;
  throw InvalidArgument("unknown formula variant '" + s + "' (expected corrected|printed)");
}

BoundResult evaluate_bound(const DeltaHistogram& h, FormulaVariant variant) {
  h.check_mass_identities();
  BoundResult out;
  out.modulus = h.modulus;
  out.order = h.order;
  out.phi = euler_phi(h.modulus);
  out.histogram = h;
  out.variant = variant;

  // Both variants cap a bin exactly when ord2(M) φ(M) ln2 <= 2Mν. Either branch
  // of the min is an upper bound on it, so deciding with ln2 rounded down is safe.
  Real ln2_lo, denom_lo, lhs, rhs;
  mpfr_const_log2(ln2_lo.get(), MPFR_RNDD);
  const BigInt order_phi = BigInt(h.order) * out.phi;
  mpfr_set_z(denom_lo.get(), order_phi.backend().data(), MPFR_RNDD);
  mpfr_mul(denom_lo.get(), denom_lo.get(), ln2_lo.get(), MPFR_RNDD);

  BigInt capped = 0, weighted = 0;
  for (std::size_t nu = 1; nu < h.counts.size(); ++nu) {
    if (h.counts[nu] == 0) continue;
    const BigInt two_m_nu = 2 * h.modulus * nu;
    mpfr_set_z(rhs.get(), two_m_nu.backend().data(), MPFR_RNDN);
    if (mpfr_cmp(denom_lo.get(), rhs.get()) <= 0) {
      capped += h.counts[nu];
    } else {
      weighted += h.counts[nu] * nu;
    }
  }

  // corrected: capped/(2M) + weighted/(L φ ln2); printed is exactly twice that.
  Real cap_part, tail_part, sum;
  const BigInt cap_den = variant == FormulaVariant::corrected ? BigInt(2 * h.modulus) : h.modulus;
  const BigInt tail_num = variant == FormulaVariant::corrected ? weighted : BigInt(2 * weighted);
  mpfr_set_z(cap_part.get(), capped.backend().data(), MPFR_RNDU);
  mpfr_set_z(lhs.get(), cap_den.backend().data(), MPFR_RNDD);
  mpfr_div(cap_part.get(), cap_part.get(), lhs.get(), MPFR_RNDU);
  mpfr_set_z(tail_part.get(), tail_num.backend().data(), MPFR_RNDU);
  mpfr_div(tail_part.get(), tail_part.get(), denom_lo.get(), MPFR_RNDU);
  mpfr_add(sum.get(), cap_part.get(), tail_part.get(), MPFR_RNDU);

  out.value = mpfr_get_d(sum.get(), MPFR_RNDU);
  out.bound = to_decimal_up(sum, kBoundDigits);
  return out;
}

Partition balanced_partition(std::span<const std::uint64_t> primes) {
  check_prime_set(primes);
  Partition best;
  if (primes.size() == 1) {
    best.left.assign(primes.begin(), primes.end());
    return best;
  }
  const std::size_t n = primes.size();
  if (n <= 24) {
    BigInt best_gap = -1;
    std::uint32_t best_mask = 1;
    // prime 0 always goes left; the complement covers the mirrored split
    for (std::uint32_t mask = 1; mask < (1u << n); mask += 2) {
      if (mask == (1u << n) - 1) continue;
      BigInt pl = 1, pr = 1;
      for (std::size_t i = 0; i < n; ++i) (mask >> i & 1 ? pl : pr) *= primes[i];
      BigInt gap = pl > pr ? BigInt(pl - pr) : BigInt(pr - pl);
      if (best_gap < 0 || gap < best_gap) {
        best_gap = gap;
        best_mask = mask;
      }
    }
    for (std::size_t i = 0; i < n; ++i) (best_mask >> i & 1 ? best.left : best.right).push_back(primes[i]);
    return best;
  }
  std::vector<std::uint64_t> sorted(primes.begin(), primes.end());
  std::sort(sorted.rbegin(), sorted.rend());
  BigInt pl = 1, pr = 1;
  for (auto p : sorted) {
    if (pl <= pr) {
      best.left.push_back(p);
      pl *= p;
    } else {
      best.right.push_back(p);
      pr *= p;
    }
  }
  return best;
}

BoundResult run_estimate(std::span<const std::uint64_t> primes, const std::optional<Partition>& partition,
                         const EstimateOptions& opts) {
  check_prime_set(primes);
  Partition part = partition ? *partition : balanced_partition(primes);
  {
    std::vector<std::uint64_t> a(primes.begin(), primes.end());
    std::vector<std::uint64_t> b = part.left;
    b.insert(b.end(), part.right.begin(), part.right.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw InvalidArgument("partition halves must together contain each prime exactly once");
  }

  Cluster left = Cluster::trivial(), right = Cluster::trivial();
  if (opts.cross.workers > 1) {
    auto fut = std::async(std::launch::async, [&] { return build_cluster(part.right); });
    left = build_cluster(part.left);
    right = fut.get();
  } else {
    left = build_cluster(part.left);
    right = build_cluster(part.right);
  }
  BoundResult out = evaluate_bound(cross_histogram(left, right, opts.cross), opts.variant);
  out.primes.assign(primes.begin(), primes.end());
  out.partition = std::move(part);
  return out;
}

}  // namespace p2k
