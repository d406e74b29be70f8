#include "p2k/covering.hpp"

#include <algorithm>
#include <atomic>
#include <bitset>
#include <mutex>
#include <set>
#include <thread>

namespace p2k {
namespace {

constexpr std::int64_t kMaxBitmapLcm = std::int64_t{1} << 32;

// Enumeration works over Z/D with D <= 80.
using Mask = std::bitset<128>;

std::vector<std::uint8_t> coverage_counts(const CoveringSystem& c) {
  if (c.lcm() > kMaxBitmapLcm) throw UnsupportedRange("covering test: lcm " + std::to_string(c.lcm()) + " too large");
  std::vector<std::uint8_t> counts(static_cast<std::size_t>(c.lcm()), 0);
  for (const auto& cls : c.classes()) {
    for (std::int64_t x = cls.residue; x < c.lcm(); x += cls.modulus) {
      if (counts[x] < 255) ++counts[x];
    }
  }
  return counts;
}

class ResidueSearch {
 public:
  ResidueSearch(std::int64_t D, std::vector<std::int64_t> moduli, PrimeAssignment asg)
      : D_(D), moduli_(std::move(moduli)), asg_(std::move(asg)), residues_(moduli_.size()) {
    capacity_.assign(moduli_.size() + 1, 0);
    for (std::size_t i = moduli_.size(); i-- > 0;) capacity_[i] = capacity_[i + 1] + D_ / moduli_[i];
    for (std::int64_t x = 0; x < D_; ++x) full_.set(x);
  }

  void run(std::vector<CdlSystem>& out, std::size_t limit) {
    out_ = &out;
    limit_ = limit;
    descend(0, full_);
  }

 private:
  Mask class_mask(std::int64_t r, std::int64_t d) const {
    Mask m;
    for (std::int64_t x = r; x < D_; x += d) m.set(x);
    return m;
  }

  void descend(std::size_t depth, const Mask& leftover) {
    if (limit_ && out_->size() >= limit_) return;
    if (depth == moduli_.size()) {
      if (leftover.none()) emit();
      return;
    }
    if (leftover.none()) return;  // every remaining class would be redundant
    if (capacity_[depth] < static_cast<std::int64_t>(leftover.count())) return;
    const std::int64_t d = moduli_[depth];
    for (std::int64_t r = 0; r < d; ++r) {
      Mask cls = class_mask(r, d);
      if ((cls & leftover).none()) continue;  // adds nothing: redundant in any completion
      residues_[depth] = r;
      descend(depth + 1, leftover & ~cls);
    }
  }

  void emit() {
    std::vector<ResidueClass> classes;
    classes.reserve(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) classes.push_back({residues_[i], moduli_[i]});
    CoveringSystem c(std::move(classes));
    if (minimality(c) == Minimality::minimal) out_->push_back({std::move(c), asg_});
  }

  std::int64_t D_;
  std::vector<std::int64_t> moduli_;
  PrimeAssignment asg_;
  std::vector<std::int64_t> residues_;
  std::vector<std::int64_t> capacity_;
  Mask full_;
  std::vector<CdlSystem>* out_ = nullptr;
  std::size_t limit_ = 0;
};

}  // namespace

CoveringSystem::CoveringSystem(std::vector<ResidueClass> classes) : classes_(std::move(classes)) {
  std::sort(classes_.begin(), classes_.end(),
            [](const ResidueClass& a, const ResidueClass& b) { return a.modulus < b.modulus; });
  std::uint64_t l = 1;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& c = classes_[i];
    if (c.modulus < 1) throw InvalidArgument("residue class modulus must be >= 1");
    if (c.residue < 0 || c.residue >= c.modulus) {
      throw InvalidArgument("residue " + std::to_string(c.residue) + " outside [0, " + std::to_string(c.modulus) + ")");
    }
    if (i > 0 && classes_[i - 1].modulus == c.modulus) {
      throw InvalidArgument("covering system moduli must be distinct; repeated " + std::to_string(c.modulus));
    }
    l = lcm_u64(l, static_cast<std::uint64_t>(c.modulus));
    if (l > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) throw Overflow("lcm of moduli overflows");
  }
  lcm_ = static_cast<std::int64_t>(l);
}

std::vector<std::int64_t> CoveringSystem::moduli() const {
  std::vector<std::int64_t> out;
  out.reserve(classes_.size());
  for (const auto& c : classes_) out.push_back(c.modulus);
  return out;
}

std::int64_t CoveringSystem::density_numerator() const {
  std::int64_t s = 0;
  for (const auto& c : classes_) s += lcm_ / c.modulus;
  return s;
}

PrimeAssignment::PrimeAssignment(std::vector<ModulusPrime> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& [d, p] = pairs_[i];
    if (d < 2) throw InvalidArgument("assignment modulus must be >= 2");
    if (i > 0 && pairs_[i - 1].modulus == d) throw InvalidArgument("assignment repeats modulus " + std::to_string(d));
    if (p < 3 || !is_prime(p)) throw InvalidArgument("assignment value " + std::to_string(p) + " is not an odd prime");
    if (pow2_mod(static_cast<std::uint64_t>(d), p) != 1) {
      throw InvalidArgument(std::to_string(p) + " does not divide 2^" + std::to_string(d) + " - 1");
    }
    if (!seen.insert(p).second) throw InvalidArgument("assignment primes must be distinct; repeated " + std::to_string(p));
  }
}

std::vector<std::uint64_t> PrimeAssignment::primes() const {
  std::vector<std::uint64_t> out;
  for (const auto& mp : pairs_) out.push_back(mp.prime);
  return out;
}

std::optional<std::uint64_t> PrimeAssignment::prime_for(std::int64_t modulus) const {
  for (const auto& mp : pairs_) {
    if (mp.modulus == modulus) return mp.prime;
  }
  return std::nullopt;
}

bool PrimeAssignment::matches(const CoveringSystem& c) const {
  if (c.size() != pairs_.size()) return false;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (c.classes()[i].modulus != pairs_[i].modulus) return false;
  }
  return true;
}

bool is_covering(const CoveringSystem& c) {
  if (c.size() == 0) return false;
  auto counts = coverage_counts(c);
  return std::find(counts.begin(), counts.end(), 0) == counts.end();
}

Minimality minimality(const CoveringSystem& c) {
  if (c.size() == 0) return Minimality::not_covering;
  auto counts = coverage_counts(c);
  if (std::find(counts.begin(), counts.end(), 0) != counts.end()) return Minimality::not_covering;
  // A class is redundant iff every point it covers is covered at least twice.
  for (const auto& cls : c.classes()) {
    bool needed = false;
    for (std::int64_t x = cls.residue; x < c.lcm() && !needed; x += cls.modulus) needed = counts[x] == 1;
    if (!needed) return Minimality::redundant;
  }
  return Minimality::minimal;
}

std::vector<PrimeAssignment> find_prime_assignments(std::span<const std::int64_t> moduli) {
  std::vector<std::int64_t> sorted(moduli.begin(), moduli.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("find_prime_assignments: moduli must be distinct");
  }
  std::vector<std::vector<std::uint64_t>> options;
  for (std::int64_t d : sorted) {
    if (d < 2) throw InvalidArgument("find_prime_assignments: moduli must be >= 2");
    if (d > static_cast<std::int64_t>(kMersenneTableMax)) {
      throw UnsupportedRange("modulus " + std::to_string(d) + " beyond the 2^d - 1 factor table");
    }
    options.push_back(mersenne_prime_divisors(static_cast<unsigned>(d)));
  }

  std::vector<PrimeAssignment> out;
  std::vector<std::uint64_t> chosen(sorted.size());
  std::set<std::uint64_t> used;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == sorted.size()) {
      std::vector<ModulusPrime> pairs;
      for (std::size_t j = 0; j < sorted.size(); ++j) pairs.push_back({sorted[j], chosen[j]});
      out.emplace_back(std::move(pairs));
      return;
    }
    for (std::uint64_t p : options[i]) {
      if (used.count(p)) continue;
      used.insert(p);
      chosen[i] = p;
      self(self, i + 1);
      used.erase(p);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  if (n < 1) throw InvalidArgument("divisors: n must be >= 1");
  std::vector<std::int64_t> small, large;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

bool passes_divisor_screen(std::int64_t D) {
  std::int64_t sigma = 0;
  for (std::int64_t d : divisors(D)) sigma += d;
  return sigma > 2 * D;
}

EnumerationReport enumerate_cdl_systems(std::int64_t D, const EnumerationOptions& opts) {
  if (D < 1) throw InvalidArgument("enumerate: D must be >= 1");
  if (D > static_cast<std::int64_t>(kMersenneTableMax)) {
    throw UnsupportedRange("enumerate: D = " + std::to_string(D) + " beyond the 2^d - 1 factor table (<= 80)");
  }
  EnumerationReport report;
  report.D = D;
  if (!passes_divisor_screen(D)) {
    report.note = "sum of 1/d over divisors of " + std::to_string(D) + " is at most 2";
    return report;
  }

  std::vector<std::int64_t> divs = divisors(D);
  divs.erase(divs.begin());  // modulus 1 has no prime divisor of 2^1 - 1
  const std::size_t n = divs.size();

  struct Task {
    std::vector<std::int64_t> moduli;
    PrimeAssignment asg;
  };
  std::vector<Task> tasks;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::int64_t> moduli;
    std::uint64_t l = 1;
    std::int64_t weight = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      moduli.push_back(divs[i]);
      l = lcm_u64(l, static_cast<std::uint64_t>(divs[i]));
      weight += D / divs[i];
    }
    if (static_cast<std::int64_t>(l) != D || weight <= D) continue;
    auto asgs = find_prime_assignments(moduli);
    if (asgs.empty()) continue;
    tasks.push_back({std::move(moduli), std::move(asgs.front())});
  }

  std::vector<CdlSystem> all;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<CdlSystem> local;
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      ResidueSearch search(D, tasks[t].moduli, tasks[t].asg);
      search.run(local, opts.max_systems);
    }
    std::lock_guard lock(mu);
    all.insert(all.end(), std::make_move_iterator(local.begin()), std::make_move_iterator(local.end()));
  };
  const unsigned workers = std::max(1u, opts.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::sort(all.begin(), all.end());
  if (opts.max_systems && all.size() > opts.max_systems) all.resize(opts.max_systems);

  std::set<std::pair<BigInt, BigInt>> progressions;
  for (const auto& s : all) {
    auto c = cdl_congruence(s.system, s.assignment);
    progressions.emplace(c.residue, c.modulus);
  }
  report.systems = std::move(all);
  report.distinct_progression_count = progressions.size();
  return report;
}

CoveringSystem double_cover(const CoveringSystem& c) {
  if (minimality(c) != Minimality::minimal) throw InvalidArgument("double_cover needs a minimal covering system");
  if (c.classes().front().modulus == 1) throw InvalidArgument("double_cover: modulus 1 would repeat modulus 2");
  std::vector<ResidueClass> out{{1, 2}};
  for (const auto& cls : c.classes()) out.push_back({2 * cls.residue, 2 * cls.modulus});
  return CoveringSystem(std::move(out));
}

Congruence cdl_congruence(const CoveringSystem& c, const PrimeAssignment& asg) {
  if (!asg.matches(c)) throw InvalidArgument("prime assignment moduli do not match the covering system");
  std::vector<Congruence> conds{Congruence(1, 2)};
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::uint64_t p = asg.pairs()[i].prime;
    conds.emplace_back(BigInt(pow2_mod(static_cast<std::uint64_t>(c.classes()[i].residue), p)), BigInt(p));
  }
  return crt_solve(conds);
}

}  // namespace p2k
