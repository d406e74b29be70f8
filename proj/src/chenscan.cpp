#include "p2k/chenscan.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <sstream>
#include <thread>

#include "p2k/modcore.hpp"
#include "p2k/serialize.hpp"

namespace p2k {
namespace {

// Odd residue r mod b lives at bit (r - 1) / 2 of a b/2-bit set.
class OddResidueSet {
 public:
  explicit OddResidueSet(std::uint64_t nbits, bool filled)
      : nbits_(nbits), words_((nbits + 63) / 64, filled ? ~std::uint64_t{0} : 0) {
    if (filled && nbits_ % 64) words_.back() = (std::uint64_t{1} << (nbits_ % 64)) - 1;
  }

  std::uint64_t size() const { return nbits_; }
  void reset(std::uint64_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::uint64_t i) const { return words_[i >> 6] >> (i & 63) & 1; }

  std::uint64_t count() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  // this &= ~rotl(src, shift): clears bit t whenever src holds bit t - shift (mod nbits).
  void clear_rotated(const OddResidueSet& src, std::uint64_t shift) {
    shift %= nbits_;
    if (nbits_ < 128) {
      for (std::uint64_t i = 0; i < nbits_; ++i) {
        if (src.test(i)) reset((i + shift) % nbits_);
      }
      return;
    }
    for (std::size_t w = 0; w < words_.size(); ++w) {
      const std::uint64_t start = (w * 64 + nbits_ - shift) % nbits_;
      words_[w] &= ~src.circular64(start);
    }
  }

  std::vector<std::uint64_t> residues() const {
    std::vector<std::uint64_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      for (std::uint64_t bits = words_[w]; bits; bits &= bits - 1) {
        out.push_back(2 * (w * 64 + std::countr_zero(bits)) + 1);
      }
    }
    return out;
  }

 private:
  // Bits [pos, pos + n), n <= 64, no wraparound.
  std::uint64_t linear(std::uint64_t pos, unsigned n) const {
    if (n == 0) return 0;
    const std::size_t w = pos >> 6;
    const unsigned off = pos & 63;
    std::uint64_t v = words_[w] >> off;
    if (off && off + n > 64) v |= words_[w + 1] << (64 - off);
    return n == 64 ? v : v & ((std::uint64_t{1} << n) - 1);
  }

  // 64 bits starting at pos, wrapping at nbits_ (nbits_ >= 64).
  std::uint64_t circular64(std::uint64_t pos) const {
    const std::uint64_t first = std::min<std::uint64_t>(64, nbits_ - pos);
    std::uint64_t v = linear(pos, static_cast<unsigned>(first));
    if (first < 64) v |= linear(0, static_cast<unsigned>(64 - first)) << first;
    return v;
  }

  std::uint64_t nbits_;
  std::vector<std::uint64_t> words_;
};

void write_checkpoint(const std::filesystem::path& path, std::uint64_t last_b,
                      const std::vector<ModulusVerdict>& uncovered) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint " + tmp.string());
    out << "last_b=" << last_b << '\n';
    for (const auto& v : uncovered) out << verdict_to_json(v).dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

// Returns last_b, or nullopt when the file does not exist.
std::optional<std::uint64_t> read_checkpoint(const std::filesystem::path& path, std::vector<ModulusVerdict>& uncovered) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line.rfind("last_b=", 0) != 0) {
    throw Error("malformed checkpoint " + path.string() + ": expected last_b=<n>");
  }
  const std::uint64_t last_b = std::stoull(line.substr(7));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    uncovered.push_back(verdict_from_json(nlohmann::json::parse(line)));
  }
  return last_b;
}

}  // namespace

std::uint64_t shift_bound(std::uint64_t b) {
  if (b < 2 || b % 2) throw InvalidArgument("shift_bound needs an even b >= 2");
  const unsigned j = std::countr_zero(b);
  return (j - 1) + ord2(b >> j);
}

ModulusVerdict check_even_modulus(std::uint64_t b) {
  if (b < 2 || b % 2) throw InvalidArgument("check_even_modulus needs an even b >= 2, got " + std::to_string(b));
  const std::uint64_t half = b / 2;
  const std::uint64_t odd = b >> std::countr_zero(b);

  // Reduced residues mod b are exactly the odd residues prime to the odd part.
  OddResidueSet reduced(half, true);
  for (const auto& [q, e] : factorize(odd)) {
    for (std::uint64_t i = (q - 1) / 2; i < half; i += q) reduced.reset(i);
  }

  OddResidueSet left(half, true);
  ModulusVerdict v;
  v.b = b;
  const std::uint64_t bound = shift_bound(b);
  std::uint64_t power = 1;
  for (std::uint64_t k = 1; k <= bound; ++k) {
    power = mul_mod(power, 2, b);
    // j = r + 2^k (mod b) moves index (r - 1)/2 to (r - 1)/2 + 2^(k-1) (mod b/2).
    left.clear_rotated(reduced, power / 2);
    v.shifts_used = k;
    if (left.count() == 0) {
      v.covered = true;
      return v;
    }
  }
  v.leftover = left.residues();
  return v;
}

ScanReport scan_range(std::uint64_t b_lo, std::uint64_t b_hi, const ScanOptions& opts) {
  if (b_lo < 2 || b_lo > b_hi) throw InvalidArgument("scan_range needs 2 <= from <= to");
  const auto t0 = std::chrono::steady_clock::now();
  ScanReport report;
  report.b_lo = b_lo;
  report.b_hi = b_hi;

  std::uint64_t next = b_lo + (b_lo % 2);
  if (opts.checkpoint) {
    std::vector<ModulusVerdict> saved;
    if (auto last = read_checkpoint(*opts.checkpoint, saved)) {
      report.resumed = true;
      if (*last >= next) next = *last + 2;
      for (auto& v : saved) {
        if (v.b >= b_lo && v.b <= b_hi) report.uncovered.push_back(std::move(v));
      }
    }
  }
  report.checkpoint = next - 2;

  const unsigned workers = std::max(1u, opts.workers);
  const std::uint64_t chunk = std::max<std::uint64_t>(1, opts.chunk);
  while (next <= b_hi) {
    const std::uint64_t count = std::min(chunk, (b_hi - next) / 2 + 1);
    std::vector<std::vector<ModulusVerdict>> found(workers);
    std::atomic<std::uint64_t> cursor{0};
    auto work = [&](unsigned id) {
      for (std::uint64_t i; (i = cursor.fetch_add(1)) < count;) {
        auto v = check_even_modulus(next + 2 * i);
        if (!v.covered) found[id].push_back(std::move(v));
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (auto& f : found) {
      for (auto& v : f) report.uncovered.push_back(std::move(v));
    }
    std::sort(report.uncovered.begin(), report.uncovered.end(),
              [](const ModulusVerdict& a, const ModulusVerdict& b) { return a.b < b.b; });
    report.checkpoint = next + 2 * (count - 1);
    next = report.checkpoint + 2;
    if (opts.checkpoint) write_checkpoint(*opts.checkpoint, report.checkpoint, report.uncovered);
    if (opts.progress) opts.progress(report.checkpoint);
  }
  report.elapsed = std::chrono::steady_clock::now() - t0;
  return report;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> residual_to_progressions(const ModulusVerdict& v) {
  if (v.covered) throw InvalidArgument("modulus " + std::to_string(v.b) + " is covered; no residual progressions");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  out.reserve(v.leftover.size());
  for (std::uint64_t a : v.leftover) out.emplace_back(a, v.b);
  return out;
}

}  // namespace p2k
