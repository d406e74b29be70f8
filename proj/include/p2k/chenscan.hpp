#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace p2k {

struct ModulusVerdict {
  std::uint64_t b = 0;
  bool covered = false;
  std::uint64_t shifts_used = 0;
  std::vector<std::uint64_t> leftover;  // ascending odd residues, empty iff covered

  friend bool operator==(const ModulusVerdict&, const ModulusVerdict&) = default;
};

/// Removes from the odd residues mod b every j with gcd(j - 2^k, b) = 1, for
/// k = 1, 2, ... up to the number of distinct values of 2^k mod b, stopping as
/// soon as nothing is left.
ModulusVerdict check_even_modulus(std::uint64_t b);

/// Number of distinct residues 2^k mod b over k >= 1: (v2(b) - 1) + ord2(odd part).
std::uint64_t shift_bound(std::uint64_t b);

struct ScanOptions {
  unsigned workers = 1;
  std::optional<std::filesystem::path> checkpoint;
  std::uint64_t chunk = 4096;  // even moduli per checkpoint interval
  std::function<void(std::uint64_t done_through)> progress;
};

struct ScanReport {
  std::uint64_t b_lo = 0;
  std::uint64_t b_hi = 0;
  std::vector<ModulusVerdict> uncovered;
  std::chrono::duration<double> elapsed{};
  std::uint64_t checkpoint = 0;  // last even b completed
  bool resumed = false;
};

/// Runs check_even_modulus over every even b in [b_lo, b_hi]. With a
/// checkpoint file the scan resumes after the last completed b recorded there.
ScanReport scan_range(std::uint64_t b_lo, std::uint64_t b_hi, const ScanOptions& opts = {});

std::vector<std::pair<std::uint64_t, std::uint64_t>> residual_to_progressions(const ModulusVerdict& v);

}  // namespace p2k
