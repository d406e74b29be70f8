#include <array>
#include <string>

#include "p2k/modcore.hpp"

namespace p2k {
namespace {

struct Entry {
  unsigned d;
  std::uint64_t prime;
  unsigned exponent;
};

// Factorizations of 2^d - 1 for 2 <= d <= 80, one entry per prime power.
constexpr Entry kEntries[] = {
    {2, 3ULL, 1},
    {3, 7ULL, 1},
    {4, 3ULL, 1}, {4, 5ULL, 1},
    {5, 31ULL, 1},
    {6, 3ULL, 2}, {6, 7ULL, 1},
    {7, 127ULL, 1},
    {8, 3ULL, 1}, {8, 5ULL, 1}, {8, 17ULL, 1},
    {9, 7ULL, 1}, {9, 73ULL, 1},
    {10, 3ULL, 1}, {10, 11ULL, 1}, {10, 31ULL, 1},
    {11, 23ULL, 1}, {11, 89ULL, 1},
    {12, 3ULL, 2}, {12, 5ULL, 1}, {12, 7ULL, 1}, {12, 13ULL, 1},
    {13, 8191ULL, 1},
    {14, 3ULL, 1}, {14, 43ULL, 1}, {14, 127ULL, 1},
    {15, 7ULL, 1}, {15, 31ULL, 1}, {15, 151ULL, 1},
    {16, 3ULL, 1}, {16, 5ULL, 1}, {16, 17ULL, 1}, {16, 257ULL, 1},
    {17, 131071ULL, 1},
    {18, 3ULL, 3}, {18, 7ULL, 1}, {18, 19ULL, 1}, {18, 73ULL, 1},
    {19, 524287ULL, 1},
    {20, 3ULL, 1}, {20, 5ULL, 2}, {20, 11ULL, 1}, {20, 31ULL, 1}, {20, 41ULL, 1},
    {21, 7ULL, 2}, {21, 127ULL, 1}, {21, 337ULL, 1},
    {22, 3ULL, 1}, {22, 23ULL, 1}, {22, 89ULL, 1}, {22, 683ULL, 1},
    {23, 47ULL, 1}, {23, 178481ULL, 1},
    {24, 3ULL, 2}, {24, 5ULL, 1}, {24, 7ULL, 1}, {24, 13ULL, 1}, {24, 17ULL, 1}, {24, 241ULL, 1},
    {25, 31ULL, 1}, {25, 601ULL, 1}, {25, 1801ULL, 1},
    {26, 3ULL, 1}, {26, 2731ULL, 1}, {26, 8191ULL, 1},
    {27, 7ULL, 1}, {27, 73ULL, 1}, {27, 262657ULL, 1},
    {28, 3ULL, 1}, {28, 5ULL, 1}, {28, 29ULL, 1}, {28, 43ULL, 1}, {28, 113ULL, 1}, {28, 127ULL, 1},
    {29, 233ULL, 1}, {29, 1103ULL, 1}, {29, 2089ULL, 1},
    {30, 3ULL, 2}, {30, 7ULL, 1}, {30, 11ULL, 1}, {30, 31ULL, 1}, {30, 151ULL, 1}, {30, 331ULL, 1},
    {31, 2147483647ULL, 1},
    {32, 3ULL, 1}, {32, 5ULL, 1}, {32, 17ULL, 1}, {32, 257ULL, 1}, {32, 65537ULL, 1},
    {33, 7ULL, 1}, {33, 23ULL, 1}, {33, 89ULL, 1}, {33, 599479ULL, 1},
    {34, 3ULL, 1}, {34, 43691ULL, 1}, {34, 131071ULL, 1},
    {35, 31ULL, 1}, {35, 71ULL, 1}, {35, 127ULL, 1}, {35, 122921ULL, 1},
    {36, 3ULL, 3}, {36, 5ULL, 1}, {36, 7ULL, 1}, {36, 13ULL, 1}, {36, 19ULL, 1}, {36, 37ULL, 1}, {36, 73ULL, 1}, {36, 109ULL, 1},
    {37, 223ULL, 1}, {37, 616318177ULL, 1},
    {38, 3ULL, 1}, {38, 174763ULL, 1}, {38, 524287ULL, 1},
    {39, 7ULL, 1}, {39, 79ULL, 1}, {39, 8191ULL, 1}, {39, 121369ULL, 1},
    {40, 3ULL, 1}, {40, 5ULL, 2}, {40, 11ULL, 1}, {40, 17ULL, 1}, {40, 31ULL, 1}, {40, 41ULL, 1}, {40, 61681ULL, 1},
    {41, 13367ULL, 1}, {41, 164511353ULL, 1},
    {42, 3ULL, 2}, {42, 7ULL, 2}, {42, 43ULL, 1}, {42, 127ULL, 1}, {42, 337ULL, 1}, {42, 5419ULL, 1},
    {43, 431ULL, 1}, {43, 9719ULL, 1}, {43, 2099863ULL, 1},
    {44, 3ULL, 1}, {44, 5ULL, 1}, {44, 23ULL, 1}, {44, 89ULL, 1}, {44, 397ULL, 1}, {44, 683ULL, 1}, {44, 2113ULL, 1},
    {45, 7ULL, 1}, {45, 31ULL, 1}, {45, 73ULL, 1}, {45, 151ULL, 1}, {45, 631ULL, 1}, {45, 23311ULL, 1},
    {46, 3ULL, 1}, {46, 47ULL, 1}, {46, 178481ULL, 1}, {46, 2796203ULL, 1},
    {47, 2351ULL, 1}, {47, 4513ULL, 1}, {47, 13264529ULL, 1},
    {48, 3ULL, 2}, {48, 5ULL, 1}, {48, 7ULL, 1}, {48, 13ULL, 1}, {48, 17ULL, 1}, {48, 97ULL, 1}, {48, 241ULL, 1}, {48, 257ULL, 1}, {48, 673ULL, 1},
    {49, 127ULL, 1}, {49, 4432676798593ULL, 1},
    {50, 3ULL, 1}, {50, 11ULL, 1}, {50, 31ULL, 1}, {50, 251ULL, 1}, {50, 601ULL, 1}, {50, 1801ULL, 1}, {50, 4051ULL, 1},
    {51, 7ULL, 1}, {51, 103ULL, 1}, {51, 2143ULL, 1}, {51, 11119ULL, 1}, {51, 131071ULL, 1},
    {52, 3ULL, 1}, {52, 5ULL, 1}, {52, 53ULL, 1}, {52, 157ULL, 1}, {52, 1613ULL, 1}, {52, 2731ULL, 1}, {52, 8191ULL, 1},
    {53, 6361ULL, 1}, {53, 69431ULL, 1}, {53, 20394401ULL, 1},
    {54, 3ULL, 4}, {54, 7ULL, 1}, {54, 19ULL, 1}, {54, 73ULL, 1}, {54, 87211ULL, 1}, {54, 262657ULL, 1},
    {55, 23ULL, 1}, {55, 31ULL, 1}, {55, 89ULL, 1}, {55, 881ULL, 1}, {55, 3191ULL, 1}, {55, 201961ULL, 1},
    {56, 3ULL, 1}, {56, 5ULL, 1}, {56, 17ULL, 1}, {56, 29ULL, 1}, {56, 43ULL, 1}, {56, 113ULL, 1}, {56, 127ULL, 1}, {56, 15790321ULL, 1},
    {57, 7ULL, 1}, {57, 32377ULL, 1}, {57, 524287ULL, 1}, {57, 1212847ULL, 1},
    {58, 3ULL, 1}, {58, 59ULL, 1}, {58, 233ULL, 1}, {58, 1103ULL, 1}, {58, 2089ULL, 1}, {58, 3033169ULL, 1},
    {59, 179951ULL, 1}, {59, 3203431780337ULL, 1},
    {60, 3ULL, 2}, {60, 5ULL, 2}, {60, 7ULL, 1}, {60, 11ULL, 1}, {60, 13ULL, 1}, {60, 31ULL, 1}, {60, 41ULL, 1}, {60, 61ULL, 1}, {60, 151ULL, 1}, {60, 331ULL, 1}, {60, 1321ULL, 1},
    {61, 2305843009213693951ULL, 1},
    {62, 3ULL, 1}, {62, 715827883ULL, 1}, {62, 2147483647ULL, 1},
    {63, 7ULL, 2}, {63, 73ULL, 1}, {63, 127ULL, 1}, {63, 337ULL, 1}, {63, 92737ULL, 1}, {63, 649657ULL, 1},
    {64, 3ULL, 1}, {64, 5ULL, 1}, {64, 17ULL, 1}, {64, 257ULL, 1}, {64, 641ULL, 1}, {64, 65537ULL, 1}, {64, 6700417ULL, 1},
    {65, 31ULL, 1}, {65, 8191ULL, 1}, {65, 145295143558111ULL, 1},
    {66, 3ULL, 2}, {66, 7ULL, 1}, {66, 23ULL, 1}, {66, 67ULL, 1}, {66, 89ULL, 1}, {66, 683ULL, 1}, {66, 20857ULL, 1}, {66, 599479ULL, 1},
    {67, 193707721ULL, 1}, {67, 761838257287ULL, 1},
    {68, 3ULL, 1}, {68, 5ULL, 1}, {68, 137ULL, 1}, {68, 953ULL, 1}, {68, 26317ULL, 1}, {68, 43691ULL, 1}, {68, 131071ULL, 1},
    {69, 7ULL, 1}, {69, 47ULL, 1}, {69, 178481ULL, 1}, {69, 10052678938039ULL, 1},
    {70, 3ULL, 1}, {70, 11ULL, 1}, {70, 31ULL, 1}, {70, 43ULL, 1}, {70, 71ULL, 1}, {70, 127ULL, 1}, {70, 281ULL, 1}, {70, 86171ULL, 1}, {70, 122921ULL, 1},
    {71, 228479ULL, 1}, {71, 48544121ULL, 1}, {71, 212885833ULL, 1},
    {72, 3ULL, 3}, {72, 5ULL, 1}, {72, 7ULL, 1}, {72, 13ULL, 1}, {72, 17ULL, 1}, {72, 19ULL, 1}, {72, 37ULL, 1}, {72, 73ULL, 1}, {72, 109ULL, 1}, {72, 241ULL, 1}, {72, 433ULL, 1}, {72, 38737ULL, 1},
    {73, 439ULL, 1}, {73, 2298041ULL, 1}, {73, 9361973132609ULL, 1},
    {74, 3ULL, 1}, {74, 223ULL, 1}, {74, 1777ULL, 1}, {74, 25781083ULL, 1}, {74, 616318177ULL, 1},
    {75, 7ULL, 1}, {75, 31ULL, 1}, {75, 151ULL, 1}, {75, 601ULL, 1}, {75, 1801ULL, 1}, {75, 100801ULL, 1}, {75, 10567201ULL, 1},
    {76, 3ULL, 1}, {76, 5ULL, 1}, {76, 229ULL, 1}, {76, 457ULL, 1}, {76, 174763ULL, 1}, {76, 524287ULL, 1}, {76, 525313ULL, 1},
    {77, 23ULL, 1}, {77, 89ULL, 1}, {77, 127ULL, 1}, {77, 581283643249112959ULL, 1},
    {78, 3ULL, 2}, {78, 7ULL, 1}, {78, 79ULL, 1}, {78, 2731ULL, 1}, {78, 8191ULL, 1}, {78, 121369ULL, 1}, {78, 22366891ULL, 1},
    {79, 2687ULL, 1}, {79, 202029703ULL, 1}, {79, 1113491139767ULL, 1},
    {80, 3ULL, 1}, {80, 5ULL, 2}, {80, 11ULL, 1}, {80, 17ULL, 1}, {80, 31ULL, 1}, {80, 41ULL, 1}, {80, 257ULL, 1}, {80, 61681ULL, 1}, {80, 4278255361ULL, 1},
};

std::vector<Factorization<std::uint64_t>> build_table() {
  std::vector<Factorization<std::uint64_t>> table(kMersenneTableMax + 1);
  for (const auto& e : kEntries) table[e.d].push_back({e.prime, e.exponent});
  for (unsigned d = kMersenneTableMin; d <= kMersenneTableMax; ++d) {
    BigInt product = 1;
    for (const auto& pp : table[d]) {
      if (!is_prime(pp.prime)) throw Error("mersenne table: composite entry for d=" + std::to_string(d));
      for (unsigned i = 0; i < pp.exponent; ++i) product *= pp.prime;
    }
    if (product != (BigInt(1) << d) - 1) throw Error("mersenne table: bad product for d=" + std::to_string(d));
  }
  return table;
}

}  // namespace

const Factorization<std::uint64_t>& mersenne_factorization(unsigned d) {
  if (d < kMersenneTableMin || d > kMersenneTableMax) {
    throw UnsupportedRange("2^d - 1 factorization table covers 2 <= d <= 80, got d=" + std::to_string(d));
  }
  static const auto table = build_table();
  return table[d];
}

}  // namespace p2k
