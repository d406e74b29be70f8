#pragma once

#include <string>

#include <json.hpp>

#include "p2k/chenscan.hpp"
#include "p2k/covering.hpp"
#include "p2k/density.hpp"
#include "p2k/progressions.hpp"

namespace p2k {

using json = nlohmann::json;

// Integers that fit in 64 bits are written as JSON numbers, larger ones as
// decimal strings; readers accept both.
json bigint_to_json(const BigInt& x);
BigInt bigint_from_json(const json& j);

json system_to_json(const CdlSystem& s);
CdlSystem system_from_json(const json& j);

// {D, systems: [{classes: [[a, d]...], assignment: [[d, p]...]}], distinct_progressions}
json report_to_json(const EnumerationReport& r);
EnumerationReport report_from_json(const json& j);

/// One block per modulus tuple: a header naming each modulus and the
/// progression modulus, then one line per system ending in its residue.
std::string report_to_csv(const EnumerationReport& r);

// {a, M, primes, k_period, verdict, witnesses: [[prime, k]...]}
json certificate_to_json(const ExclusionCertificate& c);
ExclusionCertificate certificate_from_json(const json& j);

json verdict_to_json(const ModulusVerdict& v);
ModulusVerdict verdict_from_json(const json& j);

json scan_report_to_json(const ScanReport& r);

json histogram_to_json(const DeltaHistogram& h);  // [[ν, δ]...], nonzero bins only
DeltaHistogram histogram_from_json(const json& j, const BigInt& modulus, std::uint64_t order);

// {primes, partition: {left, right}, M, ord2, phi, histogram, bound, variant, rounding: "upward"}
json bound_to_json(const BoundResult& b);
BoundResult bound_from_json(const json& j);
std::string bound_to_csv(const BoundResult& b);

}  // namespace p2k
