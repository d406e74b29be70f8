#include "p2k/serialize.hpp"

#include <map>
#include <sstream>

namespace p2k {

json bigint_to_json(const BigInt& x) {
  if (x >= 0 && x <= BigInt(std::numeric_limits<std::uint64_t>::max())) return static_cast<std::uint64_t>(x);
  if (x < 0 && x >= BigInt(std::numeric_limits<std::int64_t>::min())) return static_cast<std::int64_t>(x);
  return x.str();
}

BigInt bigint_from_json(const json& j) {
  if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw InvalidArgument("expected an integer, got " + j.dump());
}

json system_to_json(const CdlSystem& s) {
  json classes = json::array(), assignment = json::array();
  for (const auto& c : s.system.classes()) classes.push_back({c.residue, c.modulus});
  for (const auto& mp : s.assignment.pairs()) assignment.push_back({mp.modulus, mp.prime});
  return {{"classes", classes}, {"assignment", assignment}};
}

CdlSystem system_from_json(const json& j) {
  std::vector<ResidueClass> classes;
  for (const auto& c : j.at("classes")) classes.push_back({c.at(0).get<std::int64_t>(), c.at(1).get<std::int64_t>()});
  std::vector<ModulusPrime> pairs;
  for (const auto& a : j.at("assignment")) pairs.push_back({a.at(0).get<std::int64_t>(), a.at(1).get<std::uint64_t>()});
  return {CoveringSystem(std::move(classes)), PrimeAssignment(std::move(pairs))};
}

json report_to_json(const EnumerationReport& r) {
  json systems = json::array();
  for (const auto& s : r.systems) systems.push_back(system_to_json(s));
  json out = {{"D", r.D}, {"systems", systems}, {"distinct_progressions", r.distinct_progression_count}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

EnumerationReport report_from_json(const json& j) {
  EnumerationReport r;
  r.D = j.at("D").get<std::int64_t>();
  for (const auto& s : j.at("systems")) r.systems.push_back(system_from_json(s));
  r.distinct_progression_count = j.at("distinct_progressions").get<std::size_t>();
  if (j.contains("note")) r.note = j.at("note").get<std::string>();
  return r;
}

std::string report_to_csv(const EnumerationReport& r) {
  std::map<std::vector<std::int64_t>, std::vector<const CdlSystem*>> groups;
  for (const auto& s : r.systems) groups[s.system.moduli()].push_back(&s);
  std::ostringstream out;
  bool first = true;
  for (const auto& [moduli, systems] : groups) {
    if (!first) out << '\n';
    first = false;
    const Congruence head = cdl_congruence(systems.front()->system, systems.front()->assignment);
    for (auto d : moduli) out << "mod " << d << ',';
    out << "a mod " << head.modulus << '\n';
    for (const auto* s : systems) {
      for (const auto& c : s->system.classes()) out << c.residue << ',';
      out << cdl_congruence(s->system, s->assignment).residue << '\n';
    }
  }
  return out.str();
}

json certificate_to_json(const ExclusionCertificate& c) {
  json witnesses = json::array();
  for (const auto& w : c.witnesses) witnesses.push_back({w.prime, w.k});
  return {{"a", bigint_to_json(c.ap.residue)},
          {"M", bigint_to_json(c.ap.modulus)},
          {"primes", c.checked_primes},
          {"k_period", c.k_period},
          {"verdict", c.verdict},
          {"witnesses", witnesses}};
}

ExclusionCertificate certificate_from_json(const json& j) {
  ExclusionCertificate c;
  c.ap = {bigint_from_json(j.at("a")), bigint_from_json(j.at("M"))};
  c.checked_primes = j.at("primes").get<std::vector<std::uint64_t>>();
  c.k_period = j.at("k_period").get<std::uint64_t>();
  c.verdict = j.at("verdict").get<bool>();
  for (const auto& w : j.at("witnesses")) c.witnesses.push_back({w.at(0).get<std::uint64_t>(), w.at(1).get<std::uint64_t>()});
  return c;
}

json verdict_to_json(const ModulusVerdict& v) {
  return {{"b", v.b}, {"covered", v.covered}, {"shifts", v.shifts_used}, {"leftover", v.leftover}};
}

ModulusVerdict verdict_from_json(const json& j) {
  ModulusVerdict v;
  v.b = j.at("b").get<std::uint64_t>();
  v.covered = j.at("covered").get<bool>();
  v.shifts_used = j.at("shifts").get<std::uint64_t>();
  v.leftover = j.at("leftover").get<std::vector<std::uint64_t>>();
  return v;
}

json scan_report_to_json(const ScanReport& r) {
  json uncovered = json::array();
  for (const auto& v : r.uncovered) uncovered.push_back(verdict_to_json(v));
  return {{"from", r.b_lo},
          {"to", r.b_hi},
          {"uncovered", uncovered},
          {"checkpoint", r.checkpoint},
          {"resumed", r.resumed},
          {"elapsed_seconds", r.elapsed.count()}};
}

json histogram_to_json(const DeltaHistogram& h) {
  json out = json::array();
  for (std::size_t nu = 0; nu < h.counts.size(); ++nu) {
    if (h.counts[nu] != 0) out.push_back({nu, bigint_to_json(h.counts[nu])});
  }
  return out;
}

DeltaHistogram histogram_from_json(const json& j, const BigInt& modulus, std::uint64_t order) {
  DeltaHistogram h;
  h.modulus = modulus;
  h.order = order;
  h.counts.assign(order + 1, 0);
  for (const auto& bin : j) {
    const auto nu = bin.at(0).get<std::size_t>();
    if (nu > order) throw InvalidArgument("histogram bin beyond ord2(M)");
    h.counts[nu] = bigint_from_json(bin.at(1));
  }
  return h;
}

json bound_to_json(const BoundResult& b) {
  return {{"primes", b.primes},
          {"partition", {{"left", b.partition.left}, {"right", b.partition.right}}},
          {"M", bigint_to_json(b.modulus)},
          {"ord2", b.order},
          {"phi", bigint_to_json(b.phi)},
          {"histogram", histogram_to_json(b.histogram)},
          {"bound", b.bound},
          {"variant", to_string(b.variant)},
          {"rounding", "upward"}};
}

BoundResult bound_from_json(const json& j) {
  const BigInt modulus = bigint_from_json(j.at("M"));
  const auto order = j.at("ord2").get<std::uint64_t>();
  // Re-derive the bound so the parsed result is internally consistent.
  BoundResult b = evaluate_bound(histogram_from_json(j.at("histogram"), modulus, order),
                                 parse_variant(j.at("variant").get<std::string>()));
  if (b.bound != j.at("bound").get<std::string>()) throw InvalidArgument("bound does not match its histogram");
  if (b.phi != bigint_from_json(j.at("phi"))) throw InvalidArgument("phi does not match M");
  b.primes = j.at("primes").get<std::vector<std::uint64_t>>();
  b.partition.left = j.at("partition").at("left").get<std::vector<std::uint64_t>>();
  b.partition.right = j.at("partition").at("right").get<std::vector<std::uint64_t>>();
  return b;
}

std::string bound_to_csv(const BoundResult& b) {
  std::ostringstream out;
  out << "nu,delta\n";
  for (std::size_t nu = 0; nu < b.histogram.counts.size(); ++nu) {
    if (b.histogram.counts[nu] != 0) out << nu << ',' << b.histogram.counts[nu] << '\n';
  }
  out << "bound," << b.bound << '\n';
  return out.str();
}

}  // namespace p2k
