#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "p2k/chenscan.hpp"
#include "p2k/covering.hpp"
#include "p2k/density.hpp"
#include "p2k/error.hpp"
#include "p2k/progressions.hpp"
#include "p2k/serialize.hpp"

namespace p2k::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s.front() == '-') throw InvalidArgument("not a nonnegative integer: '" + s + "'");
  return v;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(s, ',')) out.push_back(to_u64(item));
  return out;
}

std::pair<std::int64_t, std::int64_t> parse_pair(const std::string& item) {
  const auto colon = item.find(':');
  if (colon == std::string::npos) throw InvalidArgument("expected x:y, got '" + item + "'");
  return {static_cast<std::int64_t>(to_u64(trim(item.substr(0, colon)))),
          static_cast<std::int64_t>(to_u64(trim(item.substr(colon + 1))))};
}

// "a:d,a:d,..." with a the residue and d the modulus.
CoveringSystem parse_classes(const std::string& s) {
  std::vector<ResidueClass> classes;
  for (const auto& item : split(s, ',')) {
    const auto [a, d] = parse_pair(item);
    classes.push_back({a, d});
  }
  return CoveringSystem(classes);
}

// "d:p,d:p,..."
PrimeAssignment parse_assignment(const std::string& s) {
  std::vector<ModulusPrime> pairs;
  for (const auto& item : split(s, ',')) {
    const auto [d, p] = parse_pair(item);
    pairs.push_back({d, static_cast<std::uint64_t>(p)});
  }
  return PrimeAssignment(pairs);
}

Partition parse_partition(const std::string& s) {
  const auto bar = s.find('|');
  if (bar == std::string::npos) throw InvalidArgument("partition must look like 'p,q|r,s'");
  return {parse_u64_list(s.substr(0, bar)), parse_u64_list(s.substr(bar + 1))};
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// Settings shared by several subcommands, resolved as flag > config > environment > default.
struct Settings {
  std::string config_path;
  unsigned workers = 0;
  std::string format;
  std::string checkpoint;
  std::string variant;
  std::uint64_t chunk = 0;
  std::map<std::string, std::string> config;

  std::optional<std::string> from_config(const std::string& key) const {
    if (auto it = config.find(key); it != config.end()) return it->second;
    return std::nullopt;
  }

  unsigned resolved_workers() const {
    if (workers) return workers;
    std::string text;
    if (auto c = from_config("workers")) {
      text = *c;
    } else if (const char* env = std::getenv("P2K_WORKERS")) {
      text = env;
    } else {
      return 1;
    }
    const auto w = to_u64(text);
    if (w == 0 || w > 4096) throw InvalidArgument("worker count must be between 1 and 4096");
    return static_cast<unsigned>(w);
  }

  std::string resolved_format(const std::string& fallback) const {
    std::string f = !format.empty() ? format : from_config("format").value_or(fallback);
    if (f != "json" && f != "csv") throw InvalidArgument("unknown output format '" + f + "' (expected json|csv)");
    return f;
  }

  std::optional<std::string> resolved_checkpoint() const {
    if (!checkpoint.empty()) return checkpoint;
    return from_config("checkpoint");
  }

  FormulaVariant resolved_variant() const {
    return parse_variant(!variant.empty() ? variant : from_config("variant").value_or("corrected"));
  }

  std::uint64_t resolved_chunk() const {
    if (chunk) return chunk;
    if (auto c = from_config("chunk")) return std::max<std::uint64_t>(1, to_u64(*c));
    return ScanOptions{}.chunk;
  }
};

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

json progression_to_json(const CdlProgression& p) {
  json j = system_to_json({p.system, p.assignment});
  j["a"] = bigint_to_json(p.ap.residue);
  j["M"] = bigint_to_json(p.ap.modulus);
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covering systems, Chen's sieve and density bounds for p + 2^k", "p2k"};
  app.require_subcommand(1);
  Settings s;
  app.add_option("--config", s.config_path, "key = value file supplying defaults (workers, format, checkpoint, variant, chunk)");
  app.add_option("--workers", s.workers, "worker threads (default: config, then P2K_WORKERS, then 1)")
      ->check(CLI::Range(1u, 4096u));

  // cover
  auto* cover = app.add_subcommand("cover", "covering systems")->require_subcommand(1);
  auto* cover_enum = cover->add_subcommand("enumerate", "all minimal CDL covering systems with lcm D");
  std::int64_t D = 0;
  std::size_t max_systems = 0;
  cover_enum->add_option("--D", D, "lcm of the moduli")->required()->check(CLI::PositiveNumber);
  cover_enum->add_option("--max", max_systems, "stop after this many systems (0 = all)");
  cover_enum->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* cover_verify = cover->add_subcommand("verify", "check covering, minimality and prime assignability");
  std::string classes_text;
  cover_verify->add_option("--classes", classes_text, "residue classes as a:d,a:d,...")->required();

  // progression
  auto* prog = app.add_subcommand("progression", "CDL arithmetic progressions")->require_subcommand(1);
  auto* prog_derive = prog->add_subcommand("derive", "CRT progression of a CDL covering system");
  std::string assignment_text, modulus_text;
  prog_derive->add_option("--classes", classes_text, "residue classes as a:d,a:d,...")->required();
  auto* derive_asg = prog_derive->add_option("--assign", assignment_text, "prime assignment as d:p,d:p,...");
  prog_derive->add_option("--modulus", modulus_text, "pick the assignment whose progression has this modulus")
      ->excludes(derive_asg);
  prog_derive->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* prog_verify = prog->add_subcommand("verify", "certify that no assigned prime lies in the progression");
  std::string a_text, primes_text;
  auto* verify_classes = prog_verify->add_option("--classes", classes_text, "derive from a:d,... and certify membership in U");
  prog_verify->add_option("--assign", assignment_text, "prime assignment d:p,... (with --classes)")->needs(verify_classes);
  auto* verify_a = prog_verify->add_option("--a", a_text, "progression residue")->excludes(verify_classes);
  prog_verify->add_option("--M", modulus_text, "progression modulus")->needs(verify_a);
  prog_verify->add_option("--primes", primes_text, "primes to exclude (with --a/--M)")->needs(verify_a);

  auto* prog_census = prog->add_subcommand("census", "count pairs with gcd(M, a_i - a_j) = 2");
  std::string residues_text;
  std::int64_t census_D = 0;
  auto* census_res = prog_census->add_option("--residues", residues_text, "comma-separated residues sharing --M");
  prog_census->add_option("--M", modulus_text, "common modulus")->needs(census_res);
  prog_census->add_option("--D", census_D, "use the distinct progressions of `cover enumerate --D`")->excludes(census_res);

  // chen
  auto* chen = app.add_subcommand("chen", "Chen's sieve over even moduli")->require_subcommand(1);
  auto* chen_check = chen->add_subcommand("check", "sieve one even modulus");
  std::uint64_t b = 0;
  chen_check->add_option("--b", b, "even modulus")->required();

  auto* chen_scan = chen->add_subcommand("scan", "sieve every even modulus in a range");
  std::uint64_t from = 2, to = 0;
  chen_scan->add_option("--from", from, "first modulus")->required();
  chen_scan->add_option("--to", to, "last modulus")->required();
  chen_scan->add_option("--checkpoint", s.checkpoint, "resumable progress file");
  chen_scan->add_option("--workers", s.workers, "worker threads")->check(CLI::Range(1u, 4096u));
  chen_scan->add_option("--chunk", s.chunk, "moduli per checkpoint interval")->check(CLI::PositiveNumber);

  // density
  auto* density = app.add_subcommand("density", "certified upper bound on the density of p + 2^k");
  std::string partition_text;
  bool oracle = false;
  density->add_option("--primes", primes_text, "odd primes, comma separated")->required();
  density->add_option("--partition", partition_text, "halves as 'p,q|r,s' (default: balanced products)");
  density->add_option("--variant", s.variant, "corrected or printed")->check(CLI::IsMember({"corrected", "printed"}));
  density->add_flag("--oracle", oracle, "cross-check against the brute-force histogram when M <= 10^7");
  density->add_option("--emit", s.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  density->add_option("--workers", s.workers, "worker threads")->check(CLI::Range(1u, 4096u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (!s.config_path.empty()) s.config = read_config(s.config_path);
    const unsigned workers = s.resolved_workers();

    if (*cover_enum) {
      const auto report = enumerate_cdl_systems(D, {.workers = workers, .max_systems = max_systems});
      if (!report.note.empty()) err << "cover enumerate: " << report.note << '\n';
      err << "cover enumerate: " << report.systems.size() << " systems, " << report.distinct_progression_count
          << " distinct progressions\n";
      if (s.resolved_format("csv") == "csv") {
        out << report_to_csv(report);
      } else {
        emit(out, report_to_json(report));
      }
      return 0;
    }

    if (*cover_verify) {
      const auto c = parse_classes(classes_text);
      const auto m = minimality(c);
      const auto asgs = find_prime_assignments(c.moduli());
      json j = {{"lcm", c.lcm()},
                {"covering", m != Minimality::not_covering},
                {"minimal", m == Minimality::minimal},
                {"assignable", !asgs.empty()},
                {"assignments", asgs.size()}};
      emit(out, j);
      return 0;
    }

    if (*prog_derive) {
      const auto c = parse_classes(classes_text);
      std::optional<CdlProgression> p;
      if (!assignment_text.empty()) {
        p = derive_progression(c, parse_assignment(assignment_text));
      } else if (!modulus_text.empty()) {
        p = derive_progression_with_modulus(c, BigInt(modulus_text));
        if (!p) throw InvalidArgument("no prime assignment yields modulus " + modulus_text);
      } else {
        const auto asgs = find_prime_assignments(c.moduli());
        if (asgs.empty()) throw InvalidArgument("moduli admit no distinct prime assignment");
        p = derive_progression(c, asgs.front());
      }
      if (s.resolved_format("json") == "csv") {
        for (const auto& cls : p->system.classes()) out << "mod " << cls.modulus << ',';
        out << "a mod " << p->ap.modulus << '\n';
        for (const auto& cls : p->system.classes()) out << cls.residue << ',';
        out << p->ap.residue << '\n';
      } else {
        emit(out, progression_to_json(*p));
      }
      return 0;
    }

    if (*prog_verify) {
      if (!classes_text.empty()) {
        const auto c = parse_classes(classes_text);
        std::optional<PrimeAssignment> asg;
        if (!assignment_text.empty()) {
          asg = parse_assignment(assignment_text);
        } else {
          const auto asgs = find_prime_assignments(c.moduli());
          if (asgs.empty()) throw InvalidArgument("moduli admit no distinct prime assignment");
          asg = asgs.front();
        }
        const auto p = derive_progression(c, *asg);
        json j = certificate_to_json(verify_excludes_primes(p));
        j["covering"] = is_covering(c);
        j["certified_in_U"] = membership_in_U_is_certified(p);
        emit(out, j);
        return 0;
      }
      if (a_text.empty() || modulus_text.empty() || primes_text.empty()) {
        throw InvalidArgument("progression verify needs --classes, or all of --a, --M and --primes");
      }
      const auto primes = parse_u64_list(primes_text);
      emit(out, certificate_to_json(verify_excludes_primes(Progression{BigInt(a_text), BigInt(modulus_text)}, primes)));
      return 0;
    }

    if (*prog_census) {
      std::vector<Progression> aps;
      if (census_D) {
        const auto report = enumerate_cdl_systems(census_D, {.workers = workers});
        std::set<Progression> distinct;
        for (const auto& sys : report.systems) {
          const auto c = cdl_congruence(sys.system, sys.assignment);
          distinct.insert({c.residue, c.modulus});
        }
        aps.assign(distinct.begin(), distinct.end());
      } else {
        if (modulus_text.empty()) throw InvalidArgument("progression census needs --M with --residues");
        for (const auto& r : split(residues_text, ',')) aps.push_back({BigInt(r), BigInt(modulus_text)});
      }
      const auto census = pair_gcd_census(aps);
      emit(out, {{"progressions", aps.size()}, {"total_pairs", census.total_pairs}, {"gcd_two_pairs", census.gcd_two_pairs},
                {"ordered_gcd_two_pairs", census.ordered_gcd_two_pairs}});
      return 0;
    }

    if (*chen_check) {
      emit(out, verdict_to_json(check_even_modulus(b)));
      return 0;
    }

    if (*chen_scan) {
      ScanOptions opts;
      opts.workers = workers;
      opts.chunk = s.resolved_chunk();
      if (auto cp = s.resolved_checkpoint()) opts.checkpoint = *cp;
      auto last_report = Clock::now();
      opts.progress = [&](std::uint64_t done) {
        const auto now = Clock::now();
        if (done < to && now - last_report < std::chrono::seconds(2)) return;
        last_report = now;
        const double pct = to > from ? 100.0 * static_cast<double>(done - from) / static_cast<double>(to - from) : 100.0;
        err << "chen scan: through b = " << done << " (" << std::fixed << std::setprecision(1) << pct << "%)\n"
            << std::defaultfloat;
      };
      const auto report = scan_range(from, to, opts);
      emit(out, scan_report_to_json(report));
      return 0;
    }

    if (*density) {
      const auto primes = parse_u64_list(primes_text);
      std::optional<Partition> part;
      if (!partition_text.empty()) part = parse_partition(partition_text);
      EstimateOptions opts;
      opts.variant = s.resolved_variant();
      opts.cross.workers = workers;
      const auto t0 = Clock::now();
      err << "density: building clusters for " << primes.size() << " primes\n";
      const auto result = run_estimate(primes, part, opts);
      err << "density: done in " << std::chrono::duration<double>(Clock::now() - t0).count() << " s\n";

      std::string oracle_status = "not requested";
      if (oracle) {
        if (result.modulus <= kBruteForceLimit) {
          const auto brute = brute_force_delta(static_cast<std::uint64_t>(result.modulus));
          if (brute != result.histogram) throw Error("oracle mismatch: cluster histogram differs from brute force");
          oracle_status = "match";
        } else {
          err << "density: M exceeds 10^7, oracle check skipped\n";
          oracle_status = "skipped";
        }
      }
      if (s.resolved_format("json") == "csv") {
        out << bound_to_csv(result);
      } else {
        json j = bound_to_json(result);
        if (oracle) j["oracle"] = oracle_status;
        emit(out, j);
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace p2k::cli
