// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "erasure/composite.hpp"
#include "erasure/corpus.hpp"
#include "erasure/oracle.hpp"
#include "generated_pairs.hpp"

using namespace erasure;

namespace {

constexpr double kCorpusSeconds = 5.0;
constexpr double kOracleSeconds = 60.0;
constexpr std::size_t kMinGeneratedPairs = 100;
constexpr std::size_t kTheoremDepth = 10;
constexpr std::size_t kOracleDepths[] = {4, 6, 8};

const char* kUnitSuites[] = {"test_lts",         "test_system", "test_user",   "test_composition", "test_verdict",
                             "test_spec_format", "test_corpus", "test_cli",    "test_properties"};

const char* kCorpusFiles[] = {"minimal.sys",  "minimal.usr", "minimal.mem", "example_ex_a.sys", "usr1.usr",
                              "figure1.sys",  "figure1.usr", "mod10.sys",   "mod10.usr",        "streamab.sys",
                              "streamab.usr"};

struct Outcome_ {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string path(const std::string& f) { return corpus_dir() + "/" + f; }

template <class T>
T load(const std::string& f) {
  return std::get<T>(load_model_file(path(f)));
}

Outcome_ corpus_golden() {
  Outcome_ r;
  const auto t0 = Clock::now();
  std::size_t checked = 0;
  for (const auto& e : corpus_manifest()) {
    for (const auto& [p, want] : e.expected) {
      const auto got = evaluate(e, p).outcome;
      ++checked;
      if (got != want) {
        r.ok = false;
        r.detail += " " + e.name + "/" + std::string(to_string(p)) + "=" + std::string(to_string(got));
      }
    }
  }
  const double s = seconds_since(t0);
  if (s >= kCorpusSeconds) r.ok = false;
  std::ostringstream d;
  d << checked << " expectations over " << corpus_manifest().size() << " entries in " << s << " s" << r.detail;
  r.detail = d.str();
  return r;
}

Outcome_ oracle_equivalence() {
  Outcome_ r;
  const auto t0 = Clock::now();
  std::size_t compared = 0;
  const std::vector<std::string> systems{"minimal.sys", "example_ex_a.sys", "figure1.sys", "mod10.sys",
                                         "streamab.sys"};
  const std::vector<std::string> users{"minimal.usr", "usr1.usr", "figure1.usr", "mod10.usr", "streamab.usr"};
  const std::vector<std::pair<std::string, std::string>> pairs{{"minimal.usr", "minimal.sys"},
                                                               {"usr1.usr", "example_ex_a.sys"},
                                                               {"figure1.usr", "figure1.sys"},
                                                               {"mod10.usr", "mod10.sys"},
                                                               {"streamab.usr", "streamab.sys"}};
  auto note = [&](const std::string& what, PropertyId p, std::size_t d, Outcome a, Outcome b) {
    ++compared;
    if (a == b) return;
    r.ok = false;
    r.detail += " " + what + "/" + std::string(to_string(p)) + "@" + std::to_string(d);
  };
  for (std::size_t d : kOracleDepths) {
    for (auto p : all_properties()) {
      if (applies_to_system(p)) {
        for (const auto& f : systems) {
          const auto s = load<SystemSpec>(f);
          note(f, p, d, checker_verdict(p, s, d).outcome, oracle_check(p, s, d).outcome);
        }
      }
      if (applies_to_user(p)) {
        for (const auto& f : users) {
          const auto u = load<UserSpec>(f);
          note(f, p, d, checker_verdict(p, u, d).outcome, oracle_check(p, u, d).outcome);
        }
      }
      if (applies_to_pair(p)) {
        for (const auto& [uf, sf] : pairs) {
          const auto u = load<UserSpec>(uf);
          const auto s = load<SystemSpec>(sf);
          note(uf + "+" + sf, p, d, checker_verdict(p, u, s, d).outcome, oracle_check(p, u, s, d).outcome);
        }
      }
    }
  }
  const double s = seconds_since(t0);
  if (s >= kOracleSeconds) r.ok = false;
  std::ostringstream out;
  out << compared << " comparisons at depths 4/6/8 in " << s << " s" << r.detail;
  r.detail = out.str();
  return r;
}

Outcome_ theorem_consistency() {
  Outcome_ r;
  std::size_t reports = 0, premises_held = 0;
  for (const auto& e : corpus_manifest()) {
    if (!e.user_file || !e.system_file) continue;
    const auto rep = validate_soundness_theorem(std::get<UserSpec>(load_model_file(*e.user_file)),
                                                std::get<SystemSpec>(load_model_file(*e.system_file)), kTheoremDepth);
    ++reports;
    premises_held += rep.premises_hold();
    if (!rep.consistent) {
      r.ok = false;
      r.detail += " inconsistent:" + e.name;
    }
  }
  const auto generated = testing::generated_pairs();
  if (generated.size() < kMinGeneratedPairs) r.ok = false;
  for (const auto& g : generated) {
    const auto u = std::get<UserSpec>(load_model(g.user_text));
    const auto s = std::get<SystemSpec>(load_model(g.system_text));
    const auto rep = validate_soundness_theorem(u, s, kTheoremDepth);
    ++reports;
    premises_held += rep.premises_hold();
    if (!rep.consistent) {
      r.ok = false;
      r.detail += " inconsistent:" + g.name;
    }
    // Injected violations must not pass; untouched premises must not fail.
    const bool ie_ok = g.input_erasure_should_fail ? !rep.input_erasure.passed() : !rep.input_erasure.failed();
    const bool ef_ok =
        g.erasure_friendly_should_fail ? !rep.erasure_friendly.passed() : !rep.erasure_friendly.failed();
    if (!ie_ok || !ef_ok || rep.liveness.failed()) {
      r.ok = false;
      r.detail += " premise-mismatch:" + g.name;
    }
  }
  std::ostringstream out;
  out << reports << " reports (" << generated.size() << " generated), " << premises_held << " with all premises"
      << r.detail;
  r.detail = out.str();
  return r;
}

Outcome_ unit_suites() {
  Outcome_ r;
  std::size_t passed = 0;
  for (const char* suite : kUnitSuites) {
    const std::string cmd = std::string("\"") + ERASURE_TEST_DIR + "/" + suite + "\" > /dev/null 2>&1";
    if (std::system(cmd.c_str()) == 0) {
      ++passed;
    } else {
      r.ok = false;
      r.detail += std::string(" ") + suite;
    }
  }
  r.detail = std::to_string(passed) + "/" + std::to_string(std::size(kUnitSuites)) + " suites" + r.detail;
  return r;
}

Outcome_ output_determinism() {
  Outcome_ r;
  std::vector<std::vector<std::string>> runs;
  for (const auto* s : {"minimal.sys", "example_ex_a.sys", "figure1.sys", "mod10.sys", "streamab.sys"}) {
    runs.push_back({"check-system", path(s)});
  }
  for (const auto* u : {"minimal.usr", "usr1.usr", "figure1.usr", "mod10.usr", "streamab.usr"}) {
    runs.push_back({"check-user", path(u)});
  }
  for (const auto& [u, s] : std::vector<std::pair<std::string, std::string>>{{"minimal.usr", "minimal.sys"},
                                                                             {"usr1.usr", "example_ex_a.sys"},
                                                                             {"figure1.usr", "figure1.sys"},
                                                                             {"mod10.usr", "mod10.sys"},
                                                                             {"streamab.usr", "streamab.sys"}}) {
    for (const auto* cmd : {"check-liveness", "compose", "check-composite", "theorem"}) {
      runs.push_back({cmd, path(u), path(s)});
    }
    runs.push_back({"oracle-compare", "composite-erasure", path(u), path(s), "--depth", "8"});
  }
  for (auto& args : runs) {
    args.push_back("--format");
    args.push_back("json");
    std::ostringstream o1, o2, e1, e2;
    const int c1 = cli::run_cli(args, o1, e1);
    const int c2 = cli::run_cli(args, o2, e2);
    if (c1 != c2 || o1.str() != o2.str() || o1.str().empty()) {
      r.ok = false;
      r.detail += " " + args[0] + ":" + args[1];
    }
  }
  r.detail = std::to_string(runs.size()) + " subcommand runs repeated" + r.detail;
  return r;
}

Outcome_ round_trip() {
  Outcome_ r;
  for (const char* f : kCorpusFiles) {
    const Model m = load_model_file(path(f));
    const Model back = load_model(render_spec(m));
    const bool same = std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          const auto& b = std::get<T>(back);
          if constexpr (std::is_same_v<T, Memory>) {
            return a == b;
          } else {
            return a.lts == b.lts;
          }
        },
        m);
    if (!same) {
      r.ok = false;
      r.detail += std::string(" ") + f;
    }
  }
  r.detail = std::to_string(std::size(kCorpusFiles)) + " corpus files" + r.detail;
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome_()>>> criteria{
      {"1 corpus golden verdicts at depth 10", corpus_golden},
      {"2 checker/oracle equivalence", oracle_equivalence},
      {"3 theorem consistency", theorem_consistency},
      {"4 definitional unit suites", unit_suites},
      {"5 byte-identical machine-readable output", output_determinism},
      {"6 parser round trip", round_trip},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome_ o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << "\n";
    failures += o.ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
