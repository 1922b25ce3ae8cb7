#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"

using namespace erasure;
using namespace erasure::testing;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("two-session system passes at depth 8") {
    const auto r = run({"check-system", corpus_file("example_ex_a.sys"), "--depth", "8"});
    CHECK(r.code == 0);
    CHECK(r.out.find("input erasure: PASS (depth=8)") != std::string::npos);
  }

  TEST_CASE("double-read user reports singularity") {
    const auto r = run({"check-user", corpus_file("usr1.usr")});
    CHECK(r.code == 1);
    CHECK(r.out.find("secret singularity: FAIL") != std::string::npos);
  }

  TEST_CASE("echo pair theorem as json") {
    const auto r = run({"theorem", corpus_file("streamab.usr"), corpus_file("streamab.sys"), "--format", "json"});
    CHECK(r.code == 1);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("consistent") == true);
    CHECK(j.at("verdicts").size() == 4);
    CHECK(j.at("verdicts")[3].at("property") == "composite-erasure");
    CHECK(j.at("verdicts")[3].at("verdict") == "FAIL");
  }

  TEST_CASE("two-session pair theorem is consistent") {
    const auto r = run({"theorem", corpus_file("usr1.usr"), corpus_file("example_ex_a.sys")});
    CHECK(r.code == 1);
    CHECK(r.out.find("consistent: true") != std::string::npos);
  }

  TEST_CASE("minimal pair composite erasure") {
    CHECK(run({"check-composite", corpus_file("minimal.usr"), corpus_file("minimal.sys")}).code == 0);
  }

  TEST_CASE("credit-card system fails naming the divergence") {
    const auto r = run({"check-system", corpus_file("figure1.sys")});
    CHECK(r.code == 1);
    CHECK(r.out.find("log!0 vs log!1") != std::string::npos);
  }

  TEST_CASE("inconclusive has its own exit code") {
    CHECK(run({"check-system", corpus_file("figure1.sys"), "--depth", "4"}).code == 3);
  }

  TEST_CASE("liveness and compose") {
    CHECK(run({"check-liveness", corpus_file("minimal.usr"), corpus_file("minimal.sys")}).code == 0);
    const std::string dot = std::string(ERASURE_TEST_TMP) + "/minimal.dot";
    const auto r = run({"compose", corpus_file("minimal.usr"), corpus_file("minimal.sys"), "--emit-dot", dot});
    CHECK(r.code == 0);
    CHECK(r.out == "composed: 6 states, 6 transitions (depth=10)\n");
    std::ifstream in(dot);
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("digraph composed", 0) == 0);
  }

  TEST_CASE("oracle comparison") {
    const auto r = run({"oracle-compare", "input-erasure", corpus_file("figure1.sys"), "--depth", "8"});
    CHECK(r.code == 0);
    CHECK(r.out.find("(agree)") != std::string::npos);
    CHECK(run({"oracle-compare", "liveness", corpus_file("minimal.sys")}).code == 2);
    CHECK(run({"oracle-compare", "bogus", corpus_file("minimal.sys")}).code == 2);
    const auto starved = run({"oracle-compare", "composite-erasure", corpus_file("streamab.usr"),
                              corpus_file("streamab.sys"), "--budget", "5"});
    CHECK(starved.code == 2);
    CHECK(starved.err.find("budget") != std::string::npos);
  }

  TEST_CASE("kind mismatch") {
    const auto r = run({"check-system", corpus_file("minimal.usr")});
    CHECK(r.code == 2);
    CHECK(r.err.find("expected a system specification") != std::string::npos);
  }

  TEST_CASE("usage and parse errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"check-system"}).code == 2);
    CHECK(run({"check-system", corpus_file("minimal.sys"), "--depth", "0"}).code == 2);
    CHECK(run({"check-system", corpus_file("minimal.sys"), "--format", "xml"}).code == 2);
    const auto r = run({"check-system", corpus_file("nope.sys")});
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
    CHECK(run({"check-liveness", corpus_file("minimal.usr")}).code == 2);
  }

  TEST_CASE("json output is byte-identical across runs") {
    const std::vector<std::string> args{"theorem", corpus_file("mod10.usr"), corpus_file("mod10.sys"), "--format",
                                        "json"};
    CHECK(run(args).out == run(args).out);
  }

  TEST_CASE("text and json describe the same verdicts") {
    const auto text = run({"check-user", corpus_file("mod10.usr")});
    const auto json = run({"check-user", corpus_file("mod10.usr"), "--format", "json"});
    CHECK(text.code == json.code);
    const auto j = nlohmann::json::parse(json.out);
    for (const auto& v : j.at("verdicts")) {
      std::string name = v.at("property");
      std::replace(name.begin(), name.end(), '-', ' ');
      CHECK(text.out.find(name + ": " + v.at("verdict").get<std::string>()) != std::string::npos);
    }
  }

  TEST_CASE("exit code depends only on outcomes") {
    Verdict inc = Verdict::pass("x", 3);
    inc.outcome = Outcome::Inconclusive;
    Verdict bad = Verdict::fail("y", Witness{"w", ModelKind::System, {}, {}}, 3);
    CHECK(cli::exit_code({}) == 0);
    CHECK(cli::exit_code({Verdict::pass("x")}) == 0);
    CHECK(cli::exit_code({inc, Verdict::pass("x")}) == 3);
    CHECK(cli::exit_code({inc, bad}) == 1);
  }
}
