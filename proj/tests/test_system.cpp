#include <doctest.h>

#include "erasure/oracle.hpp"
#include "erasure/system.hpp"
#include "support.hpp"

using namespace erasure;
using namespace erasure::testing;

namespace {

const Label BE = Label::begin_erase("a");
const Label EE = Label::end_erase("a");

Label in(Value v) { return Label::receive("a", v); }

}  // namespace

TEST_SUITE("check_system_well_formed") {
  TEST_CASE("minimal block passes") {
    CHECK(check_system_well_formed(load_corpus<SystemSpec>("minimal.sys")).passed());
  }

  TEST_CASE("output directly after BE fails") {
    const auto s = system_text(R"(system s
domain { 0, 1, 5 }
state s0 initial
state s1
state s2
trans s0 -> s1 : out a BE
trans s1 -> s2 : out a 5
)");
    CHECK(check_system_well_formed(s).failed());
    CHECK(oracle_check(PropertyId::SystemWellFormed, s, 6).outcome == Outcome::Fail);
  }

  TEST_CASE("halting inside an open block fails") {
    const auto s = system_text(R"(system s
domain { 0, 1 }
state s0 initial
state s1
state s2
trans s0 -> s1 : out a BE
trans s1 -> s2 : in a $v forall v
)");
    const auto v = check_system_well_formed(s);
    CHECK(v.failed());
    CHECK(oracle_check(PropertyId::SystemWellFormed, s, 6).outcome == Outcome::Fail);
  }
}

TEST_SUITE("input_count") {
  TEST_CASE("counts value receptions") {
    CHECK(input_count({}) == 0);
    CHECK(input_count({BE, in(3), EE}) == 1);
    CHECK(input_count({in(1), Label::other_out("b", 2), in(1)}) == 2);
  }
}

TEST_SUITE("refine_with_stream") {
  TEST_CASE("system without inputs ignores the stream") {
    const auto s = system_text(R"(system s
domain { 0, 1 }
channel b other
state s0 initial
state s1
state s2
trans s0 -> s1 : out b 1
trans s1 -> s2 : out b 0
)");
    const Trace expected{Label::other_out("b", 1), Label::other_out("b", 0)};
    CHECK(refine_with_stream(s, {{0, 1}, 0}, 10) == expected);
    CHECK(refine_with_stream(s, {{1, 1}, 1}, 10) == expected);
  }

  TEST_CASE("two sessions follow the stream") {
    const auto s = load_corpus<SystemSpec>("example_ex_a.sys");
    CHECK(refine_with_stream(s, {{0, 1}, 0}, 6) == Trace{BE, in(0), EE, BE, in(1), EE});
    CHECK(refine_with_stream(s, {{1, 1}, 1}, 6) == Trace{BE, in(1), EE, BE, in(1), EE});
  }
}

TEST_SUITE("enumerate_erasure_points") {
  TEST_CASE("no BE gives no points") {
    const auto s = system_text(R"(system s
domain { 0, 1 }
state s0 initial
state s1
trans s0 -> s1 : in a $v forall v
)");
    CHECK(enumerate_erasure_points(s, 10).empty());
  }

  TEST_CASE("two sessions at depth 6") {
    const auto pts = enumerate_erasure_points(load_corpus<SystemSpec>("example_ex_a.sys"), 6);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].open_trace.empty());
    CHECK(pts[0].input_position == 1);
    CHECK(pts[1].open_trace == Trace{BE, in(0), EE});
    CHECK(pts[2].open_trace == Trace{BE, in(1), EE});
    CHECK(pts[1].input_position == 2);
  }

  TEST_CASE("credit-card loop: one point per unrolling") {
    const auto s = load_corpus<SystemSpec>("figure1.sys");
    // First pass: one prefix. Second pass: one prefix per (card, address) pair.
    CHECK(enumerate_erasure_points(s, 8).size() == 1);
    CHECK(enumerate_erasure_points(s, 10).size() == 5);
  }
}

TEST_SUITE("check_input_erasure") {
  TEST_CASE("empty continuation passes") {
    CHECK(check_input_erasure(load_corpus<SystemSpec>("minimal.sys"), 10).passed());
  }

  TEST_CASE("two independent sessions pass") {
    CHECK(check_input_erasure(load_corpus<SystemSpec>("example_ex_a.sys"), 10).passed());
  }

  TEST_CASE("credit-card loop leaks through the log") {
    const auto v = check_input_erasure(load_corpus<SystemSpec>("figure1.sys"), 10);
    REQUIRE(v.failed());
    REQUIRE(v.witnesses.size() == 2);
    const auto log0 = Label::other_out("log", 0);
    const auto log1 = Label::other_out("log", 1);
    CHECK(v.witnesses[0].trace.back() == log0);
    CHECK(v.witnesses[1].trace.back() == log1);
    CHECK(v.witnesses[0].description.find("log!0 vs log!1") != std::string::npos);
  }

  TEST_CASE("discount system passes") {
    CHECK(check_input_erasure(load_corpus<SystemSpec>("streamab.sys"), 10).passed());
  }

  TEST_CASE("block cut by the bound is inconclusive") {
    const auto v = check_input_erasure(load_corpus<SystemSpec>("figure1.sys"), 4);
    CHECK(v.outcome == Outcome::Inconclusive);
    CHECK(!v.open_states.empty());
  }
}
