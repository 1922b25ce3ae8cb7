#include <doctest.h>

#include "erasure/composition.hpp"
#include "erasure/oracle.hpp"
#include "support.hpp"

using namespace erasure;
using namespace erasure::testing;

namespace {

const ValueDomain& wide() {
  static const ValueDomain d({"0", "1", "2", "3", "7"});
  return d;
}

Lts single(ModelKind kind, const std::string& s0) { return Lts(kind, wide(), {s0}, s0, {}); }

const Label BE = Label::begin_erase("a");
const Label EE = Label::end_erase("a");

const char* kHaltingUser = R"(user quiet
domain { 0, 1 }
state u0 initial
state u1
trans u0 -> u1 : in a BE
)";

const char* kNoEndUser = R"(user open
domain { 0, 1 }
state u0 initial
state u1
state u3
trans u0 -> u1 : in a BE
trans u1 -> r_$v : read i=1 $v forall v
trans r_$v -> u3 : out a $v forall v
)";

}  // namespace

TEST_SUITE("compose") {
  TEST_CASE("two inert components") {
    const auto c = compose(single(ModelKind::User, "u0"), single(ModelKind::System, "s0"), 10);
    CHECK(c.lts.state_count() == 1);
    CHECK(c.lts.transitions().empty());
    CHECK(c.lts.state_name(c.lts.initial()) == "u0|s0");
  }

  TEST_CASE("user send meets system receive") {
    const Lts u(ModelKind::User, wide(), {"u", "u'"}, "u", {{"u", Label::send("a", 2), "u'"}});
    const Lts s(ModelKind::System, wide(), {"s", "s'"}, "s", {{"s", Label::receive("a", 2), "s'"}});
    const auto c = compose(u, s, 10);
    REQUIRE(c.lts.transitions().size() == 1);
    const auto& t = c.lts.transitions()[0];
    CHECK(t.label == Label::sync(2, SyncDirection::UserToSystem));
    CHECK(c.lts.state_name(t.source) == "u|s");
    CHECK(c.lts.state_name(t.target) == "u'|s'");
  }

  TEST_CASE("system output on another channel moves alone") {
    const Lts u(ModelKind::User, wide(), {"u"}, "u", {});
    const Lts s(ModelKind::System, wide(), {"s", "s'"}, "s", {{"s", Label::other_out("b", 4), "s'"}});
    const auto c = compose(u, s, 10);
    REQUIRE(c.lts.transitions().size() == 1);
    CHECK(c.lts.transitions()[0].label == Label::other_out("b", 4));
    CHECK(c.lts.state_name(c.lts.transitions()[0].target) == "u|s'");
  }

  TEST_CASE("domains must agree") {
    const Lts u(ModelKind::User, bits(), {"u"}, "u", {});
    CHECK_THROWS_AS(compose(u, single(ModelKind::System, "s"), 3), ModelError);
  }

  TEST_CASE("minimal pair: branches rejoin after the secret is sent") {
    const auto c = compose(load_corpus<UserSpec>("minimal.usr"), load_corpus<SystemSpec>("minimal.sys"), 10);
    CHECK(c.lts.transitions().size() == 6);
    CHECK(traces_to_depth(c.lts, c.lts.initial(), 4).count(
              {Label::sync_be(), Label::mem_read(1, 1), Label::sync(1, SyncDirection::UserToSystem),
               Label::sync_ee()}) == 1);
  }
}

TEST_SUITE("projection") {
  TEST_CASE("empty") {
    CHECK(project_system({}).empty());
    CHECK(project_user({}).empty());
  }

  TEST_CASE("one block") {
    const Trace t{Label::sync_be(), Label::mem_read(1, 0), Label::sync(0, SyncDirection::UserToSystem),
                  Label::sync_ee()};
    CHECK(project_system(t) == Trace{BE, Label::receive("a", 0), EE});
    CHECK(project_user(t) == Trace{BE, Label::mem_read(1, 0), Label::send("a", 0), EE});
  }

  TEST_CASE("other output is the system's alone") {
    const Trace t{Label::other_out("b", 5)};
    CHECK(project_system(t) == Trace{Label::other_out("b", 5)});
    CHECK(project_user(t).empty());
  }
}

TEST_SUITE("check_liveness") {
  TEST_CASE("mirroring user passes") {
    const auto u = load_corpus<UserSpec>("minimal.usr");
    const auto s = load_corpus<SystemSpec>("minimal.sys");
    CHECK(check_liveness(u, s, 10).passed());
    CHECK(oracle_check(PropertyId::Liveness, u, s, 10).outcome == Outcome::Pass);
  }

  TEST_CASE("user halting while the system waits for input fails") {
    const auto u = user_text(kHaltingUser);
    const auto s = load_corpus<SystemSpec>("minimal.sys");
    const auto v = check_liveness(u, s, 10);
    REQUIRE(v.failed());
    CHECK(v.witnesses[0].trace == Trace{Label::sync_be()});
    CHECK(oracle_check(PropertyId::Liveness, u, s, 10).outcome == Outcome::Fail);
  }

  TEST_CASE("user refusing EE fails") {
    const auto u = user_text(kNoEndUser);
    const auto s = load_corpus<SystemSpec>("minimal.sys");
    const auto v = check_liveness(u, s, 10);
    REQUIRE(v.failed());
    CHECK(v.witnesses[0].trace.size() == 3);
    CHECK(oracle_check(PropertyId::Liveness, u, s, 10).outcome == Outcome::Fail);
  }
}

TEST_SUITE("to_dot") {
  TEST_CASE("marks the initial state") {
    const auto c = compose(load_corpus<UserSpec>("minimal.usr"), load_corpus<SystemSpec>("minimal.sys"), 10);
    const auto dot = to_dot(c);
    CHECK(dot.rfind("digraph composed", 0) == 0);
    CHECK(dot.find("doublecircle") != std::string::npos);
    CHECK(dot.find("u0|s0") != std::string::npos);
  }
}
