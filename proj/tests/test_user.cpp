#include <doctest.h>

#include "erasure/oracle.hpp"
#include "erasure/user.hpp"
#include "support.hpp"

using namespace erasure;
using namespace erasure::testing;

namespace {

const Label BE = Label::begin_erase("a");
const Label EE = Label::end_erase("a");

Label out(Value v) { return Label::send("a", v); }
Label rd(MemIndex i, Value v) { return Label::mem_read(i, v); }

const Verdict& part(const Verdict& v, const std::string& name) {
  for (const auto& p : v.parts) {
    if (p.property == name) return p;
  }
  FAIL("missing part " << name);
  return v;
}

const char* kConstantSeven = R"(user constant
domain { 0, 1, 7 }
state u0 initial
state u1
state u2
state u3
state u4
trans u0 -> u1 : in a BE
trans u1 -> r_$v : read i=1 $v forall v
trans r_$v -> u2 : out a $v forall v
trans u2 -> e_$x : in a $x forall x
trans e_$x -> u3 : out a 7 forall x
trans u3 -> u4 : in a EE
)";

const char* kNoBlocks = R"(user plain
domain { 0, 1 }
state u0 initial
state u1
trans u0 -> u1 : out a 1
)";

}  // namespace

TEST_SUITE("check_user_well_formed") {
  TEST_CASE("minimal block passes") {
    CHECK(check_user_well_formed(load_corpus<UserSpec>("minimal.usr")).passed());
  }

  TEST_CASE("value sent after BE without a read fails") {
    const auto u = user_text(R"(user u
domain { 0, 1, 5 }
state u0 initial
state u1
state u2
state u3
trans u0 -> u1 : in a BE
trans u1 -> u2 : out a 5
trans u2 -> u3 : in a EE
)");
    CHECK(check_user_well_formed(u).failed());
    CHECK(oracle_check(PropertyId::UserWellFormed, u, 6).outcome == Outcome::Fail);
  }

  TEST_CASE("read inside the session body fails") {
    const auto u = user_text(R"(user u
domain { 0, 1 }
state u0 initial
state u1
state u2
state u4
state u5
trans u0 -> u1 : in a BE
trans u1 -> r_$v : read i=1 $v forall v
trans r_$v -> u2 : out a $v forall v
trans u2 -> m_$w : read i=2 $w forall w
trans m_$w -> u4 : out a $w forall w
trans u4 -> u5 : in a EE
)");
    CHECK(check_user_well_formed(u).failed());
    CHECK(oracle_check(PropertyId::UserWellFormed, u, 6).outcome == Outcome::Fail);
  }
}

TEST_SUITE("check_secret_singularity") {
  TEST_CASE("no reads passes") { CHECK(check_secret_singularity(user_text(kNoBlocks), 10).passed()); }

  TEST_CASE("same index in both sessions fails") {
    const auto u = load_corpus<UserSpec>("usr1.usr");
    const auto v = check_secret_singularity(u, 10);
    REQUIRE(v.failed());
    CHECK(v.witnesses[0].trace.back().kind == LabelKind::MemRead);
  }

  TEST_CASE("distinct indices pass") {
    const auto u = user_text(R"(user u
domain { 0, 1 }
state u0 initial
state u1
state u2
state u3
state u4
state u5
state u6
trans u0 -> u1 : in a BE
trans u1 -> r_$v : read i=1 $v forall v
trans r_$v -> u2 : out a $v forall v
trans u2 -> u3 : in a EE
trans u3 -> u4 : in a BE
trans u4 -> q_$v : read i=2 $v forall v
trans q_$v -> u5 : out a $v forall v
trans u5 -> u6 : in a EE
)");
    CHECK(check_secret_singularity(u, 10).passed());
    CHECK(oracle_check(PropertyId::Singularity, u, 10).outcome == Outcome::Pass);
  }
}

TEST_SUITE("erasure_zone") {
  TEST_CASE("state without a?BE has an empty zone") {
    const auto u = user_text(kNoBlocks);
    CHECK(erasure_zone(u, u.lts.initial(), 10).sessions.empty());
  }

  TEST_CASE("minimal block: one complete session per secret") {
    const auto u = load_corpus<UserSpec>("minimal.usr");
    const auto z = erasure_zone(u, u.lts.initial(), 10);
    REQUIRE(z.sessions.size() == 2);
    for (Value v = 0; v < 2; ++v) {
      CHECK(z.sessions[v].status == SessionStatus::Complete);
      CHECK(z.sessions[v].trace == Trace{BE, rd(1, v), out(v), EE});
    }
  }

  TEST_CASE("echo user: one session per secret and feedback") {
    const auto u = load_corpus<UserSpec>("streamab.usr");
    const auto z = erasure_zone(u, u.lts.initial(), 10);
    REQUIRE(z.sessions.size() == 4);
    for (const auto& s : z.sessions) {
      CHECK(s.status == SessionStatus::Complete);
      REQUIRE(s.trace.size() == 6);
      CHECK(s.trace[3] == Label::receive("a", s.trace[4].value));  // echoed value
    }
  }
}

TEST_SUITE("erasure_frontier") {
  TEST_CASE("minimal block has a single frontier state") {
    const auto u = load_corpus<UserSpec>("minimal.usr");
    CHECK(erasure_frontier(u, u.lts.initial(), 10).states == std::set<StateId>{*u.lts.find_state("u4")});
  }

  TEST_CASE("parity user: one frontier state per residue") {
    const auto u = load_corpus<UserSpec>("mod10.usr");
    CHECK(erasure_frontier(u, u.lts.initial(), 10).states ==
          std::set<StateId>{*u.lts.find_state("f0"), *u.lts.find_state("f1")});
  }

  TEST_CASE("non-closing loop has an empty frontier") {
    const auto u = user_text(R"(user u
domain { 0, 1 }
state u0 initial
state u1
state u2
trans u0 -> u1 : in a BE
trans u1 -> r_$v : read i=1 $v forall v
trans r_$v -> u2 : out a $v forall v
trans u2 -> u2 : out a 0
)");
    const auto z = erasure_zone(u, u.lts.initial(), 8);
    CHECK(!z.sessions.empty());
    for (const auto& s : z.sessions) CHECK(s.truncated);
    CHECK(erasure_frontier(u, u.lts.initial(), 8).states.empty());
  }
}

TEST_SUITE("output_equal") {
  TEST_CASE("empty traces") { CHECK(output_equal({}, {})); }

  TEST_CASE("an opening matches a plain send of the same value") {
    CHECK(output_equal({BE, rd(1, 3), out(3)}, {out(3)}));
  }

  TEST_CASE("openings with different indices differ") {
    CHECK_FALSE(output_equal({BE, rd(1, 3), out(3)}, {BE, rd(2, 3), out(3)}));
  }

  TEST_CASE("openings on one index match whatever the secret") {
    CHECK(output_equal({BE, rd(1, 0), out(0)}, {BE, rd(1, 1), out(1)}));
  }
}

TEST_SUITE("check_stream_ability") {
  TEST_CASE("constant output after the opening passes") {
    const auto u = user_text(kConstantSeven);
    CHECK(check_stream_ability(u, 10).passed());
    CHECK(oracle_check(PropertyId::StreamAbility, u, 10).outcome == Outcome::Pass);
  }

  TEST_CASE("echo user fails") {
    CHECK(check_stream_ability(load_corpus<UserSpec>("streamab.usr"), 10).failed());
  }

  TEST_CASE("no blocks passes vacuously") { CHECK(check_stream_ability(user_text(kNoBlocks), 10).passed()); }
}

TEST_SUITE("check_secret_confinement") {
  TEST_CASE("single frontier state passes") {
    CHECK(check_secret_confinement(load_corpus<UserSpec>("minimal.usr"), 10).passed());
  }

  TEST_CASE("parity user fails with a distinguishing trace") {
    const auto v = check_secret_confinement(load_corpus<UserSpec>("mod10.usr"), 10);
    REQUIRE(v.failed());
    REQUIRE(v.witnesses.size() == 2);
    CHECK(v.witnesses[0].states == std::vector<std::string>{"f0"});
    CHECK(v.witnesses[1].states == std::vector<std::string>{"f1"});
    CHECK(v.witnesses[0].trace == Trace{out(0)});
  }

  TEST_CASE("distinct frontier states with equal traces pass") {
    const auto u = user_text(R"(user u
domain { 0, 1 }
state u0 initial
state u1
state f0
state f1
state done
trans u0 -> u1 : in a BE
trans u1 -> r_$v : read i=1 $v forall v
trans r_$v -> p_$v : out a $v forall v
trans p_0 -> f0 : in a EE
trans p_1 -> f1 : in a EE
trans f0 -> done : out a 1
trans f1 -> done : out a 1
)");
    CHECK(erasure_frontier(u, u.lts.initial(), 10).states.size() == 2);
    CHECK(check_secret_confinement(u, 10).passed());
    CHECK(oracle_check(PropertyId::Confinement, u, 10).outcome == Outcome::Pass);
  }
}

TEST_SUITE("check_erasure_friendly") {
  TEST_CASE("minimal block user passes all four parts") {
    const auto v = check_erasure_friendly(load_corpus<UserSpec>("minimal.usr"), 10);
    CHECK(v.passed());
    CHECK(v.parts.size() == 4);
  }

  TEST_CASE("double read fails singularity only") {
    const auto v = check_erasure_friendly(load_corpus<UserSpec>("usr1.usr"), 10);
    CHECK(v.failed());
    CHECK(part(v, "user-well-formed").passed());
    CHECK(part(v, "secret-singularity").failed());
  }

  TEST_CASE("echo user fails stream ability with confinement intact") {
    const auto v = check_erasure_friendly(load_corpus<UserSpec>("streamab.usr"), 10);
    CHECK(v.failed());
    CHECK(part(v, "stream-ability").failed());
    CHECK(part(v, "secret-confinement").passed());
  }
}

TEST_SUITE("instantiate") {
  TEST_CASE("no reads keeps every trace") {
    const auto u = user_text(kNoBlocks);
    const auto inst = instantiate(u, Memory{"m", bits(), {}});
    CHECK(traces_to_depth(inst.lts, inst.lts.initial(), 5) == traces_to_depth(u.lts, u.lts.initial(), 5));
  }

  TEST_CASE("memory prunes the other secret") {
    const auto u = load_corpus<UserSpec>("minimal.usr");
    const auto inst = instantiate(u, Memory{"m", bits(), {{1, 0}}});
    const UserSpec restricted{"r", inst.lts};
    const auto z = erasure_zone(restricted, inst.lts.initial(), 10);
    REQUIRE(z.sessions.size() == 1);
    CHECK(z.sessions[0].secret_value == 0);
  }

  TEST_CASE("unbound index") {
    const auto u = user_text(R"(user u
domain { 0, 1 }
state u0 initial
state u1
state u2
state u3
trans u0 -> u1 : in a BE
trans u1 -> r_$v : read i=2 $v forall v
trans r_$v -> u2 : out a $v forall v
trans u2 -> u3 : in a EE
)");
    try {
      instantiate(u, Memory{"m", bits(), {{1, 0}}});
      FAIL("expected UnboundIndex");
    } catch (const UnboundIndex& e) {
      CHECK(e.index() == 2);
    }
  }
}
