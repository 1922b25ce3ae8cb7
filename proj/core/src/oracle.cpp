#include "erasure/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "erasure/composite.hpp"
#include "erasure/composition.hpp"

namespace erasure {

namespace {

constexpr PropertyId kAll[] = {
    PropertyId::Determinism,   PropertyId::InputEnabled,  PropertyId::SystemWellFormed, PropertyId::InputErasure,
    PropertyId::UserWellFormed, PropertyId::Singularity,  PropertyId::Confinement,      PropertyId::StreamAbility,
    PropertyId::Liveness,      PropertyId::CompositeErasure,
};

}  // namespace

std::string_view to_string(PropertyId p) {
  switch (p) {
    case PropertyId::Determinism: return "determinism";
    case PropertyId::InputEnabled: return "input-enabled";
    case PropertyId::SystemWellFormed: return "system-well-formed";
    case PropertyId::InputErasure: return "input-erasure";
    case PropertyId::UserWellFormed: return "user-well-formed";
    case PropertyId::Singularity: return "secret-singularity";
    case PropertyId::Confinement: return "secret-confinement";
    case PropertyId::StreamAbility: return "stream-ability";
    case PropertyId::Liveness: return "liveness";
    case PropertyId::CompositeErasure: return "composite-erasure";
  }
  return "?";
}

std::optional<PropertyId> parse_property_id(std::string_view name) {
  for (auto p : kAll) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

const std::vector<PropertyId>& all_properties() {
  static const std::vector<PropertyId> all(std::begin(kAll), std::end(kAll));
  return all;
}

bool applies_to_system(PropertyId p) {
  return p == PropertyId::Determinism || p == PropertyId::InputEnabled || p == PropertyId::SystemWellFormed ||
         p == PropertyId::InputErasure;
}

bool applies_to_user(PropertyId p) {
  return p == PropertyId::Determinism || p == PropertyId::InputEnabled || p == PropertyId::UserWellFormed ||
         p == PropertyId::Singularity || p == PropertyId::Confinement || p == PropertyId::StreamAbility;
}

bool applies_to_pair(PropertyId p) { return p == PropertyId::Liveness || p == PropertyId::CompositeErasure; }

namespace {

using Mem = std::map<MemIndex, Value>;

class Budget {
 public:
  explicit Budget(std::size_t n) : total_(n), left_(n) {}
  void tick() {
    if (left_ == 0) throw BudgetExceeded(total_);
    --left_;
  }

 private:
  std::size_t total_;
  std::size_t left_;
};

struct Walk {
  Trace labels;
  std::vector<StateId> states;

  StateId end() const { return states.back(); }
};

bool halted(const Lts& m, StateId s) { return m.outgoing(s).empty(); }

/// Calls `f` on every path from `from` with at most `max_len` labels,
/// including the empty one.
void each_path(const Lts& m, StateId from, std::size_t max_len, Budget& budget,
               const std::function<void(const Walk&)>& f) {
  Walk w{{}, {from}};
  std::function<void()> rec = [&] {
    budget.tick();
    f(w);
    if (w.labels.size() == max_len) return;
    for (const auto& t : m.outgoing(w.end())) {
      w.labels.push_back(t.label);
      w.states.push_back(t.target);
      rec();
      w.labels.pop_back();
      w.states.pop_back();
    }
  };
  rec();
}

Verdict failed(PropertyId p, std::string why, ModelKind kind, const Trace& t, std::size_t depth) {
  return Verdict::fail(std::string(to_string(p)), Witness{std::move(why), kind, t, {}}, depth);
}

Verdict outcome_verdict(PropertyId p, Outcome o, std::size_t depth) {
  Verdict v = Verdict::pass(std::string(to_string(p)), depth);
  v.outcome = o;
  return v;
}

// ---------------------------------------------------------------------------
// Structure.

Verdict o_determinism(const Lts& m, std::size_t depth) {
  for (StateId s = 0; s < m.state_count(); ++s) {
    for (const auto& t1 : m.outgoing(s)) {
      for (const auto& t2 : m.outgoing(s)) {
        const bool both_inputs = t1.label.kind == LabelKind::Receive && t2.label.kind == LabelKind::Receive &&
                                 t1.label.channel == t2.label.channel;
        if (t1.label != t2.label && !both_inputs) {
          return failed(PropertyId::Determinism, "two different non-input labels", m.kind(), {t1.label, t2.label},
                        depth);
        }
        if (t1.label == t2.label && t1.target != t2.target) {
          return failed(PropertyId::Determinism, "one label, two targets", m.kind(), {t1.label}, depth);
        }
      }
    }
  }
  return Verdict::pass(std::string(to_string(PropertyId::Determinism)), depth);
}

Verdict o_input_enabled(const Lts& m, std::size_t depth) {
  const auto n = m.domain().size();
  for (StateId s = 0; s < m.state_count(); ++s) {
    for (const auto& t : m.outgoing(s)) {
      if (t.label.kind != LabelKind::Receive && t.label.kind != LabelKind::MemRead) continue;
      for (Value w = 0; w < n; ++w) {
        Label want = t.label;
        want.value = w;
        const auto outs = m.outgoing(s);
        if (std::none_of(outs.begin(), outs.end(), [&](const Transition& u) { return u.label == want; })) {
          return failed(PropertyId::InputEnabled, "input branch missing", m.kind(), {want}, depth);
        }
      }
    }
  }
  return Verdict::pass(std::string(to_string(PropertyId::InputEnabled)), depth);
}

// ---------------------------------------------------------------------------
// System side.

Verdict o_system_well_formed(const Lts& m, std::size_t depth, Budget& budget) {
  std::optional<Verdict> bad;
  const auto n = m.domain().size();
  each_path(m, m.initial(), depth, budget, [&](const Walk& w) {
    if (bad) return;
    const Trace& l = w.labels;
    const std::size_t len = l.size();
    if (len > 0 && l.back().kind == LabelKind::BeginErase) {
      const StateId s = w.states[len - 1];
      for (const auto& be : m.outgoing(s)) {
        if (be.label != l.back()) continue;
        for (Value v = 0; v < n; ++v) {
          const auto outs = m.outgoing(be.target);
          const bool ok = std::any_of(outs.begin(), outs.end(), [&](const Transition& t) {
            return t.label.kind == LabelKind::Receive && t.label.value == v;
          });
          if (!ok) bad = failed(PropertyId::SystemWellFormed, "BE not followed by every input", m.kind(), l, depth);
        }
      }
    }
    std::size_t opened = 0, closed = 0;
    for (std::size_t k = 0; k < len; ++k) {
      if (k > 0 && l[k].kind == LabelKind::Receive && l[k - 1].kind == LabelKind::BeginErase) ++opened;
      if (l[k].kind == LabelKind::EndErase) ++closed;
    }
    if (opened < closed) bad = failed(PropertyId::SystemWellFormed, "more EE than openings", m.kind(), l, depth);
    if (halted(m, w.end()) && opened != closed) {
      bad = failed(PropertyId::SystemWellFormed, "halts with an open block", m.kind(), l, depth);
    }
  });
  return bad ? *bad : Verdict::pass(std::string(to_string(PropertyId::SystemWellFormed)), depth);
}

/// S(I) cut at `depth` labels.
Walk run_stream(const Lts& m, const std::vector<Value>& stream, std::size_t depth, Budget& budget) {
  Walk w{{}, {m.initial()}};
  std::size_t consumed = 0;
  while (w.labels.size() < depth) {
    budget.tick();
    const auto outs = m.outgoing(w.end());
    if (outs.empty()) break;
    const Transition* next = nullptr;
    const bool input = std::any_of(outs.begin(), outs.end(),
                                   [](const Transition& t) { return t.label.kind == LabelKind::Receive; });
    if (input) {
      const Value want = consumed < stream.size() ? stream[consumed] : 0;
      for (const auto& t : outs) {
        if (t.label.kind == LabelKind::Receive && t.label.value == want) next = &t;
      }
      ++consumed;
    } else {
      next = &outs.front();
    }
    if (!next) break;
    w.labels.push_back(next->label);
    w.states.push_back(next->target);
  }
  return w;
}

struct StreamSession {
  enum class Status { Closed, Stuck, Truncated } status = Status::Stuck;
  std::size_t close = 0;
  std::size_t inputs = 0;
};

/// Follows S(I) from `from` (just after the erased input) to the matching EE.
StreamSession close_of(const Lts& m, const Walk& w, std::size_t from, std::size_t depth) {
  StreamSession s;
  int open = 1;
  for (std::size_t k = from; k < w.labels.size(); ++k) {
    const Label& l = w.labels[k];
    if (l.kind == LabelKind::Receive) {
      ++s.inputs;
      if (k > 0 && w.labels[k - 1].kind == LabelKind::BeginErase) ++open;
    }
    if (l.kind == LabelKind::EndErase && --open == 0) {
      s.status = StreamSession::Status::Closed;
      s.close = k;
      return s;
    }
  }
  s.status = (w.labels.size() == depth && !halted(m, w.end())) ? StreamSession::Status::Truncated
                                                                : StreamSession::Status::Stuck;
  return s;
}

Outcome judge_streams(const Lts& m, const Walk& a, const Walk& b, std::size_t from, std::size_t depth) {
  using S = StreamSession::Status;
  const auto x = close_of(m, a, from, depth);
  const auto y = close_of(m, b, from, depth);
  if ((x.status == S::Closed && y.status == S::Stuck) || (y.status == S::Closed && x.status == S::Stuck)) {
    return Outcome::Fail;
  }
  if (x.status == S::Truncated || y.status == S::Truncated) return Outcome::Inconclusive;
  if (x.status != S::Closed) return Outcome::Pass;
  if (x.inputs != y.inputs) return Outcome::Fail;
  const std::size_t budget = std::min(depth - x.close - 1, depth - y.close - 1);
  for (std::size_t j = 0; j < budget; ++j) {
    const std::size_t ka = x.close + 1 + j;
    const std::size_t kb = y.close + 1 + j;
    const bool ha = ka < a.labels.size();
    const bool hb = kb < b.labels.size();
    if (!ha && !hb) break;
    if (ha != hb) return Outcome::Fail;  // one run halted, the other went on
    if (a.labels[ka] != b.labels[kb]) return Outcome::Fail;
  }
  return Outcome::Pass;
}

Verdict o_input_erasure(const Lts& m, std::size_t depth, Budget& budget) {
  std::size_t max_inputs = 0;
  each_path(m, m.initial(), depth, budget, [&](const Walk& w) {
    max_inputs = std::max<std::size_t>(
        max_inputs, static_cast<std::size_t>(std::count_if(w.labels.begin(), w.labels.end(), [](const Label& l) {
          return l.kind == LabelKind::Receive;
        })));
  });
  const std::size_t n = m.domain().size();
  Outcome result = Outcome::Pass;
  std::vector<Value> stream(max_inputs, 0);
  for (;;) {
    const Walk run = run_stream(m, stream, depth, budget);
    std::size_t inputs_before = 0;
    for (std::size_t p = 0; p < run.labels.size(); ++p) {
      if (run.labels[p].kind == LabelKind::BeginErase) {
        if (p + 1 >= run.labels.size()) {
          if (!halted(m, run.end())) result = combine(result, Outcome::Inconclusive);
        } else if (run.labels[p + 1].kind == LabelKind::Receive) {
          const std::size_t pos = inputs_before;  // 0-based stream position of the erased input
          for (Value w = 0; w < n; ++w) {
            if (w == stream[pos]) continue;
            std::vector<Value> other = stream;
            other[pos] = w;
            const Walk alt = run_stream(m, other, depth, budget);
            const Outcome o = judge_streams(m, run, alt, p + 2, depth);
            if (o == Outcome::Fail) {
              return failed(PropertyId::InputErasure, "erased value changes the run", ModelKind::System, run.labels,
                            depth);
            }
            result = combine(result, o);
          }
        }
      }
      if (run.labels[p].kind == LabelKind::Receive) ++inputs_before;
    }
    std::size_t k = stream.size();
    while (k > 0 && stream[k - 1] + 1 == n) stream[--k] = 0;
    if (k == 0) break;
    ++stream[k - 1];
  }
  return outcome_verdict(PropertyId::InputErasure, result, depth);
}

// ---------------------------------------------------------------------------
// User side.

bool is_opening(const Trace& l, std::size_t k) {
  return k + 2 < l.size() + 0 && l[k].kind == LabelKind::BeginErase && l[k + 1].kind == LabelKind::MemRead &&
         l[k + 2].kind == LabelKind::Send && l[k + 2].value == l[k + 1].value;
}

Verdict o_user_well_formed(const Lts& m, std::size_t depth, Budget& budget) {
  std::optional<Verdict> bad;
  const auto n = m.domain().size();
  each_path(m, m.initial(), depth, budget, [&](const Walk& w) {
    if (bad) return;
    const Trace& l = w.labels;
    const std::size_t len = l.size();
    if (len > 0 && l.back().kind == LabelKind::BeginErase) {
      const StateId u = w.end();
      std::set<MemIndex> indices;
      for (const auto& t : m.outgoing(u)) {
        if (t.label.kind == LabelKind::MemRead) indices.insert(t.label.index);
      }
      bool some = false;
      for (MemIndex i : indices) {
        bool all = true;
        for (Value v = 0; v < n; ++v) {
          bool ok = false;
          for (const auto& r : m.outgoing(u)) {
            if (r.label != Label::mem_read(i, v)) continue;
            for (const auto& e : m.outgoing(r.target)) {
              if (e.label.kind == LabelKind::Send && e.label.value == v) ok = true;
            }
          }
          all = all && ok;
        }
        some = some || all;
      }
      if (!some) bad = failed(PropertyId::UserWellFormed, "BE without a secret read", m.kind(), l, depth);
    }
    for (std::size_t k = 0; k + 1 < len; ++k) {
      if (l[k].kind != LabelKind::MemRead) continue;
      const bool after_be = k > 0 && l[k - 1].kind == LabelKind::BeginErase;
      const bool then_sent = l[k + 1].kind == LabelKind::Send && l[k + 1].value == l[k].value;
      if (!after_be || !then_sent) bad = failed(PropertyId::UserWellFormed, "stray read", m.kind(), l, depth);
    }
    std::size_t opened = 0, closed = 0;
    for (std::size_t k = 0; k < len; ++k) {
      if (k >= 2 && is_opening(l, k - 2)) ++opened;
      if (l[k].kind == LabelKind::EndErase) ++closed;
    }
    if (opened < closed) bad = failed(PropertyId::UserWellFormed, "more EE than openings", m.kind(), l, depth);
    if (halted(m, w.end()) && opened != closed) {
      bad = failed(PropertyId::UserWellFormed, "halts with an open block", m.kind(), l, depth);
    }
  });
  return bad ? *bad : Verdict::pass(std::string(to_string(PropertyId::UserWellFormed)), depth);
}

Verdict o_singularity(const Lts& m, std::size_t depth, Budget& budget) {
  std::optional<Verdict> bad;
  each_path(m, m.initial(), depth, budget, [&](const Walk& w) {
    if (bad) return;
    std::map<MemIndex, int> reads;
    for (const auto& l : w.labels) {
      if (l.kind == LabelKind::MemRead && ++reads[l.index] > 1) {
        bad = failed(PropertyId::Singularity, "index read twice", m.kind(), w.labels, depth);
      }
    }
  });
  return bad ? *bad : Verdict::pass(std::string(to_string(PropertyId::Singularity)), depth);
}

std::set<StateId> o_anchors(const Lts& m, std::size_t depth, Budget& budget) {
  std::set<StateId> out;
  each_path(m, m.initial(), depth, budget, [&](const Walk& w) {
    for (const auto& t : m.outgoing(w.end())) {
      if (t.label.kind == LabelKind::BeginErase) out.insert(w.end());
    }
  });
  return out;
}

struct UserSession {
  enum class Status { Complete, Halted, Truncated } status = Status::Complete;
  Walk walk;
};

/// Maximal sessions from `anchor`: closed at the matching EE, halted, or cut at depth.
std::vector<UserSession> o_sessions(const Lts& m, StateId anchor, std::size_t depth, Budget& budget) {
  std::vector<UserSession> out;
  each_path(m, anchor, depth, budget, [&](const Walk& w) {
    const Trace& l = w.labels;
    const std::size_t len = l.size();
    if (len < 3) return;
    if (!is_opening(l, 0)) return;
    std::size_t be = 0, ee = 0;
    std::optional<std::size_t> close;
    for (std::size_t k = 3; k < len && !close; ++k) {
      if (l[k].kind == LabelKind::BeginErase) ++be;
      if (l[k].kind == LabelKind::EndErase && ++ee == be + 1) close = k;
    }
    if (close) {
      if (*close == len - 1) out.push_back({UserSession::Status::Complete, w});
    } else if (halted(m, w.end())) {
      out.push_back({UserSession::Status::Halted, w});
    } else if (len == depth) {
      out.push_back({UserSession::Status::Truncated, w});
    }
  });
  return out;
}

std::set<Trace> o_traces(const Lts& m, StateId from, std::size_t depth, Budget& budget) {
  std::set<Trace> out;
  each_path(m, from, depth, budget, [&](const Walk& w) { out.insert(w.labels); });
  return out;
}

Verdict o_confinement(const Lts& m, std::size_t depth, Budget& budget) {
  for (StateId anchor : o_anchors(m, depth, budget)) {
    std::set<StateId> frontier;
    for (const auto& s : o_sessions(m, anchor, depth, budget)) {
      if (s.status == UserSession::Status::Complete) frontier.insert(s.walk.end());
    }
    for (StateId a : frontier) {
      for (StateId b : frontier) {
        if (a < b && o_traces(m, a, depth, budget) != o_traces(m, b, depth, budget)) {
          return failed(PropertyId::Confinement, "frontier states " + m.state_name(a) + " and " + m.state_name(b) +
                                                     " have different traces",
                        m.kind(), {}, depth);
        }
      }
    }
  }
  return Verdict::pass(std::string(to_string(PropertyId::Confinement)), depth);
}

struct Unit {
  bool opening = false;
  MemIndex index = 0;
  Value value = 0;
};

/// Output units of a session: whole openings and plain sends; other labels are skipped.
std::vector<Unit> o_units(const Trace& l) {
  std::vector<Unit> out;
  for (std::size_t k = 0; k < l.size();) {
    if (is_opening(l, k)) {
      out.push_back({true, l[k + 1].index, l[k + 1].value});
      k += 3;
    } else if (l[k].kind == LabelKind::Send) {
      out.push_back({false, 0, l[k].value});
      ++k;
    } else {
      ++k;
    }
  }
  return out;
}

bool o_unit_equal(const Unit& a, const Unit& b) {
  if (a.opening && b.opening) return a.index == b.index;
  return a.value == b.value;
}

Outcome o_session_pair(const UserSession& a, const UserSession& b) {
  const auto ua = o_units(a.walk.labels);
  const auto ub = o_units(b.walk.labels);
  const bool ta = a.status == UserSession::Status::Truncated;
  const bool tb = b.status == UserSession::Status::Truncated;
  for (std::size_t k = 0;; ++k) {
    const bool more_a = k < ua.size();
    const bool more_b = k < ub.size();
    if ((!more_a && ta) || (!more_b && tb)) return Outcome::Inconclusive;
    if (!more_a && !more_b) return Outcome::Pass;
    if (more_a != more_b) return Outcome::Fail;
    if (!o_unit_equal(ua[k], ub[k])) return Outcome::Fail;
  }
}

Verdict o_stream_ability(const Lts& m, std::size_t depth, Budget& budget) {
  Outcome result = Outcome::Pass;
  for (StateId anchor : o_anchors(m, depth, budget)) {
    const auto sessions = o_sessions(m, anchor, depth, budget);
    for (const auto& a : sessions) {
      for (const auto& b : sessions) {
        const Outcome o = o_session_pair(a, b);
        if (o == Outcome::Fail) {
          return failed(PropertyId::StreamAbility, "sessions are not output equal", m.kind(), a.walk.labels, depth);
        }
        result = combine(result, o);
      }
    }
  }
  return outcome_verdict(PropertyId::StreamAbility, result, depth);
}

// ---------------------------------------------------------------------------
// Pairs.

using Pair = std::pair<StateId, StateId>;  // (user, system)

struct Move {
  Label label;
  Pair to;
};

/// Composition rules applied one transition pair at a time.
std::vector<Move> o_moves(const Lts& u, const Lts& s, Pair at, const Mem* mem) {
  std::vector<Move> out;
  for (const auto& ut : u.outgoing(at.first)) {
    for (const auto& st : s.outgoing(at.second)) {
      const Label& a = ut.label;
      const Label& b = st.label;
      if (a.channel != b.channel) continue;
      const Pair to{ut.target, st.target};
      if (a.kind == LabelKind::Receive && b.kind == LabelKind::Send && a.value == b.value) {
        out.push_back({Label::sync(a.value, SyncDirection::SystemToUser), to});
      }
      if (a.kind == LabelKind::Send && b.kind == LabelKind::Receive && a.value == b.value) {
        out.push_back({Label::sync(a.value, SyncDirection::UserToSystem), to});
      }
      if (a.kind == LabelKind::BeginErase && b.kind == LabelKind::BeginErase) out.push_back({Label::sync_be(), to});
      if (a.kind == LabelKind::EndErase && b.kind == LabelKind::EndErase) out.push_back({Label::sync_ee(), to});
    }
  }
  for (const auto& st : s.outgoing(at.second)) {
    if (st.label.kind == LabelKind::OtherOut) out.push_back({st.label, {at.first, st.target}});
  }
  for (const auto& ut : u.outgoing(at.first)) {
    if (ut.label.kind != LabelKind::MemRead) continue;
    if (mem && mem->at(ut.label.index) != ut.label.value) continue;
    out.push_back({ut.label, {ut.target, at.second}});
  }
  return out;
}

struct PairWalk {
  Trace labels;
  std::vector<Pair> states;
};

void each_pair_path(const Lts& u, const Lts& s, const Mem* mem, std::size_t max_len, Budget& budget,
                    const std::function<void(const PairWalk&)>& f) {
  PairWalk w{{}, {{u.initial(), s.initial()}}};
  std::function<void()> rec = [&] {
    budget.tick();
    f(w);
    if (w.labels.size() == max_len) return;
    for (const auto& mv : o_moves(u, s, w.states.back(), mem)) {
      w.labels.push_back(mv.label);
      w.states.push_back(mv.to);
      rec();
      w.labels.pop_back();
      w.states.pop_back();
    }
  };
  rec();
}

Verdict o_liveness(const UserSpec& user, const SystemSpec& system, std::size_t depth, Budget& budget) {
  const Lts& u = user.lts;
  const Lts& s = system.lts;
  std::set<Pair> reached;
  each_pair_path(u, s, nullptr, depth, budget, [&](const PairWalk& w) { reached.insert(w.states.back()); });
  auto reachable_from = [&](Pair p) {
    std::set<Pair> seen{p};
    std::deque<Pair> queue{p};
    while (!queue.empty()) {
      budget.tick();
      const Pair c = queue.front();
      queue.pop_front();
      for (const auto& mv : o_moves(u, s, c, nullptr)) {
        if (seen.insert(mv.to).second) queue.push_back(mv.to);
      }
    }
    return seen;
  };
  for (const Pair& p : reached) {
    const auto outs = s.outgoing(p.second);
    const bool input_state = std::any_of(outs.begin(), outs.end(),
                                         [](const Transition& t) { return t.label.kind == LabelKind::Receive; });
    const auto reach = reachable_from(p);
    if (input_state) {
      bool ok = false;
      for (const Pair& q : reach) {
        if (q.second != p.second) continue;
        bool sends = false;
        for (const auto& t : u.outgoing(q.first)) sends = sends || t.label.kind == LabelKind::Send;
        ok = ok || (sends && !o_moves(u, s, q, nullptr).empty());
      }
      if (!ok) return failed(PropertyId::Liveness, "system input never supplied", ModelKind::Composed, {}, depth);
    } else {
      for (const auto& st : outs) {
        const bool ok = std::any_of(reach.begin(), reach.end(), [&](const Pair& q) { return q.second == st.target; });
        if (!ok) return failed(PropertyId::Liveness, "system step never accompanied", ModelKind::Composed, {}, depth);
      }
    }
  }
  return Verdict::pass(std::string(to_string(PropertyId::Liveness)), depth);
}

std::vector<Mem> o_memories(const Lts& u) {
  std::set<MemIndex> idx;
  for (const auto& t : u.transitions()) {
    if (t.label.kind == LabelKind::MemRead) idx.insert(t.label.index);
  }
  std::vector<Mem> out{Mem{}};
  for (MemIndex i : idx) {
    std::vector<Mem> next;
    for (const auto& m : out) {
      for (Value v = 0; v < u.domain().size(); ++v) {
        Mem e = m;
        e[i] = v;
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

struct CompositeSide {
  /// (index of the closing SyncEE, continuation after it).
  std::set<std::pair<std::size_t, Trace>> closed;
  bool truncated = false;
};

CompositeSide o_side(const std::vector<PairWalk>& paths, const Lts& u, const Lts& s, const Mem& mem,
                     const Trace& prefix, std::size_t depth) {
  CompositeSide side;
  const std::size_t from = prefix.size();
  for (const auto& w : paths) {
    if (w.labels.size() < from || !std::equal(prefix.begin(), prefix.end(), w.labels.begin())) continue;
    std::size_t be = 0, ee = 0;
    std::optional<std::size_t> close;
    for (std::size_t k = from; k < w.labels.size() && !close; ++k) {
      if (w.labels[k].kind == LabelKind::SyncBE) ++be;
      if (w.labels[k].kind == LabelKind::SyncEE && ++ee == be + 1) close = k;
    }
    if (close) {
      side.closed.emplace(*close, Trace(w.labels.begin() + static_cast<std::ptrdiff_t>(*close) + 1, w.labels.end()));
    } else if (w.labels.size() == depth && !o_moves(u, s, w.states.back(), &mem).empty()) {
      side.truncated = true;
    }
  }
  return side;
}

/// Every continuation of `a` must be reproduced by some run of `b`, up to
/// the labels that run still has room for.
Outcome o_direction(const CompositeSide& a, const CompositeSide& b, std::size_t depth) {
  for (const auto& [e, z] : a.closed) {
    bool matched = false;
    for (const auto& [e2, z2] : b.closed) {
      const std::size_t room = depth - e2 - 1;
      const Trace cut(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(std::min(z.size(), room)));
      if (cut == z2) matched = true;
    }
    if (!matched) return b.truncated ? Outcome::Inconclusive : Outcome::Fail;
  }
  return Outcome::Pass;
}

Verdict o_composite(const UserSpec& user, const SystemSpec& system, std::size_t depth, Budget& budget) {
  const Lts& u = user.lts;
  const Lts& s = system.lts;
  const auto memories = o_memories(u);
  std::map<Mem, std::vector<PairWalk>> paths;
  for (const auto& mem : memories) {
    auto& all = paths[mem];
    each_pair_path(u, s, &mem, depth, budget, [&](const PairWalk& w) { all.push_back(w); });
  }
  Outcome result = Outcome::Pass;
  for (const auto& mem : memories) {
    std::set<std::pair<Trace, MemIndex>> points;
    for (const auto& w : paths.at(mem)) {
      const Trace& l = w.labels;
      for (std::size_t p = 0; p + 3 <= l.size(); ++p) {
        if (l[p].kind == LabelKind::SyncBE && l[p + 1].kind == LabelKind::MemRead && l[p + 2].kind == LabelKind::Sync &&
            l[p + 2].direction == SyncDirection::UserToSystem && l[p + 2].value == l[p + 1].value) {
          points.emplace(Trace(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(p)), l[p + 1].index);
        }
      }
    }
    for (const auto& [t, i] : points) {
      const Value v = mem.at(i);
      Trace tv = t;
      tv.insert(tv.end(), {Label::sync_be(), Label::mem_read(i, v), Label::sync(v, SyncDirection::UserToSystem)});
      const auto vs = o_side(paths.at(mem), u, s, mem, tv, depth);
      for (Value w = 0; w < u.domain().size(); ++w) {
        if (w == v) continue;
        Mem other = mem;
        other[i] = w;
        Trace tw = t;
        tw.insert(tw.end(), {Label::sync_be(), Label::mem_read(i, w), Label::sync(w, SyncDirection::UserToSystem)});
        const auto ws = o_side(paths.at(other), u, s, other, tw, depth);
        Outcome o = Outcome::Pass;
        if (vs.closed.empty() && ws.closed.empty()) {
          o = (vs.truncated || ws.truncated) ? Outcome::Inconclusive : Outcome::Pass;
        } else {
          o = combine(o_direction(vs, ws, depth), o_direction(ws, vs, depth));
          if (o != Outcome::Fail && (vs.truncated || ws.truncated)) o = combine(o, Outcome::Inconclusive);
        }
        if (o == Outcome::Fail) {
          return failed(PropertyId::CompositeErasure, "changing the secret changes what follows the session",
                        ModelKind::Composed, tv, depth);
        }
        result = combine(result, o);
      }
    }
  }
  return outcome_verdict(PropertyId::CompositeErasure, result, depth);
}

void require(bool ok, PropertyId p, std::string_view what) {
  if (!ok) throw ModelError(std::string(to_string(p)) + " does not apply to " + std::string(what));
}

}  // namespace

Verdict oracle_check(PropertyId p, const SystemSpec& system, std::size_t depth, OracleOptions options) {
  require(applies_to_system(p), p, "a system");
  Budget budget(options.node_budget);
  const Lts& m = system.lts;
  switch (p) {
    case PropertyId::Determinism: return o_determinism(m, depth);
    case PropertyId::InputEnabled: return o_input_enabled(m, depth);
    case PropertyId::SystemWellFormed: return o_system_well_formed(m, depth, budget);
    case PropertyId::InputErasure: return o_input_erasure(m, depth, budget);
    default: break;
  }
  throw ModelError("unreachable");
}

Verdict oracle_check(PropertyId p, const UserSpec& user, std::size_t depth, OracleOptions options) {
  require(applies_to_user(p), p, "a user");
  Budget budget(options.node_budget);
  const Lts& m = user.lts;
  switch (p) {
    case PropertyId::Determinism: return o_determinism(m, depth);
    case PropertyId::InputEnabled: return o_input_enabled(m, depth);
    case PropertyId::UserWellFormed: return o_user_well_formed(m, depth, budget);
    case PropertyId::Singularity: return o_singularity(m, depth, budget);
    case PropertyId::Confinement: return o_confinement(m, depth, budget);
    case PropertyId::StreamAbility: return o_stream_ability(m, depth, budget);
    default: break;
  }
  throw ModelError("unreachable");
}

Verdict oracle_check(PropertyId p, const UserSpec& user, const SystemSpec& system, std::size_t depth,
                     OracleOptions options) {
  require(applies_to_pair(p), p, "a user and system pair");
  Budget budget(options.node_budget);
  if (p == PropertyId::Liveness) return o_liveness(user, system, depth, budget);
  return o_composite(user, system, depth, budget);
}

Verdict checker_verdict(PropertyId p, const SystemSpec& system, std::size_t depth) {
  require(applies_to_system(p), p, "a system");
  switch (p) {
    case PropertyId::Determinism: return is_deterministic(system.lts);
    case PropertyId::InputEnabled: return is_input_enabled(system.lts);
    case PropertyId::SystemWellFormed: return check_system_well_formed(system);
    case PropertyId::InputErasure: return check_input_erasure(system, depth);
    default: break;
  }
  throw ModelError("unreachable");
}

Verdict checker_verdict(PropertyId p, const UserSpec& user, std::size_t depth) {
  require(applies_to_user(p), p, "a user");
  switch (p) {
    case PropertyId::Determinism: return is_deterministic(user.lts);
    case PropertyId::InputEnabled: return is_input_enabled(user.lts);
    case PropertyId::UserWellFormed: return check_user_well_formed(user);
    case PropertyId::Singularity: return check_secret_singularity(user, depth);
    case PropertyId::Confinement: return check_secret_confinement(user, depth);
    case PropertyId::StreamAbility: return check_stream_ability(user, depth);
    default: break;
  }
  throw ModelError("unreachable");
}

Verdict checker_verdict(PropertyId p, const UserSpec& user, const SystemSpec& system, std::size_t depth) {
  require(applies_to_pair(p), p, "a user and system pair");
  if (p == PropertyId::Liveness) return check_liveness(user, system, depth);
  return check_composite_erasure(user, system, depth);
}

}  // namespace erasure
