#include "erasure/user.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <tuple>

namespace erasure {

Verdict check_user_spec(const UserSpec& user) {
  const Lts& m = user.lts;
  if (m.kind() != ModelKind::User) return Verdict::fail("user-spec", {"model is not a user", m.kind(), {}, {}});
  Verdict channels = Verdict::pass("channels");
  for (const auto& t : m.transitions()) {
    if (t.label.kind <= LabelKind::EndErase && t.label.channel != user.erase_channel) {
      channels.outcome = Outcome::Fail;
      channels.witnesses.push_back({"label on unexpected channel " + t.label.channel, m.kind(), {t.label},
                                    {m.state_name(t.source), m.state_name(t.target)}});
    }
  }
  return conjunction("user-spec", {validate_lts(m), channels, is_input_enabled(m)}, std::nullopt);
}

Verdict check_user_well_formed(const UserSpec& user) {
  const Lts& m = user.lts;
  const std::string property = "user-well-formed";
  const auto n = m.domain().size();
  auto bal = bracket_balance(m);
  if (bal.verdict.failed()) {
    Verdict v = bal.verdict;
    v.property = property;
    return v;
  }
  auto path_to = [&](StateId s, std::string what) { return *shortest_path(m, m.initial(), s, std::move(what)); };
  auto extend = [&](Witness w, const Transition& t) {
    w.trace.push_back(t.label);
    w.states.push_back(m.state_name(t.target));
    return w;
  };
  auto emits = [&](StateId s, Value v) {
    for (const auto& t : m.outgoing(s)) {
      if (t.label.kind == LabelKind::Send && t.label.value == v) return true;
    }
    return false;
  };

  for (StateId s = 0; s < m.state_count(); ++s) {
    if (!bal.balance[s]) continue;
    for (const auto& t : m.outgoing(s)) {
      if (t.label.kind == LabelKind::BeginErase) {
        // Some index must be read for every value, each read followed by
        // the emission of that value.
        bool found = false;
        for (MemIndex i : read_indices(m)) {
          std::vector<bool> ok(n, false);
          for (const auto& r : m.outgoing(t.target)) {
            if (r.label.kind == LabelKind::MemRead && r.label.index == i && r.label.value < n &&
                emits(r.target, r.label.value)) {
              ok[r.label.value] = true;
            }
          }
          if (std::all_of(ok.begin(), ok.end(), [](bool b) { return b; })) {
            found = true;
            break;
          }
        }
        if (!found) {
          return Verdict::fail(property,
                               extend(path_to(s, "after a?BE the user does not read a secret and emit it"), t));
        }
      }
      if (t.label.kind == LabelKind::MemRead && !m.outgoing(t.target).empty()) {
        bool after_begin = s != m.initial();
        for (const auto& in : m.transitions()) {
          if (in.target == s && bal.balance[in.source] && in.label.kind != LabelKind::BeginErase) {
            after_begin = false;
          }
        }
        if (!after_begin) {
          return Verdict::fail(property, extend(path_to(s, "memory read outside an erasure opening"), t));
        }
        for (const auto& next : m.outgoing(t.target)) {
          if (next.label.kind != LabelKind::Send || next.label.value != t.label.value) {
            return Verdict::fail(property,
                                 extend(extend(path_to(s, "memory read not followed by emitting the value read"), t),
                                        next));
          }
        }
      }
      if (t.label.kind == LabelKind::EndErase && *bal.balance[s] <= 0) {
        return Verdict::fail(property, extend(path_to(s, "a?EE without an open erasure block"), t));
      }
    }
    if (*bal.balance[s] < 0) return Verdict::fail(property, path_to(s, "negative bracket balance"));
    if (m.outgoing(s).empty() && *bal.balance[s] != 0) {
      return Verdict::fail(property, path_to(s, "halts inside an open erasure block (balance " +
                                                    std::to_string(*bal.balance[s]) + ")"));
    }
  }
  return Verdict::pass(property);
}

std::set<MemIndex> read_indices(const Lts& model) {
  std::set<MemIndex> out;
  for (const auto& t : model.transitions()) {
    if (t.label.kind == LabelKind::MemRead) out.insert(t.label.index);
  }
  return out;
}

Verdict check_secret_singularity(const UserSpec& user, std::size_t depth) {
  const Lts& m = user.lts;
  const std::string property = "secret-singularity";
  std::map<MemIndex, int> bit;
  for (MemIndex i : read_indices(m)) {
    if (bit.size() == 64) throw ModelError("more than 64 memory indices");
    bit.emplace(i, static_cast<int>(bit.size()));
  }
  using Node = std::pair<StateId, std::uint64_t>;
  struct Parent {
    Node from;
    const Transition* via;
  };
  std::map<Node, std::optional<Parent>> seen;
  std::deque<Node> queue;
  const Node start{m.initial(), 0};
  seen[start] = std::nullopt;
  queue.push_back(start);
  while (!queue.empty()) {
    const Node node = queue.front();
    queue.pop_front();
    for (const auto& t : m.outgoing(node.first)) {
      std::uint64_t mask = node.second;
      if (t.label.kind == LabelKind::MemRead) {
        const std::uint64_t b = std::uint64_t{1} << bit.at(t.label.index);
        if (mask & b) {
          Witness w{"index " + std::to_string(t.label.index) + " is read twice", m.kind(), {t.label},
                    {m.state_name(t.target)}};
          Node cur = node;
          w.states.push_back(m.state_name(cur.first));
          while (seen.at(cur)) {
            const auto& p = *seen.at(cur);
            w.trace.push_back(p.via->label);
            cur = p.from;
            w.states.push_back(m.state_name(cur.first));
          }
          std::reverse(w.trace.begin(), w.trace.end());
          std::reverse(w.states.begin(), w.states.end());
          if (w.trace.size() <= depth) return Verdict::fail(property, std::move(w), depth);
          return Verdict::pass(property, depth);
        }
        mask |= b;
      }
      const Node next{t.target, mask};
      if (seen.try_emplace(next, Parent{node, &t}).second) queue.push_back(next);
    }
  }
  return Verdict::pass(property);
}

std::vector<StateId> zone_anchors(const UserSpec& user, std::size_t depth) {
  const Lts& m = user.lts;
  std::vector<StateId> out;
  auto dist = distances_from(m, m.initial());
  for (StateId s = 0; s < m.state_count(); ++s) {
    if (!dist[s] || *dist[s] > depth) continue;
    for (const auto& t : m.outgoing(s)) {
      if (t.label.kind == LabelKind::BeginErase) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

namespace {

/// Tracks where a walk stands with respect to erasure openings.
struct Bracket {
  OpenPhase phase = OpenPhase::Normal;
  MemIndex index = 0;
  Value value = 0;
  int balance = 0;

  auto operator<=>(const Bracket&) const = default;
};

enum class Step { Skip, Opening, Output, Close };

/// Advances the bracket state over one label and classifies the label.
Step advance(Bracket& b, const Label& l) {
  switch (l.kind) {
    case LabelKind::BeginErase:
      b.phase = OpenPhase::AfterBegin;
      return Step::Skip;
    case LabelKind::MemRead:
      if (b.phase == OpenPhase::AfterBegin) {
        b.phase = OpenPhase::AfterRead;
        b.index = l.index;
        b.value = l.value;
      } else {
        b.phase = OpenPhase::Normal;
      }
      return Step::Skip;
    case LabelKind::Send:
      if (b.phase == OpenPhase::AfterRead && l.value == b.value) {
        b.phase = OpenPhase::Normal;
        ++b.balance;
        return Step::Opening;
      }
      b.phase = OpenPhase::Normal;
      return Step::Output;
    case LabelKind::EndErase:
      b.phase = OpenPhase::Normal;
      --b.balance;
      return b.balance == 0 ? Step::Close : Step::Skip;
    default:
      b.phase = OpenPhase::Normal;
      return Step::Skip;
  }
}

struct OutputToken {
  bool opening = false;
  MemIndex index = 0;
  Value value = 0;
};

bool related(const OutputToken& a, const OutputToken& b) {
  if (a.opening && b.opening) return a.index == b.index;
  return a.value == b.value;
}

std::vector<OutputToken> output_tokens(const Trace& t) {
  std::vector<OutputToken> out;
  Bracket b;
  b.balance = 1;  // never report closes here
  for (const auto& l : t) {
    switch (advance(b, l)) {
      case Step::Opening: out.push_back({true, b.index, b.value}); break;
      case Step::Output: out.push_back({false, 0, l.value}); break;
      default: break;
    }
    if (b.balance < 1) b.balance = 1;
  }
  return out;
}

}  // namespace

ErasureZone erasure_zone(const UserSpec& user, StateId anchor, std::size_t depth) {
  const Lts& m = user.lts;
  ErasureZone zone{anchor, {}};
  std::set<std::pair<Trace, StateId>> seen;
  ErasureSession cur;
  cur.start_state = anchor;
  cur.states.push_back(anchor);

  auto record = [&](SessionStatus status, bool truncated, const Bracket& b) {
    if (!seen.insert({cur.trace, cur.states.back()}).second) return;
    ErasureSession s = cur;
    s.status = status;
    s.truncated = truncated;
    (void)b;
    zone.sessions.push_back(std::move(s));
  };

  std::function<void(StateId, Bracket)> walk = [&](StateId s, Bracket b) {
    auto outs = m.outgoing(s);
    if (outs.empty()) return record(SessionStatus::Incomplete, false, b);
    if (cur.trace.size() == depth) return record(SessionStatus::Incomplete, true, b);
    for (const auto& t : outs) {
      Bracket nb = b;
      const Step step = advance(nb, t.label);
      cur.trace.push_back(t.label);
      cur.states.push_back(t.target);
      if (cur.trace.size() == 3) {
        cur.secret_index = nb.index;
        cur.secret_value = nb.value;
      }
      if (step == Step::Close) {
        record(SessionStatus::Complete, false, nb);
      } else {
        walk(t.target, nb);
      }
      cur.trace.pop_back();
      cur.states.pop_back();
    }
  };

  // Only walks that start with a full opening triple are sessions.
  for (const auto& be : m.outgoing(anchor)) {
    if (be.label.kind != LabelKind::BeginErase) continue;
    Bracket b;
    advance(b, be.label);
    cur.trace = {be.label};
    cur.states = {anchor, be.target};
    if (depth < 1) continue;
    if (depth == 1) {
      record(SessionStatus::Incomplete, true, b);
      continue;
    }
    for (const auto& rd : m.outgoing(be.target)) {
      if (rd.label.kind != LabelKind::MemRead) continue;
      Bracket rb = b;
      advance(rb, rd.label);
      cur.trace = {be.label, rd.label};
      cur.states = {anchor, be.target, rd.target};
      if (depth == 2) {
        record(SessionStatus::Incomplete, true, rb);
        continue;
      }
      for (const auto& em : m.outgoing(rd.target)) {
        Bracket eb = rb;
        if (advance(eb, em.label) != Step::Opening) continue;
        cur.trace = {be.label, rd.label, em.label};
        cur.states = {anchor, be.target, rd.target, em.target};
        cur.secret_index = eb.index;
        cur.secret_value = eb.value;
        walk(em.target, eb);
      }
    }
  }
  std::sort(zone.sessions.begin(), zone.sessions.end(), [](const ErasureSession& a, const ErasureSession& b) {
    return std::tie(a.trace, a.states) < std::tie(b.trace, b.states);
  });
  return zone;
}

Frontier erasure_frontier(const UserSpec& user, StateId anchor, std::size_t depth) {
  Frontier f{anchor, {}};
  for (const auto& s : erasure_zone(user, anchor, depth).sessions) {
    if (s.status == SessionStatus::Complete) f.states.insert(s.end_state());
  }
  return f;
}

bool output_equal(const Trace& t1, const Trace& t2) {
  const auto a = output_tokens(t1);
  const auto b = output_tokens(t2);
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!related(a[k], b[k])) return false;
  }
  return true;
}

namespace {

/// Synchronized product of two session walks from one anchor. Each side is
/// advanced to its next output event; non-output labels are skipped.
class StreamAbilityChecker {
 public:
  StreamAbilityChecker(const UserSpec& user, std::size_t depth) : m_(user.lts), depth_(depth) {}

  Verdict run() {
    Verdict v = Verdict::pass("stream-ability", depth_);
    for (StateId anchor : zone_anchors(UserSpec{{}, m_, {}}, depth_)) {
      anchor_ = anchor;
      visited_.clear();
      Side start{anchor, {}, 0, true};
      Path pa{{}, {anchor}}, pb{{}, {anchor}};
      explore(start, start, pa, pb);
      if (failure_) {
        v.outcome = Outcome::Fail;
        v.witnesses = std::move(*failure_);
        return v;
      }
    }
    if (inconclusive_) v.outcome = Outcome::Inconclusive;
    v.open_states = state_names(m_, std::vector<StateId>(open_.begin(), open_.end()));
    return v;
  }

 private:
  struct Side {
    StateId state;
    Bracket bracket;
    std::size_t steps;
    bool at_anchor;

    auto operator<=>(const Side&) const = default;
  };
  enum class Kind { Token, Ended, Truncated };
  struct Event {
    Kind kind;
    OutputToken token;
    Side next;
    Trace labels;
    std::vector<StateId> states;
  };
  struct Path {
    Trace trace;
    std::vector<StateId> states;
  };

  void events(const Side& side, Event& partial, std::vector<Event>& out) const {
    auto outs = m_.outgoing(side.state);
    if (outs.empty()) {
      out.push_back({Kind::Ended, {}, side, partial.labels, partial.states});
      return;
    }
    if (side.steps == depth_) {
      out.push_back({Kind::Truncated, {}, side, partial.labels, partial.states});
      return;
    }
    for (const auto& t : outs) {
      if (side.at_anchor && t.label.kind != LabelKind::BeginErase) continue;
      Side nx{t.target, side.bracket, side.steps + 1, false};
      if (side.steps == 1 && t.label.kind != LabelKind::MemRead) {
        continue;  // not an erasure opening
      }
      const Step step = advance(nx.bracket, t.label);
      if (side.steps == 2 && step != Step::Opening) continue;
      partial.labels.push_back(t.label);
      partial.states.push_back(t.target);
      switch (step) {
        case Step::Opening:
          out.push_back({Kind::Token, {true, nx.bracket.index, nx.bracket.value}, nx, partial.labels, partial.states});
          break;
        case Step::Output:
          out.push_back({Kind::Token, {false, 0, t.label.value}, nx, partial.labels, partial.states});
          break;
        case Step::Close:
          out.push_back({Kind::Ended, {}, nx, partial.labels, partial.states});
          break;
        case Step::Skip:
          events(nx, partial, out);
          break;
      }
      partial.labels.pop_back();
      partial.states.pop_back();
    }
  }

  std::vector<Event> events(const Side& side) const {
    std::vector<Event> out;
    Event partial{Kind::Ended, {}, side, {}, {}};
    events(side, partial, out);
    return out;
  }

  void explore(const Side& a, const Side& b, Path& pa, Path& pb) {
    if (failure_ || !visited_.insert({a, b}).second) return;
    const auto ea = events(a);
    const auto eb = events(b);
    for (const auto& x : ea) {
      for (const auto& y : eb) {
        if (failure_) return;
        if (x.kind == Kind::Truncated || y.kind == Kind::Truncated) {
          inconclusive_ = true;
          open_.insert(anchor_);
          continue;
        }
        append(pa, x);
        append(pb, y);
        if (x.kind == Kind::Ended && y.kind == Kind::Ended) {
          // both sessions finished with related outputs
        } else if (x.kind != y.kind) {
          fail(pa, pb, "sessions emit a different number of outputs");
        } else if (!related(x.token, y.token)) {
          fail(pa, pb, "sessions emit unrelated outputs");
        } else {
          explore(x.next, y.next, pa, pb);
        }
        unappend(pa, x);
        unappend(pb, y);
      }
    }
  }

  static void append(Path& p, const Event& e) {
    p.trace.insert(p.trace.end(), e.labels.begin(), e.labels.end());
    p.states.insert(p.states.end(), e.states.begin(), e.states.end());
  }
  static void unappend(Path& p, const Event& e) {
    p.trace.resize(p.trace.size() - e.labels.size());
    p.states.resize(p.states.size() - e.states.size());
  }

  void fail(const Path& a, const Path& b, const std::string& why) {
    const std::string at = " (zone of " + m_.state_name(anchor_) + ")";
    failure_ = std::vector<Witness>{{why + at, ModelKind::User, a.trace, state_names(m_, a.states)},
                                    {why + at, ModelKind::User, b.trace, state_names(m_, b.states)}};
  }

  const Lts& m_;
  std::size_t depth_;
  StateId anchor_ = 0;
  bool inconclusive_ = false;
  std::set<StateId> open_;
  std::optional<std::vector<Witness>> failure_;
  std::set<std::pair<Side, Side>> visited_;
};

}  // namespace

Verdict check_stream_ability(const UserSpec& user, std::size_t depth) {
  return StreamAbilityChecker(user, depth).run();
}

TraceEquivalence trace_equivalence(const Lts& model, StateId a, StateId b, std::size_t ceiling) {
  using Subset = std::vector<StateId>;
  using Pair = std::pair<Subset, Subset>;
  auto successors = [&](const Subset& s, const Label& l) {
    std::set<StateId> out;
    for (StateId x : s) {
      for (const auto& t : model.outgoing(x)) {
        if (t.label == l) out.insert(t.target);
      }
    }
    return Subset(out.begin(), out.end());
  };
  std::map<Pair, std::optional<std::pair<Pair, Label>>> parent;
  std::deque<Pair> queue;
  const Pair start{{a}, {b}};
  parent[start] = std::nullopt;
  queue.push_back(start);
  auto rebuild = [&](Pair p, Label last) {
    Trace t{std::move(last)};
    while (parent.at(p)) {
      t.push_back(parent.at(p)->second);
      p = parent.at(p)->first;
    }
    std::reverse(t.begin(), t.end());
    return t;
  };
  while (!queue.empty()) {
    if (parent.size() > ceiling) return {true, std::nullopt};
    const Pair cur = queue.front();
    queue.pop_front();
    std::set<Label> labels;
    for (const auto* side : {&cur.first, &cur.second}) {
      for (StateId x : *side) {
        for (const auto& t : model.outgoing(x)) labels.insert(t.label);
      }
    }
    for (const auto& l : labels) {
      Pair next{successors(cur.first, l), successors(cur.second, l)};
      if (next.first.empty() != next.second.empty()) return {false, rebuild(cur, l)};
      if (parent.try_emplace(next, std::make_pair(cur, l)).second) queue.push_back(std::move(next));
    }
  }
  return {false, std::nullopt};
}

namespace {

/// Shortest trace of length <= depth in exactly one of T(a), T(b).
std::optional<Trace> bounded_difference(const Lts& m, StateId a, StateId b, std::size_t depth) {
  auto ta = traces_to_depth(m, a, depth);
  auto tb = traces_to_depth(m, b, depth);
  std::vector<Trace> diff;
  std::set_symmetric_difference(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(diff));
  if (diff.empty()) return std::nullopt;
  return *std::min_element(diff.begin(), diff.end(), [](const Trace& x, const Trace& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
}

}  // namespace

Verdict check_secret_confinement(const UserSpec& user, std::size_t depth, ConfinementOptions options) {
  const Lts& m = user.lts;
  Verdict v = Verdict::pass("secret-confinement", depth);
  for (StateId anchor : zone_anchors(user, depth)) {
    const auto frontier = erasure_frontier(user, anchor, depth);
    const std::vector<StateId> states(frontier.states.begin(), frontier.states.end());
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (std::size_t j = i + 1; j < states.size(); ++j) {
        auto eq = trace_equivalence(m, states[i], states[j], options.subset_ceiling);
        std::optional<Trace> diff = eq.distinguishing;
        if (eq.ceiling_exceeded) diff = bounded_difference(m, states[i], states[j], depth);
        if (!diff) continue;
        const std::string why = "frontier states of the zone of " + m.state_name(anchor) +
                                " differ on trace " + format_trace(*diff, ModelKind::User, m.domain());
        v.outcome = Outcome::Fail;
        v.witnesses.push_back({why, ModelKind::User, *diff, {m.state_name(states[i])}});
        v.witnesses.push_back({why, ModelKind::User, *diff, {m.state_name(states[j])}});
        return v;
      }
    }
  }
  return v;
}

Verdict check_erasure_friendly(const UserSpec& user, std::size_t depth) {
  return conjunction("erasure-friendly",
                     {check_user_well_formed(user), check_secret_singularity(user, depth),
                      check_secret_confinement(user, depth), check_stream_ability(user, depth)},
                     depth);
}

UserInstance instantiate(const UserSpec& user, const Memory& memory) {
  const Lts& m = user.lts;
  if (!(memory.domain == m.domain())) throw ModelError("memory and user use different value domains");
  for (MemIndex i : read_indices(m)) {
    if (!memory.values.contains(i)) throw UnboundIndex(i);
  }
  std::vector<std::string> declared;
  for (StateId s = 0; s < m.state_count(); ++s) {
    if (m.is_declared(s)) declared.push_back(m.state_name(s));
  }
  std::vector<Lts::NamedTransition> kept;
  for (const auto& t : m.transitions()) {
    if (t.label.kind == LabelKind::MemRead && memory.values.at(t.label.index) != t.label.value) continue;
    kept.emplace_back(m.state_name(t.source), t.label, m.state_name(t.target));
  }
  Lts restricted(ModelKind::User, m.domain(), std::move(declared),
                 m.has_initial() ? m.state_name(m.initial()) : std::string{}, std::move(kept));
  return UserInstance{user, memory, std::move(restricted)};
}

}  // namespace erasure
