#include "erasure/system.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <tuple>

namespace erasure {

Verdict check_system_spec(const SystemSpec& system) {
  const Lts& m = system.lts;
  if (m.kind() != ModelKind::System) {
    return Verdict::fail("system-spec", {"model is not a system", m.kind(), {}, {}});
  }
  Verdict channels = Verdict::pass("channels");
  for (const auto& t : m.transitions()) {
    const bool on_erase = t.label.channel == system.erase_channel;
    bool ok = true;
    switch (t.label.kind) {
      case LabelKind::Send:
      case LabelKind::Receive:
      case LabelKind::BeginErase:
      case LabelKind::EndErase: ok = on_erase; break;
      case LabelKind::OtherOut: ok = !on_erase && system.other_channels.contains(t.label.channel); break;
      default: break;
    }
    if (!ok) {
      channels.outcome = Outcome::Fail;
      channels.witnesses.push_back({"label on unexpected channel " + t.label.channel, m.kind(), {t.label},
                                    {m.state_name(t.source), m.state_name(t.target)}});
    }
  }
  return conjunction("system-spec", {validate_lts(m), channels, is_deterministic(m), is_input_enabled(m)},
                     std::nullopt);
}

Verdict check_system_well_formed(const SystemSpec& system) {
  const Lts& m = system.lts;
  const std::string property = "system-well-formed";
  const auto n = m.domain().size();

  auto bal = bracket_balance(m);
  if (bal.verdict.failed()) {
    Verdict v = bal.verdict;
    v.property = property;
    return v;
  }
  auto witness_to = [&](StateId s, const std::string& what) {
    return *shortest_path(m, m.initial(), s, what);
  };

  for (StateId s = 0; s < m.state_count(); ++s) {
    if (!bal.balance[s]) continue;
    for (const auto& t : m.outgoing(s)) {
      if (t.label.kind == LabelKind::BeginErase) {
        std::vector<bool> seen(n, false);
        for (const auto& u : m.outgoing(t.target)) {
          if (u.label.kind == LabelKind::Receive && u.label.value < n) seen[u.label.value] = true;
        }
        for (Value x = 0; x < n; ++x) {
          if (seen[x]) continue;
          Witness w = witness_to(s, "BE is not followed by an input of value " + m.domain().name(x));
          w.trace.push_back(t.label);
          w.states.push_back(m.state_name(t.target));
          return Verdict::fail(property, std::move(w));
        }
      }
      if (t.label.kind == LabelKind::EndErase && *bal.balance[s] <= 0) {
        Witness w = witness_to(s, "EE without an open erasure block");
        w.trace.push_back(t.label);
        w.states.push_back(m.state_name(t.target));
        return Verdict::fail(property, std::move(w));
      }
    }
    if (*bal.balance[s] < 0) return Verdict::fail(property, witness_to(s, "negative bracket balance"));
    if (m.outgoing(s).empty() && *bal.balance[s] != 0) {
      return Verdict::fail(property, witness_to(s, "halts inside an open erasure block (balance " +
                                                       std::to_string(*bal.balance[s]) + ")"));
    }
  }
  return Verdict::pass(property);
}

std::size_t input_count(const Trace& t) {
  return static_cast<std::size_t>(
      std::count_if(t.begin(), t.end(), [](const Label& l) { return l.kind == LabelKind::Receive; }));
}

Trace refine_with_stream(const SystemSpec& system, const InputStream& stream, std::size_t depth) {
  const Lts& m = system.lts;
  Trace out;
  StateId s = m.initial();
  std::size_t consumed = 0;
  while (out.size() < depth) {
    auto outs = m.outgoing(s);
    if (outs.empty()) break;
    const Transition* next = &outs.front();
    if (has_receive(m, s)) {
      const Value want = stream.at(consumed + 1);
      auto it = std::find_if(outs.begin(), outs.end(), [&](const Transition& t) {
        return t.label.kind == LabelKind::Receive && t.label.value == want;
      });
      if (it == outs.end()) break;
      next = &*it;
      ++consumed;
    }
    out.push_back(next->label);
    s = next->target;
  }
  return out;
}

std::vector<ErasurePoint> enumerate_erasure_points(const SystemSpec& system, std::size_t depth) {
  const Lts& m = system.lts;
  std::map<Trace, ErasurePoint> points;
  ErasurePoint cur;
  std::function<void(StateId)> walk = [&](StateId s) {
    cur.open_states.push_back(s);
    for (const auto& t : m.outgoing(s)) {
      if (t.label.kind == LabelKind::BeginErase && cur.open_trace.size() < depth) {
        ErasurePoint p = cur;
        p.pre_state = s;
        p.input_position = input_count(cur.open_trace) + 1;
        points.try_emplace(cur.open_trace, std::move(p));
      }
    }
    if (cur.open_trace.size() + 1 < depth) {
      for (const auto& t : m.outgoing(s)) {
        cur.open_trace.push_back(t.label);
        walk(t.target);
        cur.open_trace.pop_back();
      }
    }
    cur.open_states.pop_back();
  };
  if (m.has_initial()) walk(m.initial());
  std::vector<ErasurePoint> out;
  out.reserve(points.size());
  for (auto& [trace, p] : points) out.push_back(std::move(p));
  return out;
}

namespace {

/// One side of an erasure session run: from the state after the erased
/// input until the matching EE.
struct SessionRun {
  enum class Status { Closed, Stuck, Truncated } status = Status::Stuck;
  StateId end = 0;
  std::size_t inputs = 0;
  Trace trace;
  std::vector<StateId> states;
};

class InputErasureChecker {
 public:
  InputErasureChecker(const SystemSpec& system, std::size_t depth)
      : m_(system.lts), depth_(depth), balance_(bracket_balance(system.lts)) {}

  Verdict run() {
    const std::string property = "input-erasure";
    Verdict verdict = Verdict::pass(property, depth_);
    if (balance_.verdict.failed()) {
      verdict = balance_.verdict;
      verdict.property = property;
      verdict.depth = depth_;
      return verdict;
    }
    for (const auto& point : enumerate_erasure_points(SystemSpec{{}, m_, {}, {}}, depth_)) {
      point_ = &point;
      inconclusive_ = false;
      check_point();
      if (failure_) {
        verdict.outcome = Outcome::Fail;
        verdict.witnesses = std::move(*failure_);
        verdict.open_states.clear();
        return verdict;
      }
      if (inconclusive_) {
        verdict.outcome = Outcome::Inconclusive;
        const auto& name = m_.state_name(point.pre_state);
        if (std::find(verdict.open_states.begin(), verdict.open_states.end(), name) == verdict.open_states.end()) {
          verdict.open_states.push_back(name);
        }
      }
    }
    return verdict;
  }

 private:
  const Transition* find(StateId s, LabelKind kind, std::optional<Value> value = std::nullopt) const {
    for (const auto& t : m_.outgoing(s)) {
      if (t.label.kind == kind && (!value || t.label.value == *value)) return &t;
    }
    return nullptr;
  }

  void check_point() {
    const std::size_t open_len = point_->open_trace.size();
    const Transition* be = find(point_->pre_state, LabelKind::BeginErase);
    if (open_len + 2 > depth_) {
      inconclusive_ = true;
      return;
    }
    base_ = *balance_.balance[point_->pre_state];
    const auto n = m_.domain().size();
    for (Value v = 0; v < n && !failure_; ++v) {
      for (Value w = v + 1; w < n && !failure_; ++w) {
        const Transition* tv = find(be->target, LabelKind::Receive, v);
        const Transition* tw = find(be->target, LabelKind::Receive, w);
        if (!tv || !tw) continue;  // not well formed; reported elsewhere
        be_ = be;
        in_v_ = tv;
        in_w_ = tw;
        std::vector<Value> stream;
        SessionRun x;
        session_runs(tv->target, open_len + 2, 0, x, stream, [&](const SessionRun& xr) {
          SessionRun y;
          session_runs(tw->target, open_len + 2, 0, y, stream, [&](const SessionRun& yr) {
            judge(xr, yr, stream);
            return !failure_;
          });
          return !failure_;
        });
      }
    }
  }

  /// Enumerates session runs, branching on stream values beyond `stream`.
  /// The callback returns false to stop the enumeration.
  bool session_runs(StateId s, std::size_t used, std::size_t consumed, SessionRun& run,
                    std::vector<Value>& stream, const std::function<bool(const SessionRun&)>& emit) {
    run.states.push_back(s);
    struct Pop {
      SessionRun& r;
      ~Pop() { r.states.pop_back(); }
    } pop{run};

    auto outs = m_.outgoing(s);
    if (outs.empty()) {
      run.status = SessionRun::Status::Stuck;
      run.end = s;
      run.inputs = consumed;
      return emit(run);
    }
    if (used >= depth_) {
      run.status = SessionRun::Status::Truncated;
      run.end = s;
      run.inputs = consumed;
      return emit(run);
    }
    for (const auto& t : outs) {
      if (t.label.kind == LabelKind::EndErase && *balance_.balance[s] == base_ + 1) {
        run.trace.push_back(t.label);
        run.states.push_back(t.target);
        run.status = SessionRun::Status::Closed;
        run.end = t.target;
        run.inputs = consumed;
        const bool go = emit(run);
        run.trace.pop_back();
        run.states.pop_back();
        return go;
      }
    }
    if (has_receive(m_, s)) {
      auto step = [&](Value x) {
        const Transition* t = find(s, LabelKind::Receive, x);
        if (!t) return true;
        run.trace.push_back(t->label);
        const bool go = session_runs(t->target, used + 1, consumed + 1, run, stream, emit);
        run.trace.pop_back();
        return go;
      };
      if (consumed < stream.size()) return step(stream[consumed]);
      for (Value x = 0; x < m_.domain().size(); ++x) {
        stream.push_back(x);
        const bool go = step(x);
        stream.pop_back();
        if (!go) return false;
      }
      return true;
    }
    for (const auto& t : outs) {
      run.trace.push_back(t.label);
      const bool go = session_runs(t.target, used + 1, consumed, run, stream, emit);
      run.trace.pop_back();
      if (!go) return false;
    }
    return true;
  }

  Trace full_trace(const Transition* input, const SessionRun& r, const Trace& z) const {
    Trace t = point_->open_trace;
    t.push_back(be_->label);
    t.push_back(input->label);
    t.insert(t.end(), r.trace.begin(), r.trace.end());
    t.insert(t.end(), z.begin(), z.end());
    return t;
  }

  std::vector<std::string> full_states(const Transition* input, const SessionRun& r,
                                       const std::vector<StateId>& z) const {
    std::vector<StateId> s = point_->open_states;
    s.push_back(be_->target);
    s.insert(s.end(), r.states.begin(), r.states.end());
    s.insert(s.end(), z.begin(), z.end());
    (void)input;
    return state_names(m_, s);
  }

  void fail(std::string why, const SessionRun& x, const SessionRun& y, const Trace& zx = {},
            const Trace& zy = {}, const std::vector<StateId>& sx = {}, const std::vector<StateId>& sy = {}) {
    const auto& d = m_.domain();
    failure_ = std::vector<Witness>{
        {why + " (erased value " + d.name(in_v_->label.value) + ")", ModelKind::System,
         full_trace(in_v_, x, zx), full_states(in_v_, x, sx)},
        {why + " (erased value " + d.name(in_w_->label.value) + ")", ModelKind::System,
         full_trace(in_w_, y, zy), full_states(in_w_, y, sy)}};
  }

  void judge(const SessionRun& x, const SessionRun& y, std::vector<Value>& stream) {
    using S = SessionRun::Status;
    auto one_way = [&](const SessionRun& a, const SessionRun& b) {
      if (a.status == S::Truncated) {
        inconclusive_ = true;
      } else if (a.status == S::Closed) {
        if (b.status == S::Stuck) {
          fail("unmatched EE: only one run closes the erasure block", x, y);
        } else if (b.status == S::Truncated) {
          inconclusive_ = true;
        }
      }
    };
    one_way(x, y);
    if (failure_) return;
    one_way(y, x);
    if (failure_ || x.status != S::Closed || y.status != S::Closed) return;

    if (x.inputs != y.inputs) {
      fail("input count inside the erasure session differs", x, y);
      return;
    }
    const std::size_t open_len = point_->open_trace.size() + 2;
    const std::size_t rx = depth_ - (open_len + x.trace.size());
    const std::size_t ry = depth_ - (open_len + y.trace.size());
    visited_.clear();
    Trace zx, zy;
    std::vector<StateId> sx, sy;
    compare_continuations(x.end, y.end, std::min(rx, ry), x.inputs, stream, zx, zy, sx, sy,
                          [&](const std::string& why) { fail(why, x, y, zx, zy, sx, sy); });
  }

  void compare_continuations(StateId x, StateId y, std::size_t budget, std::size_t consumed,
                             std::vector<Value>& stream, Trace& zx, Trace& zy, std::vector<StateId>& sx,
                             std::vector<StateId>& sy, const std::function<void(const std::string&)>& report) {
    if (failure_ || budget == 0 || x == y) return;
    if (!visited_.insert({x, y, budget, consumed < stream.size() ? stream.size() - consumed : 0}).second) return;
    auto ox = m_.outgoing(x);
    auto oy = m_.outgoing(y);
    if (ox.empty() && oy.empty()) return;
    auto step = [&](const Transition& a, const Transition& b, bool input) {
      zx.push_back(a.label);
      zy.push_back(b.label);
      sx.push_back(a.target);
      sy.push_back(b.target);
      if (a.label != b.label) {
        report("post-EE behaviour differs at " + format_label(a.label, ModelKind::System, m_.domain()) + " vs " +
               format_label(b.label, ModelKind::System, m_.domain()));
      } else {
        compare_continuations(a.target, b.target, budget - 1, consumed + (input ? 1 : 0), stream, zx, zy, sx, sy,
                              report);
      }
      zx.pop_back();
      zy.pop_back();
      sx.pop_back();
      sy.pop_back();
    };
    if (ox.empty() || oy.empty()) {
      const auto& live = ox.empty() ? oy.front() : ox.front();
      if (ox.empty()) zy.push_back(live.label), sy.push_back(live.target);
      else zx.push_back(live.label), sx.push_back(live.target);
      report("post-EE behaviour differs: one run halts");
      if (ox.empty()) zy.pop_back(), sy.pop_back();
      else zx.pop_back(), sx.pop_back();
      return;
    }
    const bool ix = has_receive(m_, x);
    const bool iy = has_receive(m_, y);
    if (ix && iy) {
      auto values = [&](auto&& body) {
        if (consumed < stream.size()) {
          body(stream[consumed]);
          return;
        }
        for (Value v = 0; v < m_.domain().size() && !failure_; ++v) {
          stream.push_back(v);
          body(v);
          stream.pop_back();
        }
      };
      values([&](Value v) {
        const Transition* a = find(x, LabelKind::Receive, v);
        const Transition* b = find(y, LabelKind::Receive, v);
        if (a && b) step(*a, *b, true);
      });
      return;
    }
    step(ox.front(), oy.front(), false);
  }

  const Lts& m_;
  std::size_t depth_;
  BracketBalance balance_;
  const ErasurePoint* point_ = nullptr;
  const Transition* be_ = nullptr;
  const Transition* in_v_ = nullptr;
  const Transition* in_w_ = nullptr;
  int base_ = 0;
  bool inconclusive_ = false;
  std::optional<std::vector<Witness>> failure_;
  std::set<std::tuple<StateId, StateId, std::size_t, std::size_t>> visited_;
};

}  // namespace

Verdict check_input_erasure(const SystemSpec& system, std::size_t depth) {
  Verdict v = InputErasureChecker(system, depth).run();
  if (!v.failed()) return v;
  // Report the witness found at the smallest failing bound.
  for (std::size_t d = 1; d < depth; ++d) {
    Verdict shallow = InputErasureChecker(system, d).run();
    if (shallow.failed()) {
      v.witnesses = std::move(shallow.witnesses);
      break;
    }
  }
  return v;
}

}  // namespace erasure
