#include "erasure/composite.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace erasure {

namespace {

using Mem = std::map<MemIndex, Value>;

/// Composed moves allowed when the user reads from `mem`.
std::vector<ComposedStep> steps_under(const UserSpec& u, const SystemSpec& s, ComposedState c, const Mem& mem) {
  auto all = composed_steps(u.lts, s.lts, c);
  std::erase_if(all, [&](const ComposedStep& st) {
    return st.first.kind == LabelKind::MemRead && mem.at(st.first.index) != st.first.value;
  });
  return all;
}

struct Path {
  Trace labels;
  std::vector<ComposedState> states;  // one more than labels
};

/// Composed states reachable by traces of exactly L labels, with one such trace each.
std::vector<std::map<ComposedState, Path>> layers(const UserSpec& u, const SystemSpec& s, const Mem& mem,
                                                  std::size_t max_len) {
  std::vector<std::map<ComposedState, Path>> out(1);
  const ComposedState start{u.lts.initial(), s.lts.initial()};
  out[0].emplace(start, Path{{}, {start}});
  for (std::size_t l = 0; l < max_len; ++l) {
    std::map<ComposedState, Path> next;
    for (const auto& [c, path] : out[l]) {
      for (const auto& [label, to] : steps_under(u, s, c, mem)) {
        if (next.contains(to)) continue;
        Path p = path;
        p.labels.push_back(label);
        p.states.push_back(to);
        next.emplace(to, std::move(p));
      }
    }
    if (next.empty()) break;
    out.push_back(std::move(next));
  }
  return out;
}

/// Post-cbe states for reading `value` at `index` from `c`, with the cbe path.
std::vector<Path> cbe_targets(const UserSpec& u, const SystemSpec& s, ComposedState c, const Mem& mem,
                              MemIndex index, Value value) {
  std::vector<Path> out;
  for (const auto& [l1, c1] : steps_under(u, s, c, mem)) {
    if (l1.kind != LabelKind::SyncBE) continue;
    for (const auto& [l2, c2] : steps_under(u, s, c1, mem)) {
      if (l2.kind != LabelKind::MemRead || l2.index != index || l2.value != value) continue;
      for (const auto& [l3, c3] : steps_under(u, s, c2, mem)) {
        if (l3.kind != LabelKind::Sync || l3.direction != SyncDirection::UserToSystem || l3.value != value) continue;
        out.push_back(Path{{l1, l2, l3}, {c1, c2, c3}});
      }
    }
  }
  return out;
}

struct Runs {
  /// Post-EE state and labels left, with a representative session path.
  std::map<std::pair<ComposedState, std::size_t>, Path> closed;
  bool truncated = false;
  bool stuck = false;
};

/// Sessions from the post-cbe states until the matching SyncEE.
Runs session_runs(const UserSpec& u, const SystemSpec& s, const Mem& mem, const std::vector<Path>& starts,
                  std::size_t used, std::size_t depth) {
  Runs runs;
  std::set<std::tuple<ComposedState, int, std::size_t>> seen;
  Path cur;
  std::function<void(ComposedState, int, std::size_t)> walk = [&](ComposedState c, int open, std::size_t n) {
    if (!seen.emplace(c, open, n).second) return;
    const auto moves = steps_under(u, s, c, mem);
    if (moves.empty()) {
      runs.stuck = true;
      return;
    }
    if (n == depth) {
      runs.truncated = true;
      return;
    }
    for (const auto& [label, to] : moves) {
      int next_open = open;
      if (label.kind == LabelKind::SyncBE) ++next_open;
      if (label.kind == LabelKind::SyncEE) --next_open;
      cur.labels.push_back(label);
      cur.states.push_back(to);
      if (next_open == 0) {
        runs.closed.try_emplace({to, depth - (n + 1)}, cur);
      } else {
        walk(to, next_open, n + 1);
      }
      cur.labels.pop_back();
      cur.states.pop_back();
    }
  };
  for (const auto& start : starts) {
    cur = start;
    walk(start.states.back(), 1, used);
  }
  return runs;
}

using Budgeted = std::pair<ComposedState, std::size_t>;

/// Searches a continuation of `x` (within its budget) that no member of `ys`
/// reproduces. A member whose budget is spent matches any continuation.
class Inclusion {
 public:
  Inclusion(const UserSpec& u, const SystemSpec& s, const Mem& xmem, const Mem& ymem)
      : u_(u), s_(s), xmem_(xmem), ymem_(ymem) {}

  std::optional<Path> find_divergence(ComposedState x, std::size_t rx, const std::set<Budgeted>& ys) {
    Path z{{}, {x}};
    if (explore(x, rx, ys, z)) return std::nullopt;
    return z;
  }

 private:
  bool explore(ComposedState x, std::size_t rx, const std::set<Budgeted>& ys, Path& z) {
    if (rx == 0) return true;
    for (const auto& y : ys) {
      if (y.second == 0) return true;
    }
    auto key = std::make_tuple(x, rx, ys);
    if (good_.contains(key)) return true;
    for (const auto& [label, to] : steps_under(u_, s_, x, xmem_)) {
      std::set<Budgeted> next;
      for (const auto& [y, ry] : ys) {
        for (const auto& [ly, ty] : steps_under(u_, s_, y, ymem_)) {
          if (ly == label) next.emplace(ty, ry - 1);
        }
      }
      z.labels.push_back(label);
      z.states.push_back(to);
      if (next.empty() || !explore(to, rx - 1, next, z)) return false;
      z.labels.pop_back();
      z.states.pop_back();
    }
    good_.insert(std::move(key));
    return true;
  }

  const UserSpec& u_;
  const SystemSpec& s_;
  const Mem& xmem_;
  const Mem& ymem_;
  std::set<std::tuple<ComposedState, std::size_t, std::set<Budgeted>>> good_;
};

std::string memory_text(const Mem& mem, const ValueDomain& d) {
  std::string out = "{";
  for (const auto& [i, v] : mem) {
    if (out.size() > 1) out += ",";
    out += std::to_string(i) + "=" + d.names().at(v);
  }
  return out + "}";
}

Witness make_witness(const UserSpec& u, const SystemSpec& s, std::string description, const Path& prefix,
                     const Path& cbe, const Path& session, const Path& tail) {
  Witness w{std::move(description), ModelKind::Composed, prefix.labels, {}};
  auto name = [&](ComposedState c) { return u.lts.state_name(c.user) + "|" + s.lts.state_name(c.system); };
  for (auto c : prefix.states) w.states.push_back(name(c));
  // cbe and session paths start with the cbe labels; tail starts at the post-EE state.
  const Path& run = session.labels.empty() ? cbe : session;
  for (std::size_t k = 0; k < run.labels.size(); ++k) {
    w.trace.push_back(run.labels[k]);
    w.states.push_back(name(run.states[k]));
  }
  for (std::size_t k = 0; k < tail.labels.size(); ++k) {
    w.trace.push_back(tail.labels[k]);
    w.states.push_back(name(tail.states[k + 1]));
  }
  return w;
}

struct PointResult {
  Outcome outcome = Outcome::Pass;
  std::vector<Witness> witnesses;
};

class CompositeChecker {
 public:
  CompositeChecker(const UserSpec& u, const SystemSpec& s, std::size_t depth) : u_(u), s_(s), depth_(depth) {}

  Verdict run() {
    Verdict out = Verdict::pass("composite-erasure", depth_);
    std::set<std::string> open;
    for (const auto& mem : all_memories(u_)) {
      const auto by_len = layers(u_, s_, mem, depth_ >= 3 ? depth_ - 3 : 0);
      for (std::size_t len = 0; len < by_len.size() && len + 3 <= depth_; ++len) {
        for (const auto& [c, prefix] : by_len[len]) {
          for (MemIndex i : cbe_indices(c, mem)) {
            PointResult r = check_point(mem, c, prefix, i);
            if (r.outcome == Outcome::Fail) {
              out.outcome = Outcome::Fail;
              out.witnesses = std::move(r.witnesses);
              out.open_states.clear();
              return out;
            }
            if (r.outcome == Outcome::Inconclusive) {
              out.outcome = Outcome::Inconclusive;
              open.insert(u_.lts.state_name(c.user) + "|" + s_.lts.state_name(c.system));
            }
          }
        }
      }
    }
    out.open_states.assign(open.begin(), open.end());
    return out;
  }

 private:
  std::set<MemIndex> cbe_indices(ComposedState c, const Mem& mem) const {
    std::set<MemIndex> out;
    for (const auto& [l1, c1] : steps_under(u_, s_, c, mem)) {
      if (l1.kind != LabelKind::SyncBE) continue;
      for (const auto& [l2, c2] : steps_under(u_, s_, c1, mem)) {
        if (l2.kind == LabelKind::MemRead) out.insert(l2.index);
      }
    }
    return out;
  }

  PointResult check_point(const Mem& mem, ComposedState c, const Path& prefix, MemIndex i) {
    PointResult result;
    const Value v = mem.at(i);
    const auto v_starts = cbe_targets(u_, s_, c, mem, i, v);
    if (v_starts.empty()) return result;
    const std::size_t used = prefix.labels.size() + 3;
    const Runs vr = session_runs(u_, s_, mem, v_starts, used, depth_);
    for (Value w = 0; w < u_.lts.domain().size(); ++w) {
      if (w == v) continue;
      Mem other = mem;
      other[i] = w;
      const auto w_starts = cbe_targets(u_, s_, c, other, i, w);
      const Runs wr = session_runs(u_, s_, other, w_starts, used, depth_);
      const Outcome o = compare(mem, vr, v_starts, other, wr, w_starts, prefix, i, result);
      if (o == Outcome::Fail) {
        result.outcome = Outcome::Fail;
        return result;
      }
      result.outcome = combine(result.outcome, o);
    }
    return result;
  }

  /// One direction of the point check: every closed run of `a` must be
  /// matched by the closed runs of `b`.
  Outcome direction(const Mem& amem, const Runs& a, const std::vector<Path>& astarts, const Mem& bmem,
                    const Runs& b, const std::vector<Path>& bstarts, const Path& prefix, MemIndex i,
                    PointResult& result) {
    std::set<Budgeted> ys;
    for (const auto& [key, path] : b.closed) ys.insert(key);
    const auto& d = u_.lts.domain();
    const std::string header = "secret index " + std::to_string(i) + ", memory " + memory_text(amem, d) +
                               " against " + memory_text(bmem, d);
    Inclusion inclusion(u_, s_, amem, bmem);
    for (const auto& [key, path] : a.closed) {
      std::optional<Path> z;
      if (ys.empty()) {
        z = Path{{}, {key.first}};
      } else {
        z = inclusion.find_divergence(key.first, key.second, ys);
        if (!z) continue;
      }
      if (b.truncated) return Outcome::Inconclusive;
      const std::string what = ys.empty() ? ": the session closes only under the first memory"
                                          : ": the continuation after the session is not reproduced";
      result.witnesses.push_back(make_witness(u_, s_, header + what, prefix, astarts.front(), path, *z));
      if (!b.closed.empty()) {
        const auto& [bkey, bpath] = *b.closed.begin();
        result.witnesses.push_back(
            make_witness(u_, s_, "a session under " + memory_text(bmem, d), prefix, bstarts.front(), bpath,
                         Path{{}, {bkey.first}}));
      } else if (!bstarts.empty()) {
        result.witnesses.push_back(make_witness(u_, s_, "no session closes under " + memory_text(bmem, d), prefix,
                                                bstarts.front(), Path{}, Path{}));
      }
      return Outcome::Fail;
    }
    return Outcome::Pass;
  }

  Outcome compare(const Mem& vmem, const Runs& vr, const std::vector<Path>& vstarts, const Mem& wmem,
                  const Runs& wr, const std::vector<Path>& wstarts, const Path& prefix, MemIndex i,
                  PointResult& result) {
    if (vr.closed.empty() && wr.closed.empty()) {
      return (vr.truncated || wr.truncated) ? Outcome::Inconclusive : Outcome::Pass;
    }
    Outcome o = direction(vmem, vr, vstarts, wmem, wr, wstarts, prefix, i, result);
    if (o == Outcome::Fail) return o;
    const Outcome back = direction(wmem, wr, wstarts, vmem, vr, vstarts, prefix, i, result);
    if (back == Outcome::Fail) return back;
    o = combine(o, back);
    if (vr.truncated || wr.truncated) o = combine(o, Outcome::Inconclusive);
    return o;
  }

  const UserSpec& u_;
  const SystemSpec& s_;
  std::size_t depth_;
};

}  // namespace

std::vector<Mem> all_memories(const UserSpec& user) {
  const auto indices = read_indices(user.lts);
  const std::vector<MemIndex> idx(indices.begin(), indices.end());
  const std::size_t n = user.lts.domain().size();
  std::vector<Mem> out;
  if (n == 0) return out;
  std::vector<Value> digits(idx.size(), 0);
  for (;;) {
    Mem m;
    for (std::size_t k = 0; k < idx.size(); ++k) m.emplace(idx[k], digits[k]);
    out.push_back(std::move(m));
    std::size_t k = idx.size();
    while (k > 0 && digits[k - 1] + 1 == n) digits[--k] = 0;
    if (k == 0) break;
    ++digits[k - 1];
  }
  return out;
}

std::vector<CompositeErasurePoint> enumerate_composite_points(const UserSpec& user, const SystemSpec& system,
                                                              std::size_t depth) {
  std::vector<CompositeErasurePoint> out;
  if (depth < 3) return out;
  for (const auto& mem : all_memories(user)) {
    const auto by_len = layers(user, system, mem, depth - 3);
    for (const auto& layer : by_len) {
      for (const auto& [c, prefix] : layer) {
        std::set<MemIndex> seen;
        for (const auto& [l1, c1] : steps_under(user, system, c, mem)) {
          if (l1.kind != LabelKind::SyncBE) continue;
          for (const auto& [l2, c2] : steps_under(user, system, c1, mem)) {
            if (l2.kind != LabelKind::MemRead || !seen.insert(l2.index).second) continue;
            if (cbe_targets(user, system, c, mem, l2.index, l2.value).empty()) continue;
            out.push_back(CompositeErasurePoint{prefix.labels, c, mem, l2.index, l2.value});
          }
        }
      }
    }
  }
  return out;
}

Verdict check_composite_erasure(const UserSpec& user, const SystemSpec& system, std::size_t depth) {
  if (!(user.lts.domain() == system.lts.domain())) throw ModelError("user and system use different value domains");
  // The shallowest failing bound gives the shortest witness.
  for (std::size_t d = 1; d < depth; ++d) {
    Verdict v = CompositeChecker(user, system, d).run();
    if (v.failed()) {
      v.depth = depth;
      return v;
    }
  }
  return CompositeChecker(user, system, depth).run();
}

TheoremReport validate_soundness_theorem(const UserSpec& user, const SystemSpec& system, std::size_t depth) {
  TheoremReport r;
  r.input_erasure = check_input_erasure(system, depth);
  r.erasure_friendly = check_erasure_friendly(user, depth);
  r.liveness = check_liveness(user, system, depth);
  r.composite_erasure = check_composite_erasure(user, system, depth);
  r.consistent = !(r.premises_hold() && r.composite_erasure.failed());
  return r;
}

}  // namespace erasure
