#include "erasure/lts.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace erasure {

ValueDomain::ValueDomain(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw ModelError("duplicate value '" + n + "' in domain");
  }
}

std::optional<Value> ValueDomain::find(std::string_view token) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == token) return static_cast<Value>(i);
  }
  return std::nullopt;
}

bool is_prefix(const Trace& prefix, const Trace& t) {
  return prefix.size() <= t.size() && std::equal(prefix.begin(), prefix.end(), t.begin());
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::System: return "system";
    case ModelKind::User: return "user";
    case ModelKind::Composed: return "composed";
  }
  return "?";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "PASS";
    case Outcome::Fail: return "FAIL";
    case Outcome::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string format_label(const Label& l, ModelKind kind, const ValueDomain& domain) {
  auto val = [&](Value v) { return domain.contains(v) ? domain.name(v) : "#" + std::to_string(v); };
  // Markers are emitted by systems and received by users.
  const char marker_dir = kind == ModelKind::User ? '?' : '!';
  switch (l.kind) {
    case LabelKind::Send: return l.channel + "!" + val(l.value);
    case LabelKind::Receive: return l.channel + "?" + val(l.value);
    case LabelKind::BeginErase: return l.channel + marker_dir + "BE";
    case LabelKind::EndErase: return l.channel + marker_dir + "EE";
    case LabelKind::OtherOut: return l.channel + "!" + val(l.value);
    case LabelKind::MemRead: return std::to_string(l.index) + "?" + val(l.value);
    case LabelKind::Sync:
      return "sync(" + val(l.value) + (l.direction == SyncDirection::UserToSystem ? ",u>s)" : ",s>u)");
    case LabelKind::SyncBE: return "sync(BE)";
    case LabelKind::SyncEE: return "sync(EE)";
  }
  return "?";
}

std::string format_trace(const Trace& t, ModelKind kind, const ValueDomain& domain) {
  if (t.empty()) return "ε";
  std::string out;
  for (const auto& l : t) {
    if (!out.empty()) out += ' ';
    out += format_label(l, kind, domain);
  }
  return out;
}

Lts::Lts(ModelKind kind, ValueDomain domain, std::vector<std::string> declared_states,
         std::string initial, std::vector<NamedTransition> transitions)
    : kind_(kind), domain_(std::move(domain)) {
  std::map<std::string, bool> all;  // name -> declared
  for (auto& s : declared_states) all[s] = true;
  for (auto& [src, label, dst] : transitions) {
    all.try_emplace(src, false);
    all.try_emplace(dst, false);
  }
  has_initial_ = !initial.empty();
  if (has_initial_) all.try_emplace(initial, false);

  std::map<std::string, StateId> ids;
  for (auto& [name, declared] : all) {
    ids[name] = static_cast<StateId>(names_.size());
    names_.push_back(name);
    declared_.push_back(declared);
  }
  if (has_initial_) initial_ = ids.at(initial);

  transitions_.reserve(transitions.size());
  for (auto& [src, label, dst] : transitions) {
    transitions_.push_back({ids.at(src), std::move(label), ids.at(dst)});
  }
  std::sort(transitions_.begin(), transitions_.end());
  transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());

  offsets_.assign(names_.size() + 1, 0);
  for (const auto& t : transitions_) ++offsets_[t.source + 1];
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
}

std::optional<StateId> Lts::find_state(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<StateId>(it - names_.begin());
}

std::span<const Transition> Lts::outgoing(StateId s) const {
  return std::span<const Transition>(transitions_).subspan(offsets_.at(s), offsets_.at(s + 1) - offsets_.at(s));
}

bool Lts::operator==(const Lts& other) const {
  return kind_ == other.kind_ && domain_ == other.domain_ && names_ == other.names_ &&
         declared_ == other.declared_ && has_initial_ == other.has_initial_ &&
         (!has_initial_ || initial_ == other.initial_) && transitions_ == other.transitions_;
}

Verdict Verdict::pass(std::string property, std::optional<std::size_t> depth) {
  Verdict v;
  v.property = std::move(property);
  v.depth = depth;
  return v;
}

Verdict Verdict::fail(std::string property, Witness w, std::optional<std::size_t> depth) {
  Verdict v;
  v.property = std::move(property);
  v.outcome = Outcome::Fail;
  v.depth = depth;
  v.witnesses.push_back(std::move(w));
  return v;
}

Outcome combine(Outcome a, Outcome b) {
  if (a == Outcome::Fail || b == Outcome::Fail) return Outcome::Fail;
  if (a == Outcome::Inconclusive || b == Outcome::Inconclusive) return Outcome::Inconclusive;
  return Outcome::Pass;
}

Verdict conjunction(std::string property, std::vector<Verdict> parts, std::optional<std::size_t> depth) {
  Verdict v;
  v.property = std::move(property);
  v.depth = depth;
  for (const auto& p : parts) v.outcome = combine(v.outcome, p.outcome);
  v.parts = std::move(parts);
  return v;
}

namespace {

bool label_legal_for(const Label& l, ModelKind kind) {
  switch (kind) {
    case ModelKind::System:
      return l.kind <= LabelKind::OtherOut;
    case ModelKind::User:
      return l.kind <= LabelKind::EndErase || l.kind == LabelKind::MemRead;
    case ModelKind::Composed:
      return l.kind >= LabelKind::OtherOut;
  }
  return false;
}

Witness transition_witness(const Lts& m, const Transition& t, std::string description) {
  return {std::move(description), m.kind(), {t.label}, {m.state_name(t.source), m.state_name(t.target)}};
}

}  // namespace

Verdict validate_lts(const Lts& model) {
  Verdict v = Verdict::pass("structure");
  auto violation = [&](Witness w) {
    v.outcome = Outcome::Fail;
    v.witnesses.push_back(std::move(w));
  };
  if (model.domain().size() < 2) violation({"value domain has fewer than two values", model.kind(), {}, {}});
  if (!model.has_initial()) {
    violation({"no initial state", model.kind(), {}, {}});
  } else if (!model.is_declared(model.initial())) {
    violation({"initial state " + model.state_name(model.initial()) + " is not declared", model.kind(), {},
               {model.state_name(model.initial())}});
  }
  for (StateId s = 0; s < model.state_count(); ++s) {
    if (!model.is_declared(s) && !(model.has_initial() && s == model.initial())) {
      for (const auto& t : model.transitions()) {
        if (t.source == s || t.target == s) {
          violation(transition_witness(model, t, "unknown state " + model.state_name(s)));
          break;
        }
      }
    }
  }
  for (const auto& t : model.transitions()) {
    if (!label_legal_for(t.label, model.kind())) {
      violation(transition_witness(model, t, "label illegal for kind " + std::string(to_string(model.kind()))));
    }
    if (t.label.carries_value() && !model.domain().contains(t.label.value)) {
      violation(transition_witness(model, t, "value outside domain"));
    }
  }
  return v;
}

Verdict is_deterministic(const Lts& model) {
  for (StateId s = 0; s < model.state_count(); ++s) {
    auto out = model.outgoing(s);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        const auto& a = out[i];
        const auto& b = out[j];
        if (a.label == b.label) {
          Witness w{"same label leads to distinct states " + model.state_name(a.target) + " and " +
                        model.state_name(b.target),
                    model.kind(), {a.label, b.label}, {model.state_name(s)}};
          return Verdict::fail("determinism", std::move(w));
        }
        if (a.label.kind != LabelKind::Receive || b.label.kind != LabelKind::Receive) {
          Witness w{"distinct non-input labels from one state", model.kind(), {a.label, b.label},
                    {model.state_name(s)}};
          return Verdict::fail("determinism", std::move(w));
        }
      }
    }
  }
  return Verdict::pass("determinism");
}

Verdict is_input_enabled(const Lts& model) {
  Verdict v = Verdict::pass("input-enabled");
  const auto n = model.domain().size();
  for (StateId s = 0; s < model.state_count(); ++s) {
    // Group value inputs by channel (receives) or index (memory reads).
    std::map<std::tuple<LabelKind, std::string, MemIndex>, std::vector<bool>> groups;
    for (const auto& t : model.outgoing(s)) {
      if (t.label.kind != LabelKind::Receive && t.label.kind != LabelKind::MemRead) continue;
      auto& seen = groups[{t.label.kind, t.label.channel, t.label.index}];
      seen.resize(n, false);
      if (t.label.value < n) seen[t.label.value] = true;
    }
    for (const auto& [key, seen] : groups) {
      for (Value x = 0; x < n; ++x) {
        if (seen[x]) continue;
        Label missing = std::get<0>(key) == LabelKind::Receive ? Label::receive(std::get<1>(key), x)
                                                               : Label::mem_read(std::get<2>(key), x);
        v.outcome = Outcome::Fail;
        v.witnesses.push_back({"missing input " + format_label(missing, model.kind(), model.domain()),
                               model.kind(), {missing}, {model.state_name(s)}});
      }
    }
  }
  return v;
}

std::set<Trace> traces_to_depth(const Lts& model, StateId from, std::size_t depth) {
  std::set<Trace> out;
  Trace cur;
  std::function<void(StateId)> walk = [&](StateId s) {
    out.insert(cur);
    if (cur.size() == depth) return;
    for (const auto& t : model.outgoing(s)) {
      cur.push_back(t.label);
      walk(t.target);
      cur.pop_back();
    }
  };
  walk(from);
  return out;
}

std::vector<std::optional<std::size_t>> distances_from(const Lts& model, StateId from) {
  std::vector<std::optional<std::size_t>> dist(model.state_count());
  if (model.state_count() == 0) return dist;
  std::deque<StateId> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const auto& t : model.outgoing(s)) {
      if (!dist[t.target]) {
        dist[t.target] = *dist[s] + 1;
        queue.push_back(t.target);
      }
    }
  }
  return dist;
}

namespace {

struct BfsTree {
  std::vector<std::optional<const Transition*>> parent;
  std::vector<bool> seen;
};

BfsTree bfs_tree(const Lts& model, StateId from) {
  BfsTree tree{std::vector<std::optional<const Transition*>>(model.state_count()),
               std::vector<bool>(model.state_count(), false)};
  std::deque<StateId> queue{from};
  tree.seen[from] = true;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const auto& t : model.outgoing(s)) {
      if (!tree.seen[t.target]) {
        tree.seen[t.target] = true;
        tree.parent[t.target] = &t;
        queue.push_back(t.target);
      }
    }
  }
  return tree;
}

Witness path_in_tree(const Lts& model, const BfsTree& tree, StateId to, std::string description) {
  Witness w{std::move(description), model.kind(), {}, {}};
  std::vector<StateId> states{to};
  StateId cur = to;
  while (tree.parent[cur]) {
    const Transition* t = *tree.parent[cur];
    w.trace.push_back(t->label);
    cur = t->source;
    states.push_back(cur);
  }
  std::reverse(w.trace.begin(), w.trace.end());
  std::reverse(states.begin(), states.end());
  w.states = state_names(model, states);
  return w;
}

}  // namespace

std::optional<Witness> shortest_path(const Lts& model, StateId from, StateId to, std::string description) {
  auto tree = bfs_tree(model, from);
  if (!tree.seen[to]) return std::nullopt;
  return path_in_tree(model, tree, to, std::move(description));
}

std::vector<std::string> state_names(const Lts& model, std::span<const StateId> states) {
  std::vector<std::string> out;
  out.reserve(states.size());
  for (StateId s : states) out.push_back(model.state_name(s));
  return out;
}

bool has_receive(const Lts& model, StateId s) {
  for (const auto& t : model.outgoing(s)) {
    if (t.label.kind == LabelKind::Receive) return true;
  }
  return false;
}

BracketBalance bracket_balance(const Lts& model) {
  BracketBalance out{Verdict::pass("bracket-balance"), std::vector<std::optional<int>>(model.state_count()),
                     std::vector<OpenPhase>(model.state_count(), OpenPhase::Normal)};
  if (!model.has_initial() || model.state_count() == 0) return out;
  const bool user = model.kind() == ModelKind::User;

  auto tree = bfs_tree(model, model.initial());
  std::deque<StateId> queue{model.initial()};
  out.balance[model.initial()] = 0;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    const int b = *out.balance[s];
    const OpenPhase ph = out.phase[s];
    for (const auto& t : model.outgoing(s)) {
      int nb = b;
      OpenPhase np = OpenPhase::Normal;
      switch (t.label.kind) {
        case LabelKind::BeginErase: np = OpenPhase::AfterBegin; break;
        case LabelKind::EndErase: nb = b - 1; break;
        case LabelKind::Receive:
          if (!user && ph == OpenPhase::AfterBegin) nb = b + 1;
          break;
        case LabelKind::MemRead:
          if (user && ph == OpenPhase::AfterBegin) np = OpenPhase::AfterRead;
          break;
        case LabelKind::Send:
          if (user && ph == OpenPhase::AfterRead) nb = b + 1;
          break;
        default: break;
      }
      if (!out.balance[t.target]) {
        out.balance[t.target] = nb;
        out.phase[t.target] = np;
        queue.push_back(t.target);
      } else if (*out.balance[t.target] != nb || out.phase[t.target] != np) {
        Witness first = path_in_tree(model, tree, t.target,
                                     "reaches " + model.state_name(t.target) + " at balance " +
                                         std::to_string(*out.balance[t.target]));
        Witness second = path_in_tree(model, tree, s, "reaches " + model.state_name(t.target) +
                                                          " at balance " + std::to_string(nb));
        second.trace.push_back(t.label);
        second.states.push_back(model.state_name(t.target));
        out.verdict.outcome = Outcome::Fail;
        out.verdict.witnesses = {std::move(first), std::move(second)};
        out.verdict.witnesses.front().description.insert(0, "inconsistent bracketing: ");
        return out;
      }
    }
  }
  return out;
}

}  // namespace erasure
