#include "erasure/composition.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace erasure {

std::vector<ComposedStep> composed_steps(const Lts& user, const Lts& system, ComposedState at) {
  std::vector<ComposedStep> out;
  for (const auto& st : system.outgoing(at.system)) {
    switch (st.label.kind) {
      case LabelKind::OtherOut:
        out.emplace_back(st.label, ComposedState{at.user, st.target});
        break;
      case LabelKind::Send:
      case LabelKind::Receive:
      case LabelKind::BeginErase:
      case LabelKind::EndErase:
        for (const auto& ut : user.outgoing(at.user)) {
          const Label& l = ut.label;
          if (l.channel != st.label.channel) continue;
          const ComposedState next{ut.target, st.target};
          if (st.label.kind == LabelKind::Send && l.kind == LabelKind::Receive && l.value == st.label.value) {
            out.emplace_back(Label::sync(l.value, SyncDirection::SystemToUser), next);
          } else if (st.label.kind == LabelKind::Receive && l.kind == LabelKind::Send &&
                     l.value == st.label.value) {
            out.emplace_back(Label::sync(l.value, SyncDirection::UserToSystem), next);
          } else if (st.label.kind == LabelKind::BeginErase && l.kind == LabelKind::BeginErase) {
            out.emplace_back(Label::sync_be(), next);
          } else if (st.label.kind == LabelKind::EndErase && l.kind == LabelKind::EndErase) {
            out.emplace_back(Label::sync_ee(), next);
          }
        }
        break;
      default:
        break;
    }
  }
  for (const auto& ut : user.outgoing(at.user)) {
    if (ut.label.kind == LabelKind::MemRead) out.emplace_back(ut.label, ComposedState{ut.target, at.system});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::string composed_name(const Lts& user, const Lts& system, ComposedState c) {
  return user.state_name(c.user) + "|" + system.state_name(c.system);
}

}  // namespace

ComposedLts compose(const Lts& user, const Lts& system, std::size_t depth) {
  if (!(user.domain() == system.domain())) throw ModelError("user and system use different value domains");
  std::map<ComposedState, std::size_t> dist;
  std::deque<ComposedState> queue;
  const ComposedState start{user.initial(), system.initial()};
  dist[start] = 0;
  queue.push_back(start);
  std::vector<Lts::NamedTransition> edges;
  while (!queue.empty()) {
    const ComposedState c = queue.front();
    queue.pop_front();
    if (dist.at(c) >= depth) continue;
    for (auto& [label, next] : composed_steps(user, system, c)) {
      if (dist.try_emplace(next, dist.at(c) + 1).second) queue.push_back(next);
      edges.emplace_back(composed_name(user, system, c), label, composed_name(user, system, next));
    }
  }
  std::vector<std::string> names;
  std::map<std::string, ComposedState> by_name;
  for (const auto& [c, d] : dist) {
    names.push_back(composed_name(user, system, c));
    by_name.emplace(names.back(), c);
  }
  ComposedLts out{Lts(ModelKind::Composed, user.domain(), names, composed_name(user, system, start), std::move(edges)),
                  {}};
  out.components.reserve(out.lts.state_count());
  for (StateId s = 0; s < out.lts.state_count(); ++s) out.components.push_back(by_name.at(out.lts.state_name(s)));
  return out;
}

ComposedLts compose(const UserSpec& user, const SystemSpec& system, std::size_t depth) {
  if (user.erase_channel != system.erase_channel) throw ModelError("user and system disagree on the erase channel");
  return compose(user.lts, system.lts, depth);
}

Trace project_system(const Trace& composed, const std::string& erase_channel) {
  Trace out;
  for (const auto& l : composed) {
    switch (l.kind) {
      case LabelKind::Sync:
        out.push_back(l.direction == SyncDirection::UserToSystem ? Label::receive(erase_channel, l.value)
                                                                 : Label::send(erase_channel, l.value));
        break;
      case LabelKind::SyncBE: out.push_back(Label::begin_erase(erase_channel)); break;
      case LabelKind::SyncEE: out.push_back(Label::end_erase(erase_channel)); break;
      case LabelKind::OtherOut: out.push_back(l); break;
      default: break;
    }
  }
  return out;
}

Trace project_user(const Trace& composed, const std::string& erase_channel) {
  Trace out;
  for (const auto& l : composed) {
    switch (l.kind) {
      case LabelKind::Sync:
        out.push_back(l.direction == SyncDirection::UserToSystem ? Label::send(erase_channel, l.value)
                                                                 : Label::receive(erase_channel, l.value));
        break;
      case LabelKind::SyncBE: out.push_back(Label::begin_erase(erase_channel)); break;
      case LabelKind::SyncEE: out.push_back(Label::end_erase(erase_channel)); break;
      case LabelKind::MemRead: out.push_back(l); break;
      default: break;
    }
  }
  return out;
}

namespace {

/// User states reachable from `u` by memory reads only.
std::set<StateId> read_closure(const Lts& user, StateId u) {
  std::set<StateId> seen{u};
  std::deque<StateId> queue{u};
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (const auto& t : user.outgoing(s)) {
      if (t.label.kind == LabelKind::MemRead && seen.insert(t.target).second) queue.push_back(t.target);
    }
  }
  return seen;
}

/// Whether user state `u` can take part in the system move `st`.
bool accompanies(const Lts& user, StateId u, const Transition& st) {
  if (st.label.kind == LabelKind::OtherOut) return true;
  for (const auto& ut : user.outgoing(u)) {
    const Label& l = ut.label;
    if (l.channel != st.label.channel) continue;
    switch (st.label.kind) {
      case LabelKind::Send:
        if (l.kind == LabelKind::Receive && l.value == st.label.value) return true;
        break;
      case LabelKind::BeginErase:
      case LabelKind::EndErase:
        if (l.kind == st.label.kind) return true;
        break;
      default: break;
    }
  }
  return false;
}

}  // namespace

Verdict check_liveness(const UserSpec& user, const SystemSpec& system, std::size_t depth) {
  const std::string property = "liveness";
  const auto composed = compose(user, system, depth);
  const Lts& c = composed.lts;
  const Lts& u = user.lts;
  const Lts& s = system.lts;
  for (StateId id = 0; id < c.state_count(); ++id) {
    const auto [u1, s1] = composed.components[id];
    const auto closure = read_closure(u, u1);
    auto stuck = [&](std::string why, const Label& pending) {
      Witness w = *shortest_path(c, c.initial(), id, std::move(why));
      w.description += " (system pending: " + format_label(pending, ModelKind::System, s.domain()) + ")";
      return Verdict::fail(property, std::move(w), depth);
    };
    if (has_receive(s, s1)) {
      bool can_send = false;
      for (StateId u2 : closure) {
        for (const auto& t : u.outgoing(u2)) {
          if (t.label.kind == LabelKind::Send && t.label.channel == system.erase_channel) can_send = true;
        }
      }
      if (!can_send) {
        return stuck("system awaits an input the user never supplies",
                     Label::receive(system.erase_channel, 0));
      }
      continue;
    }
    for (const auto& st : s.outgoing(s1)) {
      bool ok = false;
      for (StateId u2 : closure) ok = ok || accompanies(u, u2, st);
      if (!ok) return stuck("user cannot accompany the system move", st.label);
    }
  }
  return Verdict::pass(property, depth);
}

std::string to_dot(const ComposedLts& composed) {
  const Lts& c = composed.lts;
  std::ostringstream out;
  out << "digraph composed {\n";
  for (StateId s = 0; s < c.state_count(); ++s) {
    out << "  n" << s << " [label=\"" << c.state_name(s) << "\"" << (s == c.initial() ? ", shape=doublecircle" : "")
        << "];\n";
  }
  for (const auto& t : c.transitions()) {
    out << "  n" << t.source << " -> n" << t.target << " [label=\""
        << format_label(t.label, ModelKind::Composed, c.domain()) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace erasure
