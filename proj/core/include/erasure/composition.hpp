#pragma once

#include <string>
#include <utility>
#include <vector>

#include "erasure/lts.hpp"
#include "erasure/system.hpp"
#include "erasure/user.hpp"

namespace erasure {

struct ComposedState {
  StateId user = 0;
  StateId system = 0;

  auto operator<=>(const ComposedState&) const = default;
};

/// Reachable fragment of U|S. `components[c]` gives the user and system
/// states of composed state `c`.
struct ComposedLts {
  Lts lts;
  std::vector<ComposedState> components;
};

using ComposedStep = std::pair<Label, ComposedState>;

/// One-step moves of u|s, in label order:
///   user a?v + system a!v, user a!v + system a?v  -> Sync(v)
///   user a?BE + system a!BE                       -> SyncBE (same for EE)
///   system b!v alone                              -> OtherOut(b, v)
///   user i?v alone                                -> MemRead(i, v)
std::vector<ComposedStep> composed_steps(const Lts& user, const Lts& system, ComposedState at);

/// Product states within `depth` steps of u0|s0, named "u|s".
ComposedLts compose(const UserSpec& user, const SystemSpec& system, std::size_t depth);
ComposedLts compose(const Lts& user, const Lts& system, std::size_t depth);

Trace project_system(const Trace& composed, const std::string& erase_channel = "a");
Trace project_user(const Trace& composed, const std::string& erase_channel = "a");

/// The user never leaves the system waiting: it can always supply an
/// awaited input and accompany every non-input system step (reads allowed
/// in between).
Verdict check_liveness(const UserSpec& user, const SystemSpec& system, std::size_t depth);

/// Graphviz rendering of a composed graph.
std::string to_dot(const ComposedLts& composed);

}  // namespace erasure
