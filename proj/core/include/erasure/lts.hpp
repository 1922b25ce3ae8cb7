#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace erasure {

/// Index of a value inside its model's ValueDomain.
using Value = std::uint32_t;
using StateId = std::uint32_t;
/// Identifier of a secret slot in a user's memory; no arithmetic meaning.
using MemIndex = std::uint32_t;

/// Raised when an operation is invoked on inputs that break its contract.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered finite set of value tokens. The order fixes tie-breaking in
/// every enumeration.
class ValueDomain {
 public:
  ValueDomain() = default;
  explicit ValueDomain(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(Value v) const { return names_.at(v); }
  std::optional<Value> find(std::string_view token) const;
  bool contains(Value v) const { return v < names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const ValueDomain&) const = default;

 private:
  std::vector<std::string> names_;
};

// Declaration order is the tie-break order used in reports.
enum class LabelKind : std::uint8_t {
  Send,        // a!v from the perspective of the model owning the label
  Receive,     // a?v
  BeginErase,  // a!BE in systems, a?BE in users
  EndErase,    // a!EE in systems, a?EE in users
  OtherOut,    // b!v, systems only
  MemRead,     // i?v, users only
  Sync,        // composed value exchange
  SyncBE,
  SyncEE,
};

enum class SyncDirection : std::uint8_t { UserToSystem, SystemToUser };

struct Label {
  LabelKind kind = LabelKind::Send;
  std::string channel;
  MemIndex index = 0;
  Value value = 0;
  SyncDirection direction = SyncDirection::UserToSystem;

  static Label send(std::string channel, Value v) { return {LabelKind::Send, std::move(channel), 0, v}; }
  static Label receive(std::string channel, Value v) { return {LabelKind::Receive, std::move(channel), 0, v}; }
  static Label begin_erase(std::string channel) { return {LabelKind::BeginErase, std::move(channel)}; }
  static Label end_erase(std::string channel) { return {LabelKind::EndErase, std::move(channel)}; }
  static Label other_out(std::string channel, Value v) { return {LabelKind::OtherOut, std::move(channel), 0, v}; }
  static Label mem_read(MemIndex i, Value v) { return {LabelKind::MemRead, {}, i, v}; }
  static Label sync(Value v, SyncDirection d) { return {LabelKind::Sync, {}, 0, v, d}; }
  static Label sync_be() { return {LabelKind::SyncBE, {}}; }
  static Label sync_ee() { return {LabelKind::SyncEE, {}}; }

  bool carries_value() const {
    return kind == LabelKind::Send || kind == LabelKind::Receive || kind == LabelKind::OtherOut ||
           kind == LabelKind::MemRead || kind == LabelKind::Sync;
  }

  auto operator<=>(const Label&) const = default;
  bool operator==(const Label&) const = default;
};

using Trace = std::vector<Label>;

bool is_prefix(const Trace& prefix, const Trace& t);

enum class ModelKind : std::uint8_t { System, User, Composed };

std::string_view to_string(ModelKind kind);

/// Human-readable rendering of a label, e.g. `a!BE`, `a?1`, `1?0`, `sync(1,u>s)`.
std::string format_label(const Label& l, ModelKind kind, const ValueDomain& domain);
std::string format_trace(const Trace& t, ModelKind kind, const ValueDomain& domain);

struct Transition {
  StateId source = 0;
  Label label;
  StateId target = 0;

  auto operator<=>(const Transition&) const = default;
  bool operator==(const Transition&) const = default;
};

/// A finite labelled transition system. Immutable after construction.
///
/// State ids are assigned in lexicographic order of state names, so
/// iterating ids or the (sorted) transition list follows the tie-break
/// order. States that are referenced by a transition or as the initial
/// state but never declared are still given ids; validate_lts reports them.
class Lts {
 public:
  using NamedTransition = std::tuple<std::string, Label, std::string>;

  Lts() = default;
  Lts(ModelKind kind, ValueDomain domain, std::vector<std::string> declared_states,
      std::string initial, std::vector<NamedTransition> transitions);

  ModelKind kind() const { return kind_; }
  const ValueDomain& domain() const { return domain_; }

  std::size_t state_count() const { return names_.size(); }
  const std::string& state_name(StateId s) const { return names_.at(s); }
  std::optional<StateId> find_state(std::string_view name) const;
  bool is_declared(StateId s) const { return declared_.at(s); }

  /// Always a valid id when the model has at least one state; check
  /// is_declared to learn whether the initial state was declared.
  StateId initial() const { return initial_; }
  bool has_initial() const { return has_initial_; }

  std::span<const Transition> transitions() const { return transitions_; }
  std::span<const Transition> outgoing(StateId s) const;

  bool operator==(const Lts& other) const;

 private:
  ModelKind kind_ = ModelKind::System;
  ValueDomain domain_;
  std::vector<std::string> names_;
  std::vector<bool> declared_;
  StateId initial_ = 0;
  bool has_initial_ = false;
  std::vector<Transition> transitions_;
  std::vector<std::size_t> offsets_;
};

enum class Outcome : std::uint8_t { Pass, Fail, Inconclusive };

std::string_view to_string(Outcome o);

struct Witness {
  std::string description;
  ModelKind kind = ModelKind::System;
  Trace trace;
  std::vector<std::string> states;

  bool operator==(const Witness&) const = default;
};

/// Result of a property check. A Fail always carries at least one witness.
/// `depth` is empty when the check is exact (exhaustive).
struct Verdict {
  std::string property;
  Outcome outcome = Outcome::Pass;
  std::optional<std::size_t> depth;
  std::vector<Witness> witnesses;
  std::vector<std::string> open_states;
  std::vector<Verdict> parts;

  bool passed() const { return outcome == Outcome::Pass; }
  bool failed() const { return outcome == Outcome::Fail; }

  static Verdict pass(std::string property, std::optional<std::size_t> depth = std::nullopt);
  static Verdict fail(std::string property, Witness w, std::optional<std::size_t> depth = std::nullopt);

  bool operator==(const Verdict&) const = default;
};

/// Fail dominates Inconclusive, which dominates Pass.
Outcome combine(Outcome a, Outcome b);

/// Conjunction of verdicts; parts are kept in order.
Verdict conjunction(std::string property, std::vector<Verdict> parts, std::optional<std::size_t> depth);

// ---------------------------------------------------------------------------
// Structural checks.

Verdict validate_lts(const Lts& model);
Verdict is_deterministic(const Lts& model);
Verdict is_input_enabled(const Lts& model);

/// All traces of length <= depth starting at `from`; always contains the empty trace.
std::set<Trace> traces_to_depth(const Lts& model, StateId from, std::size_t depth);

enum class OpenPhase : std::uint8_t {
  Normal,
  AfterBegin,  // a BE was just seen; its value input is pending
  AfterRead,   // user only: the secret was read, its emission is pending
};

struct BracketBalance {
  Verdict verdict;
  /// Balance of each reachable state; empty for unreachable states.
  std::vector<std::optional<int>> balance;
  std::vector<OpenPhase> phase;
};

/// Number of completed erasure openings minus EE events, per reachable state.
/// An opening completes at the value input after BE (systems) or at the
/// emission of the value read from memory after BE (users).
BracketBalance bracket_balance(const Lts& model);

// ---------------------------------------------------------------------------
// Graph helpers shared by the checkers.

/// BFS distance from `from`; empty for unreachable states.
std::vector<std::optional<std::size_t>> distances_from(const Lts& model, StateId from);

/// A shortest path from `from` to `to` as (trace, visited state names).
std::optional<Witness> shortest_path(const Lts& model, StateId from, StateId to, std::string description);

std::vector<std::string> state_names(const Lts& model, std::span<const StateId> states);

bool has_receive(const Lts& model, StateId s);

}  // namespace erasure
