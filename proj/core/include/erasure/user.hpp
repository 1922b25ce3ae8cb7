#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "erasure/lts.hpp"

namespace erasure {

/// An abstract user. Need not be deterministic.
struct UserSpec {
  std::string name;
  Lts lts;
  std::string erase_channel = "a";
};

/// The store of secrets a user fetches erased values from.
struct Memory {
  std::string name;
  ValueDomain domain;
  std::map<MemIndex, Value> values;

  bool operator==(const Memory&) const = default;
};

/// A user restricted to the traces consistent with one memory.
struct UserInstance {
  UserSpec user;
  Memory memory;
  Lts lts;
};

class UnboundIndex : public ModelError {
 public:
  explicit UnboundIndex(MemIndex index)
      : ModelError("user reads index " + std::to_string(index) + " which the memory does not define"),
        index_(index) {}
  MemIndex index() const { return index_; }

 private:
  MemIndex index_;
};

enum class SessionStatus : std::uint8_t { Complete, Incomplete };

struct ErasureSession {
  StateId start_state = 0;
  Trace trace;
  std::vector<StateId> states;
  SessionStatus status = SessionStatus::Complete;
  /// Incomplete because the depth bound cut it, not because the user halted.
  bool truncated = false;
  MemIndex secret_index = 0;
  Value secret_value = 0;

  StateId end_state() const { return states.back(); }
};

struct ErasureZone {
  StateId anchor = 0;
  std::vector<ErasureSession> sessions;
};

struct Frontier {
  StateId anchor = 0;
  std::set<StateId> states;
};

Verdict check_user_spec(const UserSpec& user);
Verdict check_user_well_formed(const UserSpec& user);

/// No trace of length <= depth reads the same memory index twice. The
/// search is exact over the state graph; a violation is reported only when
/// its shortest witness fits the bound.
Verdict check_secret_singularity(const UserSpec& user, std::size_t depth);

/// States within `depth` steps of the initial state that offer a?BE.
std::vector<StateId> zone_anchors(const UserSpec& user, std::size_t depth);

/// Complete sessions, plus maximal non-closing ones (stuck or cut by depth).
/// Sessions are at most `depth` labels long and ordered by trace.
ErasureZone erasure_zone(const UserSpec& user, StateId anchor, std::size_t depth);
Frontier erasure_frontier(const UserSpec& user, StateId anchor, std::size_t depth);

/// Output equality of two finite user traces. Erasure openings
/// (a?BE)(i?v)(a!v) count as one output event.
bool output_equal(const Trace& t1, const Trace& t2);

Verdict check_stream_ability(const UserSpec& user, std::size_t depth);

struct ConfinementOptions {
  /// Largest number of subset-pairs explored before falling back to a
  /// bounded trace comparison.
  std::size_t subset_ceiling = 1u << 14;
};

struct TraceEquivalence {
  bool ceiling_exceeded = false;
  std::optional<Trace> distinguishing;
};

/// Decides T(a) == T(b) by on-the-fly determinization of both sides.
TraceEquivalence trace_equivalence(const Lts& model, StateId a, StateId b, std::size_t ceiling);

Verdict check_secret_confinement(const UserSpec& user, std::size_t depth, ConfinementOptions options = {});

/// Well-formedness, singularity, confinement and stream ability.
Verdict check_erasure_friendly(const UserSpec& user, std::size_t depth);

std::set<MemIndex> read_indices(const Lts& model);

UserInstance instantiate(const UserSpec& user, const Memory& memory);

}  // namespace erasure
