#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "erasure/composition.hpp"
#include "erasure/lts.hpp"
#include "erasure/system.hpp"
#include "erasure/user.hpp"

namespace erasure {

/// A composed state u1|s1 reached by `open_trace` under `memory`, from which
/// SyncBE, MemRead(secret_index, erased_value), Sync(erased_value) follow.
struct CompositeErasurePoint {
  Trace open_trace;
  ComposedState at;
  std::map<MemIndex, Value> memory;
  MemIndex secret_index = 0;
  Value erased_value = 0;
};

/// Every memory over the indices the user reads, in lexicographic order.
std::vector<std::map<MemIndex, Value>> all_memories(const UserSpec& user);

/// Points whose cbe step fits in `depth`.
std::vector<CompositeErasurePoint> enumerate_composite_points(const UserSpec& user, const SystemSpec& system,
                                                              std::size_t depth);

/// After each point, changing the memory at the secret index to any other
/// value must leave the post-session behaviour unchanged, in both
/// directions. Runs longer than `depth` labels in total are not examined;
/// sessions cut by the bound make their point Inconclusive.
Verdict check_composite_erasure(const UserSpec& user, const SystemSpec& system, std::size_t depth);

struct TheoremReport {
  Verdict input_erasure;
  Verdict erasure_friendly;
  Verdict liveness;
  Verdict composite_erasure;
  /// False only when all three premises Pass and the conclusion Fails.
  bool consistent = true;

  bool premises_hold() const {
    return input_erasure.passed() && erasure_friendly.passed() && liveness.passed();
  }
};

TheoremReport validate_soundness_theorem(const UserSpec& user, const SystemSpec& system, std::size_t depth);

}  // namespace erasure
