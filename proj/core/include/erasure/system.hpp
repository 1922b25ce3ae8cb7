#pragma once

#include <set>
#include <string>
#include <vector>

#include "erasure/lts.hpp"

namespace erasure {

/// A system model: deterministic, input-enabled, talking to its user on
/// `erase_channel` and emitting on the `other_channels`.
struct SystemSpec {
  std::string name;
  Lts lts;
  std::string erase_channel = "a";
  std::set<std::string> other_channels;
};

/// Structure, channel usage, determinism and input-enabledness in one verdict.
Verdict check_system_spec(const SystemSpec& system);

/// Bracketing discipline of BE/EE markers. Exact; ignores unreachable states.
Verdict check_system_well_formed(const SystemSpec& system);

/// Number of value receptions (a?v) in a trace.
std::size_t input_count(const Trace& t);

/// Input stream: an explicit prefix followed by a constant default.
struct InputStream {
  std::vector<Value> prefix;
  Value fallback = 0;

  /// The n-th value, counting from 1.
  Value at(std::size_t n) const { return n >= 1 && n <= prefix.size() ? prefix[n - 1] : fallback; }
};

/// The single maximal trace of length <= depth in which the n-th input is I(n).
Trace refine_with_stream(const SystemSpec& system, const InputStream& stream, std::size_t depth);

struct ErasurePoint {
  StateId pre_state = 0;
  Trace open_trace;
  std::vector<StateId> open_states;
  /// Ordinal (from 1) of the erased input among all inputs of the run.
  std::size_t input_position = 1;

  bool operator==(const ErasurePoint&) const = default;
};

/// Every distinct run prefix of length < depth that ends in a state about
/// to emit BE. Ordered by trace.
std::vector<ErasurePoint> enumerate_erasure_points(const SystemSpec& system, std::size_t depth);

/// Input erasure: for each erasure point, changing only the erased input
/// keeps the in-session input count and the post-EE behaviour unchanged.
Verdict check_input_erasure(const SystemSpec& system, std::size_t depth);

}  // namespace erasure
