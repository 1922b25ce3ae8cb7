#pragma once

#include <string>
#include <vector>

namespace erasure::testing {

/// A template-assembled (user, system) pair. `*_should_fail` records the
/// premise violations injected on purpose; an unmutated premise is expected
/// not to Fail.
struct GeneratedPair {
  std::string name;
  std::string system_text;
  std::string user_text;
  bool input_erasure_should_fail = false;
  bool erasure_friendly_should_fail = false;
};

/// Deterministic; at least 100 pairs.
std::vector<GeneratedPair> generated_pairs();

}  // namespace erasure::testing
