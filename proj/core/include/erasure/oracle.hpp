#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "erasure/lts.hpp"
#include "erasure/system.hpp"
#include "erasure/user.hpp"

namespace erasure {

enum class PropertyId : std::uint8_t {
  Determinism,
  InputEnabled,
  SystemWellFormed,
  InputErasure,
  UserWellFormed,
  Singularity,
  Confinement,
  StreamAbility,
  Liveness,
  CompositeErasure,
};

std::string_view to_string(PropertyId p);
std::optional<PropertyId> parse_property_id(std::string_view name);
const std::vector<PropertyId>& all_properties();

bool applies_to_system(PropertyId p);
bool applies_to_user(PropertyId p);
bool applies_to_pair(PropertyId p);

class BudgetExceeded : public ModelError {
 public:
  explicit BudgetExceeded(std::size_t budget)
      : ModelError("oracle node budget of " + std::to_string(budget) + " exceeded") {}
};

struct OracleOptions {
  /// Enumeration nodes visited before giving up with BudgetExceeded.
  std::size_t node_budget = 50'000'000;
};

/// Reference implementations: every definition is evaluated by enumerating
/// explicit paths of length <= depth, with no shared state between paths.
/// Throws ModelError when `p` does not apply to the given model(s).
Verdict oracle_check(PropertyId p, const SystemSpec& system, std::size_t depth, OracleOptions options = {});
Verdict oracle_check(PropertyId p, const UserSpec& user, std::size_t depth, OracleOptions options = {});
Verdict oracle_check(PropertyId p, const UserSpec& user, const SystemSpec& system, std::size_t depth,
                     OracleOptions options = {});

/// The optimized checker for the same property.
Verdict checker_verdict(PropertyId p, const SystemSpec& system, std::size_t depth);
Verdict checker_verdict(PropertyId p, const UserSpec& user, std::size_t depth);
Verdict checker_verdict(PropertyId p, const UserSpec& user, const SystemSpec& system, std::size_t depth);

}  // namespace erasure
