#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "erasure/oracle.hpp"
#include "erasure/spec_format.hpp"

namespace erasure::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitInconclusive = 3;

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> files;
  std::size_t depth = 10;
  OutputFormat format = OutputFormat::Text;
  std::optional<std::string> dot_path;
  /// oracle-compare only.
  std::optional<std::string> property;
  std::size_t budget = OracleOptions{}.node_budget;
};

/// 0 all Pass, 1 any Fail, 3 Inconclusive without Fail.
int exit_code(const std::vector<Verdict>& verdicts);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses `args` (without the program name) and runs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace erasure::cli
