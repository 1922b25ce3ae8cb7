#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erasure/lts.hpp"
#include "erasure/oracle.hpp"

namespace erasure {

struct CorpusEntry {
  std::string name;
  std::optional<std::string> system_file;  // absolute paths
  std::optional<std::string> user_file;
  std::size_t depth = 10;
  std::map<PropertyId, Outcome> expected;
  std::string citation;

  std::vector<std::string> files() const;
};

std::optional<Outcome> parse_outcome(std::string_view text);

/// Directory holding the bundled spec files and manifest.json.
std::string corpus_dir();

/// Relative file names resolve against the manifest's directory. Throws ModelError.
std::vector<CorpusEntry> load_manifest(const std::string& path);

/// The bundled manifest, loaded once.
const std::vector<CorpusEntry>& corpus_manifest();

/// Runs the optimized checker for `p` on the entry's models.
Verdict evaluate(const CorpusEntry& entry, PropertyId p, std::optional<std::size_t> depth = std::nullopt);

/// Same, through the brute-force oracle.
Verdict evaluate_oracle(const CorpusEntry& entry, PropertyId p, std::optional<std::size_t> depth = std::nullopt,
                        OracleOptions options = {});

}  // namespace erasure
