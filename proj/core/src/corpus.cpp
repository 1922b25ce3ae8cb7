#include "erasure/corpus.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "erasure/spec_format.hpp"

#ifndef ERASURE_CORPUS_DIR
#define ERASURE_CORPUS_DIR "corpus"
#endif

namespace erasure {

namespace fs = std::filesystem;

std::vector<std::string> CorpusEntry::files() const {
  std::vector<std::string> out;
  if (system_file) out.push_back(*system_file);
  if (user_file) out.push_back(*user_file);
  return out;
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  for (auto o : {Outcome::Pass, Outcome::Fail, Outcome::Inconclusive}) {
    if (to_string(o) == text) return o;
  }
  return std::nullopt;
}

std::string corpus_dir() { return ERASURE_CORPUS_DIR; }

std::vector<CorpusEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(path + ": " + e.what());
  }
  const fs::path base = fs::absolute(fs::path(path)).parent_path();
  std::vector<CorpusEntry> out;
  for (const auto& e : doc.at("entries")) {
    CorpusEntry entry;
    entry.name = e.at("name").get<std::string>();
    if (e.contains("system")) entry.system_file = (base / e["system"].get<std::string>()).string();
    if (e.contains("user")) entry.user_file = (base / e["user"].get<std::string>()).string();
    entry.depth = e.value("depth", std::size_t{10});
    entry.citation = e.value("citation", std::string());
    for (const auto& [key, value] : e.at("expected").items()) {
      const auto p = parse_property_id(key);
      const auto o = parse_outcome(value.get<std::string>());
      if (!p || !o) throw ModelError(entry.name + ": bad expectation " + key);
      entry.expected[*p] = *o;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

const std::vector<CorpusEntry>& corpus_manifest() {
  static const std::vector<CorpusEntry> entries = load_manifest(corpus_dir() + "/manifest.json");
  return entries;
}

namespace {

template <class T>
T load_as(const std::optional<std::string>& file, const std::string& entry, const char* what) {
  if (!file) throw ModelError(entry + " has no " + what + " file");
  Model m = load_model_file(*file);
  if (!std::holds_alternative<T>(m)) throw ModelError(*file + " is not a " + what);
  return std::get<T>(std::move(m));
}

template <class Run>
Verdict dispatch(const CorpusEntry& entry, PropertyId p, const Run& run) {
  if (applies_to_pair(p)) {
    return run(load_as<UserSpec>(entry.user_file, entry.name, "user"),
               load_as<SystemSpec>(entry.system_file, entry.name, "system"));
  }
  // Properties defined for both kinds go to the system when there is one.
  if (applies_to_system(p) && (entry.system_file || !applies_to_user(p))) {
    return run(load_as<SystemSpec>(entry.system_file, entry.name, "system"));
  }
  return run(load_as<UserSpec>(entry.user_file, entry.name, "user"));
}

}  // namespace

Verdict evaluate(const CorpusEntry& entry, PropertyId p, std::optional<std::size_t> depth) {
  const std::size_t d = depth.value_or(entry.depth);
  return dispatch(entry, p, [&](const auto&... models) { return checker_verdict(p, models..., d); });
}

Verdict evaluate_oracle(const CorpusEntry& entry, PropertyId p, std::optional<std::size_t> depth,
                        OracleOptions options) {
  const std::size_t d = depth.value_or(entry.depth);
  return dispatch(entry, p, [&](const auto&... models) { return oracle_check(p, models..., d, options); });
}

}  // namespace erasure
