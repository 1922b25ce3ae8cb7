#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "erasure/lts.hpp"
#include "erasure/system.hpp"
#include "erasure/user.hpp"

namespace erasure {

enum class DocKind : std::uint8_t { System, User, Memory };
enum class Severity : std::uint8_t { Error, Warning };

std::string_view to_string(DocKind kind);

struct ParseDiagnostic {
  std::size_t line = 0;  // 1-based
  std::size_t column = 0;
  std::string message;
  Severity severity = Severity::Error;

  bool operator==(const ParseDiagnostic&) const = default;
};

std::string format_diagnostic(const ParseDiagnostic& d);

struct StateDecl {
  std::string name;
  bool initial = false;
  std::size_t line = 0;
};

struct ChannelDecl {
  std::string name;
  bool erase = false;
  std::size_t line = 0;
};

enum class ActionKind : std::uint8_t { Out, In, Read };

struct ActionDecl {
  ActionKind kind = ActionKind::Out;
  std::string channel;  // empty for reads
  MemIndex index = 0;   // reads only
  /// A value token, "BE", "EE", or "$VAR".
  std::string operand;
};

struct TransDecl {
  std::string source;
  std::string target;
  ActionDecl action;
  std::optional<std::string> forall;
  std::size_t line = 0;
  std::size_t target_column = 0;
  std::size_t source_column = 0;
  std::size_t operand_column = 0;
};

struct MemDecl {
  MemIndex index = 0;
  std::string value;
  std::size_t line = 0;
  std::size_t value_column = 0;
};

/// A document as written; templates are not yet expanded.
struct SpecDocument {
  DocKind kind = DocKind::System;
  std::string name;
  std::optional<std::vector<std::string>> domain;
  std::vector<ChannelDecl> channels;
  std::vector<StateDecl> states;
  std::vector<TransDecl> transitions;
  std::vector<MemDecl> memory;
};

struct ParseResult {
  std::optional<SpecDocument> document;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return document.has_value(); }
  bool has_warnings() const;
};

/// Parses and validates, including a trial expansion; `document` is set
/// only when there are no errors.
ParseResult parse_spec(std::string_view text);

using Model = std::variant<SystemSpec, UserSpec, Memory>;

class SpecError : public ModelError {
 public:
  explicit SpecError(std::vector<ParseDiagnostic> diagnostics);
  const std::vector<ParseDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<ParseDiagnostic> diagnostics_;
};

/// Expands `forall` templates over the domain. Throws SpecError.
Model expand(const SpecDocument& doc);

/// parse_spec followed by expand. Throws SpecError.
Model load_model(std::string_view text);
Model load_model_file(const std::string& path);

/// Template-free DSL text for a model; parsing it back yields an equal model.
std::string render_spec(const Model& model);

enum class OutputFormat : std::uint8_t { Text, Json };

/// Text: "<property>: PASS (depth=d)", "... FAIL" with one label per line,
/// or "... INCONCLUSIVE at depth d: open sessions at [..]". Json: a stable
/// document with sorted witnesses.
std::string render_counterexample(const Verdict& v, const ValueDomain& domain, OutputFormat format);

/// Reads back the witnesses of a rendered Json verdict.
std::vector<Witness> parse_counterexample_witnesses(std::string_view json, const ValueDomain& domain);

}  // namespace erasure
