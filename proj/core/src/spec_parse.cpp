#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "erasure/spec_format.hpp"

namespace erasure {

std::string_view to_string(DocKind kind) {
  switch (kind) {
    case DocKind::System: return "system";
    case DocKind::User: return "user";
    case DocKind::Memory: return "memory";
  }
  return "?";
}

std::string format_diagnostic(const ParseDiagnostic& d) {
  return std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
         (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
}

bool ParseResult::has_warnings() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const ParseDiagnostic& d) { return d.severity == Severity::Warning; });
}

namespace {

std::string join_messages(const std::vector<ParseDiagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (d.severity != Severity::Error) continue;
    if (!out.empty()) out += "\n";
    out += format_diagnostic(d);
  }
  return out;
}

}  // namespace

SpecError::SpecError(std::vector<ParseDiagnostic> diagnostics)
    : ModelError(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

struct Token {
  std::string text;
  std::size_t column = 0;  // 1-based
};

bool is_separator(char c) { return c == '{' || c == '}' || c == ',' || c == ':' || c == '='; }

/// Splits one statement; `offset` is the column of its first character.
std::vector<Token> tokenize(std::string_view s, std::size_t offset) {
  std::vector<Token> out;
  std::size_t k = 0;
  while (k < s.size()) {
    const char c = s[k];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++k;
    } else if (is_separator(c)) {
      out.push_back({std::string(1, c), offset + k});
      ++k;
    } else if (c == '-' && k + 1 < s.size() && s[k + 1] == '>') {
      out.push_back({"->", offset + k});
      k += 2;
    } else {
      const std::size_t start = k;
      while (k < s.size() && s[k] != ' ' && s[k] != '\t' && s[k] != '\r' && !is_separator(s[k]) &&
             !(s[k] == '-' && k + 1 < s.size() && s[k + 1] == '>')) {
        ++k;
      }
      out.push_back({std::string(s.substr(start, k - start)), offset + start});
    }
  }
  return out;
}

bool is_name(std::string_view s) {
  if (s.empty() || s == "->") return false;
  return std::none_of(s.begin(), s.end(), [](char c) { return is_separator(c) || c == '#' || c == ';'; });
}

std::optional<MemIndex> parse_index(std::string_view s) {
  MemIndex v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

class Parser {
 public:
  ParseResult run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool any = false;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      std::size_t stmt_start = 0;
      for (;;) {
        const auto semi = line.find(';', stmt_start);
        const auto stmt = line.substr(stmt_start, semi == std::string_view::npos ? std::string_view::npos
                                                                                   : semi - stmt_start);
        auto tokens = tokenize(stmt, stmt_start + 1);
        if (!tokens.empty()) {
          statement(line_no, tokens, any);
          any = true;
        }
        if (semi == std::string_view::npos) break;
        stmt_start = semi + 1;
      }
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    if (!any) error(1, 1, "missing header");
    if (!has_errors()) validate();
    ParseResult result;
    if (!has_errors()) {
      std::vector<ParseDiagnostic> expansion;
      Expansion::run(doc_, expansion);
      diags_.insert(diags_.end(), expansion.begin(), expansion.end());
    }
    std::stable_sort(diags_.begin(), diags_.end(), [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
      return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
    if (!has_errors()) result.document = std::move(doc_);
    result.diagnostics = std::move(diags_);
    return result;
  }

  /// Template expansion, shared by parse_spec (trial run) and expand.
  struct Expansion {
    static std::optional<Model> run(const SpecDocument& doc, std::vector<ParseDiagnostic>& diags);
  };

 private:
  void error(std::size_t line, std::size_t col, std::string msg) {
    diags_.push_back({line, col, std::move(msg), Severity::Error});
  }
  bool has_errors() const {
    return std::any_of(diags_.begin(), diags_.end(),
                       [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
  }

  void statement(std::size_t line, const std::vector<Token>& t, bool after_header) {
    if (!after_header) {
      if (t[0].text != "system" && t[0].text != "user" && t[0].text != "memory") {
        error(line, t[0].column, "missing header");
        return;
      }
      if (t.size() != 2 || !is_name(t[1].text)) {
        error(line, t[0].column, "syntax error: expected '" + t[0].text + " NAME'");
        return;
      }
      doc_.kind = t[0].text == "system" ? DocKind::System : t[0].text == "user" ? DocKind::User : DocKind::Memory;
      doc_.name = t[1].text;
      header_seen_ = true;
      return;
    }
    if (!header_seen_) return;  // the missing header was already reported
    const std::string& kw = t[0].text;
    if (kw == "domain") return domain(line, t);
    if (kw == "channel") return channel(line, t);
    if (kw == "state") return state(line, t);
    if (kw == "trans") return trans(line, t);
    if (kw == "mem") return mem(line, t);
    if (kw == "system" || kw == "user" || kw == "memory") return error(line, t[0].column, "syntax error: second header");
    error(line, t[0].column, "syntax error: unknown keyword '" + kw + "'");
  }

  void domain(std::size_t line, const std::vector<Token>& t) {
    if (doc_.domain) return error(line, t[0].column, "syntax error: domain declared twice");
    if (t.size() < 4 || t[1].text != "{" || t.back().text != "}") {
      return error(line, t[0].column, "syntax error: expected 'domain { value, ... }'");
    }
    std::vector<std::string> values;
    for (std::size_t k = 2; k + 1 < t.size(); ++k) {
      const bool want_value = (k % 2 == 0);
      if (want_value) {
        if (!is_name(t[k].text) || t[k].text.starts_with("$")) {
          return error(line, t[k].column, "syntax error: expected a value");
        }
        if (t[k].text == "BE" || t[k].text == "EE") {
          return error(line, t[k].column, "'" + t[k].text + "' is reserved and cannot be a value");
        }
        if (std::find(values.begin(), values.end(), t[k].text) != values.end()) {
          return error(line, t[k].column, "duplicate value " + t[k].text);
        }
        values.push_back(t[k].text);
      } else if (t[k].text != ",") {
        return error(line, t[k].column, "syntax error: expected ','");
      }
    }
    if (t.size() % 2 != 0) return error(line, t.back().column, "syntax error: expected a value before '}'");
    doc_.domain = std::move(values);
  }

  void channel(std::size_t line, const std::vector<Token>& t) {
    if (t.size() != 3 || !is_name(t[1].text) || (t[2].text != "erase" && t[2].text != "other")) {
      return error(line, t[0].column, "syntax error: expected 'channel NAME erase|other'");
    }
    doc_.channels.push_back({t[1].text, t[2].text == "erase", line});
  }

  void state(std::size_t line, const std::vector<Token>& t) {
    if (t.size() < 2 || t.size() > 3 || !is_name(t[1].text) || (t.size() == 3 && t[2].text != "initial")) {
      return error(line, t[0].column, "syntax error: expected 'state NAME [initial]'");
    }
    if (t[1].text.find('$') != std::string::npos) {
      return error(line, t[1].column, "state declarations cannot be templates");
    }
    doc_.states.push_back({t[1].text, t.size() == 3, line});
    state_columns_[doc_.states.size() - 1] = t[1].column;
  }

  void trans(std::size_t line, const std::vector<Token>& t) {
    // trans SRC -> TGT : action... [forall VAR]
    if (t.size() < 6 || !is_name(t[1].text) || t[2].text != "->" || !is_name(t[3].text) || t[4].text != ":") {
      return error(line, t[0].column, "syntax error: expected 'trans SRC -> TARGET : action'");
    }
    TransDecl d;
    d.source = t[1].text;
    d.source_column = t[1].column;
    d.target = t[3].text;
    d.target_column = t[3].column;
    d.line = line;
    std::size_t end = t.size();
    if (end >= 8 && t[end - 2].text == "forall") {
      if (!is_name(t[end - 1].text) || t[end - 1].text.starts_with("$")) {
        return error(line, t[end - 1].column, "syntax error: expected a variable name after 'forall'");
      }
      d.forall = t[end - 1].text;
      if (!doc_.domain) error(line, t[end - 2].column, "forall without domain");
      end -= 2;
    }
    const std::vector<Token> a(t.begin() + 5, t.begin() + static_cast<std::ptrdiff_t>(end));
    const std::string& verb = a[0].text;
    if ((verb == "out" || verb == "in") && a.size() == 3 && is_name(a[1].text) && is_name(a[2].text)) {
      d.action = {verb == "out" ? ActionKind::Out : ActionKind::In, a[1].text, 0, a[2].text};
      d.operand_column = a[2].column;
    } else if (verb == "read" && a.size() == 5 && a[1].text == "i" && a[2].text == "=" && is_name(a[4].text)) {
      const auto idx = parse_index(a[3].text);
      if (!idx) return error(line, a[3].column, "syntax error: expected a memory index");
      d.action = {ActionKind::Read, "", *idx, a[4].text};
      d.operand_column = a[4].column;
    } else {
      return error(line, a[0].column, "syntax error: expected 'out|in CH OPERAND' or 'read i=N OPERAND'");
    }
    doc_.transitions.push_back(std::move(d));
  }

  void mem(std::size_t line, const std::vector<Token>& t) {
    if (t.size() != 4 || t[2].text != "=" || !is_name(t[3].text)) {
      return error(line, t[0].column, "syntax error: expected 'mem INT = value'");
    }
    const auto idx = parse_index(t[1].text);
    if (!idx) return error(line, t[1].column, "syntax error: expected a memory index");
    doc_.memory.push_back({*idx, t[3].text, line, t[3].column});
  }

  void validate() {
    const auto& d = doc_;
    const bool memory_doc = d.kind == DocKind::Memory;
    if (!d.domain) error(1, 1, "missing domain declaration");
    if (memory_doc) {
      for (const auto& s : d.states) error(s.line, 1, "memory documents declare only domain and mem entries");
      for (const auto& t : d.transitions) error(t.line, 1, "memory documents declare only domain and mem entries");
      for (const auto& c : d.channels) error(c.line, 1, "memory documents declare only domain and mem entries");
      std::set<MemIndex> seen;
      for (const auto& m : d.memory) {
        if (!seen.insert(m.index).second) error(m.line, 1, "duplicate memory index " + std::to_string(m.index));
        check_value(m.value, m.line, m.value_column, std::nullopt);
      }
      return;
    }
    for (const auto& m : d.memory) error(m.line, 1, "mem entries belong in memory documents");

    std::set<std::string> channels;
    std::size_t erase_channels = 0;
    for (const auto& c : d.channels) {
      if (!channels.insert(c.name).second) error(c.line, 1, "duplicate channel " + c.name);
      if (c.erase) ++erase_channels;
    }
    if (erase_channels > 1) error(d.channels.back().line, 1, "more than one erase channel");
    if (d.kind == DocKind::User) {
      for (const auto& c : d.channels) {
        if (!c.erase) error(c.line, 1, "users communicate only on the erase channel");
      }
    }

    std::set<std::string> declared;
    std::size_t initials = 0;
    for (std::size_t k = 0; k < d.states.size(); ++k) {
      const auto& s = d.states[k];
      if (!declared.insert(s.name).second) error(s.line, state_columns_[k], "duplicate state " + s.name);
      if (s.initial) ++initials;
    }
    if (initials == 0) error(1, 1, "no initial state");
    if (initials > 1) error(1, 1, "more than one initial state");

    // Names produced by templates are declared implicitly.
    std::set<std::string> known = declared;
    for (const auto& t : d.transitions) {
      if (!t.forall || !d.domain) continue;
      for (const auto& v : *d.domain) {
        for (const auto* name : {&t.source, &t.target}) {
          if (name->find('$') != std::string::npos) known.insert(substitute(*name, *t.forall, v));
        }
      }
    }
    for (const auto& t : d.transitions) {
      check_name(t.source, t, t.source_column, known);
      check_name(t.target, t, t.target_column, known);
      const auto& op = t.action.operand;
      if (op == "BE" || op == "EE") {
        if (t.action.kind == ActionKind::Read) error(t.line, t.operand_column, "reads cannot carry " + op);
      } else {
        check_value(op, t.line, t.operand_column, t.forall);
      }
      if (t.action.kind != ActionKind::Read && d.kind == DocKind::System &&
          !channels.contains(t.action.channel) && t.action.channel != erase_channel()) {
        error(t.line, 1, "unknown channel " + t.action.channel);
      }
    }
  }

  std::string erase_channel() const {
    for (const auto& c : doc_.channels) {
      if (c.erase) return c.name;
    }
    return "a";
  }

  void check_name(const std::string& name, const TransDecl& t, std::size_t col, const std::set<std::string>& known) {
    if (name.find('$') != std::string::npos) {
      if (!t.forall) return error(t.line, col, "template name " + name + " without forall");
      const auto var = "$" + *t.forall;
      for (std::size_t p = name.find('$'); p != std::string::npos; p = name.find('$', p + 1)) {
        if (name.compare(p, var.size(), var) != 0) return error(t.line, col, "unbound variable in " + name);
      }
      return;
    }
    if (!known.contains(name)) error(t.line, col, "unknown state " + name);
  }

  void check_value(const std::string& v, std::size_t line, std::size_t col, const std::optional<std::string>& var) {
    if (v.starts_with("$")) {
      if (!var || v != "$" + *var) error(line, col, "unbound variable " + v);
      return;
    }
    if (doc_.domain && std::find(doc_.domain->begin(), doc_.domain->end(), v) == doc_.domain->end()) {
      error(line, col, "value " + v + " outside domain");
    }
  }

 public:
  static std::string substitute(const std::string& s, const std::string& var, const std::string& value) {
    std::string out;
    const std::string pat = "$" + var;
    for (std::size_t k = 0; k < s.size();) {
      if (s.compare(k, pat.size(), pat) == 0) {
        out += value;
        k += pat.size();
      } else {
        out += s[k++];
      }
    }
    return out;
  }

 private:
  SpecDocument doc_;
  std::vector<ParseDiagnostic> diags_;
  std::map<std::size_t, std::size_t> state_columns_;
  bool header_seen_ = false;
};

std::optional<Model> Parser::Expansion::run(const SpecDocument& doc, std::vector<ParseDiagnostic>& diags) {
  auto err = [&](std::size_t line, std::size_t col, std::string msg) {
    diags.push_back({line, col, std::move(msg), Severity::Error});
  };
  if (!doc.domain) {
    err(1, 1, "missing domain declaration");
    return std::nullopt;
  }
  const ValueDomain domain(*doc.domain);
  if (doc.kind == DocKind::Memory) {
    Memory m{doc.name, domain, {}};
    for (const auto& e : doc.memory) {
      const auto v = domain.find(e.value);
      if (!v) {
        err(e.line, e.value_column, "value " + e.value + " outside domain");
        continue;
      }
      m.values[e.index] = *v;
    }
    if (!diags.empty()) return std::nullopt;
    return Model{std::move(m)};
  }

  std::string erase = "a";
  std::set<std::string> others;
  for (const auto& c : doc.channels) {
    if (c.erase) erase = c.name;
  }
  for (const auto& c : doc.channels) {
    if (!c.erase && c.name != erase) others.insert(c.name);
  }
  const bool is_system = doc.kind == DocKind::System;

  std::vector<std::string> declared;
  std::set<std::string> declared_set;
  std::map<std::string, std::size_t> decl_line;
  std::string initial;
  for (const auto& s : doc.states) {
    if (declared_set.insert(s.name).second) {
      declared.push_back(s.name);
      decl_line[s.name] = s.line;
    }
    if (s.initial) initial = s.name;
  }
  std::vector<Lts::NamedTransition> edges;
  for (const auto& t : doc.transitions) {
    std::vector<std::optional<std::string>> values;
    if (t.forall) {
      for (const auto& v : *doc.domain) values.emplace_back(v);
    } else {
      values.emplace_back(std::nullopt);
    }
    std::map<std::pair<std::string, Label>, std::string> produced;
    for (const auto& v : values) {
      auto sub = [&](const std::string& s) { return v ? Parser::substitute(s, *t.forall, *v) : s; };
      const std::string src = sub(t.source);
      const std::string dst = sub(t.target);
      for (const auto* n : {&src, &dst}) {
        if (declared_set.insert(*n).second) {
          declared.push_back(*n);
          decl_line[*n] = t.line;
        }
      }
      const std::string op = sub(t.action.operand);
      const std::string& ch = t.action.channel;
      Label label;
      if (t.action.kind == ActionKind::Read) {
        if (is_system) {
          err(t.line, 1, "systems cannot read memory");
          continue;
        }
        label = Label::mem_read(t.action.index, *domain.find(op));
      } else if (op == "BE" || op == "EE") {
        const bool out = t.action.kind == ActionKind::Out;
        if (ch != erase) {
          err(t.line, t.operand_column, op + " is only exchanged on the erase channel");
          continue;
        }
        if (out != is_system) {
          err(t.line, t.operand_column,
              std::string(is_system ? "systems emit " : "users receive ") + op + " (use '" +
                  (is_system ? "out" : "in") + "')");
          continue;
        }
        label = op == "BE" ? Label::begin_erase(ch) : Label::end_erase(ch);
      } else {
        const Value val = *domain.find(op);
        if (ch == erase) {
          label = t.action.kind == ActionKind::Out ? Label::send(ch, val) : Label::receive(ch, val);
        } else if (is_system && others.contains(ch) && t.action.kind == ActionKind::Out) {
          label = Label::other_out(ch, val);
        } else {
          err(t.line, 1,
              is_system ? "inputs arrive only on the erase channel " + erase
                        : "users communicate only on the erase channel " + erase);
          continue;
        }
      }
      auto [it, fresh] = produced.try_emplace({src, label}, dst);
      if (!fresh && it->second != dst) {
        err(t.line, t.target_column, "template expands to conflicting targets " + it->second + " and " + dst +
                                         " from " + src);
      }
      edges.emplace_back(src, label, dst);
    }
  }
  if (!diags.empty()) return std::nullopt;
  Lts lts(is_system ? ModelKind::System : ModelKind::User, domain, declared, initial, std::move(edges));
  const Verdict valid = validate_lts(lts);
  if (!valid.passed()) {
    err(1, 1, valid.witnesses.empty() ? "invalid model" : valid.witnesses.front().description);
    return std::nullopt;
  }
  const auto dist = distances_from(lts, lts.initial());
  for (StateId s = 0; s < lts.state_count(); ++s) {
    if (!dist[s]) {
      diags.push_back({decl_line[lts.state_name(s)], 1, "state " + lts.state_name(s) + " is unreachable",
                       Severity::Warning});
    }
  }
  if (is_system) return Model{SystemSpec{doc.name, std::move(lts), erase, others}};
  return Model{UserSpec{doc.name, std::move(lts), erase}};
}

}  // namespace

ParseResult parse_spec(std::string_view text) { return Parser().run(text); }

Model expand(const SpecDocument& doc) {
  std::vector<ParseDiagnostic> diags;
  auto m = Parser::Expansion::run(doc, diags);
  if (!m) throw SpecError(std::move(diags));
  return std::move(*m);
}

Model load_model(std::string_view text) {
  auto r = parse_spec(text);
  if (!r.ok()) throw SpecError(std::move(r.diagnostics));
  return expand(*r.document);
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

namespace {

void render_domain(std::ostringstream& out, const Lts& m) {
  const auto& names = m.domain().names();
  out << "domain { ";
  for (std::size_t k = 0; k < names.size(); ++k) out << (k ? ", " : "") << names[k];
  out << " }\n";
}

void render_states(std::ostringstream& out, const Lts& m) {
  for (StateId s = 0; s < m.state_count(); ++s) {
    out << "state " << m.state_name(s) << (s == m.initial() ? " initial" : "") << "\n";
  }
}

std::string action_text(const Label& l, bool system, const ValueDomain& d) {
  switch (l.kind) {
    case LabelKind::Send: return "out " + l.channel + " " + d.names().at(l.value);
    case LabelKind::Receive: return "in " + l.channel + " " + d.names().at(l.value);
    case LabelKind::BeginErase: return std::string(system ? "out " : "in ") + l.channel + " BE";
    case LabelKind::EndErase: return std::string(system ? "out " : "in ") + l.channel + " EE";
    case LabelKind::OtherOut: return "out " + l.channel + " " + d.names().at(l.value);
    case LabelKind::MemRead: return "read i=" + std::to_string(l.index) + " " + d.names().at(l.value);
    default: throw ModelError("composed labels have no textual form");
  }
}

void render_transitions(std::ostringstream& out, const Lts& m) {
  const bool system = m.kind() == ModelKind::System;
  for (const auto& t : m.transitions()) {
    out << "trans " << m.state_name(t.source) << " -> " << m.state_name(t.target) << " : "
        << action_text(t.label, system, m.domain()) << "\n";
  }
}

}  // namespace

std::string render_spec(const Model& model) {
  std::ostringstream out;
  if (const auto* s = std::get_if<SystemSpec>(&model)) {
    out << "system " << s->name << "\n";
    render_domain(out, s->lts);
    out << "channel " << s->erase_channel << " erase\n";
    for (const auto& c : s->other_channels) out << "channel " << c << " other\n";
    render_states(out, s->lts);
    render_transitions(out, s->lts);
  } else if (const auto* u = std::get_if<UserSpec>(&model)) {
    out << "user " << u->name << "\n";
    render_domain(out, u->lts);
    out << "channel " << u->erase_channel << " erase\n";
    render_states(out, u->lts);
    render_transitions(out, u->lts);
  } else {
    const auto& m = std::get<Memory>(model);
    out << "memory " << m.name << "\n";
    const auto& names = m.domain.names();
    out << "domain { ";
    for (std::size_t k = 0; k < names.size(); ++k) out << (k ? ", " : "") << names[k];
    out << " }\n";
    for (const auto& [i, v] : m.values) out << "mem " << i << " = " << names.at(v) << "\n";
  }
  return out.str();
}

}  // namespace erasure
