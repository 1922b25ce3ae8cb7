#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "erasure/composite.hpp"
#include "erasure/composition.hpp"

namespace erasure::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Exit {
  int code;
};

struct Models {
  std::optional<SystemSpec> system;
  std::optional<UserSpec> user;

  const ValueDomain& domain() const { return system ? system->lts.domain() : user->lts.domain(); }
};

void load_into(Models& models, const std::string& path, std::ostream& err) {
  Model m;
  try {
    m = load_model_file(path);
  } catch (const SpecError& e) {
    for (const auto& d : e.diagnostics()) err << path << ":" << format_diagnostic(d) << "\n";
    throw Exit{kExitError};
  } catch (const ModelError& e) {
    err << path << ": " << e.what() << "\n";
    throw Exit{kExitError};
  }
  if (auto* s = std::get_if<SystemSpec>(&m)) {
    if (models.system) {
      err << path << ": a second system was given\n";
      throw Exit{kExitError};
    }
    models.system = std::move(*s);
  } else if (auto* u = std::get_if<UserSpec>(&m)) {
    if (models.user) {
      err << path << ": a second user was given\n";
      throw Exit{kExitError};
    }
    models.user = std::move(*u);
  } else {
    err << path << ": memory files are not accepted here\n";
    throw Exit{kExitError};
  }
}

/// Loads `files` and checks them against the expected kinds, in order.
Models load_expected(const RunConfig& c, std::initializer_list<DocKind> kinds, std::ostream& err) {
  if (c.files.size() != kinds.size()) {
    err << c.subcommand << ": expected " << kinds.size() << " file(s), got " << c.files.size() << "\n";
    throw Exit{kExitError};
  }
  Models models;
  auto kind = kinds.begin();
  for (const auto& f : c.files) {
    const bool had_system = models.system.has_value();
    load_into(models, f, err);
    const bool got_system = models.system.has_value() && !had_system;
    const DocKind got = got_system ? DocKind::System : DocKind::User;
    if (got != *kind) {
      err << f << ": expected a " << to_string(*kind) << " specification, got a " << to_string(got) << "\n";
      throw Exit{kExitError};
    }
    ++kind;
  }
  return models;
}

Json verdict_json(const Verdict& v, const ValueDomain& d) {
  return Json::parse(render_counterexample(v, d, OutputFormat::Json));
}

void emit(const RunConfig& c, const std::vector<Verdict>& verdicts, const ValueDomain& d, std::ostream& out,
          const std::optional<bool>& consistent = std::nullopt) {
  if (c.format == OutputFormat::Text) {
    for (const auto& v : verdicts) out << render_counterexample(v, d, OutputFormat::Text);
    if (consistent) out << "consistent: " << (*consistent ? "true" : "false") << "\n";
    return;
  }
  Json doc;
  doc["command"] = c.subcommand;
  doc["files"] = c.files;
  doc["depth"] = c.depth;
  Json vs = Json::array();
  for (const auto& v : verdicts) vs.push_back(verdict_json(v, d));
  doc["verdicts"] = std::move(vs);
  if (consistent) doc["consistent"] = *consistent;
  out << doc.dump(2) << "\n";
}

int check_system(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Models m = load_expected(c, {DocKind::System}, err);
  const std::vector<Verdict> vs{check_system_spec(*m.system), check_system_well_formed(*m.system),
                                check_input_erasure(*m.system, c.depth)};
  emit(c, vs, m.domain(), out);
  return exit_code(vs);
}

int check_user(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Models m = load_expected(c, {DocKind::User}, err);
  const std::vector<Verdict> vs{check_user_spec(*m.user), check_erasure_friendly(*m.user, c.depth)};
  emit(c, vs, m.domain(), out);
  return exit_code(vs);
}

int check_liveness_cmd(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Models m = load_expected(c, {DocKind::User, DocKind::System}, err);
  const std::vector<Verdict> vs{check_liveness(*m.user, *m.system, c.depth)};
  emit(c, vs, m.domain(), out);
  return exit_code(vs);
}

int compose_cmd(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Models m = load_expected(c, {DocKind::User, DocKind::System}, err);
  const ComposedLts composed = compose(*m.user, *m.system, c.depth);
  const std::size_t states = composed.lts.state_count();
  const std::size_t transitions = composed.lts.transitions().size();
  if (c.dot_path) {
    std::ofstream dot(*c.dot_path);
    if (!dot) {
      err << *c.dot_path << ": cannot write\n";
      return kExitError;
    }
    dot << to_dot(composed);
  }
  if (c.format == OutputFormat::Text) {
    out << "composed: " << states << " states, " << transitions << " transitions (depth=" << c.depth << ")\n";
  } else {
    Json doc;
    doc["command"] = c.subcommand;
    doc["files"] = c.files;
    doc["depth"] = c.depth;
    doc["states"] = states;
    doc["transitions"] = transitions;
    out << doc.dump(2) << "\n";
  }
  return kExitPass;
}

int check_composite_cmd(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Models m = load_expected(c, {DocKind::User, DocKind::System}, err);
  const std::vector<Verdict> vs{check_composite_erasure(*m.user, *m.system, c.depth)};
  emit(c, vs, m.domain(), out);
  return exit_code(vs);
}

int theorem_cmd(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Models m = load_expected(c, {DocKind::User, DocKind::System}, err);
  const TheoremReport r = validate_soundness_theorem(*m.user, *m.system, c.depth);
  const std::vector<Verdict> vs{r.input_erasure, r.erasure_friendly, r.liveness, r.composite_erasure};
  emit(c, vs, m.domain(), out, r.consistent);
  return exit_code(vs);
}

int oracle_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto p = c.property ? parse_property_id(*c.property) : std::nullopt;
  if (!p) {
    err << "oracle-compare: unknown property " << c.property.value_or("") << "\n";
    return kExitError;
  }
  if (c.files.empty() || c.files.size() > 2) {
    err << "oracle-compare: expected one or two files\n";
    return kExitError;
  }
  Models m;
  for (const auto& f : c.files) load_into(m, f, err);
  const OracleOptions options{c.budget};
  Verdict checker, oracle;
  try {
    if (applies_to_pair(*p)) {
      if (!m.user || !m.system) {
        err << "oracle-compare: " << to_string(*p) << " needs a user and a system\n";
        return kExitError;
      }
      checker = checker_verdict(*p, *m.user, *m.system, c.depth);
      oracle = oracle_check(*p, *m.user, *m.system, c.depth, options);
    } else if (c.files.size() == 1 && m.system && applies_to_system(*p)) {
      checker = checker_verdict(*p, *m.system, c.depth);
      oracle = oracle_check(*p, *m.system, c.depth, options);
    } else if (c.files.size() == 1 && m.user && applies_to_user(*p)) {
      checker = checker_verdict(*p, *m.user, c.depth);
      oracle = oracle_check(*p, *m.user, c.depth, options);
    } else {
      err << "oracle-compare: " << to_string(*p) << " does not apply to the given file(s)\n";
      return kExitError;
    }
  } catch (const ModelError& e) {
    err << "oracle-compare: " << e.what() << "\n";
    return kExitError;
  }
  const bool agree = checker.outcome == oracle.outcome;
  if (c.format == OutputFormat::Text) {
    out << to_string(*p) << ": checker " << to_string(checker.outcome) << ", oracle " << to_string(oracle.outcome)
        << (agree ? " (agree)" : " (DISAGREE)") << " at depth " << c.depth << "\n";
  } else {
    Json doc;
    doc["command"] = c.subcommand;
    doc["property"] = std::string(to_string(*p));
    doc["files"] = c.files;
    doc["depth"] = c.depth;
    doc["checker"] = verdict_json(checker, m.domain());
    doc["oracle"] = verdict_json(oracle, m.domain());
    doc["agree"] = agree;
    out << doc.dump(2) << "\n";
  }
  return agree ? kExitPass : kExitFail;
}

}  // namespace

int exit_code(const std::vector<Verdict>& verdicts) {
  Outcome all = Outcome::Pass;
  for (const auto& v : verdicts) all = combine(all, v.outcome);
  switch (all) {
    case Outcome::Pass: return kExitPass;
    case Outcome::Fail: return kExitFail;
    case Outcome::Inconclusive: return kExitInconclusive;
  }
  return kExitError;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.depth < 1 || c.budget < 1) {
    err << "depth and budget must be at least 1\n";
    return kExitError;
  }
  try {
    if (c.subcommand == "check-system") return check_system(c, out, err);
    if (c.subcommand == "check-user") return check_user(c, out, err);
    if (c.subcommand == "check-liveness") return check_liveness_cmd(c, out, err);
    if (c.subcommand == "compose") return compose_cmd(c, out, err);
    if (c.subcommand == "check-composite") return check_composite_cmd(c, out, err);
    if (c.subcommand == "theorem") return theorem_cmd(c, out, err);
    if (c.subcommand == "oracle-compare") return oracle_compare(c, out, err);
    err << "unknown subcommand " << c.subcommand << "\n";
    return kExitError;
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checks information-erasure properties of finite labelled transition systems.", "erasure-check"};
  app.require_subcommand(1);
  RunConfig c;
  std::string format = "text";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--depth", c.depth, "Bound on trace length")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  };
  auto add = [&](const std::string& name, const std::string& help, const std::string& files_help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("files", c.files, files_help)->required();
    common(sub);
    return sub;
  };
  add("check-system", "Well-formedness and input erasure of a system", "SYSTEM");
  add("check-user", "Erasure friendliness of a user, with its four parts", "USER");
  add("check-liveness", "Liveness of a user against a system", "USER SYSTEM");
  CLI::App* compose = add("compose", "Compose a user with a system", "USER SYSTEM");
  compose->add_option("--emit-dot", c.dot_path, "Write the composed graph in DOT format");
  add("check-composite", "Composite erasure of a user and a system", "USER SYSTEM");
  add("theorem", "Premises and conclusion of the soundness theorem", "USER SYSTEM");
  CLI::App* oracle = app.add_subcommand("oracle-compare", "Compare a checker with the brute-force oracle");
  oracle->add_option("property", c.property, "Property name")->required();
  oracle->add_option("files", c.files, "SYSTEM, USER, or USER SYSTEM")->required();
  oracle->add_option("--budget", c.budget, "Oracle enumeration budget")->capture_default_str()->check(
      CLI::PositiveNumber);
  common(oracle);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitError;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  c.format = format == "json" ? OutputFormat::Json : OutputFormat::Text;
  return run(c, out, err);
}

}  // namespace erasure::cli
