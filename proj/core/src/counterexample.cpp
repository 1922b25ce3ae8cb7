#include <charconv>
#include <sstream>

#include <json.hpp>

#include "erasure/spec_format.hpp"

namespace erasure {

namespace {

using Json = nlohmann::ordered_json;

std::string display_name(const std::string& property) {
  std::string out = property;
  for (char& c : out) {
    if (c == '-') c = ' ';
  }
  return out;
}

std::string depth_text(const Verdict& v) {
  return v.depth ? "depth=" + std::to_string(*v.depth) : std::string("exhaustive");
}

void render_text(std::ostringstream& out, const Verdict& v, const ValueDomain& d, const std::string& indent) {
  out << indent << display_name(v.property) << ": ";
  switch (v.outcome) {
    case Outcome::Pass: out << "PASS (" << depth_text(v) << ")\n"; break;
    case Outcome::Fail: out << "FAIL (" << depth_text(v) << ")\n"; break;
    case Outcome::Inconclusive: {
      out << "INCONCLUSIVE at depth " << (v.depth ? std::to_string(*v.depth) : std::string("?"))
          << ": open sessions at [";
      for (std::size_t k = 0; k < v.open_states.size(); ++k) out << (k ? ", " : "") << v.open_states[k];
      out << "]\n";
      break;
    }
  }
  for (std::size_t k = 0; k < v.witnesses.size(); ++k) {
    const Witness& w = v.witnesses[k];
    out << indent << "  witness " << (k + 1) << ": " << w.description << "\n";
    // states[0] is the start; states[j + 1] follows trace[j] when the path is complete.
    const bool annotated = w.states.size() == w.trace.size() + 1;
    if (annotated) out << indent << "    " << w.states[0] << "\n";
    for (std::size_t j = 0; j < w.trace.size(); ++j) {
      out << indent << "    --" << format_label(w.trace[j], w.kind, d) << "-->";
      if (annotated) out << " " << w.states[j + 1];
      out << "\n";
    }
    if (!annotated && !w.states.empty()) {
      out << indent << "    states:";
      for (const auto& s : w.states) out << " " << s;
      out << "\n";
    }
  }
  for (const auto& p : v.parts) render_text(out, p, d, indent + "  ");
}

std::string_view kind_key(LabelKind k) {
  switch (k) {
    case LabelKind::Send: return "send";
    case LabelKind::Receive: return "receive";
    case LabelKind::BeginErase: return "begin_erase";
    case LabelKind::EndErase: return "end_erase";
    case LabelKind::OtherOut: return "other_out";
    case LabelKind::MemRead: return "mem_read";
    case LabelKind::Sync: return "sync";
    case LabelKind::SyncBE: return "sync_be";
    case LabelKind::SyncEE: return "sync_ee";
  }
  return "?";
}

LabelKind kind_from_key(const std::string& s) {
  for (auto k : {LabelKind::Send, LabelKind::Receive, LabelKind::BeginErase, LabelKind::EndErase,
                 LabelKind::OtherOut, LabelKind::MemRead, LabelKind::Sync, LabelKind::SyncBE, LabelKind::SyncEE}) {
    if (kind_key(k) == s) return k;
  }
  throw ModelError("unknown label_kind " + s);
}

std::string_view model_key(ModelKind k) { return to_string(k); }

ModelKind model_from_key(const std::string& s) {
  for (auto k : {ModelKind::System, ModelKind::User, ModelKind::Composed}) {
    if (to_string(k) == s) return k;
  }
  throw ModelError("unknown model kind " + s);
}

/// Numeric domain tokens are written as numbers, symbols as strings.
Json value_json(Value v, const ValueDomain& d) {
  const std::string& name = d.name(v);
  long long n = 0;
  auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), n);
  if (ec == std::errc() && p == name.data() + name.size() && std::to_string(n) == name) return n;
  return name;
}

Value value_from_json(const Json& j, const ValueDomain& d) {
  const std::string token = j.is_string() ? j.get<std::string>() : std::to_string(j.get<long long>());
  const auto v = d.find(token);
  if (!v) throw ModelError("value " + token + " outside domain");
  return *v;
}

Json label_json(const Label& l, const ValueDomain& d) {
  Json j;
  j["label_kind"] = kind_key(l.kind);
  if (!l.channel.empty()) j["channel"] = l.channel;
  if (l.kind == LabelKind::MemRead) j["index"] = l.index;
  if (l.carries_value()) j["value"] = value_json(l.value, d);
  if (l.kind == LabelKind::Sync) {
    j["direction"] = l.direction == SyncDirection::UserToSystem ? "user_to_system" : "system_to_user";
  }
  return j;
}

Label label_from_json(const Json& j, const ValueDomain& d) {
  Label l;
  l.kind = kind_from_key(j.at("label_kind").get<std::string>());
  if (j.contains("channel")) l.channel = j["channel"].get<std::string>();
  if (j.contains("index")) l.index = j["index"].get<MemIndex>();
  if (j.contains("value")) l.value = value_from_json(j["value"], d);
  if (j.contains("direction")) {
    l.direction = j["direction"] == "user_to_system" ? SyncDirection::UserToSystem : SyncDirection::SystemToUser;
  }
  return l;
}

Json verdict_json(const Verdict& v, const ValueDomain& d) {
  Json j;
  j["property"] = v.property;
  j["verdict"] = std::string(to_string(v.outcome));
  if (v.depth) {
    j["depth"] = *v.depth;
  } else {
    j["depth"] = "exhaustive";
  }
  Json ws = Json::array();
  for (const auto& w : v.witnesses) {
    Json wj;
    wj["description"] = w.description;
    wj["model"] = model_key(w.kind);
    Json trace = Json::array();
    for (const auto& l : w.trace) trace.push_back(label_json(l, d));
    wj["trace"] = std::move(trace);
    wj["states"] = w.states;
    ws.push_back(std::move(wj));
  }
  j["witnesses"] = std::move(ws);
  if (!v.open_states.empty()) j["open_states"] = v.open_states;
  if (!v.parts.empty()) {
    Json parts = Json::array();
    for (const auto& p : v.parts) parts.push_back(verdict_json(p, d));
    j["parts"] = std::move(parts);
  }
  return j;
}

}  // namespace

std::string render_counterexample(const Verdict& v, const ValueDomain& domain, OutputFormat format) {
  if (format == OutputFormat::Json) return verdict_json(v, domain).dump(2) + "\n";
  std::ostringstream out;
  render_text(out, v, domain, "");
  return out.str();
}

std::vector<Witness> parse_counterexample_witnesses(std::string_view json, const ValueDomain& domain) {
  const Json j = Json::parse(json);
  std::vector<Witness> out;
  for (const auto& wj : j.at("witnesses")) {
    Witness w;
    w.description = wj.at("description").get<std::string>();
    w.kind = model_from_key(wj.at("model").get<std::string>());
    for (const auto& lj : wj.at("trace")) w.trace.push_back(label_from_json(lj, domain));
    w.states = wj.at("states").get<std::vector<std::string>>();
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace erasure
