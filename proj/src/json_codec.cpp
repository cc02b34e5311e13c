#include "nameguard/json_codec.hpp"

#include "nameguard/errors.hpp"

namespace nameguard {

namespace {

Error bad_field(const std::string& name, const std::string& expected) {
  return Error(ErrorKind::InvalidArgument, "invalid_field",
               "field '" + name + "' must be " + expected);
}

std::string string_field(const Json& j, const std::string& name) {
  auto it = j.find(name);
  if (it == j.end()) {
    throw Error(ErrorKind::InvalidArgument, "missing_field", "missing field '" + name + "'");
  }
  if (!it->is_string()) throw bad_field(name, "a string");
  return it->get<std::string>();
}

}  // namespace

void to_json(Json& j, const Reason& r) {
  j = Json{{"code", to_token(r.code)}, {"detail", r.detail}, {"severity", to_token(r.severity)}};
}

void to_json(Json& j, const Verdict& v) {
  j = Json{{"decision", to_token(v.decision())}, {"reasons", v.reasons()}};
}

void to_json(Json& j, const ScriptReport& s) {
  Json counts = Json::object();
  for (const auto& [script, n] : s.per_script_counts) counts[std::string(to_token(script))] = n;
  j = Json{{"dominant", to_token(s.dominant)}, {"mixed", s.mixed}, {"per_script_counts", counts}};
}

void to_json(Json& j, const UsernameRecord& r) {
  j = Json{{"id", r.id},
           {"raw", r.raw},
           {"normalized", r.normalized},
           {"skeleton", r.skeleton},
           {"script", r.script},
           {"created_at", to_iso8601(r.created_at)}};
}

void to_json(Json& j, const ContactEntry& c) {
  j = Json{{"kind", to_token(c.kind)}, {"value", c.value}, {"verified", c.verified}};
}

void to_json(Json& j, const Account& a) {
  j = Json{{"id", a.id},
           {"username_id", a.username_id},
           {"anonymity_class", to_token(a.anonymity_class())},
           {"anonymity_level", a.anonymity_level},
           {"contacts", a.contacts},
           {"registered_at", to_iso8601(a.registered_at)},
           {"status", to_token(a.status)}};
}

void to_json(Json& j, const BlacklistEntry& b) {
  j = Json{{"normalized_name", b.normalized_name},
           {"sanction_code", b.sanction_code},
           {"reason", b.reason},
           {"created_at", to_iso8601(b.created_at)}};
}

void to_json(Json& j, const Deviation& d) {
  j = Json{{"id", d.id},
           {"account_id", d.account_id},
           {"rule_code", to_token(d.rule_code)},
           {"sanction_code", d.sanction_code},
           {"note", d.note},
           {"created_at", to_iso8601(d.created_at)}};
}

void to_json(Json& j, const ProhibitedTerm& t) {
  j = Json{{"term", t.term}, {"category", t.category}, {"severity", to_token(t.severity)}};
}

void to_json(Json& j, const Flag& f) {
  j = Json{{"account_id", f.account_id},
           {"reasons", f.reasons},
           {"detected_at", to_iso8601(f.detected_at)},
           {"store_revision", f.store_revision},
           {"resolved", f.resolved}};
}

ContactEntry contact_from_json(const Json& j) {
  if (!j.is_object()) throw bad_field("contacts[]", "an object");
  ContactEntry c;
  auto kind = parse_contact_kind(string_field(j, "kind"));
  if (!kind) throw bad_field("kind", "\"email\" or \"other\"");
  c.kind = *kind;
  c.value = string_field(j, "value");
  if (auto it = j.find("verified"); it != j.end()) {
    if (!it->is_boolean()) throw bad_field("verified", "a boolean");
    c.verified = it->get<bool>();
  }
  return c;
}

namespace store {
void to_json(Json& j, const TermMatch& m) {
  j = Json{{"term", m.term}, {"offset", m.offset}, {"severity", to_token(m.severity)}};
}
}  // namespace store

namespace pipeline {

void to_json(Json& j, const ModerationReport& r) {
  Json counts = Json::object();
  for (const auto& [code, n] : r.counts) counts[std::string(to_token(code))] = n;
  Json groups = Json::array();
  for (const auto& [code, flags] : r.groups) {
    groups.push_back(Json{{"code", to_token(code)}, {"flags", flags}});
  }
  j = Json{{"generated_at", to_iso8601(r.generated_at)}, {"counts", counts}, {"groups", groups}};
}

RegistrationRequest request_from_json(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorKind::InvalidArgument, "invalid_body", "request body must be a JSON object");
  }
  RegistrationRequest req;
  req.username = string_field(j, "username");
  if (auto it = j.find("email"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw bad_field("email", "a string");
    req.email = it->get<std::string>();
  }
  if (auto it = j.find("contacts"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw bad_field("contacts", "an array");
    for (const Json& c : *it) req.extra_contacts.push_back(contact_from_json(c));
  }
  return req;
}

}  // namespace pipeline

namespace metrics {

Json to_json(const ClassificationReport& report, std::optional<double> efficiency) {
  Json counts = Json::object();
  Json percentages = Json::object();
  for (Category c : kAllCategories) {
    counts[std::string(to_token(c))] = report.counts.at(c);
    percentages[std::string(to_token(c))] = report.percentages.at(c);
  }
  Json j{{"total", report.total}, {"counts", counts}, {"percentages", percentages}};
  if (efficiency) j["efficiency"] = *efficiency;
  return j;
}

}  // namespace metrics

Json account_summary(const Account& account, const store::StoreState& snapshot) {
  Json j = account;
  if (const UsernameRecord* r = snapshot.record(account.username_id)) {
    j["username"] = r->raw;
    j["normalized"] = r->normalized;
  }
  return j;
}

Json dump_store(const store::StoreState& s) {
  Json prohibited = Json::array();
  for (const auto& [k, t] : s.prohibited()) prohibited.push_back(t);
  Json blacklist = Json::array();
  for (const auto& [k, b] : s.blacklist()) blacklist.push_back(b);
  Json registry = Json::array();
  for (const auto& [k, r] : s.registry()) registry.push_back(r);
  Json accounts = Json::array();
  for (const auto& [k, a] : s.accounts()) accounts.push_back(a);
  return Json{{"revision", s.revision()},
              {"prohibited", prohibited},
              {"blacklist", blacklist},
              {"registry", registry},
              {"accounts", accounts},
              {"deviations", s.deviations()}};
}

}  // namespace nameguard
