// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/template_engine.hpp"

#include "kgquest/text_util.hpp"

namespace kgquest {

std::string_view to_string(Provenance p) {
  return p == Provenance::RuleBuilt ? "rule_built" : "llm_refined";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "rule_built") return Provenance::RuleBuilt;
  if (s == "llm_refined") return Provenance::LlmRefined;
  throw std::invalid_argument("unknown provenance '" + std::string(s) + "'");
}

PrefixMap PrefixMap::defaults() {
  PrefixMap m;
  m.entries[EntityType::Person] = "Who is";
  return m;
}

std::string verbalize_relation(std::string_view relation, VerbalizeOptions opts) {
  auto slash = relation.rfind('/');
  if (slash != std::string_view::npos) relation.remove_prefix(slash + 1);
  // fragment identifiers (`...#author`) behave like a namespace separator
  auto hash = relation.rfind('#');
  if (hash != std::string_view::npos) relation.remove_prefix(hash + 1);
  auto dot = relation.rfind('.');
  if (dot != std::string_view::npos) relation.remove_prefix(dot + 1);

  std::string out = ascii_lower(relation);
  for (auto& c : out) {
    if (c == '_') c = ' ';
  }
  out = trim(out);
  if (opts.singularize && out.size() > 3 && out.back() == 's' && !out.ends_with("ss")) {
    out.pop_back();
  }
  return out.empty() ? ascii_lower(relation) : out;
}

std::string prefix_for_type(EntityType t, const PrefixMap& m) {
  auto it = m.entries.find(t);
  return it == m.entries.end() ? m.fallback : it->second;
}

Template build_template(const Cluster& c, const PrefixMap& m, VerbalizeOptions opts) {
  if (!c.dominant_type) {
    throw std::logic_error("cluster '" + c.relation + "' has no dominant type");
  }
  Template t;
  t.relation = c.relation;
  t.dominant_type = *c.dominant_type;
  t.prefix = prefix_for_type(t.dominant_type, m);
  t.text = t.prefix + " the " + verbalize_relation(c.relation, opts) + " of " +
           std::string(kSubjectPlaceholder) + "?";
  t.provenance = Provenance::RuleBuilt;
  return t;
}

std::size_t count_placeholders(std::string_view text) {
  std::size_t n = 0;
  for (auto pos = text.find(kSubjectPlaceholder); pos != std::string_view::npos;
       pos = text.find(kSubjectPlaceholder, pos + kSubjectPlaceholder.size())) {
    ++n;
  }
  return n;
}

bool is_well_formed_template(std::string_view text) {
  return count_placeholders(text) == 1 && !text.empty() && text.back() == '?';
}

std::string instantiate(std::string_view template_text, std::string_view subject) {
  if (subject.empty()) throw std::invalid_argument("cannot instantiate with an empty subject");
  auto pos = template_text.find(kSubjectPlaceholder);
  if (pos == std::string_view::npos) throw PlaceholderMissing(std::string(template_text));
  std::string out;
  out.reserve(template_text.size() + subject.size());
  out.append(template_text.substr(0, pos));
  out.append(subject);
  out.append(template_text.substr(pos + kSubjectPlaceholder.size()));
  return out;
}

std::string instantiate(const Template& t, std::string_view subject) {
  return instantiate(t.text, subject);
}

nlohmann::ordered_json to_json(const Template& t) {
  nlohmann::ordered_json j;
  j["relation"] = t.relation;
  j["text"] = t.text;
  j["prefix"] = t.prefix;
  j["dominant_type"] = to_string(t.dominant_type);
  j["provenance"] = to_string(t.provenance);
  return j;
}

Template template_from_json(const nlohmann::json& j) {
  Template t;
  t.relation = j.at("relation").get<std::string>();
  t.text = j.at("text").get<std::string>();
  t.prefix = j.value("prefix", std::string());
  t.dominant_type = parse_entity_type(j.value("dominant_type", std::string("Other")));
  t.provenance = parse_provenance(j.value("provenance", std::string("rule_built")));
  return t;
}

}  // namespace kgquest
