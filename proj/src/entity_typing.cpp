// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/entity_typing.hpp"

#include <fstream>
#include <stdexcept>

#include "kgquest/clustering.hpp"
#include "kgquest/text_util.hpp"

namespace kgquest {

std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::Person: return "Person";
    case EntityType::Location: return "Location";
    case EntityType::Organization: return "Organization";
    case EntityType::Date: return "Date";
    case EntityType::Number: return "Number";
    case EntityType::Work: return "Work";
    case EntityType::Other: return "Other";
  }
  return "Other";
}

EntityType parse_entity_type(std::string_view name) {
  auto n = ascii_lower(trim_view(name));
  for (auto t : kAllEntityTypes) {
    if (ascii_lower(to_string(t)) == n) return t;
  }
  throw std::invalid_argument("unknown entity type '" + std::string(name) + "'");
}

namespace {

std::string join_tokens(std::string_view s) {
  std::string out;
  for (auto tok : word_tokens(s)) {
    if (!out.empty()) out += ' ';
    out.append(s.substr(tok.begin, tok.end - tok.begin));
  }
  return out;
}

bool starts_upper(std::string_view w) {
  auto c0 = static_cast<unsigned char>(w[0]);
  if (c0 >= 'A' && c0 <= 'Z') return true;
  // Latin-1 supplement capitals (U+00C0..U+00DE minus U+00D7)
  if (c0 == 0xC3 && w.size() > 1) {
    auto c1 = static_cast<unsigned char>(w[1]);
    return c1 >= 0x80 && c1 <= 0x9E && c1 != 0x97;
  }
  return false;
}

bool looks_like_person_name(std::string_view s) {
  auto words = split(s, ' ');
  if (words.size() < 2 || words.size() > 3) return false;
  for (auto w : words) {
    if (w.size() < 2 || !starts_upper(w)) return false;
    for (unsigned char c : w) {
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '.' || c == '-' ||
                c == '\'' || c >= 0x80;
      if (!ok) return false;
    }
  }
  return true;
}

}  // namespace

TyperConfig::TyperConfig() = default;

TyperConfig TyperConfig::builtin() {
  TyperConfig cfg;
  cfg.add_rule(R"(^\d{3,4}$)", EntityType::Date);
  cfg.add_rule(R"(^\d{4}-\d{2}(-\d{2})?$)", EntityType::Date);
  cfg.add_rule(R"(^-?\d+([.,]\d+)*$)", EntityType::Number);
  return cfg;
}

void TyperConfig::add_rule(std::string pattern, EntityType type) {
  // std::regex throws regex_error on a bad pattern; that is the intended failure
  compiled_.emplace_back(pattern, std::regex::ECMAScript | std::regex::optimize);
  rules_.push_back({std::move(pattern), type});
}

void TyperConfig::add_gazetteer_entry(EntityType type, std::string_view surface) {
  auto s = trim(surface);
  if (s.empty()) return;
  if (!gazetteers_[type].insert(s).second) return;
  // the same surface in two gazetteers resolves to the earlier type
  auto [it, fresh] = exact_.try_emplace(s, type);
  if (!fresh && type < it->second) it->second = type;
  auto seq = join_tokens(s);
  if (seq.empty()) return;
  token_seqs_[type].insert(seq);
  max_seq_len_ = std::max(max_seq_len_, word_tokens(s).size());
}

std::vector<std::string> read_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gazetteer " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto v = trim_view(line);
    if (v.empty() || v.front() == '#') continue;
    out.emplace_back(v);
  }
  return out;
}

void TyperConfig::add_gazetteer_file(EntityType type, const std::filesystem::path& path) {
  for (const auto& e : read_gazetteer(path)) add_gazetteer_entry(type, e);
}

void TyperConfig::add_rules_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rules file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim_view(line).empty() || trim_view(line).front() == '#') continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected pattern<TAB>TYPE");
    }
    add_rule(line.substr(0, tab), parse_entity_type(line.substr(tab + 1)));
  }
}

void TyperConfig::add_relation_hint(std::string suffix, EntityType type) {
  hints_.push_back({std::move(suffix), type});
}

EntityType TyperConfig::type_of(std::string_view surface) const {
  std::string s(surface);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (std::regex_search(s, compiled_[i])) return rules_[i].type;
  }
  if (auto it = exact_.find(s); it != exact_.end()) return it->second;

  if (!token_seqs_.empty()) {
    auto toks = word_tokens(s);
    std::vector<std::string> ngrams;
    for (std::size_t b = 0; b < toks.size(); ++b) {
      std::string gram;
      for (std::size_t e = b; e < toks.size() && e - b < max_seq_len_; ++e) {
        if (!gram.empty()) gram += ' ';
        gram.append(s, toks[e].begin, toks[e].end - toks[e].begin);
        ngrams.push_back(gram);
      }
    }
    for (auto t : kAllEntityTypes) {
      auto it = token_seqs_.find(t);
      if (it == token_seqs_.end()) continue;
      for (const auto& g : ngrams) {
        if (it->second.count(g)) return t;
      }
    }
  }
  if (capitalized_person_heuristic && looks_like_person_name(s)) return EntityType::Person;
  return default_type;
}

std::optional<EntityType> TyperConfig::hinted_type(std::string_view relation) const {
  if (!relation_hints_enabled) return std::nullopt;
  for (const auto& h : hints_) {
    if (relation.ends_with(h.suffix)) return h.type;
  }
  return std::nullopt;
}

nlohmann::json TyperConfig::to_json() const {
  nlohmann::json j;
  j["default_type"] = to_string(default_type);
  j["capitalized_person_heuristic"] = capitalized_person_heuristic;
  j["relation_hints_enabled"] = relation_hints_enabled;
  auto rules = nlohmann::json::array();
  for (const auto& r : rules_) rules.push_back({{"pattern", r.pattern}, {"type", to_string(r.type)}});
  j["rules"] = rules;
  auto gaz = nlohmann::json::object();
  for (const auto& [t, entries] : gazetteers_) gaz[std::string(to_string(t))] = entries;
  j["gazetteers"] = gaz;
  auto hints = nlohmann::json::array();
  for (const auto& h : hints_) hints.push_back({{"suffix", h.suffix}, {"type", to_string(h.type)}});
  j["relation_hints"] = hints;
  return j;
}

TyperConfig TyperConfig::from_json(const nlohmann::json& j) {
  TyperConfig cfg;
  cfg.default_type = parse_entity_type(j.value("default_type", std::string("Other")));
  cfg.capitalized_person_heuristic = j.value("capitalized_person_heuristic", true);
  cfg.relation_hints_enabled = j.value("relation_hints_enabled", false);
  for (const auto& r : j.value("rules", nlohmann::json::array())) {
    cfg.add_rule(r.at("pattern").get<std::string>(), parse_entity_type(r.at("type").get<std::string>()));
  }
  const auto gazetteers = j.value("gazetteers", nlohmann::json::object());
  for (const auto& [name, entries] : gazetteers.items()) {
    auto t = parse_entity_type(name);
    for (const auto& e : entries) cfg.add_gazetteer_entry(t, e.get<std::string>());
  }
  for (const auto& h : j.value("relation_hints", nlohmann::json::array())) {
    cfg.add_relation_hint(h.at("suffix").get<std::string>(),
                          parse_entity_type(h.at("type").get<std::string>()));
  }
  return cfg;
}

void TyperConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

TyperConfig TyperConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return from_json(nlohmann::json::parse(in));
}

EntityType type_of_entity(std::string_view surface, const TyperConfig& cfg) {
  return cfg.type_of(surface);
}

TypeHistogram object_type_histogram(const Cluster& c, const TyperConfig& cfg) {
  TypeHistogram h{};
  for (const auto& m : c.members) ++h[static_cast<std::size_t>(cfg.type_of(m.object))];
  return h;
}

EntityType histogram_mode(const TypeHistogram& h) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] > h[best]) best = i;
  }
  return kAllEntityTypes[best];
}

EntityType dominant_object_type(const Cluster& c, const TyperConfig& cfg) {
  if (auto hint = cfg.hinted_type(c.relation)) return *hint;
  return histogram_mode(object_type_histogram(c, cfg));
}

}  // namespace kgquest
