// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace kgquest {

struct Cluster;

// Declaration order doubles as the tie-break order for dominant types.
enum class EntityType { Person, Location, Organization, Date, Number, Work, Other };

inline constexpr std::array<EntityType, 7> kAllEntityTypes = {
    EntityType::Person, EntityType::Location, EntityType::Organization, EntityType::Date,
    EntityType::Number, EntityType::Work,     EntityType::Other};

std::string_view to_string(EntityType t);
/// Case-insensitive. Throws std::invalid_argument.
EntityType parse_entity_type(std::string_view name);

struct RegexRule {
  std::string pattern;
  EntityType type;
};

struct RelationHint {
  std::string suffix;
  EntityType type;
};

/// Heuristic entity typer: ordered regex rules, then exact gazetteer hits,
/// then gazetteer token-sequence hits, then a capitalised-name heuristic,
/// then the default type.
class TyperConfig {
 public:
  TyperConfig();

  /// Date/number regex rules and the capitalised-name heuristic; no gazetteers.
  static TyperConfig builtin();

  void add_rule(std::string pattern, EntityType type);
  void add_gazetteer_entry(EntityType type, std::string_view surface);
  void add_gazetteer_file(EntityType type, const std::filesystem::path& path);
  void add_rules_file(const std::filesystem::path& path);
  void add_relation_hint(std::string suffix, EntityType type);

  EntityType default_type = EntityType::Other;
  bool capitalized_person_heuristic = true;
  bool relation_hints_enabled = false;

  const std::vector<RegexRule>& rules() const { return rules_; }
  const std::vector<RelationHint>& relation_hints() const { return hints_; }
  const std::map<EntityType, std::set<std::string>>& gazetteers() const { return gazetteers_; }

  EntityType type_of(std::string_view surface) const;
  std::optional<EntityType> hinted_type(std::string_view relation) const;

  nlohmann::json to_json() const;
  static TyperConfig from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static TyperConfig load(const std::filesystem::path& path);

 private:
  std::vector<RegexRule> rules_;
  std::vector<std::regex> compiled_;
  std::map<EntityType, std::set<std::string>> gazetteers_;
  std::map<std::string, EntityType> exact_;
  // space-joined token sequences, per type
  std::map<EntityType, std::set<std::string>> token_seqs_;
  std::size_t max_seq_len_ = 0;
  std::vector<RelationHint> hints_;
};

/// Reads one surface per line; `#` starts a comment line, blanks are skipped.
std::vector<std::string> read_gazetteer(const std::filesystem::path& path);

EntityType type_of_entity(std::string_view surface, const TyperConfig& cfg);

using TypeHistogram = std::array<std::size_t, kAllEntityTypes.size()>;

TypeHistogram object_type_histogram(const Cluster& c, const TyperConfig& cfg);

/// Argmax of a histogram; ties go to the earliest type in declaration order.
EntityType histogram_mode(const TypeHistogram& h);

/// Modal object type of a non-empty cluster, or the relation hint when
/// hints are enabled and one matches.
EntityType dominant_object_type(const Cluster& c, const TyperConfig& cfg);

}  // namespace kgquest
