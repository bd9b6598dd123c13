// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgquest/clustering.hpp"
#include "kgquest/entity_typing.hpp"

namespace kgquest {

inline constexpr std::string_view kSubjectPlaceholder = "<SUBJECT>";

enum class Provenance { RuleBuilt, LlmRefined };
std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);

struct Template {
  std::string relation;
  std::string text;
  std::string prefix;
  EntityType dominant_type = EntityType::Other;
  Provenance provenance = Provenance::RuleBuilt;

  bool operator==(const Template&) const = default;
};

class PlaceholderMissing : public std::runtime_error {
 public:
  explicit PlaceholderMissing(const std::string& text)
      : std::runtime_error("template has no " + std::string(kSubjectPlaceholder) + ": " + text) {}
};

struct PrefixMap {
  std::map<EntityType, std::string> entries;
  std::string fallback = "What is";

  /// Person -> "Who is"; every other type falls through to "What is".
  static PrefixMap defaults();
};

struct VerbalizeOptions {
  bool singularize = false;
};

std::string verbalize_relation(std::string_view relation, VerbalizeOptions opts = {});
std::string prefix_for_type(EntityType t, const PrefixMap& m);

/// `{prefix} the {relation phrase} of <SUBJECT>?`. The cluster must carry a
/// dominant type.
Template build_template(const Cluster& c, const PrefixMap& m, VerbalizeOptions opts = {});

std::string instantiate(const Template& t, std::string_view subject);
std::string instantiate(std::string_view template_text, std::string_view subject);

std::size_t count_placeholders(std::string_view text);
/// Exactly one placeholder and a trailing `?`.
bool is_well_formed_template(std::string_view text);

nlohmann::ordered_json to_json(const Template& t);
Template template_from_json(const nlohmann::json& j);

}  // namespace kgquest
