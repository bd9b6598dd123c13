// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgquest/entity_typing.hpp"
#include "kgquest/kg_store.hpp"
#include "kgquest/llm_client.hpp"
#include "kgquest/qa_builder.hpp"
#include "kgquest/template_engine.hpp"

namespace kgquest {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stage { Stats, BuildTemplates, Refine, Generate, DirectBaseline, Evaluate };

struct TyperSettings {
  std::optional<std::filesystem::path> config_file;  // full TyperConfig JSON
  std::map<EntityType, std::vector<std::filesystem::path>> gazetteers;
  std::vector<std::filesystem::path> rules_files;
  bool builtin_rules = true;
  std::optional<EntityType> default_type;
  std::optional<bool> capitalized_person_heuristic;
  bool relation_hints_enabled = false;
  std::vector<RelationHint> relation_hints;
};

/// Everything a subcommand needs. Relative paths in a config file resolve
/// against the file's directory.
struct RunConfig {
  std::filesystem::path input;
  std::optional<TripleFormat> format;
  ParseMode parse_mode = ParseMode::Strict;
  std::filesystem::path output_dir = "kgquest_out";
  std::optional<std::filesystem::path> templates_path;
  std::optional<std::filesystem::path> dataset_path;
  std::optional<std::uint64_t> seed;
  std::size_t n_options = 4;
  bool use_refined = false;
  DistractorFallback distractor_fallback = DistractorFallback::Skip;
  bool singularize = false;
  TyperSettings typer;
  PrefixMap prefix_map = PrefixMap::defaults();
  EndpointConfig refine;
  EndpointConfig direct;
  std::vector<EndpointConfig> judges;

  /// Throws ConfigError.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  /// Checks referenced paths and stage-specific requirements. Throws ConfigError.
  void validate(Stage stage) const;

  TripleFormat input_format() const;
  TyperConfig build_typer() const;
  GenerationConfig generation() const;

  std::filesystem::path rule_templates_file() const;
  std::filesystem::path refined_templates_file() const;
  std::filesystem::path dataset_file() const;

  nlohmann::ordered_json to_json() const;
  std::string hash() const;
};

}  // namespace kgquest
