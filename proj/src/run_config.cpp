// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/run_config.hpp"

#include <fstream>
#include <set>

#include "kgquest/text_util.hpp"

namespace kgquest {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

template <typename F>
auto config_guard(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j, const fs::path& base) {
  return config_guard("config", [&] {
    RunConfig c;
    if (j.contains("input")) {
      const auto& in = j.at("input");
      if (in.is_string()) {
        c.input = resolve(base, in.get<std::string>());
      } else {
        c.input = resolve(base, in.at("path").get<std::string>());
        if (in.contains("format")) c.format = parse_triple_format(in.at("format").get<std::string>());
        if (in.value("lenient", false)) c.parse_mode = ParseMode::Lenient;
      }
    }
    if (j.contains("format")) c.format = parse_triple_format(j.at("format").get<std::string>());
    if (j.contains("lenient")) {
      c.parse_mode = j.at("lenient").get<bool>() ? ParseMode::Lenient : ParseMode::Strict;
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base, j.at("output_dir").get<std::string>());
    if (j.contains("templates")) c.templates_path = resolve(base, j.at("templates").get<std::string>());
    if (j.contains("dataset")) c.dataset_path = resolve(base, j.at("dataset").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.n_options = j.value("n_options", c.n_options);
    c.use_refined = j.value("use_refined", c.use_refined);
    if (j.contains("distractor_fallback")) {
      c.distractor_fallback = parse_distractor_fallback(j.at("distractor_fallback").get<std::string>());
    }
    c.singularize = j.value("singularize", c.singularize);

    if (j.contains("typer")) {
      const auto& t = j.at("typer");
      if (t.contains("config")) c.typer.config_file = resolve(base, t.at("config").get<std::string>());
      const auto gazetteers = t.value("gazetteers", nlohmann::json::object());
      for (const auto& [type, files] : gazetteers.items()) {
        auto et = parse_entity_type(type);
        if (files.is_string()) {
          c.typer.gazetteers[et].push_back(resolve(base, files.get<std::string>()));
        } else {
          for (const auto& f : files) c.typer.gazetteers[et].push_back(resolve(base, f.get<std::string>()));
        }
      }
      for (const auto& f : t.value("rules", nlohmann::json::array())) {
        c.typer.rules_files.push_back(resolve(base, f.get<std::string>()));
      }
      c.typer.builtin_rules = t.value("builtin_rules", true);
      if (t.contains("default_type")) c.typer.default_type = parse_entity_type(t.at("default_type").get<std::string>());
      if (t.contains("capitalized_person_heuristic")) {
        c.typer.capitalized_person_heuristic = t.at("capitalized_person_heuristic").get<bool>();
      }
      c.typer.relation_hints_enabled = t.value("relation_hints_enabled", false);
      for (const auto& h : t.value("relation_hints", nlohmann::json::array())) {
        c.typer.relation_hints.push_back(
            {h.at("suffix").get<std::string>(), parse_entity_type(h.at("type").get<std::string>())});
      }
    }

    if (j.contains("prefix_map")) {
      for (const auto& [key, value] : j.at("prefix_map").items()) {
        if (key == "default") c.prefix_map.fallback = value.get<std::string>();
        else c.prefix_map.entries[parse_entity_type(key)] = value.get<std::string>();
      }
    }

    if (j.contains("endpoints")) {
      const auto& e = j.at("endpoints");
      if (e.contains("refine")) c.refine = EndpointConfig::from_json(e.at("refine"));
      if (e.contains("direct")) c.direct = EndpointConfig::from_json(e.at("direct"));
      for (const auto& judge : e.value("judges", nlohmann::json::array())) {
        c.judges.push_back(EndpointConfig::from_json(judge));
      }
    }
    return c;
  });
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void RunConfig::validate(Stage stage) const {
  auto must_exist = [](const fs::path& p, std::string_view what) {
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  bool needs_graph = stage != Stage::Evaluate;
  if (needs_graph) {
    if (input.empty()) throw ConfigError("no input graph given (config 'input' or --input)");
    must_exist(input, "input graph");
  }
  if (typer.config_file) must_exist(*typer.config_file, "typer config");
  for (const auto& [t, files] : typer.gazetteers) {
    for (const auto& f : files) must_exist(f, "gazetteer");
  }
  for (const auto& f : typer.rules_files) must_exist(f, "rules file");
  if ((stage == Stage::Generate || stage == Stage::Evaluate || stage == Stage::DirectBaseline) && !seed) {
    throw ConfigError("a seed is required for this stage (config 'seed' or --seed)");
  }
  if (n_options < 2) throw ConfigError("n_options must be at least 2");
  if (stage == Stage::Refine) must_exist(rule_templates_file(), "template file");
  if (stage == Stage::Generate) {
    must_exist(use_refined ? refined_templates_file() : rule_templates_file(), "template file");
  }
  if (stage == Stage::Evaluate) {
    must_exist(dataset_file(), "dataset");
    if (judges.size() != 3) {
      throw ConfigError("evaluate needs exactly 3 judge endpoints, got " + std::to_string(judges.size()));
    }
    std::set<std::string> models;
    for (const auto& j : judges) {
      if (j.model == refine.model) {
        throw ConfigError("judge model " + j.model + " is also the refinement model");
      }
      if (!models.insert(j.model).second) throw ConfigError("judge model " + j.model + " appears twice");
    }
  }
}

TripleFormat RunConfig::input_format() const { return format ? *format : format_from_path(input); }

TyperConfig RunConfig::build_typer() const {
  return config_guard("typer", [&] {
    TyperConfig cfg;
    if (typer.config_file) cfg = TyperConfig::load(*typer.config_file);
    else if (typer.builtin_rules) cfg = TyperConfig::builtin();
    for (const auto& f : typer.rules_files) cfg.add_rules_file(f);
    for (const auto& [t, files] : typer.gazetteers) {
      for (const auto& f : files) cfg.add_gazetteer_file(t, f);
    }
    if (typer.default_type) cfg.default_type = *typer.default_type;
    if (typer.capitalized_person_heuristic) cfg.capitalized_person_heuristic = *typer.capitalized_person_heuristic;
    if (typer.relation_hints_enabled) cfg.relation_hints_enabled = true;
    for (const auto& h : typer.relation_hints) cfg.add_relation_hint(h.suffix, h.type);
    return cfg;
  });
}

GenerationConfig RunConfig::generation() const {
  GenerationConfig g;
  g.n_options = n_options;
  g.seed = seed.value_or(0);
  g.distractor_fallback = distractor_fallback;
  g.use_refined = use_refined;
  return g;
}

fs::path RunConfig::rule_templates_file() const {
  return templates_path ? *templates_path : output_dir / "templates.jsonl";
}

fs::path RunConfig::refined_templates_file() const { return output_dir / "templates.refined.jsonl"; }

fs::path RunConfig::dataset_file() const {
  return dataset_path ? *dataset_path : output_dir / "dataset.jsonl";
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["input"] = {{"path", input.string()},
                {"format", input.empty() ? "tsv" : to_string(input_format())},
                {"lenient", parse_mode == ParseMode::Lenient}};
  j["output_dir"] = output_dir.string();
  if (seed) j["seed"] = *seed;
  j["n_options"] = n_options;
  j["use_refined"] = use_refined;
  j["distractor_fallback"] = to_string(distractor_fallback);
  j["singularize"] = singularize;
  auto pm = nlohmann::ordered_json::object();
  for (const auto& [t, p] : prefix_map.entries) pm[std::string(to_string(t))] = p;
  pm["default"] = prefix_map.fallback;
  j["prefix_map"] = pm;
  // the typer is hashed by its effective content, not by file names
  j["typer_hash"] = hex64(fnv1a64(build_typer().to_json().dump()));
  j["endpoints"]["refine"] = refine.to_json();
  j["endpoints"]["direct"] = direct.to_json();
  auto js = nlohmann::ordered_json::array();
  for (const auto& e : judges) js.push_back(e.to_json());
  j["endpoints"]["judges"] = js;
  return j;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(to_json().dump())); }

}  // namespace kgquest
