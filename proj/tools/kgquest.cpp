// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors
//
// kgquest: knowledge-graph triplets -> multiple-choice QA datasets.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "kgquest/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string input;
  std::string format;
  std::string output_dir;
  std::string templates;
  std::string dataset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_options;
  std::string fallback;
  bool lenient = false;
  bool strict = false;
  bool use_refined = false;
  bool no_refined = false;
  bool singularize = false;
  bool verbose = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run config")->check(CLI::ExistingFile);
  cmd->add_option("-i,--input", o.input, "triple file (.tsv, .nt, optionally .gz)");
  cmd->add_option("--format", o.format, "input format: tsv or ntriples");
  cmd->add_option("-o,--output-dir", o.output_dir, "directory for stage outputs");
  cmd->add_option("--seed", o.seed, "global seed");
  cmd->add_flag("--lenient", o.lenient, "skip malformed lines instead of failing");
  cmd->add_flag("--strict", o.strict, "fail on the first malformed line (default)");
  cmd->add_flag("-v,--verbose", o.verbose, "debug logging");
  cmd->add_flag("-q,--quiet", o.quiet, "warnings and errors only");
}

kgquest::RunConfig resolve(const Overrides& o) {
  auto cfg = o.config.empty() ? kgquest::RunConfig{} : kgquest::RunConfig::load(o.config);
  if (!o.input.empty()) cfg.input = o.input;
  try {
    if (!o.format.empty()) cfg.format = kgquest::parse_triple_format(o.format);
    if (!o.fallback.empty()) cfg.distractor_fallback = kgquest::parse_distractor_fallback(o.fallback);
  } catch (const std::invalid_argument& e) {
    throw kgquest::ConfigError(e.what());
  }
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (!o.templates.empty()) cfg.templates_path = o.templates;
  if (!o.dataset.empty()) cfg.dataset_path = o.dataset;
  if (o.seed) cfg.seed = *o.seed;
  if (o.n_options) cfg.n_options = *o.n_options;
  if (o.lenient) cfg.parse_mode = kgquest::ParseMode::Lenient;
  if (o.strict) cfg.parse_mode = kgquest::ParseMode::Strict;
  if (o.use_refined) cfg.use_refined = true;
  if (o.no_refined) cfg.use_refined = false;
  if (o.singularize) cfg.singularize = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgquest: template-driven multiple-choice QA generation from knowledge graphs"};
  app.set_version_flag("--version", std::string(kgquest::kVersion));
  app.require_subcommand(1);

  Overrides o;
  std::optional<kgquest::Stage> stage;
  auto sub = [&](const char* name, const char* help, kgquest::Stage s) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, o);
    cmd->callback([&stage, s] { stage = s; });
    return cmd;
  };

  sub("stats", "print graph statistics and per-relation cluster sizes", kgquest::Stage::Stats);
  auto* build = sub("build-templates", "build one rule-based template per relation",
                    kgquest::Stage::BuildTemplates);
  build->add_option("--templates", o.templates, "template file to write");
  build->add_flag("--singularize", o.singularize, "drop a trailing plural 's' from relation names");
  auto* refine = sub("refine", "refine each template with one model call", kgquest::Stage::Refine);
  refine->add_option("--templates", o.templates, "rule-built template file to read");
  auto* gen = sub("generate", "instantiate one multiple-choice item per triplet",
                  kgquest::Stage::Generate);
  gen->add_option("--templates", o.templates, "rule-built template file to read");
  gen->add_option("--dataset", o.dataset, "dataset file to write");
  gen->add_option("-n,--n-options", o.n_options, "answer options per item")->check(CLI::Range(2, 1000));
  gen->add_option("--fallback", o.fallback, "distractor fallback: skip or global_same_type");
  gen->add_flag("--use-refined", o.use_refined, "use templates.refined.jsonl");
  gen->add_flag("--no-refined", o.no_refined, "use the rule-built templates");
  auto* direct = sub("direct-baseline", "generate one question per triplet directly with a model",
                     kgquest::Stage::DirectBaseline);
  direct->add_option("-n,--n-options", o.n_options, "answer options per item")->check(CLI::Range(2, 1000));
  auto* eval = sub("evaluate", "judge one sampled item per relation with a three-model jury",
                   kgquest::Stage::Evaluate);
  eval->add_option("--dataset", o.dataset, "dataset file to read");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kgquest::kExitUsage;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("kgquest"));
  spdlog::set_level(o.verbose ? spdlog::level::debug : o.quiet ? spdlog::level::warn : spdlog::level::info);

  kgquest::RunConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const kgquest::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kgquest::kExitUsage;
  }
  return kgquest::run_stage(*stage, cfg, std::cout, std::cerr);
}
