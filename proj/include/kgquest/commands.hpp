// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors
//
// Pipeline stages behind the `kgquest` subcommands. Stages exchange files in
// the output directory:
//
//   build-templates  -> templates.jsonl
//   refine           -> templates.refined.jsonl, refine.ledger.json
//   generate         -> dataset.jsonl
//   direct-baseline  -> direct.jsonl, direct.ledger.json
//   evaluate         -> verdicts.jsonl, eval_report.json, eval_table.txt
//
// and each writes `<stage>.meta.json`.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgquest/run_config.hpp"
#include "kgquest/template_engine.hpp"

namespace kgquest {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitEndpoint = 3,
};

/// Bad or inconsistent stage inputs (template files, datasets).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Template> read_templates(const std::filesystem::path& path);
void write_templates(const std::filesystem::path& path, const std::vector<Template>& templates);
std::vector<QAItem> read_dataset(const std::filesystem::path& path);

// Each throws ConfigError, DataError, parse errors, or LlmError.
void cmd_stats(const RunConfig& cfg, std::ostream& out);
void cmd_build_templates(const RunConfig& cfg, std::ostream& out);
void cmd_refine(const RunConfig& cfg, std::ostream& out);
void cmd_generate(const RunConfig& cfg, std::ostream& out);
void cmd_direct_baseline(const RunConfig& cfg, std::ostream& out);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);

std::string_view stage_name(Stage s);

/// Validates, runs the stage, and maps failures to exit codes
/// (1 usage/config, 2 data, 3 endpoint exhaustion). Errors go to `err`.
int run_stage(Stage stage, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace kgquest
