// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors
//
// Prompt catalog. Every prompt that reaches a model lives here so its hash
// can be recorded in run metadata; editing any string changes the hash.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kgquest/kg_store.hpp"

namespace kgquest::prompts {

extern const std::string_view kRefineSystem;
extern const std::string_view kDirectGenerationTemplate;
extern const std::string_view kJudgeSystem;
extern const std::string_view kJudgeUserTemplate;
extern const std::string_view kJudgeForcedChoice;
extern const std::string_view kJudgeReprompt;

/// User message for template refinement. The question is wrapped as
/// `Question: "<question>"` on its own line.
std::string refine_user(std::string_view question);

/// Direct-generation prompt with `{triple_str}` filled as `s -> r -> o`.
std::string direct_generation_user(const Triplet& t);

/// Judge user message: category, question, lettered options and the
/// forced-choice label instruction.
std::string judge_user(std::string_view category, std::string_view question,
                       const std::vector<std::string>& options);

/// Recovers the question from a `Question: "..."` line, or returns an empty
/// string when the text has none.
std::string extract_quoted_question(std::string_view user_text);

/// name -> fnv1a64 hex digest, for run metadata.
std::map<std::string, std::string> catalog_hashes();

}  // namespace kgquest::prompts
