// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/prompts.hpp"

#include "kgquest/text_util.hpp"

namespace kgquest::prompts {

// Reconstructed: the refinement instruction is only described, never printed
// in full, by the method this pipeline implements.
const std::string_view kRefineSystem =
    "You are an expert editor of quiz questions. You will receive one question that was "
    "produced from a fixed template. Produce directly an improved version of the question "
    "while omitting other details: fix grammar, syntax, and formatting so it reads naturally.\n"
    "Rules:\n"
    "- Keep the subject exactly as written (do not rename, abbreviate, or translate it).\n"
    "- Do not add facts, qualifiers, dates, or names that are not already in the question.\n"
    "- Do not answer the question.\n"
    "- Output ONLY the improved question on one line ending with a question mark.";

const std::string_view kDirectGenerationTemplate =
    "You are given one RDF-style triple formatted as:\n"
    "subject -> relation -> object\n"
    "\n"
    "TRIPLE: {triple_str}\n"
    "\n"
    "TASK: Write ONE natural-language question that:\n"
    "- Mentions the SUBJECT and encodes the RELATION;\n"
    "- Is answerable ONLY by the OBJECT;\n"
    "- Adds NO extra facts, qualifiers, dates, or names not present in the triple;\n"
    "- Keeps entities verbatim (do not rename, abbreviate, or translate them).\n"
    "\n"
    "FORMATTING:\n"
    "- Output ONLY the question text on one line ending with a question mark.;\n"
    "- Do NOT include the answer, labels, or any extra text;";

const std::string_view kJudgeSystem =
    "You are an impartial judge responsible for evaluating the correctness of multiple-choice "
    "questions in terms of grammar, syntax, and formatting. Each question is generated from a "
    "structured triple consisting of three elements: subject, relationship, and object. Your "
    "task is to ensure that the question correctly incorporates the subject and the "
    "relationship while excluding the object, as the object should only appear among the "
    "answer choices.\n"
    "\n"
    "Important Constraints: (A) The subject must appear exactly as it is represented in the "
    "triple; (B) The relationship must be correctly integrated into the question; (C) The "
    "object must not appear in the question.\n"
    "Evaluation Criteria:\n"
    "1. Grammar: Ensure proper grammatical rules.\n"
    "2. Syntax: Verify sentence structure.\n"
    "3. Formatting: Check answer choices for distinctness and correctness.";

const std::string_view kJudgeUserTemplate =
    "The following question has been generated from the triple of given category: {category}\n"
    "\n"
    "Question: {question}\n"
    "\n"
    "{options}"
    "\n"
    "Is this question correctly formulated?";

const std::string_view kJudgeForcedChoice =
    "\n\nAnswer with exactly one label on the first line: correct, grammar error, "
    "formatting error, or syntax error. You may add a short reason after the label.";

const std::string_view kJudgeReprompt =
    "\n\nYour previous reply could not be parsed. Reply with ONLY one of these labels and "
    "nothing else: correct | grammar error | formatting error | syntax error";

namespace {
void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}
}  // namespace

std::string refine_user(std::string_view question) {
  return "Improve this question.\nQuestion: \"" + std::string(question) + "\"";
}

std::string direct_generation_user(const Triplet& t) {
  std::string out(kDirectGenerationTemplate);
  replace_all(out, "{triple_str}", t.subject + " -> " + t.relation + " -> " + t.object);
  return out;
}

std::string judge_user(std::string_view category, std::string_view question,
                       const std::vector<std::string>& options) {
  std::string opts;
  for (std::size_t i = 0; i < options.size(); ++i) {
    opts += static_cast<char>('A' + static_cast<char>(i % 26));
    opts += ". " + options[i] + "\n";
  }
  // fill {options} before the user-controlled fields so they cannot inject placeholders
  std::string out(kJudgeUserTemplate);
  auto slot = out.find("{options}");
  out.replace(slot, 9, opts);
  slot = out.find("{question}");
  out.replace(slot, 10, question);
  slot = out.find("{category}");
  out.replace(slot, 10, category);
  out += kJudgeForcedChoice;
  return out;
}

std::string extract_quoted_question(std::string_view user_text) {
  constexpr std::string_view kMarker = "Question: \"";
  auto pos = user_text.rfind(kMarker);
  if (pos == std::string_view::npos) return {};
  auto body = user_text.substr(pos + kMarker.size());
  auto nl = body.find('\n');
  if (nl != std::string_view::npos) body = body.substr(0, nl);
  if (body.empty() || body.back() != '"') return {};
  body.remove_suffix(1);
  return std::string(body);
}

std::map<std::string, std::string> catalog_hashes() {
  return {
      {"refine_system", hex64(fnv1a64(kRefineSystem))},
      {"refine_user", hex64(fnv1a64(refine_user("{question}")))},
      {"direct_generation", hex64(fnv1a64(kDirectGenerationTemplate))},
      {"judge_system", hex64(fnv1a64(kJudgeSystem))},
      {"judge_user", hex64(fnv1a64(std::string(kJudgeUserTemplate) + std::string(kJudgeForcedChoice)))},
      {"judge_reprompt", hex64(fnv1a64(kJudgeReprompt))},
  };
}

}  // namespace kgquest::prompts
