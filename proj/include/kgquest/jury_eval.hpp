// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgquest/llm_client.hpp"
#include "kgquest/qa_builder.hpp"

namespace kgquest {

enum class JudgeLabel { Correct, GrammarError, FormattingError, SyntaxError };
inline constexpr std::array<JudgeLabel, 4> kAllJudgeLabels = {
    JudgeLabel::Correct, JudgeLabel::GrammarError, JudgeLabel::FormattingError,
    JudgeLabel::SyntaxError};

std::string_view to_string(JudgeLabel l);
JudgeLabel parse_judge_label_name(std::string_view s);

/// Higher is more severe: SyntaxError > GrammarError > FormattingError > Correct.
int severity(JudgeLabel l);

enum class Consensus { Unanimous, Majority, TieBroken };
std::string_view to_string(Consensus c);

/// Strict majority wins; a three-way split goes to the most severe label.
std::pair<JudgeLabel, Consensus> majority_vote(const std::array<JudgeLabel, 3>& labels);

/// Keyword parse of a judge completion: the earliest label keyword wins.
std::optional<JudgeLabel> parse_judge_label(std::string_view completion);

class UnparseableVerdict : public std::runtime_error {
 public:
  UnparseableVerdict(const std::string& item_id, const std::string& model)
      : std::runtime_error("judge " + model + " gave no usable label for item " + item_id) {}
};

struct Judge {
  EndpointConfig endpoint;
  std::shared_ptr<LlmClient> client;
};

/// Counts reprompts issued after an unparseable first reply.
struct JudgeStats {
  std::size_t reprompts = 0;
};

/// One judge call (plus at most one stricter reprompt). Throws
/// UnparseableVerdict, or LlmError when the endpoint fails.
JudgeLabel judge_question(const QAItem& item, const Judge& judge, JudgeStats* stats = nullptr);

struct Verdict {
  std::string item_id;
  std::array<std::pair<std::string, JudgeLabel>, 3> labels;
  JudgeLabel final_label = JudgeLabel::Correct;
  Consensus consensus = Consensus::Unanimous;
};

struct EvalReport {
  std::uint64_t seed = 0;
  std::size_t sampled = 0;
  std::size_t sample_size = 0;  // items with a verdict
  std::map<JudgeLabel, std::size_t> label_counts;
  std::map<std::string, std::map<JudgeLabel, std::size_t>> per_judge;
  std::map<Consensus, std::size_t> consensus_counts;
  std::size_t reprompts = 0;
  std::vector<std::string> unparseable_items;

  nlohmann::ordered_json to_json() const;
  /// Judge rows plus a Jury row, with counts and percentages per label.
  std::string distribution_table() const;
};

/// One seeded-uniform item per relation present in `items`, in relation order.
std::vector<QAItem> sample_for_jury(const std::vector<QAItem>& items, std::uint64_t seed);

/// Judge ids must be three, pairwise distinct, and not the refinement model.
void check_jury(const std::vector<Judge>& judges, std::string_view refine_model);

struct EvalResult {
  std::vector<Verdict> verdicts;
  EvalReport report;
};

/// Runs every judge on every sampled item (in parallel up to the largest
/// judge concurrency). Items with an unparseable judge reply are reported and
/// left out of the verdicts.
EvalResult evaluate(const std::vector<QAItem>& sample, const std::vector<Judge>& judges,
                    std::uint64_t seed);

nlohmann::ordered_json to_json(const Verdict& v);

}  // namespace kgquest
