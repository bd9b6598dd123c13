// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgquest/clustering.hpp"
#include "kgquest/entity_typing.hpp"
#include "kgquest/llm_client.hpp"
#include "kgquest/template_engine.hpp"

namespace kgquest {

enum class RefinementStatus { Refined, FallbackKeptOriginal };
std::string_view to_string(RefinementStatus s);

struct RefinementRecord {
  std::string relation;
  Triplet representative;
  std::string raw_question;
  std::string refined_question;
  Template refined_template;
  RefinementStatus status = RefinementStatus::FallbackKeptOriginal;
  std::string note;  // reason for a fallback, empty otherwise
};

class SubjectNotFound : public std::runtime_error {
 public:
  explicit SubjectNotFound(std::string_view subject)
      : std::runtime_error("subject '" + std::string(subject) + "' not found in refined question") {}
};

/// Seeded uniform pick among members whose object has the cluster's
/// dominant type; any member if none qualifies.
Triplet select_representative(const Cluster& c, const TyperConfig& typer, std::uint64_t seed);

/// Replaces the first mention of `subject` with the placeholder. Tries an
/// exact match, then ASCII case-insensitive, then a punctuation-insensitive
/// token-sequence match. Throws SubjectNotFound.
std::string regeneralize(std::string_view refined_question, std::string_view subject);

/// Graph entity surfaces found in `template_text` outside the placeholder,
/// ignoring the subject and anything already present in `original_text`.
std::vector<std::string> foreign_entities(std::string_view template_text,
                                          const std::set<std::string>& entities,
                                          std::string_view subject,
                                          std::string_view original_text);

/// One refine call for one template. Never throws for model failures: they
/// become a fallback record that keeps the rule-built text. `entities`, when
/// given, enables the neutrality check.
RefinementRecord refine_template(const Template& t, const Triplet& representative,
                                 LlmClient& client, const EndpointConfig& endpoint,
                                 const std::set<std::string>* entities = nullptr);

/// Refines every template (matched to clusters by relation), running up to
/// `endpoint.concurrency` calls at once. Output follows template order.
std::vector<RefinementRecord> refine_all(const std::vector<Template>& templates,
                                         const std::vector<Cluster>& clusters,
                                         const TyperConfig& typer, LlmClient& client,
                                         const EndpointConfig& endpoint, std::uint64_t seed,
                                         const std::set<std::string>* entities = nullptr);

nlohmann::ordered_json to_json(const RefinementRecord& r);

}  // namespace kgquest
