// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors
//
// Multiple-choice item construction. Every distractor d for a triplet
// (s, r, o) satisfies (s, r, d) not in the graph.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "kgquest/clustering.hpp"
#include "kgquest/kg_store.hpp"
#include "kgquest/template_engine.hpp"

namespace kgquest {

struct QAItem {
  std::string id;
  std::string question;
  std::vector<std::string> options;
  std::size_t answer_index = 0;
  std::string relation;
  Triplet source;
  Provenance template_provenance = Provenance::RuleBuilt;

  bool operator==(const QAItem&) const = default;
};

enum class DistractorFallback { Skip, GlobalSameType };
std::string_view to_string(DistractorFallback f);
DistractorFallback parse_distractor_fallback(std::string_view s);

struct GenerationConfig {
  std::size_t n_options = 4;
  std::uint64_t seed = 0;
  DistractorFallback distractor_fallback = DistractorFallback::Skip;
  bool use_refined = false;

  void validate() const;
};

class InsufficientDistractors : public std::runtime_error {
 public:
  InsufficientDistractors(const Triplet& t, std::size_t available, std::size_t needed);
};

/// Distinct candidate objects with a membership index.
class CandidatePool {
 public:
  CandidatePool() = default;
  explicit CandidatePool(std::vector<std::string> items);
  CandidatePool(const CandidatePool&) = delete;
  CandidatePool& operator=(const CandidatePool&) = delete;
  CandidatePool(CandidatePool&&) = default;
  CandidatePool& operator=(CandidatePool&&) = default;

  const std::vector<std::string>& items() const { return items_; }
  bool contains(std::string_view s) const { return index_.count(s) != 0; }
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<std::string> items_;
  std::unordered_set<std::string_view> index_;
};

/// Per-item seed derived from the global seed and the triplet.
std::uint64_t item_seed(std::uint64_t global_seed, const Triplet& t);
std::string item_id(std::uint64_t global_seed, const Triplet& t);

/// Draws `count` distinct sound distractors from `pool` by seeded rejection
/// sampling: repeatedly pick a uniform index and keep the candidate unless it
/// is a true object of (subject, relation) or already chosen.
std::vector<std::string> select_distractors(const KnowledgeGraph& g, const CandidatePool& pool,
                                            const Triplet& t, std::size_t count,
                                            std::uint64_t seed);

/// Same, with the cluster's distinct objects as the pool.
std::vector<std::string> select_distractors(const KnowledgeGraph& g, const Cluster& c,
                                            const Triplet& t, std::size_t count,
                                            std::uint64_t seed);

QAItem build_qa(const Template& t, const Triplet& triplet, const std::vector<std::string>& distractors,
                std::uint64_t seed, std::string id = {});

struct RelationCounts {
  std::size_t emitted = 0;
  std::size_t skipped = 0;
};

struct GenerationReport {
  std::size_t triplet_count = 0;
  std::size_t emitted = 0;
  std::size_t skipped = 0;
  std::map<std::string, RelationCounts> per_relation;

  nlohmann::ordered_json to_json() const;
};

/// Emits one item per triplet in cluster order, skipping triplets whose
/// distractor pool is too small. `typer` is only consulted by the
/// global_same_type fallback.
GenerationReport generate_dataset(const KnowledgeGraph& g, const std::vector<Cluster>& clusters,
                                  const std::vector<Template>& templates,
                                  const GenerationConfig& cfg, const TyperConfig& typer,
                                  const std::function<void(const QAItem&)>& sink);

std::vector<QAItem> generate_dataset(const KnowledgeGraph& g, const std::vector<Cluster>& clusters,
                                     const std::vector<Template>& templates,
                                     const GenerationConfig& cfg, const TyperConfig& typer,
                                     GenerationReport* report = nullptr);

nlohmann::ordered_json to_json(const QAItem& item);
QAItem qa_item_from_json(const nlohmann::json& j);

}  // namespace kgquest
