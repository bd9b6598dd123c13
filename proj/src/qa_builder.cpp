// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/qa_builder.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "kgquest/seeded_random.hpp"
#include "kgquest/text_util.hpp"

namespace kgquest {

std::string_view to_string(DistractorFallback f) {
  return f == DistractorFallback::Skip ? "skip" : "global_same_type";
}

DistractorFallback parse_distractor_fallback(std::string_view s) {
  if (s == "skip") return DistractorFallback::Skip;
  if (s == "global_same_type") return DistractorFallback::GlobalSameType;
  throw std::invalid_argument("unknown distractor fallback '" + std::string(s) + "'");
}

void GenerationConfig::validate() const {
  if (n_options < 2) throw std::invalid_argument("n_options must be at least 2");
}

InsufficientDistractors::InsufficientDistractors(const Triplet& t, std::size_t available,
                                                 std::size_t needed)
    : std::runtime_error("only " + std::to_string(available) + " sound distractor(s) for (" +
                         t.subject + ", " + t.relation + "), need " + std::to_string(needed)) {}

CandidatePool::CandidatePool(std::vector<std::string> items) {
  std::unordered_set<std::string> seen;
  items_.reserve(items.size());
  for (auto& s : items) {
    if (seen.insert(s).second) items_.push_back(std::move(s));
  }
  for (const auto& s : items_) index_.insert(s);
}

std::uint64_t item_seed(std::uint64_t global_seed, const Triplet& t) {
  return hash_fields({"item", std::to_string(global_seed), t.subject, t.relation, t.object});
}

std::string item_id(std::uint64_t global_seed, const Triplet& t) {
  return hex64(hash_fields({t.subject, t.relation, t.object, std::to_string(global_seed)}));
}

std::vector<std::string> select_distractors(const KnowledgeGraph& g, const CandidatePool& pool,
                                            const Triplet& t, std::size_t count,
                                            std::uint64_t seed) {
  const auto& truths = g.objects_of(t.subject, t.relation);
  std::size_t excluded = 0;
  for (const auto& o : truths) excluded += pool.contains(o) ? 1 : 0;
  if (!truths.count(t.object) && pool.contains(t.object)) ++excluded;
  const std::size_t available = pool.size() - excluded;
  if (available < count) throw InsufficientDistractors(t, available, count);

  SeededRng rng(seed);
  std::vector<std::string> chosen;
  chosen.reserve(count);
  const auto& items = pool.items();
  while (chosen.size() < count) {
    const auto& cand = items[rng.below(items.size())];
    if (cand == t.object || truths.count(cand)) continue;
    if (std::find(chosen.begin(), chosen.end(), cand) != chosen.end()) continue;
    chosen.push_back(cand);
  }
  return chosen;
}

std::vector<std::string> select_distractors(const KnowledgeGraph& g, const Cluster& c,
                                            const Triplet& t, std::size_t count,
                                            std::uint64_t seed) {
  if (t.relation != c.relation) throw std::invalid_argument("triplet is not in the cluster");
  CandidatePool pool(cluster_objects(c));
  return select_distractors(g, pool, t, count, seed);
}

QAItem build_qa(const Template& t, const Triplet& triplet,
                const std::vector<std::string>& distractors, std::uint64_t seed, std::string id) {
  QAItem item;
  item.id = std::move(id);
  item.question = instantiate(t, triplet.subject);
  item.relation = triplet.relation;
  item.source = triplet;
  item.template_provenance = t.provenance;
  item.options.reserve(distractors.size() + 1);
  item.options.push_back(triplet.object);
  for (const auto& d : distractors) {
    if (std::find(item.options.begin(), item.options.end(), d) != item.options.end()) {
      throw std::invalid_argument("distractors must be distinct and differ from the answer");
    }
    item.options.push_back(d);
  }
  SeededRng rng(hash_fields({"shuffle", std::to_string(seed)}));
  rng.shuffle(std::span<std::string>(item.options));
  item.answer_index = static_cast<std::size_t>(
      std::find(item.options.begin(), item.options.end(), triplet.object) - item.options.begin());
  return item;
}

nlohmann::ordered_json GenerationReport::to_json() const {
  nlohmann::ordered_json j;
  j["triplet_count"] = triplet_count;
  j["emitted"] = emitted;
  j["skipped"] = skipped;
  auto per = nlohmann::ordered_json::object();
  for (const auto& [rel, c] : per_relation) per[rel] = {{"emitted", c.emitted}, {"skipped", c.skipped}};
  j["per_relation"] = per;
  return j;
}

GenerationReport generate_dataset(const KnowledgeGraph& g, const std::vector<Cluster>& clusters,
                                  const std::vector<Template>& templates,
                                  const GenerationConfig& cfg, const TyperConfig& typer,
                                  const std::function<void(const QAItem&)>& sink) {
  cfg.validate();
  std::unordered_map<std::string_view, const Template*> by_rel;
  for (const auto& t : templates) by_rel[t.relation] = &t;

  std::map<EntityType, std::unique_ptr<CandidatePool>> global_pools;
  auto global_pool = [&](EntityType type) -> const CandidatePool& {
    auto& slot = global_pools[type];
    if (!slot) {
      std::vector<std::string> items;
      for (const auto& e : g.entities()) {
        if (typer.type_of(e) == type) items.push_back(e);
      }
      slot = std::make_unique<CandidatePool>(std::move(items));
    }
    return *slot;
  };

  const std::size_t need = cfg.n_options - 1;
  GenerationReport report;
  for (const auto& c : clusters) {
    auto it = by_rel.find(c.relation);
    if (it == by_rel.end()) throw std::runtime_error("no template for relation '" + c.relation + "'");
    const Template& tmpl = *it->second;
    auto& counts = report.per_relation[c.relation];
    CandidatePool pool(cluster_objects(c));

    for (const auto& t : c.members) {
      ++report.triplet_count;
      const auto seed = item_seed(cfg.seed, t);
      std::vector<std::string> distractors;
      try {
        distractors = select_distractors(g, pool, t, need, seed);
      } catch (const InsufficientDistractors& e) {
        bool recovered = false;
        if (cfg.distractor_fallback == DistractorFallback::GlobalSameType) {
          auto type = c.dominant_type ? *c.dominant_type : dominant_object_type(c, typer);
          try {
            distractors = select_distractors(g, global_pool(type), t, need, seed);
            recovered = true;
          } catch (const InsufficientDistractors&) {
          }
        }
        if (!recovered) {
          spdlog::debug("skipping item: {}", e.what());
          ++counts.skipped;
          ++report.skipped;
          continue;
        }
      }
      sink(build_qa(tmpl, t, distractors, seed, item_id(cfg.seed, t)));
      ++counts.emitted;
      ++report.emitted;
    }
  }
  return report;
}

std::vector<QAItem> generate_dataset(const KnowledgeGraph& g, const std::vector<Cluster>& clusters,
                                     const std::vector<Template>& templates,
                                     const GenerationConfig& cfg, const TyperConfig& typer,
                                     GenerationReport* report) {
  std::vector<QAItem> items;
  auto r = generate_dataset(g, clusters, templates, cfg, typer,
                            [&](const QAItem& item) { items.push_back(item); });
  if (report) *report = std::move(r);
  return items;
}

nlohmann::ordered_json to_json(const QAItem& item) {
  nlohmann::ordered_json j;
  j["id"] = item.id;
  j["question"] = item.question;
  j["options"] = item.options;
  j["answer_index"] = item.answer_index;
  j["relation"] = item.relation;
  j["template_provenance"] = to_string(item.template_provenance);
  j["source"] = {{"subject", item.source.subject},
                 {"relation", item.source.relation},
                 {"object", item.source.object}};
  return j;
}

QAItem qa_item_from_json(const nlohmann::json& j) {
  QAItem item;
  item.id = j.at("id").get<std::string>();
  item.question = j.at("question").get<std::string>();
  item.options = j.at("options").get<std::vector<std::string>>();
  item.answer_index = j.at("answer_index").get<std::size_t>();
  item.relation = j.at("relation").get<std::string>();
  item.template_provenance =
      parse_provenance(j.value("template_provenance", std::string("rule_built")));
  if (item.answer_index >= item.options.size()) {
    throw std::runtime_error("item " + item.id + ": answer_index out of range");
  }
  if (j.contains("source")) {
    const auto& s = j.at("source");
    item.source = {s.value("subject", std::string()), s.value("relation", item.relation),
                   s.value("object", item.options[item.answer_index])};
  } else {
    item.source = {"", item.relation, item.options[item.answer_index]};
  }
  return item;
}

}  // namespace kgquest
