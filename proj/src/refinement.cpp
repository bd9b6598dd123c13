// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/refinement.hpp"

#include <algorithm>
#include <map>

#include <spdlog/spdlog.h>

#include "kgquest/parallel.hpp"
#include "kgquest/prompts.hpp"
#include "kgquest/seeded_random.hpp"
#include "kgquest/text_util.hpp"

namespace kgquest {

std::string_view to_string(RefinementStatus s) {
  return s == RefinementStatus::Refined ? "refined" : "fallback_kept_original";
}

Triplet select_representative(const Cluster& c, const TyperConfig& typer, std::uint64_t seed) {
  if (c.members.empty()) throw std::invalid_argument("cannot sample from an empty cluster");
  auto dominant = c.dominant_type ? *c.dominant_type : dominant_object_type(c, typer);
  std::vector<const Triplet*> candidates;
  for (const auto& m : c.members) {
    if (typer.type_of(m.object) == dominant) candidates.push_back(&m);
  }
  if (candidates.empty()) {
    spdlog::info("cluster {}: no member object typed {}, sampling from all members", c.relation,
                 to_string(dominant));
    for (const auto& m : c.members) candidates.push_back(&m);
  }
  SeededRng rng(hash_fields({"representative", std::to_string(seed), c.relation}));
  return *candidates[rng.below(candidates.size())];
}

namespace {

std::string splice(std::string_view text, std::size_t begin, std::size_t end) {
  std::string out(text.substr(0, begin));
  out.append(kSubjectPlaceholder);
  out.append(text.substr(end));
  return out;
}

}  // namespace

// First occurrence of `needle` that does not start or end inside a word.
static std::size_t find_bounded(std::string_view hay, std::string_view needle) {
  auto word = [](char c) { return is_word_byte(static_cast<unsigned char>(c)); };
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
    auto end = pos + needle.size();
    bool left_ok = pos == 0 || !word(needle.front()) || !word(hay[pos - 1]);
    bool right_ok = end == hay.size() || !word(needle.back()) || !word(hay[end]);
    if (left_ok && right_ok) return pos;
  }
  return std::string_view::npos;
}

std::string regeneralize(std::string_view refined_question, std::string_view subject) {
  if (subject.empty()) throw SubjectNotFound(subject);

  if (auto pos = find_bounded(refined_question, subject); pos != std::string_view::npos) {
    return splice(refined_question, pos, pos + subject.size());
  }

  // ASCII folding keeps byte lengths, so offsets carry over
  auto lq = ascii_lower(refined_question);
  auto ls = ascii_lower(subject);
  if (auto pos = find_bounded(lq, ls); pos != std::string::npos) {
    return splice(refined_question, pos, pos + subject.size());
  }

  auto sub_toks = word_tokens(ls);
  auto q_toks = word_tokens(lq);
  if (!sub_toks.empty() && q_toks.size() >= sub_toks.size()) {
    auto tok = [](const std::string& s, TokenSpan t) {
      return std::string_view(s).substr(t.begin, t.end - t.begin);
    };
    for (std::size_t i = 0; i + sub_toks.size() <= q_toks.size(); ++i) {
      bool match = true;
      for (std::size_t k = 0; k < sub_toks.size() && match; ++k) {
        match = tok(lq, q_toks[i + k]) == tok(ls, sub_toks[k]);
      }
      if (match) {
        return splice(refined_question, q_toks[i].begin, q_toks[i + sub_toks.size() - 1].end);
      }
    }
  }
  throw SubjectNotFound(subject);
}

std::vector<std::string> foreign_entities(std::string_view template_text,
                                          const std::set<std::string>& entities,
                                          std::string_view subject,
                                          std::string_view original_text) {
  std::vector<std::string> found;
  auto scan = [&](std::string_view part) {
    std::vector<std::size_t> starts, ends;
    for (auto t : word_tokens(part)) {
      starts.push_back(t.begin);
      ends.push_back(t.end);
    }
    // whitespace-delimited chunks catch surfaces with leading/trailing punctuation
    for (std::size_t i = 0; i < part.size(); ++i) {
      bool ws = part[i] == ' ';
      if (!ws && (i == 0 || part[i - 1] == ' ')) starts.push_back(i);
      if (!ws && (i + 1 == part.size() || part[i + 1] == ' ')) ends.push_back(i + 1);
    }
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    for (auto b : starts) {
      for (auto e : ends) {
        if (e <= b) continue;
        std::string cand(part.substr(b, e - b));
        if (word_tokens(cand).empty() || cand == subject) continue;
        if (original_text.find(cand) != std::string_view::npos) continue;
        if (entities.count(cand)) found.push_back(std::move(cand));
      }
    }
  };
  auto pos = template_text.find(kSubjectPlaceholder);
  if (pos == std::string_view::npos) {
    scan(template_text);
  } else {
    scan(template_text.substr(0, pos));
    scan(template_text.substr(pos + kSubjectPlaceholder.size()));
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

RefinementRecord refine_template(const Template& t, const Triplet& representative,
                                 LlmClient& client, const EndpointConfig& endpoint,
                                 const std::set<std::string>* entities) {
  if (t.provenance != Provenance::RuleBuilt) {
    throw std::logic_error("only rule-built templates are refined (" + t.relation + ")");
  }
  RefinementRecord rec;
  rec.relation = t.relation;
  rec.representative = representative;
  rec.raw_question = instantiate(t, representative.subject);
  rec.refined_template = t;

  auto fallback = [&](std::string why) {
    spdlog::warn("refinement of {} kept the original template: {}", t.relation, why);
    rec.status = RefinementStatus::FallbackKeptOriginal;
    rec.refined_template = t;
    rec.note = std::move(why);
    return rec;
  };

  try {
    auto resp = client.complete(
        endpoint.request(std::string(prompts::kRefineSystem), prompts::refine_user(rec.raw_question)),
        Purpose::Refine);
    rec.refined_question = trim(resp.text);
  } catch (const LlmError& e) {
    return fallback(std::string(to_string(e.kind())) + ": " + e.what());
  } catch (const std::exception& e) {
    return fallback(e.what());
  }

  auto& q = rec.refined_question;
  if (q.size() >= 2 && q.front() == '"' && q.back() == '"') q = trim(q.substr(1, q.size() - 2));
  if (q.find('\n') != std::string::npos) return fallback("completion spans several lines");

  std::string text;
  try {
    text = regeneralize(q, representative.subject);
  } catch (const SubjectNotFound& e) {
    return fallback(e.what());
  }
  if (!is_well_formed_template(text)) {
    return fallback("refined template must hold one placeholder and end with '?'");
  }
  if (entities) {
    auto extra = foreign_entities(text, *entities, representative.subject, t.text);
    if (!extra.empty()) return fallback("refined template mentions graph entity '" + extra.front() + "'");
  }

  rec.status = RefinementStatus::Refined;
  rec.refined_template.text = std::move(text);
  rec.refined_template.provenance = Provenance::LlmRefined;
  return rec;
}

std::vector<RefinementRecord> refine_all(const std::vector<Template>& templates,
                                         const std::vector<Cluster>& clusters,
                                         const TyperConfig& typer, LlmClient& client,
                                         const EndpointConfig& endpoint, std::uint64_t seed,
                                         const std::set<std::string>* entities) {
  std::map<std::string_view, const Cluster*> by_rel;
  for (const auto& c : clusters) by_rel[c.relation] = &c;

  std::vector<Triplet> reps(templates.size());
  for (std::size_t i = 0; i < templates.size(); ++i) {
    auto it = by_rel.find(templates[i].relation);
    if (it == by_rel.end()) {
      throw std::runtime_error("template relation '" + templates[i].relation +
                               "' has no cluster in the graph");
    }
    if (templates[i].provenance != Provenance::RuleBuilt) {
      throw std::logic_error("only rule-built templates are refined (" + templates[i].relation + ")");
    }
    reps[i] = select_representative(*it->second, typer, seed);
  }

  std::vector<RefinementRecord> out(templates.size());
  parallel_for(templates.size(), endpoint.concurrency, [&](std::size_t i) {
    out[i] = refine_template(templates[i], reps[i], client, endpoint, entities);
  });
  return out;
}

nlohmann::ordered_json to_json(const RefinementRecord& r) {
  auto j = to_json(r.refined_template);
  j["status"] = to_string(r.status);
  j["representative"] = {{"subject", r.representative.subject},
                         {"relation", r.representative.relation},
                         {"object", r.representative.object}};
  j["raw_question"] = r.raw_question;
  j["refined_question"] = r.refined_question;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace kgquest
