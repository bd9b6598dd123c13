// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/jury_eval.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kgquest/parallel.hpp"
#include "kgquest/prompts.hpp"
#include "kgquest/seeded_random.hpp"
#include "kgquest/text_util.hpp"

namespace kgquest {

std::string_view to_string(JudgeLabel l) {
  switch (l) {
    case JudgeLabel::Correct: return "correct";
    case JudgeLabel::GrammarError: return "grammar_error";
    case JudgeLabel::FormattingError: return "formatting_error";
    case JudgeLabel::SyntaxError: return "syntax_error";
  }
  return "correct";
}

JudgeLabel parse_judge_label_name(std::string_view s) {
  for (auto l : kAllJudgeLabels) {
    if (to_string(l) == s) return l;
  }
  throw std::invalid_argument("unknown judge label '" + std::string(s) + "'");
}

int severity(JudgeLabel l) {
  switch (l) {
    case JudgeLabel::Correct: return 0;
    case JudgeLabel::FormattingError: return 1;
    case JudgeLabel::GrammarError: return 2;
    case JudgeLabel::SyntaxError: return 3;
  }
  return 0;
}

std::string_view to_string(Consensus c) {
  switch (c) {
    case Consensus::Unanimous: return "unanimous";
    case Consensus::Majority: return "majority";
    case Consensus::TieBroken: return "tie_broken";
  }
  return "unanimous";
}

std::pair<JudgeLabel, Consensus> majority_vote(const std::array<JudgeLabel, 3>& labels) {
  const auto [a, b, c] = labels;
  if (a == b && b == c) return {a, Consensus::Unanimous};
  if (a == b || a == c) return {a, Consensus::Majority};
  if (b == c) return {b, Consensus::Majority};
  auto worst = std::max({a, b, c}, [](JudgeLabel x, JudgeLabel y) { return severity(x) < severity(y); });
  return {worst, Consensus::TieBroken};
}

std::optional<JudgeLabel> parse_judge_label(std::string_view completion) {
  auto text = ascii_lower(completion);
  for (auto& ch : text) {
    if (ch == '_' || ch == '-') ch = ' ';
  }
  struct Keyword {
    std::string_view word;
    JudgeLabel label;
    bool prefix;  // matches the start of a longer word ("grammatical", "formatted")
  };
  static constexpr Keyword kKeywords[] = {
      {"syntax", JudgeLabel::SyntaxError, false},   {"syntactic", JudgeLabel::SyntaxError, true},
      {"grammar", JudgeLabel::GrammarError, false}, {"grammatical", JudgeLabel::GrammarError, true},
      {"format", JudgeLabel::FormattingError, true}, {"correct", JudgeLabel::Correct, false},
  };
  std::optional<JudgeLabel> best;
  std::size_t best_pos = std::string::npos;
  for (auto tok : word_tokens(text)) {
    auto word = std::string_view(text).substr(tok.begin, tok.end - tok.begin);
    for (const auto& k : kKeywords) {
      bool hit = k.prefix ? word.starts_with(k.word) : word == k.word;
      if (hit && tok.begin < best_pos) {
        best = k.label;
        best_pos = tok.begin;
      }
    }
    if (best) break;
  }
  return best;
}

JudgeLabel judge_question(const QAItem& item, const Judge& judge, JudgeStats* stats) {
  auto user = prompts::judge_user(item.relation, item.question, item.options);
  auto req = judge.endpoint.request(std::string(prompts::kJudgeSystem), user);
  auto resp = judge.client->complete(req, Purpose::Judge);
  if (auto l = parse_judge_label(resp.text)) return *l;

  if (stats) ++stats->reprompts;
  req.user += prompts::kJudgeReprompt;
  resp = judge.client->complete(req, Purpose::Judge);
  if (auto l = parse_judge_label(resp.text)) return *l;
  throw UnparseableVerdict(item.id, judge.endpoint.model);
}

std::vector<QAItem> sample_for_jury(const std::vector<QAItem>& items, std::uint64_t seed) {
  std::map<std::string, std::vector<const QAItem*>> by_rel;
  for (const auto& it : items) by_rel[it.relation].push_back(&it);
  std::vector<QAItem> out;
  out.reserve(by_rel.size());
  for (const auto& [rel, group] : by_rel) {
    SeededRng rng(hash_fields({"jury", std::to_string(seed), rel}));
    out.push_back(*group[rng.below(group.size())]);
  }
  return out;
}

void check_jury(const std::vector<Judge>& judges, std::string_view refine_model) {
  if (judges.size() != 3) {
    throw std::invalid_argument("the jury needs exactly 3 judges, got " + std::to_string(judges.size()));
  }
  std::set<std::string> models;
  for (const auto& j : judges) {
    if (!j.client) throw std::invalid_argument("judge " + j.endpoint.model + " has no client");
    if (j.endpoint.model == refine_model) {
      throw std::invalid_argument("judge model " + j.endpoint.model +
                                  " is also the refinement model");
    }
    if (!models.insert(j.endpoint.model).second) {
      throw std::invalid_argument("judge model " + j.endpoint.model + " appears twice");
    }
  }
}

EvalResult evaluate(const std::vector<QAItem>& sample, const std::vector<Judge>& judges,
                    std::uint64_t seed) {
  if (judges.size() != 3) throw std::invalid_argument("the jury needs exactly 3 judges");

  const std::size_t n_tasks = sample.size() * 3;
  std::vector<std::optional<JudgeLabel>> labels(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);
  std::vector<JudgeStats> stats(n_tasks);
  std::size_t cap = 1;
  for (const auto& j : judges) cap = std::max(cap, j.endpoint.concurrency);
  parallel_for(n_tasks, cap, [&](std::size_t i) {
    try {
      labels[i] = judge_question(sample[i / 3], judges[i % 3], &stats[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });

  // endpoint failures abort the run; unparseable replies only drop the item
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const UnparseableVerdict&) {
    }
  }

  EvalResult res;
  auto& rep = res.report;
  rep.seed = seed;
  rep.sampled = sample.size();
  for (const auto& s : stats) rep.reprompts += s.reprompts;
  for (auto l : kAllJudgeLabels) rep.label_counts[l] = 0;

  for (std::size_t i = 0; i < sample.size(); ++i) {
    bool complete = true;
    for (std::size_t k = 0; k < 3; ++k) complete = complete && labels[i * 3 + k].has_value();
    if (!complete) {
      spdlog::warn("item {} has an unparseable judge reply; excluded from the report", sample[i].id);
      rep.unparseable_items.push_back(sample[i].id);
      continue;
    }
    Verdict v;
    v.item_id = sample[i].id;
    std::array<JudgeLabel, 3> votes{};
    for (std::size_t k = 0; k < 3; ++k) {
      votes[k] = *labels[i * 3 + k];
      v.labels[k] = {judges[k].endpoint.model, votes[k]};
    }
    std::tie(v.final_label, v.consensus) = majority_vote(votes);
    ++rep.label_counts[v.final_label];
    ++rep.consensus_counts[v.consensus];
    for (const auto& [model, label] : v.labels) {
      auto& dist = rep.per_judge[model];
      if (dist.empty()) {
        for (auto l : kAllJudgeLabels) dist[l] = 0;
      }
      ++dist[label];
    }
    res.verdicts.push_back(std::move(v));
  }
  rep.sample_size = res.verdicts.size();
  return res;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["sampled"] = sampled;
  j["sample_size"] = sample_size;
  auto counts = nlohmann::ordered_json::object();
  for (const auto& [l, n] : label_counts) counts[std::string(to_string(l))] = n;
  j["label_counts"] = counts;
  auto judges = nlohmann::ordered_json::object();
  for (const auto& [model, dist] : per_judge) {
    auto d = nlohmann::ordered_json::object();
    for (const auto& [l, n] : dist) d[std::string(to_string(l))] = n;
    judges[model] = d;
  }
  j["per_judge"] = judges;
  auto cons = nlohmann::ordered_json::object();
  for (const auto& [c, n] : consensus_counts) cons[std::string(to_string(c))] = n;
  j["consensus"] = cons;
  j["reprompts"] = reprompts;
  j["unparseable_items"] = unparseable_items;
  return j;
}

std::string EvalReport::distribution_table() const {
  std::ostringstream out;
  auto pct = [&](std::size_t n) {
    return sample_size == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(sample_size);
  };
  auto row = [&](std::string_view name, const std::map<JudgeLabel, std::size_t>& dist) {
    out << fmt::format("{:<24}", name);
    for (auto l : {JudgeLabel::GrammarError, JudgeLabel::FormattingError, JudgeLabel::SyntaxError,
                   JudgeLabel::Correct}) {
      auto it = dist.find(l);
      std::size_t n = it == dist.end() ? 0 : it->second;
      out << fmt::format(" {:>6} ({:5.1f}%)", n, pct(n));
    }
    out << '\n';
  };
  out << fmt::format("{:<24} {:>15} {:>15} {:>15} {:>15}\n", "judge", "grammar", "formatting",
                     "syntax", "correct");
  for (const auto& [model, dist] : per_judge) row(model, dist);
  row("jury (majority)", label_counts);
  out << fmt::format("sample size: {}  seed: {}\n", sample_size, seed);
  return out.str();
}

nlohmann::ordered_json to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["id"] = v.item_id;
  auto labels = nlohmann::ordered_json::array();
  for (const auto& [model, l] : v.labels) labels.push_back({{"judge", model}, {"label", to_string(l)}});
  j["labels"] = labels;
  j["final"] = to_string(v.final_label);
  j["consensus"] = to_string(v.consensus);
  return j;
}

}  // namespace kgquest
