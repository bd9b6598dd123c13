// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kgquest/clustering.hpp"
#include "kgquest/jury_eval.hpp"
#include "kgquest/parallel.hpp"
#include "kgquest/prompts.hpp"
#include "kgquest/qa_builder.hpp"
#include "kgquest/refinement.hpp"
#include "kgquest/text_util.hpp"

namespace kgquest {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

template <typename Json>
void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_view(line).empty()) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

LoadResult load_input(const RunConfig& cfg) {
  auto res = load_graph_file(cfg.input, cfg.input_format(), cfg.parse_mode);
  spdlog::info("loaded {} triplets over {} relations from {}", res.stats.triplet_count,
               res.stats.relation_count, cfg.input.string());
  return res;
}

nlohmann::ordered_json stats_json(const GraphStats& s) {
  return {{"triplet_count", s.triplet_count},
          {"entity_count", s.entity_count},
          {"relation_count", s.relation_count},
          {"duplicates_dropped", s.duplicates_dropped},
          {"malformed_skipped", s.malformed_skipped}};
}

nlohmann::ordered_json base_meta(const RunConfig& cfg, Stage stage) {
  nlohmann::ordered_json m;
  m["tool"] = "kgquest";
  m["version"] = kVersion;
  m["stage"] = stage_name(stage);
  m["config_hash"] = cfg.hash();
  m["config"] = cfg.to_json();
  if (cfg.seed) m["seed"] = *cfg.seed;
  auto hashes = nlohmann::ordered_json::object();
  for (const auto& [name, h] : prompts::catalog_hashes()) hashes[name] = h;
  m["prompt_hashes"] = hashes;
  return m;
}

/// Clusters with dominant types taken from the template file, so later stages
/// agree with what build-templates decided.
std::vector<Cluster> clusters_for_templates(const KnowledgeGraph& g,
                                            const std::vector<Template>& templates) {
  std::map<std::string, const Template*> by_rel;
  for (const auto& t : templates) {
    if (!by_rel.emplace(t.relation, &t).second) {
      throw DataError("two templates for relation '" + t.relation + "'");
    }
  }
  auto clusters = cluster_by_relation(g);
  for (auto& c : clusters) {
    auto it = by_rel.find(c.relation);
    if (it == by_rel.end()) throw DataError("no template for relation '" + c.relation + "'");
    c.dominant_type = it->second->dominant_type;
  }
  return clusters;
}

struct LlmRun {
  std::shared_ptr<CallLedger> ledger = std::make_shared<CallLedger>();
  std::shared_ptr<Transcript> transcript = std::make_shared<Transcript>();

  std::shared_ptr<LlmClient> client(const EndpointConfig& e) const {
    return std::make_shared<LlmClient>(e.make_backend(), ledger, e.retry_policy(), e.concurrency,
                                       transcript);
  }
  void dump(const fs::path& dir, std::string_view stage) const {
    write_json(dir / fmt::format("{}.ledger.json", stage), ledger->to_json());
    transcript->write_jsonl(dir / fmt::format("{}.transcript.jsonl", stage));
  }
};

}  // namespace

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::Stats: return "stats";
    case Stage::BuildTemplates: return "build-templates";
    case Stage::Refine: return "refine";
    case Stage::Generate: return "generate";
    case Stage::DirectBaseline: return "direct-baseline";
    case Stage::Evaluate: return "evaluate";
  }
  return "stats";
}

std::vector<Template> read_templates(const fs::path& path) {
  std::vector<Template> out;
  for (const auto& row : read_jsonl(path)) {
    Template t;
    try {
      t = template_from_json(row);
    } catch (const std::exception& e) {
      throw DataError(path.string() + ": bad template record: " + e.what());
    }
    if (!is_well_formed_template(t.text)) {
      throw DataError(path.string() + ": template for '" + t.relation +
                      "' needs exactly one <SUBJECT> and a trailing '?'");
    }
    out.push_back(std::move(t));
  }
  return out;
}

void write_templates(const fs::path& path, const std::vector<Template>& templates) {
  auto out = open_out(path);
  for (const auto& t : templates) out << to_json(t).dump() << '\n';
}

std::vector<QAItem> read_dataset(const fs::path& path) {
  std::vector<QAItem> items;
  for (const auto& row : read_jsonl(path)) {
    try {
      items.push_back(qa_item_from_json(row));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ": bad item record: " + e.what());
    }
  }
  return items;
}

void cmd_stats(const RunConfig& cfg, std::ostream& out) {
  auto [graph, stats] = load_input(cfg);
  auto clusters = cluster_by_relation(graph);

  out << fmt::format("triplets:           {}\n", stats.triplet_count);
  out << fmt::format("entities:           {}\n", stats.entity_count);
  out << fmt::format("relations:          {}\n", stats.relation_count);
  out << fmt::format("duplicates dropped: {}\n", stats.duplicates_dropped);
  out << fmt::format("malformed skipped:  {}\n\n", stats.malformed_skipped);

  std::size_t width = 8;
  for (const auto& c : clusters) width = std::max(width, c.relation.size());
  out << fmt::format("{:<{}}  {:>9}  {:>9}  {:>9}\n", "relation", width, "triplets", "subjects",
                     "objects");
  auto rows = nlohmann::ordered_json::array();
  for (const auto& c : clusters) {
    std::set<std::string_view> subjects;
    for (const auto& m : c.members) subjects.insert(m.subject);
    auto objects = cluster_objects(c).size();
    out << fmt::format("{:<{}}  {:>9}  {:>9}  {:>9}\n", c.relation, width, c.members.size(),
                       subjects.size(), objects);
    rows.push_back({{"relation", c.relation},
                    {"triplets", c.members.size()},
                    {"subjects", subjects.size()},
                    {"objects", objects}});
  }

  auto meta = base_meta(cfg, Stage::Stats);
  meta["graph_stats"] = stats_json(stats);
  meta["clusters"] = rows;
  write_json(cfg.output_dir / "stats.meta.json", meta);
}

void cmd_build_templates(const RunConfig& cfg, std::ostream& out) {
  auto [graph, stats] = load_input(cfg);
  auto typer = cfg.build_typer();
  auto clusters = cluster_by_relation(graph);

  std::vector<Template> templates;
  auto audit = nlohmann::ordered_json::array();
  VerbalizeOptions vopts{cfg.singularize};
  for (auto& c : clusters) {
    auto hist = object_type_histogram(c, typer);
    c.dominant_type = dominant_object_type(c, typer);
    auto top = hist[static_cast<std::size_t>(*c.dominant_type)];
    double share = static_cast<double>(top) / static_cast<double>(c.members.size());
    spdlog::info("{}: dominant type {} ({}/{} objects)", c.relation, to_string(*c.dominant_type),
                 top, c.members.size());
    auto h = nlohmann::ordered_json::object();
    for (auto t : kAllEntityTypes) {
      if (auto n = hist[static_cast<std::size_t>(t)]) h[std::string(to_string(t))] = n;
    }
    audit.push_back({{"relation", c.relation},
                     {"dominant_type", to_string(*c.dominant_type)},
                     {"share", share},
                     {"histogram", h}});
    templates.push_back(build_template(c, cfg.prefix_map, vopts));
  }

  auto path = cfg.rule_templates_file();
  write_templates(path, templates);
  auto meta = base_meta(cfg, Stage::BuildTemplates);
  meta["graph_stats"] = stats_json(stats);
  meta["template_count"] = templates.size();
  meta["type_histograms"] = audit;
  write_json(cfg.output_dir / "build-templates.meta.json", meta);
  out << fmt::format("wrote {} templates to {}\n", templates.size(), path.string());
}

void cmd_refine(const RunConfig& cfg, std::ostream& out) {
  auto [graph, stats] = load_input(cfg);
  auto typer = cfg.build_typer();
  auto templates = read_templates(cfg.rule_templates_file());
  auto clusters = clusters_for_templates(graph, templates);

  LlmRun run;
  auto client = run.client(cfg.refine);
  auto records = refine_all(templates, clusters, typer, *client, cfg.refine, cfg.seed.value_or(0),
                            &graph.entities());

  auto path = cfg.refined_templates_file();
  {
    auto f = open_out(path);
    for (const auto& r : records) f << to_json(r).dump() << '\n';
  }
  std::size_t refined = 0;
  for (const auto& r : records) refined += r.status == RefinementStatus::Refined ? 1 : 0;

  run.dump(cfg.output_dir, "refine");
  auto meta = base_meta(cfg, Stage::Refine);
  meta["graph_stats"] = stats_json(stats);
  meta["template_count"] = records.size();
  meta["refined"] = refined;
  meta["fallback_kept_original"] = records.size() - refined;
  meta["ledger"] = run.ledger->to_json();
  write_json(cfg.output_dir / "refine.meta.json", meta);
  out << fmt::format("refine calls: {} (refined {}, kept original {})\n",
                     run.ledger->calls(Purpose::Refine), refined, records.size() - refined);
  out << fmt::format("wrote {}\n", path.string());
}

void cmd_generate(const RunConfig& cfg, std::ostream& out) {
  auto [graph, stats] = load_input(cfg);
  auto typer = cfg.build_typer();
  auto tpath = cfg.use_refined ? cfg.refined_templates_file() : cfg.rule_templates_file();
  auto templates = read_templates(tpath);
  auto clusters = clusters_for_templates(graph, templates);

  auto path = cfg.dataset_file();
  auto f = open_out(path);
  auto report = generate_dataset(graph, clusters, templates, cfg.generation(), typer,
                                 [&](const QAItem& item) { f << to_json(item).dump() << '\n'; });
  f.close();

  auto meta = base_meta(cfg, Stage::Generate);
  meta["graph_stats"] = stats_json(stats);
  meta["templates"] = tpath.string();
  meta["report"] = report.to_json();
  write_json(cfg.output_dir / "generate.meta.json", meta);
  out << fmt::format("emitted {} items, skipped {} (of {} triplets)\n", report.emitted,
                     report.skipped, report.triplet_count);
  out << fmt::format("wrote {}\n", path.string());
}

void cmd_direct_baseline(const RunConfig& cfg, std::ostream& out) {
  auto [graph, stats] = load_input(cfg);
  auto clusters = cluster_by_relation(graph);
  const auto gen = cfg.generation();

  std::vector<const Triplet*> order;
  std::vector<const Cluster*> owner;
  for (const auto& c : clusters) {
    for (const auto& m : c.members) {
      order.push_back(&m);
      owner.push_back(&c);
    }
  }

  LlmRun run;
  auto client = run.client(cfg.direct);
  std::vector<std::string> questions(order.size());
  std::vector<std::string> errors(order.size());
  std::vector<std::exception_ptr> fatal(order.size());
  std::atomic<bool> abort{false};
  parallel_for(order.size(), cfg.direct.concurrency, [&](std::size_t i) {
    if (abort.load()) return;
    try {
      questions[i] = direct_generate_question(*order[i], *client, cfg.direct);
    } catch (const LlmError& e) {
      if (e.kind() == LlmError::Kind::MalformedCompletion ||
          e.kind() == LlmError::Kind::EmptyCompletion) {
        errors[i] = fmt::format("{}: {}", to_string(e.kind()), e.what());
      } else {
        fatal[i] = std::current_exception();
        abort.store(true);
      }
    } catch (...) {
      fatal[i] = std::current_exception();
      abort.store(true);
    }
  });
  for (const auto& e : fatal) {
    if (e) std::rethrow_exception(e);
  }

  auto path = cfg.output_dir / "direct.jsonl";
  auto f = open_out(path);
  std::map<const Cluster*, CandidatePool> pools;
  std::size_t malformed = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& t = *order[i];
    nlohmann::ordered_json j;
    j["id"] = item_id(gen.seed, t);
    if (errors[i].empty()) {
      j["question"] = questions[i];
    } else {
      j["question"] = nullptr;
      j["error"] = errors[i];
      ++malformed;
    }
    auto& pool = pools[owner[i]];
    if (pool.size() == 0) pool = CandidatePool(cluster_objects(*owner[i]));
    try {
      auto seed = item_seed(gen.seed, t);
      auto d = select_distractors(graph, pool, t, gen.n_options - 1, seed);
      Template passthrough{t.relation, std::string(kSubjectPlaceholder) + "?", "", EntityType::Other,
                           Provenance::RuleBuilt};
      auto item = build_qa(passthrough, t, d, seed);
      j["options"] = item.options;
      j["answer_index"] = item.answer_index;
    } catch (const InsufficientDistractors&) {
      j["options"] = nlohmann::ordered_json::array();
    }
    j["relation"] = t.relation;
    j["source"] = {{"subject", t.subject}, {"relation", t.relation}, {"object", t.object}};
    f << j.dump() << '\n';
  }
  f.close();

  run.dump(cfg.output_dir, "direct");
  auto meta = base_meta(cfg, Stage::DirectBaseline);
  meta["graph_stats"] = stats_json(stats);
  meta["questions"] = order.size() - malformed;
  meta["malformed"] = malformed;
  meta["ledger"] = run.ledger->to_json();
  write_json(cfg.output_dir / "direct-baseline.meta.json", meta);
  out << fmt::format("direct generation calls: {} ({} malformed)\n",
                     run.ledger->calls(Purpose::DirectGenerate), malformed);
  out << fmt::format("wrote {}\n", path.string());
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  auto items = read_dataset(cfg.dataset_file());
  auto sample = sample_for_jury(items, *cfg.seed);

  LlmRun run;
  std::vector<Judge> judges;
  for (const auto& e : cfg.judges) judges.push_back({e, run.client(e)});
  try {
    check_jury(judges, cfg.refine.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto result = evaluate(sample, judges, *cfg.seed);

  {
    auto f = open_out(cfg.output_dir / "verdicts.jsonl");
    for (const auto& v : result.verdicts) f << to_json(v).dump() << '\n';
  }
  write_json(cfg.output_dir / "eval_report.json", result.report.to_json());
  auto table = result.report.distribution_table();
  {
    auto f = open_out(cfg.output_dir / "eval_table.txt");
    f << table;
  }
  run.dump(cfg.output_dir, "evaluate");
  auto meta = base_meta(cfg, Stage::Evaluate);
  meta["dataset"] = cfg.dataset_file().string();
  meta["report"] = result.report.to_json();
  meta["ledger"] = run.ledger->to_json();
  write_json(cfg.output_dir / "evaluate.meta.json", meta);
  out << table;
}

int run_stage(Stage stage, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate(stage);
    switch (stage) {
      case Stage::Stats: cmd_stats(cfg, out); break;
      case Stage::BuildTemplates: cmd_build_templates(cfg, out); break;
      case Stage::Refine: cmd_refine(cfg, out); break;
      case Stage::Generate: cmd_generate(cfg, out); break;
      case Stage::DirectBaseline: cmd_direct_baseline(cfg, out); break;
      case Stage::Evaluate: cmd_evaluate(cfg, out); break;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LlmError& e) {
    err << "endpoint error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitEndpoint;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace kgquest
