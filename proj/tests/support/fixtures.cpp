// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kgquest/seeded_random.hpp"

namespace kgtest {

using kgquest::EntityType;
using kgquest::JudgeLabel;
using kgquest::KnowledgeGraph;
using kgquest::Triplet;

fs::path data_dir() { return fs::path(KGQUEST_DATA_DIR); }
fs::path fixture_path(const std::string& name) { return data_dir() / "fixtures" / name; }
fs::path cli_path() { return fs::path(KGQUEST_CLI_PATH); }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (int i = 0; i < 100; ++i) {
    auto p = fs::temp_directory_path() /
             (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

KnowledgeGraph load_kg60() {
  return kgquest::load_graph_file(fixture_path("kg60.tsv"), kgquest::TripleFormat::Tsv).graph;
}

kgquest::TyperSettings fixture_typer_settings() {
  kgquest::TyperSettings s;
  const auto typer = data_dir() / "typer";
  s.gazetteers[EntityType::Person] = {typer / "person_given_names.txt"};
  s.gazetteers[EntityType::Location] = {typer / "locations.txt"};
  s.gazetteers[EntityType::Organization] = {typer / "organizations.txt"};
  s.gazetteers[EntityType::Work] = {typer / "works.txt"};
  s.rules_files = {typer / "rules.tsv"};
  return s;
}

kgquest::TyperConfig fixture_typer() {
  kgquest::RunConfig cfg;
  cfg.typer = fixture_typer_settings();
  return cfg.build_typer();
}

KnowledgeGraph random_graph(const RandomGraphSpec& spec) {
  // Raw engine output is fully specified by the standard; only distributions
  // are not, so draws are reduced by hand.
  std::mt19937_64 eng(spec.seed);
  auto draw = [&](std::size_t n) { return static_cast<std::size_t>(eng() % n); };
  auto entity = [](std::size_t i) { return "Entity " + std::to_string(i); };

  std::vector<std::vector<std::string>> object_pools(spec.relations);
  for (auto& pool : object_pools) {
    while (pool.size() < spec.objects_per_relation) {
      auto e = entity(draw(spec.entities));
      if (std::find(pool.begin(), pool.end(), e) == pool.end()) pool.push_back(e);
    }
  }

  KnowledgeGraph g;
  std::size_t guard = 0;
  while (g.size() < spec.triplets) {
    if (++guard > spec.triplets * 100) throw std::runtime_error("random_graph: spec too tight");
    const auto r = draw(spec.relations);
    // Squaring a uniform draw biases towards small subject indexes.
    const auto u = draw(spec.subjects_per_relation);
    const auto s = (u * u) / spec.subjects_per_relation;
    const auto& pool = object_pools[r];
    g.add({entity(1000 + r * spec.subjects_per_relation + s),
           "test.rel" + std::to_string(r) + ".prop_" + std::to_string(r), pool[draw(pool.size())]});
  }
  return g;
}

KnowledgeGraph uniform_graph(std::size_t relations, std::size_t per_relation) {
  KnowledgeGraph g;
  for (std::size_t r = 0; r < relations; ++r) {
    const auto rel = "test.domain_" + std::to_string(r) + ".attribute_" + std::to_string(r);
    for (std::size_t i = 0; i < per_relation; ++i) {
      g.add({"Subject " + std::to_string(r) + "-" + std::to_string(i), rel,
             "Value " + std::to_string(r) + "-" + std::to_string(i)});
    }
  }
  return g;
}

void write_tsv(const KnowledgeGraph& g, const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  for (const auto& t : g.triplets()) out << t.subject << '\t' << t.relation << '\t' << t.object << '\n';
}

kgquest::RunConfig mock_run_config(const fs::path& input, const fs::path& output_dir,
                                   std::uint64_t seed, const std::string& judge_reply) {
  kgquest::RunConfig cfg;
  cfg.input = input;
  cfg.output_dir = output_dir;
  cfg.seed = seed;
  cfg.typer = fixture_typer_settings();

  cfg.refine.model = "mock-refiner";
  cfg.refine.mock.mode = kgquest::MockSpec::Mode::Identity;

  cfg.direct.model = "mock-direct";
  cfg.direct.mock.mode = kgquest::MockSpec::Mode::Fixed;
  cfg.direct.mock.fixed_text = "Which entity completes this fact?";

  for (const char* name : {"mock-judge-a", "mock-judge-b", "mock-judge-c"}) {
    kgquest::EndpointConfig judge;
    judge.model = name;
    judge.mock.mode = kgquest::MockSpec::Mode::Fixed;
    judge.mock.fixed_text = judge_reply;
    cfg.judges.push_back(judge);
  }
  return cfg;
}

std::vector<std::string> oracle_cluster_pool(const std::vector<Triplet>& all, const std::string& r) {
  std::vector<Triplet> members;
  for (const auto& t : all) {
    if (t.relation == r) members.push_back(t);
  }
  std::sort(members.begin(), members.end(), [](const Triplet& a, const Triplet& b) {
    return a.subject != b.subject ? a.subject < b.subject : a.object < b.object;
  });
  std::vector<std::string> pool;
  for (const auto& m : members) {
    if (std::find(pool.begin(), pool.end(), m.object) == pool.end()) pool.push_back(m.object);
  }
  return pool;
}

namespace {

bool is_true_object(const std::vector<Triplet>& all, const Triplet& t, const std::string& o) {
  for (const auto& x : all) {
    if (x.subject == t.subject && x.relation == t.relation && x.object == o) return true;
  }
  return o == t.object;
}

}  // namespace

std::optional<std::vector<std::string>> oracle_distractors(const std::vector<Triplet>& all,
                                                           const std::vector<std::string>& pool,
                                                           const Triplet& t, std::size_t count,
                                                           std::uint64_t seed) {
  std::size_t sound = 0;
  for (const auto& o : pool) sound += is_true_object(all, t, o) ? 0 : 1;
  if (sound < count) return std::nullopt;

  kgquest::SeededRng rng(seed);
  std::vector<std::string> chosen;
  while (chosen.size() < count) {
    const auto& cand = pool[rng.below(pool.size())];
    if (is_true_object(all, t, cand)) continue;
    bool dup = false;
    for (const auto& c : chosen) dup = dup || c == cand;
    if (!dup) chosen.push_back(cand);
  }
  return chosen;
}

EntityType oracle_mode(const std::vector<EntityType>& types) {
  const std::array<EntityType, 7> order = {EntityType::Person, EntityType::Location,
                                           EntityType::Organization, EntityType::Date,
                                           EntityType::Number, EntityType::Work, EntityType::Other};
  EntityType best = order[0];
  long best_count = -1;
  for (auto candidate : order) {
    long n = std::count(types.begin(), types.end(), candidate);
    if (n > best_count) {
      best = candidate;
      best_count = n;
    }
  }
  return best;
}

JudgeLabel oracle_vote(const std::array<JudgeLabel, 3>& labels) {
  for (auto l : labels) {
    if (std::count(labels.begin(), labels.end(), l) >= 2) return l;
  }
  // Most severe first.
  const std::array<JudgeLabel, 4> precedence = {JudgeLabel::SyntaxError, JudgeLabel::GrammarError,
                                                JudgeLabel::FormattingError, JudgeLabel::Correct};
  for (auto p : precedence) {
    if (std::find(labels.begin(), labels.end(), p) != labels.end()) return p;
  }
  return JudgeLabel::Correct;
}

}  // namespace kgtest
