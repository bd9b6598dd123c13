// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors
//
// Shared test fixtures and brute-force oracles. Oracles deliberately avoid
// the library's indexes and containers so they can disagree with it.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgquest/entity_typing.hpp"
#include "kgquest/jury_eval.hpp"
#include "kgquest/kg_store.hpp"
#include "kgquest/run_config.hpp"

namespace kgtest {

namespace fs = std::filesystem;

fs::path data_dir();
fs::path fixture_path(const std::string& name);
fs::path cli_path();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "kgquest");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string read_file(const fs::path& p);
void write_file(const fs::path& p, const std::string& content);
std::vector<std::string> read_lines(const fs::path& p);

kgquest::KnowledgeGraph load_kg60();

/// Built-in rules plus the bundled gazetteers and rules file.
kgquest::TyperConfig fixture_typer();
kgquest::TyperSettings fixture_typer_settings();

struct RandomGraphSpec {
  std::size_t triplets = 1000;
  std::size_t relations = 20;
  std::size_t entities = 300;
  std::size_t objects_per_relation = 12;
  std::size_t subjects_per_relation = 40;
  std::uint64_t seed = 1;
};

/// Skewed random graph: low-index subjects collect many objects, so some
/// (subject, relation) pairs exhaust their cluster's object pool.
kgquest::KnowledgeGraph random_graph(const RandomGraphSpec& spec);

/// `relations` relations with `per_relation` triplets each; subjects and
/// objects are distinct within a relation.
kgquest::KnowledgeGraph uniform_graph(std::size_t relations, std::size_t per_relation);

void write_tsv(const kgquest::KnowledgeGraph& g, const fs::path& p);

/// Config with mock endpoints: identity refiner, fixed direct generator and
/// three distinct judges answering `judge_reply`.
kgquest::RunConfig mock_run_config(const fs::path& input, const fs::path& output_dir,
                                   std::uint64_t seed, const std::string& judge_reply = "correct");

// ---- oracles ----

/// Distinct objects of relation `r`, members ordered by (subject, object),
/// computed by sorting a plain copy of the triplet list.
std::vector<std::string> oracle_cluster_pool(const std::vector<kgquest::Triplet>& all,
                                             const std::string& r);

/// Replays the seeded rejection sampler with list scans for every
/// membership test. nullopt when fewer than `count` sound candidates exist.
std::optional<std::vector<std::string>> oracle_distractors(
    const std::vector<kgquest::Triplet>& all, const std::vector<std::string>& pool,
    const kgquest::Triplet& t, std::size_t count, std::uint64_t seed);

/// Count every type, then scan in declaration order keeping the first maximum.
kgquest::EntityType oracle_mode(const std::vector<kgquest::EntityType>& types);

/// Mode of three labels when some label appears at least twice, otherwise
/// the label with the highest rank in the fixed precedence list.
kgquest::JudgeLabel oracle_vote(const std::array<kgquest::JudgeLabel, 3>& labels);

}  // namespace kgtest
