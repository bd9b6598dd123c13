// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "kgquest/clustering.hpp"
#include "kgquest/entity_typing.hpp"

using namespace kgquest;

namespace {

Cluster cluster_of(const std::vector<std::string>& objects, const std::string& rel = "x.y.z") {
  Cluster c;
  c.relation = rel;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    c.members.push_back({"s" + std::to_string(i), rel, objects[i]});
  }
  return c;
}

}  // namespace

TEST_SUITE("entity_typing") {

TEST_CASE("fixture gazetteer and rules") {
  auto typer = kgtest::fixture_typer();
  CHECK(type_of_entity("Émile Durkheim", typer) == EntityType::Person);
  CHECK(type_of_entity("1961", typer) == EntityType::Date);
  CHECK(type_of_entity("New York City", typer) == EntityType::Location);
  CHECK(type_of_entity("McNichols Sports Arena", typer) == EntityType::Location);
  CHECK(type_of_entity("1990s", typer) == EntityType::Date);
  CHECK(type_of_entity("Bohemian Rhapsody", typer) == EntityType::Work);
  CHECK(type_of_entity("42.5", typer) == EntityType::Number);
  CHECK(type_of_entity("2024-05-01", typer) == EntityType::Date);
}

TEST_CASE("built-in typer alone") {
  auto typer = TyperConfig::builtin();
  CHECK(type_of_entity("1961", typer) == EntityType::Date);
  // two capitalised tokens with no gazetteer hit
  CHECK(type_of_entity("Émile Durkheim", typer) == EntityType::Person);
  CHECK(type_of_entity("the lowercase thing", typer) == EntityType::Other);
  typer.capitalized_person_heuristic = false;
  CHECK(type_of_entity("Émile Durkheim", typer) == EntityType::Other);
  typer.default_type = EntityType::Work;
  CHECK(type_of_entity("zzz", typer) == EntityType::Work);
}

TEST_CASE("exact gazetteer conflicts go to the earlier type") {
  TyperConfig t;
  t.add_gazetteer_entry(EntityType::Work, "Paris");
  t.add_gazetteer_entry(EntityType::Location, "Paris");
  CHECK(t.type_of("Paris") == EntityType::Location);
}

TEST_CASE("entity type names") {
  for (auto t : kAllEntityTypes) CHECK(parse_entity_type(to_string(t)) == t);
  CHECK(parse_entity_type("person") == EntityType::Person);
  CHECK_THROWS_AS(parse_entity_type("Animal"), std::invalid_argument);
}

TEST_CASE("dominant type examples") {
  TyperConfig t;
  t.capitalized_person_heuristic = false;
  t.add_gazetteer_entry(EntityType::Person, "Ann");
  t.add_gazetteer_entry(EntityType::Person, "Bob");
  t.add_gazetteer_entry(EntityType::Location, "Oslo");
  CHECK(dominant_object_type(cluster_of({"Ann", "Bob", "Oslo"}), t) == EntityType::Person);
  CHECK(dominant_object_type(cluster_of({"Oslo", "Ann"}), t) == EntityType::Person);
  CHECK(dominant_object_type(cluster_of({"Oslo", "Oslo2", "q"}), t) == EntityType::Other);
}

TEST_CASE("histogram mode breaks ties by declaration order") {
  TypeHistogram h{};
  CHECK(histogram_mode(h) == EntityType::Person);
  h[static_cast<std::size_t>(EntityType::Work)] = 3;
  h[static_cast<std::size_t>(EntityType::Date)] = 3;
  CHECK(histogram_mode(h) == EntityType::Date);
}

TEST_CASE("histogram mode agrees with the brute-force oracle") {
  std::mt19937_64 eng(11);
  for (int round = 0; round < 500; ++round) {
    std::vector<EntityType> types(1 + eng() % 12);
    for (auto& t : types) t = kAllEntityTypes[eng() % 7];
    TypeHistogram h{};
    for (auto t : types) ++h[static_cast<std::size_t>(t)];
    REQUIRE(histogram_mode(h) == kgtest::oracle_mode(types));
  }
}

TEST_CASE("relation hints are opt-in") {
  auto t = TyperConfig::builtin();
  t.add_relation_hint(".date_of_birth", EntityType::Date);
  auto c = cluster_of({"Ann Lee", "Bob Ray"}, "people.person.date_of_birth");
  CHECK(dominant_object_type(c, t) == EntityType::Person);
  t.relation_hints_enabled = true;
  CHECK(dominant_object_type(c, t) == EntityType::Date);
}

TEST_CASE("config round trip") {
  auto t = kgtest::fixture_typer();
  t.add_relation_hint(".capital", EntityType::Location);
  t.default_type = EntityType::Organization;
  kgtest::TempDir dir;
  t.save(dir / "typer.json");
  auto back = TyperConfig::load(dir / "typer.json");
  CHECK(back.to_json() == t.to_json());
  for (const char* s : {"Émile Durkheim", "1961", "New York City", "Pong", "xyz", "Nintendo"}) {
    CHECK(back.type_of(s) == t.type_of(s));
  }
}

TEST_CASE("rules file parsing") {
  kgtest::TempDir dir;
  kgtest::write_file(dir / "rules.tsv", "# comment\n^Mount \tLocation\n\n");
  TyperConfig t;
  t.add_rules_file(dir / "rules.tsv");
  CHECK(t.type_of("Mount Everest") == EntityType::Location);
  kgtest::write_file(dir / "bad.tsv", "no tab here\n");
  CHECK_THROWS(t.add_rules_file(dir / "bad.tsv"));
}

}
