// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kgquest/entity_typing.hpp"
#include "kgquest/kg_store.hpp"

namespace kgquest {

struct Cluster {
  std::string relation;
  std::vector<Triplet> members;  // sorted by (subject, object)
  std::optional<EntityType> dominant_type;
};

/// One cluster per relation, ordered by relation identifier.
std::vector<Cluster> cluster_by_relation(const KnowledgeGraph& g);

/// Distinct member objects in first-seen member order.
std::vector<std::string> cluster_objects(const Cluster& c);

/// Sets `dominant_type` on every cluster.
void assign_dominant_types(std::vector<Cluster>& clusters, const TyperConfig& cfg);

}  // namespace kgquest
