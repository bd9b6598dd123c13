// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/clustering.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace kgquest {

std::vector<Cluster> cluster_by_relation(const KnowledgeGraph& g) {
  std::map<std::string, std::vector<Triplet>> by_rel;
  for (const auto& t : g.triplets()) by_rel[t.relation].push_back(t);

  std::vector<Cluster> out;
  out.reserve(by_rel.size());
  for (auto& [rel, members] : by_rel) {
    std::sort(members.begin(), members.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.subject, a.object) < std::tie(b.subject, b.object);
    });
    out.push_back(Cluster{rel, std::move(members), std::nullopt});
  }
  return out;
}

std::vector<std::string> cluster_objects(const Cluster& c) {
  std::vector<std::string> out;
  std::unordered_set<std::string_view> seen;
  for (const auto& m : c.members) {
    if (seen.insert(m.object).second) out.push_back(m.object);
  }
  return out;
}

void assign_dominant_types(std::vector<Cluster>& clusters, const TyperConfig& cfg) {
  for (auto& c : clusters) c.dominant_type = dominant_object_type(c, cfg);
}

}  // namespace kgquest
