// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors
//
// In-memory knowledge graph: triple-file parsing plus the membership and
// (subject, relation) lookups used for distractor soundness.

#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgquest {

struct Triplet {
  std::string subject;
  std::string relation;
  std::string object;

  auto operator<=>(const Triplet&) const = default;
  bool operator==(const Triplet&) const = default;
};

class MalformedLine : public std::runtime_error {
 public:
  MalformedLine(std::size_t line_no, const std::string& why);
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

class EncodingError : public std::runtime_error {
 public:
  explicit EncodingError(std::size_t line_no);
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

enum class TripleFormat { Tsv, NTriples };
enum class ParseMode { Strict, Lenient };

TripleFormat parse_triple_format(std::string_view name);
std::string_view to_string(TripleFormat f);

/// Guesses the format from the file extension, ignoring a trailing `.gz`.
/// Anything that is not `.nt` is treated as TSV.
TripleFormat format_from_path(const std::filesystem::path& path);

struct GraphStats {
  std::size_t triplet_count = 0;
  std::size_t entity_count = 0;
  std::size_t relation_count = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t malformed_skipped = 0;

  bool operator==(const GraphStats&) const = default;
};

/// Parses `subject<TAB>relation<TAB>object`. Throws MalformedLine.
Triplet parse_tsv_line(std::string_view line, std::size_t line_no);

/// Parses one `<s> <r> <o> .` statement with IRIs, blank nodes, or quoted
/// literals. Returns false for blank and comment lines. Throws MalformedLine.
bool parse_ntriples_line(std::string_view line, std::size_t line_no, Triplet& out);

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  /// Inserts with set semantics. Returns false for a duplicate. Fields are
  /// trimmed; tabs and line breaks are escaped.
  bool add(Triplet t);

  bool contains(std::string_view s, std::string_view r, std::string_view o) const;
  bool contains(const Triplet& t) const { return contains(t.subject, t.relation, t.object); }

  /// Exact set of true objects for (s, r). Empty when unknown.
  const std::set<std::string>& objects_of(std::string_view s, std::string_view r) const;

  const std::vector<Triplet>& triplets() const noexcept { return triplets_; }
  const std::set<std::string>& entities() const noexcept { return entities_; }
  const std::set<std::string>& relations() const noexcept { return relations_; }
  std::size_t size() const noexcept { return triplets_.size(); }
  bool empty() const noexcept { return triplets_.empty(); }

  /// Rebuilds the (subject, relation) index from the triplet list and
  /// compares it with the live one.
  bool index_consistent() const;

 private:
  using SrIndex = std::unordered_map<std::string, std::set<std::string>>;
  static std::string sr_key(std::string_view s, std::string_view r);

  std::vector<Triplet> triplets_;
  std::set<std::string> entities_;
  std::set<std::string> relations_;
  SrIndex sr_index_;
};

struct LoadResult {
  KnowledgeGraph graph;
  GraphStats stats;
};

/// Reads a UTF-8 triple stream. In strict mode the first bad line throws;
/// in lenient mode bad lines are logged and counted in `malformed_skipped`.
LoadResult load_graph(std::istream& in, TripleFormat format, ParseMode mode = ParseMode::Strict);

/// Like load_graph, transparently inflating `*.gz` files.
LoadResult load_graph_file(const std::filesystem::path& path, TripleFormat format,
                           ParseMode mode = ParseMode::Strict);

GraphStats compute_stats(const KnowledgeGraph& g, std::size_t duplicates,
                         std::size_t malformed);

}  // namespace kgquest
