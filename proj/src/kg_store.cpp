// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/kg_store.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "kgquest/text_util.hpp"

namespace kgquest {

MalformedLine::MalformedLine(std::size_t line_no, const std::string& why)
    : std::runtime_error("malformed line " + std::to_string(line_no) + ": " + why),
      line_no_(line_no) {}

EncodingError::EncodingError(std::size_t line_no)
    : std::runtime_error("invalid UTF-8 on line " + std::to_string(line_no)), line_no_(line_no) {}

TripleFormat parse_triple_format(std::string_view name) {
  auto n = ascii_lower(name);
  if (n == "tsv") return TripleFormat::Tsv;
  if (n == "nt" || n == "ntriples" || n == "n-triples") return TripleFormat::NTriples;
  throw std::invalid_argument("unknown triple format '" + std::string(name) + "'");
}

std::string_view to_string(TripleFormat f) {
  return f == TripleFormat::Tsv ? "tsv" : "ntriples";
}

TripleFormat format_from_path(const std::filesystem::path& path) {
  auto p = path;
  if (ascii_lower(p.extension().string()) == ".gz") p = p.stem();
  return ascii_lower(p.extension().string()) == ".nt" ? TripleFormat::NTriples : TripleFormat::Tsv;
}

namespace {

std::string escape_controls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class NtCursor {
 public:
  NtCursor(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  // Returns the surface of the next term. `iri_only` restricts to <...>.
  std::string term(bool iri_only) {
    skip_ws();
    if (at_end()) fail("missing term");
    char c = peek();
    if (c == '<') return iri();
    if (iri_only) fail("predicate must be an IRI");
    if (c == '"') return literal();
    if (s_.substr(pos_, 2) == "_:") return blank();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  void finish() {
    skip_ws();
    if (at_end() || peek() != '.') fail("missing terminating '.'");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("trailing content after '.'");
  }

  [[noreturn]] void fail(const std::string& why) const { throw MalformedLine(line_no_, why); }

 private:
  std::string iri() {
    auto close = s_.find('>', pos_ + 1);
    if (close == std::string_view::npos) fail("unterminated IRI");
    std::string out(s_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return out;
  }

  std::string blank() {
    auto b = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }

  std::string literal() {
    std::string out;
    ++pos_;
    for (;;) {
      if (at_end()) fail("unterminated literal");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("dangling escape");
      char e = s_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        // control characters stay escaped so fields never hold raw tabs/newlines
        case 't': out += "\\t"; break;
        case 'n': out += "\\n"; break;
        case 'r': out += "\\r"; break;
        case 'b': out += "\\b"; break;
        case 'f': out += "\\f"; break;
        case 'u':
        case 'U': {
          std::size_t len = e == 'u' ? 4 : 8;
          if (pos_ + len > s_.size()) fail("short unicode escape");
          std::uint32_t cp = 0;
          for (std::size_t k = 0; k < len; ++k) {
            char h = s_[pos_ + k];
            cp <<= 4;
            if (h >= '0' && h <= '9') cp |= static_cast<std::uint32_t>(h - '0');
            else if (h >= 'a' && h <= 'f') cp |= static_cast<std::uint32_t>(h - 'a' + 10);
            else if (h >= 'A' && h <= 'F') cp |= static_cast<std::uint32_t>(h - 'A' + 10);
            else fail("bad hex digit in unicode escape");
          }
          if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid code point");
          pos_ += len;
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    // language tag or datatype is dropped; only the lexical form is the surface
    if (!at_end() && peek() == '@') {
      while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
    } else if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (at_end() || peek() != '<') fail("datatype must be an IRI");
      iri();
    }
    return out;
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace

Triplet parse_tsv_line(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = split(line, '\t');
  if (fields.size() != 3) {
    throw MalformedLine(line_no, "expected 3 tab-separated fields, got " +
                                     std::to_string(fields.size()));
  }
  Triplet t{trim(fields[0]), trim(fields[1]), trim(fields[2])};
  if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
    throw MalformedLine(line_no, "empty field");
  }
  return t;
}

bool parse_ntriples_line(std::string_view line, std::size_t line_no, Triplet& out) {
  auto body = trim_view(line);
  if (body.empty() || body.front() == '#') return false;
  NtCursor cur(body, line_no);
  out.subject = trim(cur.term(false));
  out.relation = trim(cur.term(true));
  out.object = trim(cur.term(false));
  cur.finish();
  if (out.subject.empty() || out.relation.empty() || out.object.empty()) {
    cur.fail("empty term");
  }
  return true;
}

std::string KnowledgeGraph::sr_key(std::string_view s, std::string_view r) {
  // fields never contain raw tabs, so the separator is unambiguous
  std::string key;
  key.reserve(s.size() + r.size() + 1);
  key.append(s);
  key += '\t';
  key.append(r);
  return key;
}

bool KnowledgeGraph::add(Triplet t) {
  t.subject = trim(escape_controls(t.subject));
  t.relation = trim(escape_controls(t.relation));
  t.object = trim(escape_controls(t.object));
  if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
    throw std::invalid_argument("triplet fields must be non-empty");
  }
  auto& objs = sr_index_[sr_key(t.subject, t.relation)];
  if (!objs.insert(t.object).second) return false;
  entities_.insert(t.subject);
  entities_.insert(t.object);
  relations_.insert(t.relation);
  triplets_.push_back(std::move(t));
  return true;
}

bool KnowledgeGraph::contains(std::string_view s, std::string_view r, std::string_view o) const {
  auto it = sr_index_.find(sr_key(s, r));
  if (it == sr_index_.end()) return false;
  return it->second.find(std::string(o)) != it->second.end();
}

const std::set<std::string>& KnowledgeGraph::objects_of(std::string_view s,
                                                        std::string_view r) const {
  static const std::set<std::string> kEmpty;
  auto it = sr_index_.find(sr_key(s, r));
  return it == sr_index_.end() ? kEmpty : it->second;
}

bool KnowledgeGraph::index_consistent() const {
  SrIndex rebuilt;
  for (const auto& t : triplets_) rebuilt[sr_key(t.subject, t.relation)].insert(t.object);
  return rebuilt == sr_index_;
}

GraphStats compute_stats(const KnowledgeGraph& g, std::size_t duplicates, std::size_t malformed) {
  return GraphStats{g.size(), g.entities().size(), g.relations().size(), duplicates, malformed};
}

LoadResult load_graph(std::istream& in, TripleFormat format, ParseMode mode) {
  LoadResult res;
  std::size_t duplicates = 0;
  std::size_t malformed = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim_view(line).empty()) continue;
    try {
      if (!is_valid_utf8(line)) throw EncodingError(line_no);
      Triplet t;
      if (format == TripleFormat::Tsv) {
        t = parse_tsv_line(line, line_no);
      } else if (!parse_ntriples_line(line, line_no, t)) {
        continue;
      }
      if (!res.graph.add(std::move(t))) ++duplicates;
    } catch (const std::runtime_error& e) {
      if (mode == ParseMode::Strict) throw;
      spdlog::warn("skipping {}", e.what());
      ++malformed;
    }
  }
  res.stats = compute_stats(res.graph, duplicates, malformed);
  return res;
}

LoadResult load_graph_file(const std::filesystem::path& path, TripleFormat format,
                           ParseMode mode) {
  if (ascii_lower(path.extension().string()) == ".gz") {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (!gz) throw std::runtime_error("cannot open " + path.string());
    std::string data;
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof buf)) > 0) data.append(buf, static_cast<std::size_t>(n));
    int err = 0;
    const char* msg = gzerror(gz, &err);
    std::string why = msg ? msg : "";
    gzclose(gz);
    if (n < 0 || err < 0) throw std::runtime_error("gzip read failed for " + path.string() + ": " + why);
    std::istringstream in(std::move(data));
    return load_graph(in, format, mode);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_graph(in, format, mode);
}

}  // namespace kgquest
