#pragma once

#include <string>
#include <vector>

#include "lexnet/corpus.hpp"

namespace testing {

inline lexnet::corpus::Snapshot snapshot(lexnet::Country country, int year, const std::vector<std::string>& docs) {
  lexnet::corpus::Snapshot s;
  s.country = country;
  s.year = year;
  for (const auto& xml : docs) {
    s.trees.push_back(lexnet::corpus::parse_snapshot_xml(xml, std::nullopt, country));
    s.provenance[s.trees.back().key] = lexnet::corpus::Provenance::native;
  }
  return s;
}

inline std::string read(const std::string& path) {
  std::string out;
  if (FILE* f = std::fopen(path.c_str(), "rb")) {
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
    std::fclose(f);
  }
  return out;
}

}  // namespace testing

#include "lexnet/citeparse.hpp"
#include "lexnet/graphcore.hpp"

namespace testing {

struct Item {
  std::string key;
  std::string text;
  lexnet::DocType doc_type = lexnet::DocType::statute;
};

// One root per document type ("S" for statutes, "R" for regulations) with the
// items as seqitems below it, plus reference edges between item keys.
inline lexnet::corpus::Snapshot flat_snapshot(int year, const std::vector<Item>& items) {
  using namespace lexnet;
  corpus::Snapshot s;
  s.year = year;
  corpus::CorpusNode roots[2];
  roots[0].key = "S";
  roots[1].key = "R";
  roots[1].doc_type = DocType::regulation;
  for (const auto& it : items) {
    corpus::CorpusNode n;
    n.key = it.key;
    n.level_kind = LevelKind::seqitem;
    n.level_depth = 1;
    n.doc_type = it.doc_type;
    n.text = it.text;
    roots[it.doc_type == DocType::statute ? 0 : 1].children.push_back(n);
  }
  for (auto& r : roots)
    if (!r.children.empty()) {
      s.provenance[r.key] = corpus::Provenance::native;
      s.trees.push_back(r);
    }
  return s;
}

inline lexnet::graph::LegalGraph flat_graph(int year, const std::vector<Item>& items,
                                            const std::vector<std::pair<std::string, std::string>>& refs) {
  std::vector<lexnet::citeparse::Reference> rs;
  for (const auto& [a, b] : refs) {
    lexnet::citeparse::Reference r;
    r.source_key = r.node_key = a;
    r.resolved = {b};
    rs.push_back(r);
  }
  lexnet::Diagnostics diag;
  return lexnet::graph::build_graph(flat_snapshot(year, items), rs, diag);
}

}  // namespace testing
