#include <filesystem>
#include <random>

#include "builders.hpp"
#include "doctest.h"
#include "lexnet/citeparse.hpp"
#include "lexnet/graphcore.hpp"
#include "lexnet/io.hpp"

using namespace lexnet;
using namespace lexnet::graph;

namespace {

citeparse::Reference ref(std::string from, std::vector<std::string> to) {
  citeparse::Reference r;
  r.source_key = r.node_key = std::move(from);
  r.resolved = std::move(to);
  return r;
}

// Statute title with two chapters, one section directly under the title, and
// a regulation part.
corpus::Snapshot sample() {
  return testing::snapshot(Country::US, 2005, {
    R"(<document key="t" level="title" heading="Title" doc_type="statute">
      <item key="t_c1" level="chapter" heading="One">
        <seqitem key="t_1" citekey="USC:1:1"><text>one two three</text>
          <subseqitem key="t_1_a"><text>four five</text></subseqitem>
        </seqitem>
        <seqitem key="t_2" citekey="USC:1:2"><text>six</text></seqitem>
      </item>
      <item key="t_c2" level="chapter" heading="Two">
        <seqitem key="t_3" citekey="USC:1:3"><text>seven eight</text></seqitem>
      </item>
      <seqitem key="t_9" citekey="USC:1:9"><text>nine</text></seqitem>
    </document>)",
    R"(<document key="r" level="title" doc_type="regulation">
      <item key="r_p" level="chapter">
        <seqitem key="r_1" citekey="CFR:1:1.1"><text>ten eleven</text></seqitem>
      </item>
    </document>)"});
}

std::vector<citeparse::Reference> sample_refs() {
  return {ref("t_1", {"t_2", "t_3"}), ref("t_3", {"t_1"}), ref("r_1", {"t_1"}), ref("t_2", {"r_1"}),
          ref("t_9", {"t_1"}), ref("t_1", {"t_c2"}), ref("t_1", {"t_1"})};
}

}  // namespace

TEST_CASE("reference classes") {
  CHECK(classify_reference(DocType::statute, DocType::statute) == ReferenceClass::lateral_statute);
  CHECK(classify_reference(DocType::regulation, DocType::regulation) == ReferenceClass::lateral_regulation);
  CHECK(classify_reference(DocType::regulation, DocType::statute) == ReferenceClass::upward);
  CHECK(classify_reference(DocType::statute, DocType::regulation) == ReferenceClass::downward);
  for (auto c : {ReferenceClass::lateral_statute, ReferenceClass::lateral_regulation, ReferenceClass::upward,
                 ReferenceClass::downward})
    CHECK(parse_reference_class(to_string(c)) == c);
}

TEST_CASE("graph construction") {
  Diagnostics diag;
  const auto g = build_graph(sample(), sample_refs(), diag);
  CHECK(g.nodes.size() == 11);
  CHECK(g.reference_count() == 7);  // the edge to a container is rejected
  CHECK_FALSE(diag.empty());
  const auto& t = g.nodes[*g.find("t")];
  CHECK(t.subtree_tokens == 9);
  CHECK(g.nodes[*g.find("t_1")].subtree_tokens == 5);
  CHECK(g.nodes[*g.find("t_1_a")].parent == *g.find("t_1"));

  std::size_t hierarchy = 0;
  for (const auto& e : g.edges) {
    if (e.type == EdgeType::hierarchy) {
      ++hierarchy;
      CHECK(g.nodes[e.target].parent == e.source);
      continue;
    }
    CHECK(g.nodes[e.source].level_kind == LevelKind::seqitem);
    CHECK(g.nodes[e.target].level_kind == LevelKind::seqitem);
    CHECK(e.cls == classify_reference(g.nodes[e.source].doc_type, g.nodes[e.target].doc_type));
  }
  // The hierarchy is a forest: one edge per non-root node.
  CHECK(hierarchy == g.nodes.size() - 2);
  for (std::size_t i = 1; i < g.nodes.size(); ++i) CHECK(g.nodes[i - 1].key < g.nodes[i].key);
}

TEST_CASE("quotient at chapter level") {
  Diagnostics diag;
  const auto g = build_graph(sample(), sample_refs(), diag);
  Diagnostics qd;
  const auto q = quotient(g, LevelSelector::parse("level:chapter"), qd);
  std::vector<std::string> keys;
  for (const auto& n : q.nodes) keys.push_back(n.key);
  // t_9 sits under the title only, so it becomes its own unit.
  CHECK(keys == std::vector<std::string>{"r_p", "t_9", "t_c1", "t_c2"});
  CHECK_FALSE(q.member_of.count("t"));
  CHECK(q.nodes[*q.find("t_c1")].tokens_statute == 6);
  CHECK(q.nodes[*q.find("r_p")].tokens_regulation == 2);

  auto weight = [&](const char* a, const char* b) -> std::uint64_t {
    const auto s = *q.find(a), t = *q.find(b);
    for (const auto& e : q.edges)
      if (e.source == s && e.target == t) return e.weight;
    return 0;
  };
  CHECK(weight("t_c1", "t_c1") == 2);  // t_1 -> t_2 and the self-reference
  CHECK(weight("t_c1", "t_c2") == 1);
  CHECK(weight("t_c2", "t_c1") == 1);
  CHECK(weight("r_p", "t_c1") == 1);
  CHECK(weight("t_c1", "r_p") == 1);
  CHECK(weight("t_9", "t_c1") == 1);
  // Weight is conserved.
  CHECK(q.total_weight() == g.reference_count());
  for (const auto& e : q.edges) {
    std::uint64_t sum = 0;
    for (auto c : e.by_class) sum += c;
    CHECK(sum == e.weight);
  }
  CHECK_FALSE(qd.empty());

  CHECK_THROWS_AS(quotient(g, LevelSelector::parse("level:chapter!"), qd), StructuralError);
}

TEST_CASE("quotient at root level and at seqitem depth") {
  Diagnostics diag;
  const auto g = build_graph(sample(), sample_refs(), diag);
  Diagnostics qd;
  const auto roots = quotient(g, LevelSelector::parse("root"), qd);
  CHECK(roots.nodes.size() == 2);
  CHECK(roots.total_weight() == 7);
  CHECK(roots.nodes[*roots.find("t")].members == 8);
  const auto d2 = quotient(g, LevelSelector::parse("depth:2"), qd);
  CHECK(d2.find("t_1"));
  CHECK(d2.find("r_1"));
  CHECK(d2.find("t_9"));  // at depth 1 without a depth-2 descendant: its own unit
  CHECK(d2.member_of.at("t_1_a") == *d2.find("t_1"));
  CHECK_FALSE(d2.member_of.count("t_c1"));
}

TEST_CASE("level selector text round-trips") {
  for (const char* s : {"root", "depth:3", "level:book,chapter", "level:chapter!"}) {
    CHECK(LevelSelector::parse(s).str() == s);
  }
  CHECK_THROWS_AS(LevelSelector::parse("depth:x"), ConfigError);
  CHECK_THROWS_AS(LevelSelector::parse("bogus"), ConfigError);
}

TEST_CASE("quotient conserves reference weight on random forests") {
  std::mt19937 rng(17);
  for (int round = 0; round < 100; ++round) {
    corpus::Snapshot s;
    s.year = 2000;
    std::vector<std::string> seq;
    for (int t = 0; t < 3; ++t) {
      corpus::CorpusNode root;
      root.key = "T" + std::to_string(t);
      root.level = "title";
      for (int c = 0; c < 1 + static_cast<int>(rng() % 3); ++c) {
        corpus::CorpusNode ch;
        ch.key = root.key + "C" + std::to_string(c);
        ch.level_depth = 1;
        ch.level = rng() % 4 ? "chapter" : "division";
        for (int k = 0; k < 1 + static_cast<int>(rng() % 4); ++k) {
          corpus::CorpusNode si;
          si.key = ch.key + "S" + std::to_string(k);
          si.level_kind = LevelKind::seqitem;
          si.level_depth = 2;
          si.text = "w";
          seq.push_back(si.key);
          ch.children.push_back(si);
        }
        root.children.push_back(ch);
      }
      s.trees.push_back(root);
    }
    std::vector<citeparse::Reference> refs;
    for (int e = 0; e < 20; ++e) refs.push_back(ref(seq[rng() % seq.size()], {seq[rng() % seq.size()]}));
    Diagnostics d;
    const auto g = build_graph(s, refs, d);
    for (const char* sel : {"level:chapter", "root", "depth:2", "depth:1"}) {
      const auto q = quotient(g, LevelSelector::parse(sel), d);
      CHECK(q.total_weight() == g.reference_count());
      std::uint64_t members = 0;
      for (const auto& n : q.nodes) members += n.members;
      CHECK(members == q.member_of.size());
    }
  }
}

TEST_CASE("CSV export round-trips, plain and compressed") {
  Diagnostics diag;
  const auto g = build_graph(sample(), sample_refs(), diag);
  const auto dir = std::filesystem::temp_directory_path() / "lexnet_test_graph";
  std::filesystem::remove_all(dir);
  for (bool gz : {false, true}) {
    const auto paths = export_csv(g, dir, gz ? "gz_" : "plain_", {gz});
    REQUIRE(paths.size() == 2);
    const auto back = import_csv(paths[0], paths[1], g.country, g.year);
    CHECK(back == g);
  }
  CHECK(io::gunzip(testing::read((dir / "gz_nodes.csv.gz").string())) == nodes_csv(g));
  // Compression output does not depend on the time of day.
  CHECK(io::gzip(nodes_csv(g)) == io::gzip(nodes_csv(g)));
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(import_csv(std::string_view("bad\n"), std::string_view(""), Country::US, 0), ParseError);
}

TEST_CASE("GraphML mentions every node and edge") {
  Diagnostics diag;
  const auto g = build_graph(sample(), sample_refs(), diag);
  const auto xml = graphml(g);
  CHECK(xml.find("<graphml") != std::string::npos);
  for (const auto& n : g.nodes) CHECK(xml.find("id=\"" + n.key + "\"") != std::string::npos);
  std::size_t edges = 0;
  for (auto pos = xml.find("<edge "); pos != std::string::npos; pos = xml.find("<edge ", pos + 1)) ++edges;
  CHECK(edges == g.edges.size());
}

TEST_CASE("hashing") {
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(io::gunzip("not gzip"), ParseError);
}
