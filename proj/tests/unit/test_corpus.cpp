#include <filesystem>
#include <random>

#include "builders.hpp"
#include "doctest.h"
#include "lexnet/corpus.hpp"

using namespace lexnet;
using namespace lexnet::corpus;

namespace {

const char* kMinimal = R"(<document key="d" doc_type="statute">
  <seqitem key="s1" citekey="USC:1:1"><text>a b c</text></seqitem>
</document>)";

Snapshot with_roots(int year, const std::vector<std::string>& roots) {
  Snapshot s;
  s.year = year;
  for (const auto& r : roots) {
    CorpusNode n;
    n.key = r;
    n.text = r + " text " + std::to_string(year);
    s.trees.push_back(n);
  }
  return s;
}

std::vector<std::string> root_keys(const Snapshot& s) {
  std::vector<std::string> out;
  for (const auto& t : s.trees) out.push_back(t.key);
  return out;
}

}  // namespace

TEST_CASE("minimal document parses into two nodes") {
  const auto root = parse_snapshot_xml(kMinimal, std::nullopt, Country::US);
  CHECK(count_nodes(root) == 2);
  REQUIRE(root.children.size() == 1);
  const auto& s = root.children[0];
  CHECK(s.level_kind == LevelKind::seqitem);
  CHECK(s.citekey == "USC:1:1");
  CHECK(tokenize(*s.text).tokens == 3);
}

TEST_CASE("schema violations") {
  CHECK_THROWS_AS(parse_snapshot_xml(R"(<document doc_type="statute"/>)", std::nullopt, Country::US),
                  SchemaError);
  CHECK_THROWS_AS(parse_snapshot_xml(R"(<document key="d" doc_type="statute"><seqitem key="a">
      <seqitem key="b"/></seqitem></document>)", std::nullopt, Country::US),
                  SchemaError);
  CHECK_THROWS_AS(parse_snapshot_xml(R"(<document key="d" doc_type="statute"><seqitem key="a"/>
      <seqitem key="a"/></document>)", std::nullopt, Country::US),
                  SchemaError);
  CHECK_THROWS_AS(parse_snapshot_xml(R"(<document key="d" doc_type="statute"><subseqitem key="a"/></document>)",
                                     std::nullopt, Country::US),
                  SchemaError);
  CHECK_THROWS_AS(parse_snapshot_xml(R"(<document key="d" doc_type="statute"><item key="a" citekey="x"/></document>)",
                                     std::nullopt, Country::US),
                  SchemaError);
  CHECK_THROWS_AS(parse_snapshot_xml(R"(<document key="d"/>)", std::nullopt, Country::US), SchemaError);
  CHECK_THROWS_AS(parse_snapshot_xml(R"(<document key="d" doc_type="statute"/>)", DocType::regulation, Country::US),
                  SchemaError);
}

TEST_CASE("malformed XML reports its line") {
  try {
    parse_snapshot_xml("<document key=\"d\" doc_type=\"statute\">\n<seqitem key=\"a\">\n</document>",
                       std::nullopt, Country::US);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("sample title 12 fixture has the expected levels") {
  const auto xml = testing::read(LEXNET_FIXTURES "/usc12_5363.xml");
  const auto root = parse_snapshot_xml(xml, DocType::statute, Country::US);
  std::map<std::string, std::pair<LevelKind, int>> seen;
  walk(root, [&](const CorpusNode& n, const CorpusNode*) { seen[n.key] = {n.level_kind, n.level_depth}; });
  CHECK(seen.size() == 9);
  CHECK(seen["usc12"] == std::pair(LevelKind::container, 0));
  CHECK(seen["usc12_ch53_schI_ptC"] == std::pair(LevelKind::container, 3));
  CHECK(seen["usc12_5363"] == std::pair(LevelKind::seqitem, 4));
  CHECK(seen["usc12_5363_a"] == std::pair(LevelKind::subseqitem, 5));
  CHECK(seen["usc12_5363_b"] == std::pair(LevelKind::subseqitem, 5));
  CHECK(seen["usc12_5363_b_1"] == std::pair(LevelKind::subseqitem, 6));
}

TEST_CASE("serialization round-trips") {
  const auto xml = testing::read(LEXNET_FIXTURES "/usc12_5363.xml");
  const auto root = parse_snapshot_xml(xml, DocType::statute, Country::US);
  const auto again = parse_snapshot_xml(serialize_snapshot_xml(root), std::nullopt, Country::US);
  CHECK(again == root);
  CHECK(serialize_snapshot_xml(again) == serialize_snapshot_xml(root));

  CorpusNode odd;
  odd.key = "k&<\"1\">";
  odd.heading = "line\nbreak\ttab";
  odd.text = "  leading & trailing <spaces>  ";
  odd.doc_type = DocType::regulation;
  const auto back = parse_snapshot_xml(serialize_snapshot_xml(odd), std::nullopt, Country::DE);
  CHECK(back == odd);
}

TEST_CASE("tokenize") {
  CHECK(tokenize("") == TokenStats{0, 0});
  CHECK(tokenize("the  Act\nthe") == TokenStats{3, 2});
  CHECK(tokenize("a a a") == TokenStats{3, 1});
  CHECK(tokenize("The the THE") == TokenStats{3, 1});
  CHECK(tokenize("The the THE", {false}) == TokenStats{3, 3});
  CHECK(tokenize("Straße STRASSE") == TokenStats{2, 2});
  CHECK(tokenize("ÄRGER ärger") == TokenStats{2, 1});
  // U+00A0 and U+3000 are whitespace.
  CHECK(tokenize("a\xC2\xA0" "b\xE3\x80\x80" "c") == TokenStats{3, 3});
}

TEST_CASE("tokenize ignores the kind and length of separators") {
  std::mt19937 rng(11);
  const std::vector<std::string> words = {"alpha", "Beta", "gamma", "§", "12(a)", "beta"};
  const std::vector<std::string> seps = {" ", "  ", "\t", "\n", "\r\n", "\xC2\xA0", " \t "};
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> picked;
    const int len = static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i) picked.push_back(words[rng() % words.size()]);
    std::string plain, noisy;
    for (const auto& w : picked) {
      plain += w + " ";
      noisy += seps[rng() % seps.size()] + w + seps[rng() % seps.size()];
    }
    CHECK(tokenize(plain) == tokenize(noisy));
  }
}

TEST_CASE("forward fill fills gaps only") {
  SUBCASE("gap between two presences is filled from the previous year") {
    auto out = forward_fill({with_roots(1998, {"R"}), with_roots(1999, {}), with_roots(2000, {"R"})});
    REQUIRE(out[1].trees.size() == 1);
    CHECK(*out[1].trees[0].text == "R text 1998");
    CHECK(out[1].provenance.at("R") == Provenance::forward_filled);
    CHECK(out[0].provenance.at("R") == Provenance::native);
  }
  SUBCASE("a root present in one year only is never filled") {
    auto out = forward_fill({with_roots(2012, {"A"}), with_roots(2013, {"A", "V14"}), with_roots(2014, {"A"})});
    CHECK(root_keys(out[0]) == std::vector<std::string>{"A"});
    CHECK(root_keys(out[2]) == std::vector<std::string>{"A"});
  }
  SUBCASE("no gaps is the identity") {
    auto in = std::vector<Snapshot>{with_roots(1, {"A", "B"}), with_roots(2, {"A", "B"})};
    auto out = forward_fill(in);
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(out[i].trees == in[i].trees);
  }
}

TEST_CASE("forward fill is idempotent and keeps native roots") {
  std::mt19937 rng(5);
  for (int round = 0; round < 100; ++round) {
    std::vector<Snapshot> series;
    for (int y = 0; y < 6; ++y) {
      std::vector<std::string> roots;
      for (const char* r : {"A", "B", "C", "D"})
        if (rng() % 2) roots.push_back(r);
      series.push_back(with_roots(2000 + y, roots));
    }
    const auto once = forward_fill(series);
    const auto twice = forward_fill(once);
    for (std::size_t y = 0; y < series.size(); ++y) {
      CHECK(once[y].trees == twice[y].trees);
      CHECK(once[y].provenance == twice[y].provenance);
      for (const auto& t : series[y].trees) {
        const auto* r = once[y].find_root(t.key);
        REQUIRE(r);
        CHECK(*r == t);
        CHECK(once[y].provenance.at(t.key) == Provenance::native);
      }
    }
  }
}

TEST_CASE("store round trip and ingestion with a missing year") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "lexnet_test_corpus";
  fs::remove_all(root);
  auto put = [&](const std::string& rel, const std::string& xml) {
    fs::create_directories((root / rel).parent_path());
    std::FILE* f = std::fopen((root / rel).c_str(), "wb");
    std::fwrite(xml.data(), 1, xml.size(), f);
    std::fclose(f);
  };
  const std::string doc = R"(<document key="t1" doc_type="statute"><seqitem key="t1s1"><text>x</text></seqitem></document>)";
  put("in/US/2001/a.xml", doc);
  put("in/US/2003/a.xml", doc);
  Diagnostics diag;
  auto series = ingest_country(root / "in" / "US", Country::US, diag);
  REQUIRE(series.size() == 3);
  CHECK(series[1].year == 2002);
  CHECK(series[1].provenance.at("t1") == Provenance::forward_filled);
  CHECK(diag.messages.size() == 2);

  write_store(root / "store", series);
  const auto first = testing::read((root / "store" / "manifest.json").string());
  auto back = read_store(root / "store", Country::US);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].trees == series[i].trees);
    CHECK(back[i].provenance == series[i].provenance);
  }
  write_store(root / "store", back);
  CHECK(testing::read((root / "store" / "manifest.json").string()) == first);
  fs::remove_all(root);
}
