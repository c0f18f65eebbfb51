#include <cmath>
#include <random>

#include "builders.hpp"
#include "doctest.h"
#include "family_fixture.hpp"
#include "lexnet/mesoclust.hpp"

using namespace lexnet;
using namespace lexnet::meso;

namespace {

std::set<std::tuple<int, unsigned, int, unsigned>> edge_set(const FamilyGraph& fg) {
  std::set<std::tuple<int, unsigned, int, unsigned>> out;
  for (const auto& e : fg.edges) {
    const auto& a = fg.nodes[e.from];
    const auto& b = fg.nodes[e.to];
    out.emplace(a.year, a.cluster, b.year, b.cluster);
  }
  return out;
}

std::map<int, FamilyYear> series(std::initializer_list<std::tuple<int, double, double>> rows) {
  std::map<int, FamilyYear> out;
  for (auto [y, s, r] : rows) out[y] = {s, r};
  return out;
}

}  // namespace

TEST_CASE("cluster similarity") {
  const auto f = testing::family_fixture();
  CHECK(cluster_similarity(f.years[0], 0, f.years[1], 0, f.alignments[0]) == 200);
  CHECK(cluster_similarity(f.years[0], 0, f.years[1], 1, f.alignments[0]) == 100);
  CHECK(cluster_similarity(f.years[0], 1, f.years[1], 0, f.alignments[0]) == 0);
  CHECK(cluster_similarity(f.years[0], 1, f.years[1], 2, f.alignments[0]) == 500);
}

TEST_CASE("family graph on the three-year fixture") {
  const auto f = testing::family_fixture();
  const auto fg = build_family_graph(f.years, f.alignments);
  CHECK(edge_set(fg) == f.edges);
  REQUIRE(fg.families.size() == 3);
  CHECK(fg.families[0].nodes == std::vector<std::uint32_t>{0, 1, 2, 4, 5});
  CHECK(fg.families[1].nodes == std::vector<std::uint32_t>{3});
  CHECK(fg.families[2].nodes == std::vector<std::uint32_t>{6});
  CHECK(fg.families[0].series.at(1).statute == 1500);
  CHECK(fg.families[0].series.at(2).statute == 2400);
  CHECK(fg.families[0].series.at(3).statute == 1000);
  for (const auto& e : fg.edges) {
    if (fg.nodes[e.from].year == 1 && fg.nodes[e.to].cluster == 0) {
      CHECK(e.share_from == doctest::Approx(0.2));
      CHECK(e.share_to == doctest::Approx(200.0 / 1200));
    }
  }
}

TEST_CASE("threshold zero keeps every overlap") {
  const auto f = testing::family_fixture();
  FamilyOptions o;
  o.threshold = 0;
  auto want = f.edges;
  want.emplace(1, 0, 2, 1);
  want.emplace(2, 1, 3, 1);
  CHECK(edge_set(build_family_graph(f.years, f.alignments, o)) == want);
  o.threshold = 1.5;
  CHECK_THROWS_AS(build_family_graph(f.years, f.alignments, o), ConfigError);
}

TEST_CASE("family edges respect the threshold in both directions") {
  std::mt19937 rng(12);
  for (int round = 0; round < 100; ++round) {
    std::vector<YearClusters> years(3);
    std::vector<Alignment> als(2);
    for (int y = 0; y < 3; ++y) {
      years[y].year = y;
      years[y].clusters = 1 + rng() % 4;
      for (int l = 0; l < 12; ++l)
        years[y].leaves.push_back({"l" + std::to_string(10 + l), static_cast<std::uint32_t>(rng() % years[y].clusters),
                                   1 + rng() % 100});
    }
    for (int y = 0; y < 2; ++y) {
      als[y].year_from = y;
      als[y].year_to = y + 1;
      for (int l = 0; l < 12; ++l)
        if (rng() % 3) als[y].matches.push_back({"l" + std::to_string(10 + l), "l" + std::to_string(10 + l), 1});
    }
    FamilyOptions o;
    o.threshold = 0.15;
    const auto fg = build_family_graph(years, als, o);
    for (const auto& e : fg.edges) {
      CHECK(e.overlap / fg.nodes[e.from].tokens() >= 0.15);
      CHECK(e.overlap / fg.nodes[e.to].tokens() >= 0.15);
    }
    // Family ids partition the nodes.
    std::size_t members = 0;
    for (const auto& fam : fg.families) members += fam.nodes.size();
    CHECK(members == fg.nodes.size());
  }
}

TEST_CASE("composition classes") {
  Diagnostics d;
  CHECK(classify_family(series({{1, 90, 10}}), 1, 1, d).average == Composition::statute_heavy);
  CHECK(classify_family(series({{1, 900, 100}, {2, 1800, 200}, {3, 90, 10}}), 1, 3, d).average ==
        Composition::statute_heavy);
  CHECK(classify_family(series({{1, 80, 20}}), 1, 1, d).average == Composition::statute_heavy);
  CHECK(classify_family(series({{1, 79, 21}}), 1, 1, d).average == Composition::mixed);
  CHECK(classify_family(series({{1, 20, 80}}), 1, 1, d).average == Composition::regulation_heavy);
  CHECK(classify_family(series({{1, 50, 50}}), 1, 1, d).average == Composition::mixed);
  CHECK(classify_family(series({{1, 60, 40}}), 1, 1, d).majority == Composition::statute_heavy);
  CHECK(classify_family(series({{1, 40, 60}}), 1, 1, d).majority == Composition::regulation_heavy);
  CHECK(classify_family(series({{1, 50, 50}}), 1, 1, d).majority == Composition::mixed);
  // The average is over years, not over pooled tokens.
  CHECK(classify_family(series({{1, 1000, 0}, {2, 0, 10}}), 1, 2, d).average == Composition::mixed);
}

TEST_CASE("growth classes") {
  Diagnostics d;
  CHECK(classify_family(series({{1, 0, 0}, {2, 100, 900}}), 1, 2, d).growth == GrowthDriver::regulation_driven);
  CHECK(classify_family(series({{1, 0, 0}, {2, 800, 200}}), 1, 2, d).growth == GrowthDriver::statute_driven);
  CHECK(classify_family(series({{1, 0, 0}, {2, 700, 300}}), 1, 2, d).growth == GrowthDriver::mixed);
  CHECK(classify_family(series({{1, 500, 0}, {3, 600, 900}}), 1, 3, d).growth == GrowthDriver::regulation_driven);
  CHECK(d.empty());
  CHECK(classify_family(series({{1, 10, 10}, {2, 10, 10}}), 1, 2, d).growth == GrowthDriver::mixed);
  CHECK_FALSE(d.empty());
  CHECK_THROWS_AS(classify_family({}, 2, 1, d), ConfigError);
}

TEST_CASE("TF-IDF") {
  const auto stop = default_stoplist();
  const auto top = family_tfidf({"Alpha beta, Section gamma.", "alpha delta delta"}, stop, 5);
  REQUIRE(top.size() == 2);
  REQUIRE(top[1].size() == 1);
  CHECK(top[1][0].term == "delta");
  CHECK(top[1][0].score == doctest::Approx(2.0 / 3 * std::log(2.0)));
  REQUIRE(top[0].size() == 2);
  CHECK(top[0][0].term == "beta");
  CHECK(top[0][1].term == "gamma");
  for (const auto& doc : top)
    for (const auto& t : doc) {
      CHECK(t.term != "alpha");
      CHECK(t.term != "section");
    }
  CHECK(terms("§ 12(a) Sections 1998 Über-Recht", stop) == std::vector<std::string>{"überrecht"});
  CHECK(load_stoplist("# comment\nSection\n\n part \r\n") == std::vector<std::string>{"section", "part"});
}

TEST_CASE("bundled stoplist equals the default") {
  CHECK(load_stoplist(testing::read(LEXNET_DATA "/stoplist.txt")) == default_stoplist());
}
