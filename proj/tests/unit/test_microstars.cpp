#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "lexnet/microstars.hpp"

using namespace lexnet;
using namespace lexnet::micro;

namespace {

struct Row {
  std::uint64_t out, in;
  StarType type;
};

// Hub degree pairs (out, in) of the largest stars in the US and German corpora.
const std::vector<Row> kTableRows = {
    {2, 2719, StarType::sink},   {1, 1700, StarType::sink},   {3, 1680, StarType::sink},
    {3, 1171, StarType::sink},   {0, 1022, StarType::sink},   {31, 254, StarType::hinge},
    {114, 213, StarType::hinge}, {34, 127, StarType::hinge},  {20, 117, StarType::hinge},
    {24, 103, StarType::hinge},  {213, 1, StarType::source},  {174, 2, StarType::source},
    {149, 0, StarType::source},  {128, 4, StarType::source},  {128, 0, StarType::source},
    {0, 255, StarType::sink},    {0, 223, StarType::sink},    {1, 192, StarType::sink},
    {0, 190, StarType::sink},    {16, 168, StarType::sink},   {88, 46, StarType::hinge},
    {74, 13, StarType::hinge},   {18, 68, StarType::hinge},   {73, 10, StarType::hinge},
    {61, 20, StarType::hinge},   {75, 0, StarType::source},   {71, 2, StarType::source},
    {56, 2, StarType::source},   {47, 0, StarType::source},   {45, 3, StarType::source},
};

struct Builder {
  macro::Digraph g;
  std::uint32_t node(const std::string& key) {
    g.keys.push_back(key);
    return static_cast<std::uint32_t>(g.keys.size() - 1);
  }
  void edge(std::uint32_t a, std::uint32_t b) { g.edges.emplace_back(a, b); }
};

// Each spoke's adjacency to the other spokes, recomputed from the graph.
void check_density(const macro::Digraph& g, const Star& s, double cap) {
  std::set<std::string> spokes(s.spokes.begin(), s.spokes.end());
  std::map<std::string, std::set<std::string>> adj;
  for (auto [a, b] : g.edges) {
    if (a == b) continue;
    adj[g.keys[a]].insert(g.keys[b]);
    adj[g.keys[b]].insert(g.keys[a]);
  }
  const auto limit = static_cast<std::size_t>(std::floor(cap * static_cast<double>(spokes.size() - 1) + 1e-9));
  std::size_t twice_m = 0;
  for (const auto& sp : spokes) {
    std::size_t c = 0;
    for (const auto& w : adj[sp]) c += spokes.count(w);
    CHECK(c <= limit);
    twice_m += c;
    CHECK(adj[s.hub].count(sp) == 1);
  }
  CHECK(s.m_s == twice_m / 2);
  CHECK(s.n == spokes.size() + 1);
}

}  // namespace

TEST_CASE("star types of the published hub degrees") {
  for (const auto& r : kTableRows) {
    CAPTURE(r.out);
    CAPTURE(r.in);
    CHECK(classify_star(r.out, r.in) == r.type);
  }
  CHECK_THROWS(classify_star(0, 0));
  CHECK(classify_star(1, 10) == StarType::sink);
  CHECK(classify_star(1, 9) == StarType::hinge);
  CHECK(classify_star(10, 1) == StarType::source);
}

TEST_CASE("star types are scale-invariant") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto out = rng() % 300, in = rng() % 300;
    if (!out && !in) continue;
    const auto k = 1 + rng() % 1000;
    CHECK(classify_star(out * k, in * k) == classify_star(out, in));
    if (out && in) CHECK_FALSE(((in >= 10 * out) && (out >= 10 * in)));
  }
}

TEST_CASE("spoke limit") {
  CHECK(spoke_limit(12, 0.05) == 0);
  CHECK(spoke_limit(21, 0.05) == 1);
  CHECK(spoke_limit(20, 0.05) == 0);
  CHECK(spoke_limit(41, 0.05) == 2);
}

TEST_CASE("perfect star") {
  Builder b;
  const auto hub = b.node("hub");
  for (int i = 0; i < 12; ++i) b.edge(b.node("s" + std::to_string(10 + i)), hub);
  b.edge(hub, 1);  // a second edge to the same spoke is collapsed
  b.edge(hub, hub);
  const auto stars = extract_stars(b.g);
  REQUIRE(stars.size() == 1);
  CHECK(stars[0].hub == "hub");
  CHECK(stars[0].n == 13);
  CHECK(stars[0].m_s == 0);
  CHECK(stars[0].delta_in == 12);
  CHECK(stars[0].delta_out == 1);
  CHECK(stars[0].type == StarType::sink);
}

TEST_CASE("clique among spokes is pruned") {
  Builder b;
  const auto hub = b.node("hub");
  std::vector<std::uint32_t> s;
  for (int i = 0; i < 12; ++i) s.push_back(b.node("s" + std::to_string(10 + i)));
  for (auto x : s) b.edge(hub, x);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) b.edge(s[i], s[j]);
  // The cap is 0 adjacencies, so five clique members go; ties remove the smallest key first.
  StarOptions o;
  o.min_size = 2;
  const auto stars = extract_stars(b.g, o);
  const auto it = std::find_if(stars.begin(), stars.end(), [](const Star& st) { return st.hub == "hub"; });
  REQUIRE(it != stars.end());
  CHECK(it->spokes == std::vector<std::string>{"s15", "s16", "s17", "s18", "s19", "s20", "s21"});
  CHECK(it->m_s == 0);
  // Eight nodes are below the default size gate.
  for (const auto& st : extract_stars(b.g)) CHECK(st.hub != "hub");
}

TEST_CASE("planted stars are recovered") {
  std::mt19937 rng(5);
  for (int round = 0; round < 30; ++round) {
    Builder b;
    std::set<std::string> hubs;
    const int stars = 1 + static_cast<int>(rng() % 5);
    for (int h = 0; h < stars; ++h) {
      const auto hub = b.node("h" + std::to_string(h));
      hubs.insert("h" + std::to_string(h));
      const int spokes = 9 + static_cast<int>(rng() % 20);
      for (int i = 0; i < spokes; ++i) {
        const auto sp = b.node("h" + std::to_string(h) + "s" + std::to_string(i));
        if (rng() % 2) b.edge(hub, sp);
        else b.edge(sp, hub);
      }
    }
    std::set<std::string> got;
    for (const auto& s : extract_stars(b.g)) got.insert(s.hub);
    CHECK(got == hubs);
  }
}

TEST_CASE("no emitted star breaks the density cap") {
  std::mt19937 rng(8);
  for (int round = 0; round < 60; ++round) {
    Builder b;
    const int n = 20 + static_cast<int>(rng() % 80);
    for (int i = 0; i < n; ++i) b.node("n" + std::to_string(i));
    const int m = n * (1 + static_cast<int>(rng() % 6));
    for (int e = 0; e < m; ++e) {
      // Skewed endpoints create hubs.
      const auto a = static_cast<std::uint32_t>(rng() % n);
      const auto t = static_cast<std::uint32_t>(rng() % 3 ? rng() % 5 : rng() % n);
      b.edge(a, t);
    }
    StarOptions o;
    o.jobs = 1 + round % 3;
    const auto stars = extract_stars(b.g, o);
    for (const auto& s : stars) check_density(b.g, s, o.density_cap);
    for (std::size_t i = 1; i < stars.size(); ++i)
      CHECK((stars[i - 1].n > stars[i].n || (stars[i - 1].n == stars[i].n && stars[i - 1].hub < stars[i].hub)));
  }
}

TEST_CASE("stars CSV") {
  Builder b;
  const auto hub = b.node("hub");
  for (int i = 0; i < 10; ++i) b.edge(hub, b.node("s" + std::to_string(i)));
  const auto csv = stars_csv(extract_stars(b.g));
  CHECK(csv == "hub,n,m_s,delta_out,delta_in,type,heading\r\nhub,11,0,10,0,source,\r\n");
}
