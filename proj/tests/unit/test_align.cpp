#include <set>

#include "builders.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "lexnet/mesoclust.hpp"

using namespace lexnet;
using namespace lexnet::meso;

namespace {

graph::LegalGraph graph_of(const corpus::Snapshot& s) {
  Diagnostics diag;
  return graph::build_graph(s, {}, diag);
}

// Independent Jaro-Winkler over bytes, for ASCII inputs.
double jw_oracle(const std::string& s, const std::string& t) {
  const int ls = static_cast<int>(s.size()), lt = static_cast<int>(t.size());
  if (!ls && !lt) return 1;
  if (!ls || !lt) return 0;
  const int w = std::max(0, std::max(ls, lt) / 2 - 1);
  std::vector<bool> ms(ls), mt(lt);
  int m = 0;
  for (int i = 0; i < ls; ++i)
    for (int j = std::max(0, i - w); j < std::min(lt, i + w + 1); ++j)
      if (!mt[j] && s[i] == t[j]) {
        ms[i] = mt[j] = true;
        ++m;
        break;
      }
  if (!m) return 0;
  std::string a, b;
  for (int i = 0; i < ls; ++i)
    if (ms[i]) a += s[i];
  for (int j = 0; j < lt; ++j)
    if (mt[j]) b += t[j];
  int trans = 0;
  for (int i = 0; i < m; ++i) trans += a[i] != b[i];
  const double jaro = (double(m) / ls + double(m) / lt + (m - trans / 2.0) / m) / 3;
  int l = 0;
  while (l < 4 && l < ls && l < lt && s[l] == t[l]) ++l;
  return jaro + l * 0.1 * (1 - jaro);
}

}  // namespace

TEST_CASE("Jaro-Winkler") {
  CHECK(jaro_winkler("MARTHA", "MARHTA") == doctest::Approx(0.9611111111).epsilon(1e-9));
  CHECK(jaro_winkler("DWAYNE", "DUANE") == doctest::Approx(0.84).epsilon(1e-9));
  CHECK(jaro_winkler("DIXON", "DICKSONX") == doctest::Approx(0.8133333333).epsilon(1e-9));
  CHECK(jaro_winkler("", "") == 1.0);
  CHECK(jaro_winkler("abc", "") == 0.0);
  CHECK(jaro_winkler("same", "same") == 1.0);
  // Code points, not bytes.
  CHECK(jaro_winkler("§ 1", "§ 1") == 1.0);
  CHECK(jaro_winkler("ä", "a") == 0.0);
  std::mt19937 rng(13);
  for (int i = 0; i < 300; ++i) {
    const auto a = testing::random_text(rng, rng() % 40);
    const auto b = rng() % 2 ? testing::perturb(a + "xxxxx", rng, 2) : testing::random_text(rng, rng() % 40);
    CHECK(jaro_winkler(a, b) == doctest::Approx(jw_oracle(a, b)).epsilon(1e-12));
    CHECK(jaro_winkler(a, b) == doctest::Approx(jaro_winkler(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("identical snapshots align in pass 1") {
  const auto f = testing::alignment_fixture();
  const auto g = graph_of(f.a);
  const auto al = align(f.a, f.a, g, g);
  std::size_t long_texts = 0;
  for (const auto& [from, want] : f.expected) {
    const auto img = al.image(from);
    REQUIRE(img);
    CHECK(*img == from);
    if (want.second != 2) ++long_texts;
  }
  CHECK(al.per_pass()[1] == long_texts);
}

TEST_CASE("scripted edits are matched by their designated pass") {
  const auto f = testing::alignment_fixture();
  const auto al = align(f.a, f.b, graph_of(f.a), graph_of(f.b));
  for (const auto& [from, want] : f.expected) {
    CAPTURE(from);
    const auto it = std::find_if(al.matches.begin(), al.matches.end(), [&](const Match& m) { return m.from == from; });
    REQUIRE(it != al.matches.end());
    CHECK(it->to == want.first);
    CHECK(it->pass == want.second);
  }
}

TEST_CASE("alignment is injective") {
  for (unsigned seed = 1; seed < 20; ++seed) {
    const auto f = testing::alignment_fixture(seed);
    const auto al = align(f.a, f.b, graph_of(f.a), graph_of(f.b));
    std::set<std::string> targets;
    for (const auto& m : al.matches) CHECK(targets.insert(m.to).second);
    for (std::size_t i = 1; i < al.matches.size(); ++i) CHECK(al.matches[i - 1].from < al.matches[i].from);
  }
}

TEST_CASE("duplicate long texts fall through to the key pass") {
  const std::string text(60, 'x');
  auto a = testing::flat_snapshot(1, {{"a", text}, {"b", text}});
  auto b = testing::flat_snapshot(2, {{"a", text}, {"b", text}});
  const auto al = align(a, b, graph_of(a), graph_of(b));
  REQUIRE(al.matches.size() == 2);
  CHECK(al.matches[0].pass == 2);
  CHECK(al.matches[1].pass == 2);
}

TEST_CASE("containment needs the matched part to dominate") {
  const std::string base = "the agency shall publish a notice";  // short, so pass 1 is skipped
  auto a = testing::flat_snapshot(1, {{"a", base}});
  auto ok = testing::flat_snapshot(2, {{"b", base + " soon"}});
  auto too_long = testing::flat_snapshot(2, {{"b", base + " " + std::string(40, 'z')}});
  CHECK(align(a, ok, graph_of(a), graph_of(ok)).matches.size() == 1);
  CHECK(align(a, too_long, graph_of(a), graph_of(too_long)).matches.empty());
}

TEST_CASE("alignment CSV") {
  const auto f = testing::alignment_fixture();
  const auto al = align(f.a, f.b, graph_of(f.a), graph_of(f.b));
  const auto csv = alignment_csv(al);
  CHECK(csv.rfind("from,to,pass\r\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(al.matches.size() + 1));
}
