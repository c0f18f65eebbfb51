#include <random>
#include <set>

#include "builders.hpp"
#include "doctest.h"
#include "lexnet/citeparse.hpp"

using namespace lexnet;
using namespace lexnet::citeparse;

namespace {

CiteContext us_ctx(Collection c, std::string title) {
  CiteContext ctx;
  ctx.country = Country::US;
  ctx.collection = c;
  ctx.title = std::move(title);
  return ctx;
}

// Every key parsed from every span found in `text`, and the number of spans.
std::pair<std::set<std::string>, std::size_t> keys_in(std::string_view text, const CiteContext& ctx,
                                                      const PatternSet& ps) {
  std::set<std::string> out;
  const auto spans = find_references(text, ps, ctx.registry, ctx.year);
  for (const auto& s : spans)
    for (const auto& k : parse_reference(text.substr(s.offset, s.length), ctx, ps).keys) out.insert(k.str());
  return {out, spans.size()};
}

using Keys = std::set<std::string>;

}  // namespace

TEST_CASE("cite keys") {
  CHECK(CiteKey::us(Collection::CFR, "49", "1.47").str() == "CFR:49:1.47");
  CHECK(CiteKey::de("EGBGB", "art229").str() == "DE:EGBGB:art229");
  const auto k = CiteKey::parse("USC:8:1182");
  REQUIRE(k);
  CHECK(k->collection() == Collection::USC);
  CHECK(k->title() == "8");
  CHECK(k->section() == "1182");
  CHECK_FALSE(CiteKey::parse("USC:8"));
  CHECK_FALSE(CiteKey::parse("XYZ:1:2"));
  CHECK(normalize_section(" 552A. ") == "552a");
}

TEST_CASE("reference examples from regulatory and statutory text") {
  const auto ps = PatternSet::builtin(Country::US);
  struct Case {
    const char* text;
    Collection coll;
    const char* title;
    Keys keys;
  };
  const std::vector<Case> cases = {
      {"part 135 of this chapter", Collection::CFR, "14", {"CFR:14:135"}},
      {"part 375 of this title", Collection::CFR, "14", {"CFR:14:375"}},
      {"§ 3.5(b) and § 3.5(c)", Collection::CFR, "37", {"CFR:37:3.5"}},
      {"Section 3.5(b)", Collection::CFR, "37", {"CFR:37:3.5"}},
      {"49 CFR 1.47(k)", Collection::CFR, "14", {"CFR:49:1.47"}},
      {"27 CFR 46.155, 178.152 and 179.182", Collection::CFR, "26",
       {"CFR:27:46.155", "CFR:27:178.152", "CFR:27:179.182"}},
      {"8 U.S.C. 1182(d)(5)", Collection::CFR, "8", {"USC:8:1182"}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    const auto [keys, spans] = keys_in(c.text, us_ctx(c.coll, c.title), ps);
    CHECK(keys == c.keys);
    CHECK(spans >= 1);
  }
  // The enumeration is a single reference.
  CHECK(keys_in("27 CFR 46.155, 178.152 and 179.182", us_ctx(Collection::CFR, "26"), ps).second == 1);
}

TEST_CASE("references inside running text") {
  const auto ps = PatternSet::builtin(Country::US);
  const auto ctx = us_ctx(Collection::USC, "12");
  CHECK(keys_in("as defined in section 1842 of this title, the", ctx, ps).first == Keys{"USC:12:1842"});
  CHECK(keys_in("under sections 1843(k)(6)(B) and 1844 of this title.", ctx, ps).first ==
        Keys{"USC:12:1843", "USC:12:1844"});
  CHECK(keys_in("see 12 U.S.C. 3201 et seq.", ctx, ps).first == Keys{"USC:12:3201"});
  CHECK(keys_in("section 5 of title 15", ctx, ps).first == Keys{"USC:15:5"});
  CHECK(keys_in("part 200 of title 17, Code of Federal Regulations", ctx, ps).first == Keys{"CFR:17:200"});
  CHECK(keys_in("no citation here", ctx, ps).second == 0);
  // A digit glued to a preceding word is not a reference.
  CHECK(keys_in("subsection12 U.S.C. 5", ctx, ps).second <= 1);
}

TEST_CASE("relative locations outside the enclosing collection are deferred") {
  const auto ps = PatternSet::builtin(Country::US);
  CiteContext ctx;
  ctx.country = Country::US;
  const auto r = parse_reference("section 5 of this title", ctx, ps);
  CHECK(r.deferred);
  CHECK(r.keys.empty());
}

TEST_CASE("extraction and resolution over the title 12 fixture") {
  const auto snap = testing::snapshot(Country::US, 2010, {testing::read(LEXNET_FIXTURES "/usc12_5363.xml")});
  const auto ps = PatternSet::builtin(Country::US);
  ExtractionStats stats;
  auto refs = extract_references(snap, ps, nullptr, stats);
  std::set<std::string> keys;
  for (const auto& r : refs)
    for (const auto& t : r.targets) keys.insert(t.str());
  CHECK(keys.count("USC:12:1842"));
  CHECK(keys.count("USC:12:1843"));
  CHECK(keys.count("USC:12:3201"));
  CHECK(keys.count("USC:12:3207"));
  for (const auto& r : refs) {
    if (r.node_key == "usc12_5363_b_1") CHECK(r.source_key == "usc12_5363");
  }
  Diagnostics diag;
  resolve_references(refs, snap, stats, diag);
  CHECK(stats.resolved == 0);  // none of the targets exist in the fixture
  CHECK(stats.unresolved == stats.keys);
}

TEST_CASE("resolution maps keys to seqitems and reports duplicates") {
  const auto snap = testing::snapshot(Country::US, 2010, {R"(<document key="t" doc_type="statute">
    <seqitem key="a" citekey="USC:1:1"><text>See section 2 of this title and section 3 of this title.</text></seqitem>
    <seqitem key="b" citekey="USC:1:2"><text>Nothing.</text></seqitem>
    <seqitem key="c1" citekey="USC:1:3"><text>x</text></seqitem>
    <seqitem key="c2" citekey="USC:1:3"><text>y</text></seqitem>
  </document>)"});
  const auto ps = PatternSet::builtin(Country::US);
  ExtractionStats stats;
  auto refs = extract_references(snap, ps, nullptr, stats);
  Diagnostics diag;
  resolve_references(refs, snap, stats, diag);
  std::set<std::string> targets;
  for (const auto& r : refs) targets.insert(r.resolved.begin(), r.resolved.end());
  CHECK(targets == std::set<std::string>{"b", "c1", "c2"});
  CHECK(stats.duplicate_targets >= 1);
  CHECK_FALSE(diag.empty());
}

TEST_CASE("text above the sequence level is counted but not parsed") {
  const auto snap = testing::snapshot(Country::US, 2010, {R"(<document key="t" doc_type="statute">
    <text>This title implements section 4 of this title.</text>
    <seqitem key="a" citekey="USC:1:1"><text>x</text></seqitem>
  </document>)"});
  ExtractionStats stats;
  auto refs = extract_references(snap, PatternSet::builtin(Country::US), nullptr, stats);
  CHECK(refs.empty());
  CHECK(stats.outside_container == 1);
}

TEST_CASE("German references") {
  const auto ps = PatternSet::builtin(Country::DE);
  const auto reg = LawRegistry::load_csv(LEXNET_DATA "/registry/de_laws.csv");
  CiteContext ctx;
  ctx.country = Country::DE;
  ctx.law = "KWG";
  ctx.year = 2005;
  ctx.registry = &reg;
  CHECK(keys_in("nach § 823 Abs. 1 BGB", ctx, ps).first == Keys{"DE:BGB:823"});
  CHECK(keys_in("die §§ 1 und 2 dieses Gesetzes", ctx, ps).first == Keys{"DE:KWG:1", "DE:KWG:2"});
  CHECK(keys_in("gemäß § 25a Absatz 1 Satz 3 Nr. 2", ctx, ps).first == Keys{"DE:KWG:25a"});
  CHECK(keys_in("§ 10 des Gesetzes über Ordnungswidrigkeiten", ctx, ps).first == Keys{"DE:OWiG:10"});
  CHECK(keys_in("§ 5 des Kreditwesengesetzes", ctx, ps).first == Keys{"DE:KWG:5"});
  // A law that is not in the registry is external.
  const auto spans = find_references("§ 3 des Handelsgesetzbuchs", ps, &reg, 2005);
  REQUIRE(spans.size() == 1);
  CHECK(parse_reference(std::string_view("§ 3 des Handelsgesetzbuchs").substr(spans[0].offset, spans[0].length),
                        ctx, ps).external);
  // Validity windows: AusbV only exists from 1999.
  CHECK(reg.has_abbrev("AusbV", 1999));
  CHECK_FALSE(reg.has_abbrev("AusbV", 1995));
}

TEST_CASE("pattern files") {
  SUBCASE("bundled data files equal the built-in rules") {
    CHECK(testing::read(LEXNET_DATA "/patterns/us.rules") == PatternSet::builtin_text(Country::US));
    CHECK(testing::read(LEXNET_DATA "/patterns/de.rules") == PatternSet::builtin_text(Country::DE));
  }
  SUBCASE("errors carry line numbers") {
    try {
      PatternSet::parse("country = US\n\nfind x = (unclosed\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(PatternSet::parse("country = US\nbogus line\n"), ParseError);
    CHECK_THROWS_AS(PatternSet::parse("country = US\nfind a = {UNDEFINED}\n"), ParseError);
  }
  SUBCASE("definitions expand") {
    const auto ps = PatternSet::parse("country = US\nversion = t\ndefine D = \\d+\nfind n = no\\.\\s*{D}\n");
    REQUIRE(ps.finds().size() == 1);
    CHECK(ps.finds()[0].source == "no\\.\\s*\\d+");
    CHECK(ps.version() == "t");
    CHECK_THROWS_AS(ps.aux("missing"), ConfigError);
  }
}

TEST_CASE("unextracted-reference estimator") {
  // Nine extracted references and one hit outside any span.
  std::string text;
  std::vector<Span> spans;
  for (int i = 0; i < 9; ++i) {
    const std::string ref = "section " + std::to_string(100 + i) + " of this title";
    spans.push_back({text.size(), ref.size()});
    text += ref + "; ";
  }
  text += "and see Sec. 77 for more.";
  const auto est = estimate_unextracted({{text, spans}});
  CHECK(est.extracted == 9);
  CHECK(est.outside == 1);
  CHECK(est.fraction == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(estimate_unextracted({}).fraction == 1.0);
  CHECK(estimate_unextracted({{"part 5 and § 6", {}}}).outside == 2);
}

TEST_CASE("spans never overlap and stay in bounds") {
  const auto ps = PatternSet::builtin(Country::US);
  const std::vector<std::string> pieces = {"section ", "sections ", "§ ", "part ", "12 ", "U.S.C. ", "CFR ",
                                           "1.47", "(a)", " and ", ", ", "of this title", "the ", "x "};
  std::mt19937 rng(3);
  for (int round = 0; round < 300; ++round) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 15);
    for (int i = 0; i < n; ++i) text += pieces[rng() % pieces.size()];
    const auto spans = find_references(text, ps);
    std::size_t end = 0;
    for (const auto& s : spans) {
      CHECK(s.offset >= end);
      CHECK(s.length > 0);
      CHECK(s.offset + s.length <= text.size());
      end = s.offset + s.length;
    }
  }
}
