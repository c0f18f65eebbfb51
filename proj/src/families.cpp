#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "lexnet/mesoclust.hpp"
#include "utf8.hpp"

namespace lexnet::meso {

// --- family graph ---------------------------------------------------------------------

namespace {

struct Weights {
  double statute = 1, regulation = 1;
  double of(DocType d) const { return d == DocType::statute ? statute : regulation; }
};

Weights year_weights(const YearClusters& y, bool rescale) {
  Weights w;
  if (!rescale) return w;
  double s = 0, r = 0;
  for (const auto& l : y.leaves) (l.doc_type == DocType::statute ? s : r) += static_cast<double>(l.tokens);
  const double half = (s + r) / 2;
  if (s > 0) w.statute = half / s;
  if (r > 0) w.regulation = half / r;
  return w;
}

}  // namespace

FamilyGraph build_family_graph(const std::vector<YearClusters>& years, const std::vector<Alignment>& alignments,
                               const FamilyOptions& opts) {
  if (!years.empty() && alignments.size() != years.size() - 1)
    throw ConfigError("need one alignment per adjacent pair of years");
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i].year != years[i - 1].year + 1) throw ConfigError("family graph needs contiguous years");
    if (alignments[i - 1].year_from != years[i - 1].year || alignments[i - 1].year_to != years[i].year)
      throw ConfigError("alignment years do not match the clusterings");
  }
  if (opts.threshold < 0 || opts.threshold > 1) throw ConfigError("family threshold must lie in [0, 1]");

  FamilyGraph fg;
  std::vector<std::uint32_t> first_node(years.size(), 0);
  std::vector<Weights> weights;
  for (std::size_t y = 0; y < years.size(); ++y) {
    first_node[y] = static_cast<std::uint32_t>(fg.nodes.size());
    weights.push_back(year_weights(years[y], opts.rescale_doc_types));
    for (std::uint32_t c = 0; c < years[y].clusters; ++c) fg.nodes.push_back({years[y].year, c, 0, 0, 0});
    for (const auto& l : years[y].leaves) {
      if (l.cluster >= years[y].clusters) throw ConfigError("leaf '" + l.key + "' names an unknown cluster");
      auto& node = fg.nodes[first_node[y] + l.cluster];
      const double t = static_cast<double>(l.tokens) * weights[y].of(l.doc_type);
      (l.doc_type == DocType::statute ? node.tokens_statute : node.tokens_regulation) += t;
    }
  }

  for (std::size_t y = 0; y + 1 < years.size(); ++y) {
    const auto& from = years[y];
    const auto& to = years[y + 1];
    std::unordered_map<std::string_view, std::uint32_t> to_cluster;
    for (const auto& l : to.leaves) to_cluster.emplace(l.key, l.cluster);
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> overlap;
    for (const auto& l : from.leaves) {
      const auto img = alignments[y].image(l.key);
      if (!img) continue;
      auto it = to_cluster.find(*img);
      if (it == to_cluster.end()) continue;
      overlap[{l.cluster, it->second}] += static_cast<double>(l.tokens) * weights[y].of(l.doc_type);
    }
    for (const auto& [pair, ov] : overlap) {
      const auto a = first_node[y] + pair.first;
      const auto b = first_node[y + 1] + pair.second;
      const double sa = fg.nodes[a].tokens(), sb = fg.nodes[b].tokens();
      if (ov <= 0 || sa <= 0 || sb <= 0) continue;
      const double fa = ov / sa, fb = ov / sb;
      if (fa >= opts.threshold && fb >= opts.threshold) fg.edges.push_back({a, b, ov, fa, fb});
    }
  }

  std::vector<std::uint32_t> parent(fg.nodes.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : fg.edges) {
    const auto ra = find(e.from), rb = find(e.to);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::unordered_map<std::uint32_t, std::uint32_t> family_of_root;
  for (std::uint32_t i = 0; i < fg.nodes.size(); ++i) {
    const auto r = find(i);
    auto [it, fresh] = family_of_root.emplace(r, static_cast<std::uint32_t>(fg.families.size()));
    if (fresh) fg.families.push_back({it->second, {}, {}});
    auto& fam = fg.families[it->second];
    fam.nodes.push_back(i);
    fg.nodes[i].family = fam.id;
    auto& ys = fam.series[fg.nodes[i].year];
    ys.statute += fg.nodes[i].tokens_statute;
    ys.regulation += fg.nodes[i].tokens_regulation;
  }
  return fg;
}

std::string family_graph_json(const FamilyGraph& fg) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["nodes"] = ordered_json::array();
  for (const auto& n : fg.nodes) {
    j["nodes"].push_back({{"year", n.year},
                          {"cluster", n.cluster},
                          {"family", n.family},
                          {"tokens_statute", n.tokens_statute},
                          {"tokens_regulation", n.tokens_regulation}});
  }
  j["edges"] = ordered_json::array();
  for (const auto& e : fg.edges) {
    const auto& a = fg.nodes[e.from];
    const auto& b = fg.nodes[e.to];
    j["edges"].push_back({{"from", {{"year", a.year}, {"cluster", a.cluster}}},
                          {"to", {{"year", b.year}, {"cluster", b.cluster}}},
                          {"overlap", e.overlap},
                          {"share_from", e.share_from},
                          {"share_to", e.share_to}});
  }
  j["families"] = ordered_json::array();
  for (const auto& f : fg.families) {
    ordered_json series = ordered_json::array();
    for (const auto& [year, v] : f.series)
      series.push_back({{"year", year}, {"statute", v.statute}, {"regulation", v.regulation}});
    ordered_json members = ordered_json::array();
    for (auto n : f.nodes) members.push_back({{"year", fg.nodes[n].year}, {"cluster", fg.nodes[n].cluster}});
    j["families"].push_back({{"id", f.id}, {"members", members}, {"series", series}});
  }
  return j.dump(2) + "\n";
}

// --- classification -------------------------------------------------------------------

std::string_view to_string(Composition c) {
  switch (c) {
    case Composition::statute_heavy: return "statute-heavy";
    case Composition::regulation_heavy: return "regulation-heavy";
    case Composition::mixed: return "mixed";
  }
  return {};
}

std::string_view to_string(GrowthDriver g) {
  switch (g) {
    case GrowthDriver::statute_driven: return "statute-driven";
    case GrowthDriver::regulation_driven: return "regulation-driven";
    case GrowthDriver::mixed: return "mixed";
  }
  return {};
}

FamilyClass classify_family(const std::map<int, FamilyYear>& series, int first, int last, Diagnostics& diag,
                            double share) {
  if (last < first) throw ConfigError("classification period ends before it starts");
  FamilyClass fc;
  double sum_s = 0, sum_r = 0;
  int years = 0;
  for (int y = first; y <= last; ++y) {
    auto it = series.find(y);
    if (it == series.end()) continue;
    const double total = it->second.statute + it->second.regulation;
    if (total <= 0) continue;
    sum_s += it->second.statute / total;
    sum_r += it->second.regulation / total;
    ++years;
  }
  if (years == 0) {
    diag.note("family has no tokens in " + std::to_string(first) + "-" + std::to_string(last));
  } else {
    const double avg_s = sum_s / years, avg_r = sum_r / years;
    if (avg_s >= share)
      fc.average = Composition::statute_heavy;
    else if (avg_r >= share)
      fc.average = Composition::regulation_heavy;
    if (avg_s > avg_r)
      fc.majority = Composition::statute_heavy;
    else if (avg_r > avg_s)
      fc.majority = Composition::regulation_heavy;
  }

  auto at = [&](int y) {
    auto it = series.find(y);
    return it == series.end() ? FamilyYear{} : it->second;
  };
  const auto a = at(first), b = at(last);
  const double ds = b.statute - a.statute;
  const double dr = b.regulation - a.regulation;
  const double net = ds + dr;
  if (net == 0) {
    diag.note("family has zero net growth between " + std::to_string(first) + " and " + std::to_string(last));
  } else if (ds / net >= share) {
    fc.growth = GrowthDriver::statute_driven;
  } else if (dr / net >= share) {
    fc.growth = GrowthDriver::regulation_driven;
  }
  return fc;
}

// --- TF-IDF -----------------------------------------------------------------------------

std::vector<std::string> default_stoplist() {
  return {"appendix",  "article",      "articles",  "book",     "chapter",    "chapters",  "clause",
          "division",  "item",         "paragraph", "paragraphs", "part",     "parts",     "sec",
          "section",   "sections",     "subchapter", "subclause", "subdivision", "subitem", "subparagraph",
          "subpart",   "subsection",   "subsections", "subtitle", "title",     "titles",    "volume",
          "abschnitt", "absatz",       "artikel",   "buch",     "kapitel",    "nummer",    "satz",
          "teil",      "titel",        "unterabschnitt"};
}

std::vector<std::string> load_stoplist(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(corpus::fold_case(line));
  }
  return out;
}

std::vector<std::string> terms(std::string_view text, const std::vector<std::string>& stoplist) {
  const std::unordered_set<std::string> stop(stoplist.begin(), stoplist.end());
  const std::string folded = corpus::fold_case(text);
  std::vector<std::string> out;
  for (auto tok : corpus::split_tokens(folded)) {
    std::string term;
    bool numeric = false;
    std::size_t pos = 0;
    while (pos < tok.size()) {
      const auto cp = utf8::next(tok, pos);
      const bool ascii_alnum = (cp >= U'a' && cp <= U'z') || (cp >= U'0' && cp <= U'9');
      const bool letter = ascii_alnum || (cp >= 0xC0 && cp != 0xD7 && cp != 0xF7 && !(cp >= 0x2000 && cp <= 0x2BFF));
      if (!letter) continue;
      if (cp >= U'0' && cp <= U'9') numeric = true;
      utf8::append(term, cp);
    }
    if (term.empty() || numeric || stop.count(term)) continue;
    out.push_back(std::move(term));
  }
  return out;
}

std::vector<std::vector<TermScore>> family_tfidf(const std::vector<std::string>& documents,
                                                 const std::vector<std::string>& stoplist, std::size_t top_k) {
  const auto N = documents.size();
  std::vector<std::map<std::string, std::uint64_t>> tf(N);
  std::vector<std::uint64_t> length(N, 0);
  std::map<std::string, std::uint64_t> df;
  for (std::size_t d = 0; d < N; ++d) {
    for (auto& t : terms(documents[d], stoplist)) {
      ++length[d];
      ++tf[d][std::move(t)];
    }
    for (const auto& [t, _] : tf[d]) ++df[t];
  }
  std::vector<std::vector<TermScore>> out(N);
  for (std::size_t d = 0; d < N; ++d) {
    for (const auto& [t, c] : tf[d]) {
      const double idf = std::log(static_cast<double>(N) / static_cast<double>(df[t]));
      const double score = static_cast<double>(c) / static_cast<double>(length[d]) * idf;
      if (score > 0) out[d].push_back({t, score});
    }
    std::sort(out[d].begin(), out[d].end(), [](const TermScore& a, const TermScore& b) {
      return a.score != b.score ? a.score > b.score : a.term < b.term;
    });
    if (out[d].size() > top_k) out[d].resize(top_k);
  }
  return out;
}

}  // namespace lexnet::meso
