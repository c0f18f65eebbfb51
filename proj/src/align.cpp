#include <algorithm>
#include <deque>
#include <unordered_map>

#include "lexnet/csv.hpp"
#include "lexnet/mesoclust.hpp"
#include "utf8.hpp"

namespace lexnet::meso {

double jaro_winkler(std::string_view a, std::string_view b) {
  const auto s = utf8::decode(a);
  const auto t = utf8::decode(b);
  if (s.empty() && t.empty()) return 1.0;
  if (s.empty() || t.empty()) return 0.0;
  const std::size_t window = std::max(s.size(), t.size()) / 2 > 0 ? std::max(s.size(), t.size()) / 2 - 1 : 0;
  std::vector<char> s_hit(s.size(), 0), t_hit(t.size(), 0);
  std::size_t m = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(t.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (t_hit[j] || s[i] != t[j]) continue;
      s_hit[i] = t_hit[j] = 1;
      ++m;
      break;
    }
  }
  if (m == 0) return 0.0;
  std::size_t half = 0, j = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s_hit[i]) continue;
    while (!t_hit[j]) ++j;
    if (s[i] != t[j]) ++half;
    ++j;
  }
  const double md = static_cast<double>(m);
  const double jaro = (md / static_cast<double>(s.size()) + md / static_cast<double>(t.size()) +
                       (md - static_cast<double>(half) / 2.0) / md) / 3.0;
  std::size_t prefix = 0;
  while (prefix < 4 && prefix < s.size() && prefix < t.size() && s[prefix] == t[prefix]) ++prefix;
  return jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
}

std::optional<std::string> Alignment::image(std::string_view from) const {
  auto it = std::lower_bound(matches.begin(), matches.end(), from,
                             [](const Match& m, std::string_view k) { return m.from < k; });
  if (it == matches.end() || it->from != from) return std::nullopt;
  return it->to;
}

std::map<int, std::size_t> Alignment::per_pass() const {
  std::map<int, std::size_t> out;
  for (const auto& m : matches) ++out[m.pass];
  return out;
}

namespace {

struct TextNode {
  std::string key;
  std::string_view text;
  std::size_t chars = 0;
};

std::vector<TextNode> text_nodes(const corpus::Snapshot& s) {
  std::vector<TextNode> out;
  for (const auto& tree : s.trees) {
    corpus::walk(tree, [&](const corpus::CorpusNode& n, const corpus::CorpusNode*) {
      if (n.text && !n.text->empty()) out.push_back({n.key, *n.text, utf8::length(*n.text)});
    });
  }
  std::sort(out.begin(), out.end(), [](const TextNode& a, const TextNode& b) { return a.key < b.key; });
  return out;
}

std::vector<std::vector<std::uint32_t>> undirected(const graph::LegalGraph& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.nodes.size());
  for (const auto& e : g.edges) {
    if (e.source == e.target) continue;
    adj[e.source].push_back(e.target);
    adj[e.target].push_back(e.source);
  }
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

// Nodes within `hops` of `start`, grouped by distance; each ring in index
// order, which is key order in a LegalGraph.
std::vector<std::vector<std::uint32_t>> rings(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t start,
                                              int hops, std::vector<int>& dist) {
  std::vector<std::vector<std::uint32_t>> out{{start}};
  std::vector<std::uint32_t> visited{start};
  dist[start] = 0;
  for (int h = 1; h <= hops; ++h) {
    std::vector<std::uint32_t> next;
    for (auto u : out.back())
      for (auto v : adj[u])
        if (dist[v] < 0) {
          dist[v] = h;
          next.push_back(v);
          visited.push_back(v);
        }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    out.push_back(std::move(next));
  }
  for (auto v : visited) dist[v] = -1;
  return out;
}

}  // namespace

Alignment align(const corpus::Snapshot& a, const corpus::Snapshot& b, const graph::LegalGraph& ga,
                const graph::LegalGraph& gb, const AlignOptions& opts) {
  Alignment out;
  out.year_from = a.year;
  out.year_to = b.year;
  const auto A = text_nodes(a);
  const auto B = text_nodes(b);
  std::vector<std::int64_t> fwd(A.size(), -1), bwd(B.size(), -1);
  std::vector<int> pass_of(A.size(), 0);
  auto link = [&](std::size_t i, std::size_t j, int pass) {
    fwd[i] = static_cast<std::int64_t>(j);
    bwd[j] = static_cast<std::int64_t>(i);
    pass_of[i] = pass;
  };

  // Pass 1: long texts occurring exactly once in each snapshot.
  {
    std::unordered_map<std::string_view, std::pair<std::size_t, std::size_t>> ca, cb;  // count, index
    for (std::size_t i = 0; i < A.size(); ++i) {
      auto& e = ca[A[i].text];
      ++e.first;
      e.second = i;
    }
    for (std::size_t j = 0; j < B.size(); ++j) {
      auto& e = cb[B[j].text];
      ++e.first;
      e.second = j;
    }
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (A[i].chars < opts.min_chars) continue;
      const auto& ea = ca[A[i].text];
      if (ea.first != 1) continue;
      auto it = cb.find(A[i].text);
      if (it == cb.end() || it->second.first != 1) continue;
      link(i, it->second.second, 1);
    }
  }

  // Pass 2: same key and identical text.
  {
    std::unordered_map<std::string_view, std::size_t> bkey;
    for (std::size_t j = 0; j < B.size(); ++j) bkey.emplace(B[j].key, j);
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (fwd[i] >= 0) continue;
      auto it = bkey.find(A[i].key);
      if (it == bkey.end() || bwd[it->second] >= 0 || B[it->second].text != A[i].text) continue;
      link(i, it->second, 2);
    }
  }

  // Pass 3: one text contains the other and the unmatched remainder is
  // shorter than the contained part. Only unambiguous pairs are matched.
  {
    std::vector<std::size_t> by_len(B.size());
    for (std::size_t j = 0; j < B.size(); ++j) by_len[j] = j;
    std::sort(by_len.begin(), by_len.end(), [&](std::size_t x, std::size_t y) {
      return B[x].chars != B[y].chars ? B[x].chars < B[y].chars : B[x].key < B[y].key;
    });
    std::vector<std::size_t> lens(by_len.size());
    for (std::size_t k = 0; k < by_len.size(); ++k) lens[k] = B[by_len[k]].chars;
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (fwd[i] >= 0) continue;
      const auto L = A[i].chars;
      const auto lo = std::upper_bound(lens.begin(), lens.end(), L / 2) - lens.begin();
      const auto hi = std::lower_bound(lens.begin(), lens.end(), 2 * L) - lens.begin();
      std::int64_t found = -1;
      bool ambiguous = false;
      for (auto k = lo; k < hi && !ambiguous; ++k) {
        const auto j = by_len[static_cast<std::size_t>(k)];
        if (bwd[j] >= 0) continue;
        const auto& bt = B[j].text;
        const auto& at = A[i].text;
        const bool contains = bt.size() >= at.size() ? bt.find(at) != std::string_view::npos
                                                     : at.find(bt) != std::string_view::npos;
        if (!contains) continue;
        const auto shorter = std::min(A[i].chars, B[j].chars);
        const auto longer = std::max(A[i].chars, B[j].chars);
        if (longer - shorter >= shorter) continue;
        if (found >= 0) ambiguous = true;
        found = static_cast<std::int64_t>(j);
      }
      if (found >= 0 && !ambiguous) link(i, static_cast<std::size_t>(found), 3);
    }
  }

  // Pass 4: Jaro-Winkler search around the image of the nearest anchor.
  {
    const auto adj_a = undirected(ga);
    const auto adj_b = undirected(gb);
    // Graph index <-> text node index.
    std::vector<std::int64_t> a_text(ga.nodes.size(), -1), b_text(gb.nodes.size(), -1);
    std::vector<std::int64_t> a_graph(A.size(), -1), b_graph(B.size(), -1);
    for (std::size_t i = 0; i < A.size(); ++i)
      if (auto gi = ga.find(A[i].key)) {
        a_text[*gi] = static_cast<std::int64_t>(i);
        a_graph[i] = *gi;
      }
    for (std::size_t j = 0; j < B.size(); ++j)
      if (auto gj = gb.find(B[j].key)) {
        b_text[*gj] = static_cast<std::int64_t>(j);
        b_graph[j] = *gj;
      }
    std::vector<int> dist_a(ga.nodes.size(), -1), dist_b(gb.nodes.size(), -1);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < A.size(); ++i) {
        if (fwd[i] >= 0 || a_graph[i] < 0) continue;
        std::int64_t anchor = -1;
        for (const auto& ring : rings(adj_a, static_cast<std::uint32_t>(a_graph[i]), opts.hops, dist_a)) {
          for (auto u : ring) {
            const auto ti = a_text[u];
            if (ti >= 0 && fwd[static_cast<std::size_t>(ti)] >= 0) {
              anchor = ti;
              break;
            }
          }
          if (anchor >= 0) break;
        }
        if (anchor < 0) continue;
        const auto image = static_cast<std::size_t>(fwd[static_cast<std::size_t>(anchor)]);
        if (b_graph[image] < 0) continue;
        double best = opts.similarity;
        std::int64_t pick = -1;
        for (const auto& ring : rings(adj_b, static_cast<std::uint32_t>(b_graph[image]), opts.hops, dist_b)) {
          for (auto u : ring) {
            const auto tj = b_text[u];
            if (tj < 0 || bwd[static_cast<std::size_t>(tj)] >= 0) continue;
            const double sim = jaro_winkler(A[i].text, B[static_cast<std::size_t>(tj)].text);
            if (sim > best || (sim == best && pick >= 0 && sim > opts.similarity &&
                               B[static_cast<std::size_t>(tj)].key < B[static_cast<std::size_t>(pick)].key)) {
              best = sim;
              pick = tj;
            }
          }
        }
        if (pick < 0) continue;
        link(i, static_cast<std::size_t>(pick), 4);
        changed = true;
      }
    }
  }

  for (std::size_t i = 0; i < A.size(); ++i)
    if (fwd[i] >= 0) out.matches.push_back({A[i].key, B[static_cast<std::size_t>(fwd[i])].key, pass_of[i]});
  return out;
}

std::string alignment_csv(const Alignment& a) {
  std::string out;
  csv::append_row(out, {"from", "to", "pass"});
  for (const auto& m : a.matches) csv::append_row(out, {m.from, m.to, std::to_string(m.pass)});
  return out;
}

}  // namespace lexnet::meso
