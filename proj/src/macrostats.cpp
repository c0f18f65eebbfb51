#include "lexnet/macrostats.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace lexnet::macro {

using graph::EdgeType;
using graph::LegalGraph;
using graph::ReferenceClass;

// --- growth -----------------------------------------------------------------------

GrowthSeries growth(const std::vector<const LegalGraph*>& graphs, int baseline) {
  GrowthSeries s;
  s.baseline = baseline;
  if (graphs.empty()) return s;
  s.country = graphs.front()->country;
  bool has_baseline = false;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (i && graphs[i]->year != graphs[i - 1]->year + 1)
      throw ConfigError("growth needs contiguous years");
    if (graphs[i]->country != s.country) throw ConfigError("growth series mixes countries");
    has_baseline |= graphs[i]->year == baseline;
  }
  if (!has_baseline) throw ConfigError("baseline year " + std::to_string(baseline) + " outside series");

  for (DocType d : {DocType::statute, DocType::regulation}) {
    const auto lateral = d == DocType::statute ? ReferenceClass::lateral_statute
                                               : ReferenceClass::lateral_regulation;
    std::vector<GrowthRow> rows;
    for (const auto* g : graphs) {
      GrowthRow r;
      r.doc_type = d;
      r.year = g->year;
      for (const auto& n : g->nodes) {
        if (n.doc_type != d) continue;
        r.tokens += n.tokens;
        ++r.structures;
      }
      for (const auto& e : g->edges)
        if (e.type == EdgeType::reference && e.cls == lateral) ++r.lateral_references;
      rows.push_back(r);
    }
    const auto& base = *std::find_if(rows.begin(), rows.end(), [&](const GrowthRow& r) { return r.year == baseline; });
    auto rel = [](std::uint64_t v, std::uint64_t b) -> std::optional<double> {
      if (b == 0) return std::nullopt;
      return static_cast<double>(v) / static_cast<double>(b);
    };
    const GrowthRow b = base;
    for (auto& r : rows) {
      r.rel_tokens = rel(r.tokens, b.tokens);
      r.rel_structures = rel(r.structures, b.structures);
      r.rel_lateral = rel(r.lateral_references, b.lateral_references);
    }
    auto pct = [](std::uint64_t first, std::uint64_t last) -> std::optional<double> {
      if (first == 0) return std::nullopt;
      return (static_cast<double>(last) - static_cast<double>(first)) * 100.0 / static_cast<double>(first);
    };
    s.deltas.push_back({d, pct(rows.front().tokens, rows.back().tokens),
                        pct(rows.front().structures, rows.back().structures),
                        pct(rows.front().lateral_references, rows.back().lateral_references)});
    s.rows.insert(s.rows.end(), rows.begin(), rows.end());
  }
  for (const auto* g : graphs) {
    auto& counts = s.by_class[g->year];
    counts.fill(0);
    for (const auto& e : g->edges)
      if (e.type == EdgeType::reference) ++counts[static_cast<std::size_t>(e.cls)];
  }
  return s;
}

// --- degree distributions -------------------------------------------------------

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::statutes: return "statutes";
    case Scope::regulations: return "regulations";
    case Scope::all: return "all";
  }
  return {};
}

Scope parse_scope(std::string_view s) {
  if (s == "statutes") return Scope::statutes;
  if (s == "regulations") return Scope::regulations;
  if (s == "all") return Scope::all;
  throw ConfigError("unknown scope '" + std::string(s) + "'");
}

bool in_scope(Scope scope, DocType d) {
  return scope == Scope::all || (scope == Scope::statutes) == (d == DocType::statute);
}

DegreeDistribution degree_distribution(const LegalGraph& g, const DegreeOptions& opts) {
  std::vector<char> take_class(graph::kReferenceClasses, opts.classes.empty() ? 1 : 0);
  for (auto c : opts.classes) take_class[static_cast<std::size_t>(c)] = 1;

  std::vector<std::uint64_t> degree(g.nodes.size(), 0);
  std::vector<std::int64_t> last_neighbor(g.nodes.size(), -1);
  // Edges are sorted by (source, target), so for out-degrees repeated targets
  // are adjacent; in-degrees need the distinct-source check per target.
  std::vector<std::set<std::uint32_t>> seen;
  if (!opts.weighted && opts.direction == Direction::in) seen.resize(g.nodes.size());
  for (const auto& e : g.edges) {
    if (e.type != EdgeType::reference || !take_class[static_cast<std::size_t>(e.cls)]) continue;
    const auto node = opts.direction == Direction::in ? e.target : e.source;
    const auto other = opts.direction == Direction::in ? e.source : e.target;
    if (opts.weighted) {
      ++degree[node];
    } else if (opts.direction == Direction::out) {
      if (last_neighbor[node] != other) {
        ++degree[node];
        last_neighbor[node] = other;
      }
    } else if (seen[node].insert(other).second) {
      ++degree[node];
    }
  }

  DegreeDistribution d;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    if (n.level_kind != LevelKind::seqitem || !in_scope(opts.scope, n.doc_type)) continue;
    ++d.seqitems;
    ++d.counts[degree[i]];
    if (opts.per_token) {
      if (n.subtree_tokens == 0)
        ++d.empty_text;
      else
        ++d.per_token[static_cast<double>(degree[i]) / static_cast<double>(n.subtree_tokens)];
    }
  }
  return d;
}

// --- components -----------------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent, size;
  explicit UnionFind(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

double ratio(std::uint64_t a, std::uint64_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

double ComponentStats::lcc_fraction() const { return ratio(lcc_nodes, nodes); }
double ComponentStats::satellite_fraction() const { return ratio(satellite_nodes, nodes); }
double ComponentStats::isolate_fraction() const { return ratio(isolates, nodes); }
double ComponentStats::components_per_1000_tokens() const {
  return tokens == 0 ? 0.0 : 1000.0 * static_cast<double>(nontrivial_components) / static_cast<double>(tokens);
}

ComponentStats components(const LegalGraph& g, Scope scope) {
  const Digraph d = reference_digraph(g, scope);
  ComponentStats st;
  st.nodes = d.keys.size();
  for (const auto& n : g.nodes)
    if (in_scope(scope, n.doc_type)) st.tokens += n.tokens;

  UnionFind uf(d.keys.size());
  std::vector<char> touched(d.keys.size(), 0);
  for (auto [s, t] : d.edges) {
    if (s == t) continue;
    touched[s] = touched[t] = 1;
    uf.unite(s, t);
  }
  std::map<std::uint32_t, std::uint64_t> sizes;
  for (std::uint32_t i = 0; i < d.keys.size(); ++i) {
    if (touched[i])
      ++sizes[uf.find(i)];
    else
      ++st.isolates;
  }
  st.nontrivial_components = sizes.size();
  std::uint64_t largest = 0, total = 0;
  for (auto [_, sz] : sizes) {
    largest = std::max(largest, sz);
    total += sz;
  }
  st.lcc_nodes = largest;
  st.satellite_nodes = total - largest;
  return st;
}

// --- rocket decomposition -------------------------------------------------------

Digraph reference_digraph(const LegalGraph& g, Scope scope) {
  Digraph d;
  std::vector<std::int64_t> local(g.nodes.size(), -1);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    if (n.level_kind != LevelKind::seqitem || !in_scope(scope, n.doc_type)) continue;
    local[i] = static_cast<std::int64_t>(d.keys.size());
    d.keys.push_back(n.key);
  }
  for (const auto& e : g.edges) {
    if (e.type != EdgeType::reference || local[e.source] < 0 || local[e.target] < 0) continue;
    d.edges.emplace_back(static_cast<std::uint32_t>(local[e.source]), static_cast<std::uint32_t>(local[e.target]));
  }
  return d;
}

namespace {

// Iterative Tarjan over the nodes with mask set; returns component id per node
// (-1 outside the mask) and the component count.
std::pair<std::vector<std::int64_t>, std::size_t> strong_components(
    const std::vector<std::vector<std::uint32_t>>& adj, const std::vector<char>& mask) {
  const auto n = adj.size();
  std::vector<std::int64_t> comp(n, -1), index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;
  std::int64_t counter = 0;
  std::size_t ncomp = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (!mask[root] || index[root] >= 0) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < adj[v].size()) {
        const auto w = adj[v][next++];
        if (!mask[w]) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const auto done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = static_cast<std::int64_t>(ncomp);
        } while (w != done);
        ++ncomp;
      }
    }
  }
  return {comp, ncomp};
}

std::vector<char> reach(const std::vector<std::vector<std::uint32_t>>& adj, const std::vector<char>& start) {
  std::vector<char> seen = start;
  std::vector<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < start.size(); ++i)
    if (start[i]) queue.push_back(i);
  while (!queue.empty()) {
    const auto v = queue.back();
    queue.pop_back();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

RocketDecomposition rocket(const Digraph& g, Diagnostics& diag) {
  const auto n = g.keys.size();
  if (n == 0) throw StructuralError("rocket decomposition of an empty graph");
  RocketDecomposition r;
  r.total_nodes = n;

  std::vector<std::vector<std::uint32_t>> fwd(n), bwd(n);
  UnionFind uf(n);
  for (auto [s, t] : g.edges) {
    fwd[s].push_back(t);
    bwd[t].push_back(s);
    uf.unite(s, t);
  }

  // Largest weak component; ties go to the component holding the smallest key.
  std::vector<std::uint64_t> csize(n, 0);
  std::vector<std::uint32_t> cmin(n, 0);
  std::vector<char> cseen(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto c = uf.find(i);
    ++csize[c];
    if (!cseen[c] || g.keys[i] < g.keys[cmin[c]]) cmin[c] = i;
    cseen[c] = 1;
  }
  std::uint32_t best = uf.find(0);
  for (std::uint32_t c = 0; c < n; ++c) {
    if (!cseen[c]) continue;
    if (csize[c] > csize[best] || (csize[c] == csize[best] && g.keys[cmin[c]] < g.keys[cmin[best]])) best = c;
  }
  std::vector<char> in_lcc(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) in_lcc[i] = uf.find(i) == best;

  auto [comp, ncomp] = strong_components(fwd, in_lcc);
  std::vector<std::uint64_t> ssize(ncomp, 0);
  std::vector<std::int64_t> smin(ncomp, -1);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (comp[i] < 0) continue;
    const auto c = static_cast<std::size_t>(comp[i]);
    ++ssize[c];
    if (smin[c] < 0 || g.keys[i] < g.keys[static_cast<std::size_t>(smin[c])]) smin[c] = i;
  }
  std::size_t top = 0;
  std::size_t ties = 1;
  for (std::size_t c = 1; c < ncomp; ++c) {
    if (ssize[c] > ssize[top]) {
      top = c;
      ties = 1;
    } else if (ssize[c] == ssize[top]) {
      ++ties;
      if (g.keys[static_cast<std::size_t>(smin[c])] < g.keys[static_cast<std::size_t>(smin[top])]) top = c;
    }
  }
  r.all_singleton = ssize[top] == 1;
  if (r.all_singleton && ncomp > 1)
    diag.note("every strongly connected component of the largest component is a single node");
  else if (ties > 1)
    diag.note(std::to_string(ties) + " strongly connected components share the largest size " +
              std::to_string(ssize[top]) + "; chose the one holding the smallest key");

  std::vector<char> core(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) core[i] = comp[i] == static_cast<std::int64_t>(top);
  const auto down = reach(fwd, core);
  const auto up = reach(bwd, core);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!in_lcc[i]) continue;
    r.lcc.push_back(g.keys[i]);
    if (core[i])
      r.scc.push_back(g.keys[i]);
    else if (up[i])
      r.in.push_back(g.keys[i]);
    else if (down[i])
      r.out.push_back(g.keys[i]);
    else
      r.tt.push_back(g.keys[i]);
  }
  for (auto* v : {&r.lcc, &r.scc, &r.in, &r.out, &r.tt}) std::sort(v->begin(), v->end());
  return r;
}

}  // namespace lexnet::macro
