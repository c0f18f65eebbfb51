#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "lexnet/mesoclust.hpp"
#include "lexnet/parallel.hpp"

namespace lexnet::meso {

void FlowGraph::add_edge(std::uint32_t a, std::uint32_t b, double w) {
  if (a == b || w <= 0) return;
  adj[a].emplace_back(b, w);
  adj[b].emplace_back(a, w);
  strength[a] += w;
  strength[b] += w;
  total_weight += w;
}

FlowGraph flow_graph(const graph::QuotientGraph& q) {
  FlowGraph g;
  for (const auto& n : q.nodes) g.keys.push_back(n.key);
  g.adj.resize(g.keys.size());
  g.strength.assign(g.keys.size(), 0.0);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> sym;
  for (const auto& e : q.edges) {
    if (e.source == e.target) continue;
    sym[{std::min(e.source, e.target), std::max(e.source, e.target)}] += e.weight;
  }
  for (const auto& [pair, w] : sym) g.add_edge(pair.first, pair.second, static_cast<double>(w));
  return g;
}

namespace {

inline double plogp(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

// A graph being optimized: aggregated nodes carry internal weight.
struct Level {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> strength;  // includes twice the internal weight
  std::vector<double> internal;  // weight of edges inside the aggregated node
  double total = 0;              // 2W

  std::size_t size() const { return adj.size(); }
};

Level base_level(const FlowGraph& g) {
  Level lv;
  lv.adj = g.adj;
  lv.strength = g.strength;
  lv.internal.assign(g.size(), 0.0);
  lv.total = 2 * g.total_weight;
  return lv;
}

class Shuffler {
 public:
  explicit Shuffler(std::uint64_t seed) : rng_(seed) {}
  void shuffle(std::vector<std::uint32_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng_() % i);
      std::swap(v[i - 1], v[j]);
    }
  }
  std::uint64_t next() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Module bookkeeping for the map equation in weight units (flows times 2W).
struct Modules {
  std::vector<std::uint32_t> of;  // node -> module
  std::vector<double> exit, flow;
  std::vector<std::uint32_t> members;
  double exit_sum = 0;
  double T = 1;

  double term(double e, double s) const { return -2 * plogp(e / T) + plogp((e + s) / T); }
};

Modules init_modules(const Level& lv, const std::vector<std::uint32_t>& start) {
  Modules m;
  m.T = lv.total;
  m.of = start;
  const auto k = lv.size();
  m.exit.assign(k, 0.0);
  m.flow.assign(k, 0.0);
  m.members.assign(k, 0);
  for (std::uint32_t u = 0; u < k; ++u) {
    const auto mu = m.of[u];
    m.flow[mu] += lv.strength[u];
    ++m.members[mu];
    for (auto [v, w] : lv.adj[u])
      if (m.of[v] != mu) m.exit[mu] += w;
  }
  for (double e : m.exit) m.exit_sum += e;
  return m;
}

// One local-moving phase; returns true if any node moved.
bool local_moves(const Level& lv, Modules& m, Shuffler& rng) {
  const auto n = static_cast<std::uint32_t>(lv.size());
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  std::vector<double> to_module(n, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<std::uint32_t> empty;
  for (std::uint32_t i = 0; i < n; ++i)
    if (m.members[i] == 0) empty.push_back(i);

  bool any = false;
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool moved = false;
    for (auto u : order) {
      const auto a = m.of[u];
      touched.clear();
      for (auto [v, w] : lv.adj[u]) {
        const auto mv = m.of[v];
        if (to_module[mv] == 0.0) touched.push_back(mv);
        to_module[mv] += w;
      }
      const double s_u = lv.strength[u];
      const double e_u = s_u - 2 * lv.internal[u];
      const double w_a = to_module[a];

      const double ea_new = std::max(0.0, m.exit[a] - e_u + 2 * w_a);
      const double sa_new = m.flow[a] - s_u;
      const double base_a = m.term(m.exit[a], m.flow[a]);
      const double new_a = m.members[a] == 1 ? 0.0 : m.term(ea_new, sa_new);

      double best_delta = 0;
      std::int64_t best = -1;
      double best_eb = 0;
      auto consider = [&](std::uint32_t b, double w_b) {
        const double eb_new = std::max(0.0, m.exit[b] + e_u - 2 * w_b);
        const double sb_new = m.flow[b] + s_u;
        const double exit_sum_new = m.exit_sum - m.exit[a] - m.exit[b] + ea_new + eb_new;
        const double delta = plogp(exit_sum_new / m.T) - plogp(m.exit_sum / m.T) + new_a - base_a +
                             m.term(eb_new, sb_new) - m.term(m.exit[b], m.flow[b]);
        if (delta < best_delta - 1e-12) {
          best_delta = delta;
          best = b;
          best_eb = eb_new;
        }
      };
      for (auto b : touched)
        if (b != a) consider(b, to_module[b]);
      if (m.members[a] > 1 && !empty.empty()) consider(empty.back(), 0.0);
      for (auto b : touched) to_module[b] = 0.0;
      if (best < 0) continue;

      const auto b = static_cast<std::uint32_t>(best);
      if (!empty.empty() && b == empty.back()) empty.pop_back();
      m.exit_sum += ea_new + best_eb - m.exit[a] - m.exit[b];
      m.exit[a] = m.members[a] == 1 ? 0.0 : ea_new;
      m.flow[a] = m.members[a] == 1 ? 0.0 : sa_new;
      m.exit[b] = best_eb;
      m.flow[b] += s_u;
      if (--m.members[a] == 0) empty.push_back(a);
      ++m.members[b];
      m.of[u] = b;
      moved = any = true;
    }
    if (!moved) break;
  }
  return any;
}

Level aggregate(const Level& lv, const std::vector<std::uint32_t>& of, std::uint32_t k) {
  Level out;
  out.adj.resize(k);
  out.strength.assign(k, 0.0);
  out.internal.assign(k, 0.0);
  out.total = lv.total;
  std::vector<std::map<std::uint32_t, double>> acc(k);
  for (std::uint32_t u = 0; u < lv.size(); ++u) {
    const auto mu = of[u];
    out.strength[mu] += lv.strength[u];
    out.internal[mu] += lv.internal[u];
    for (auto [v, w] : lv.adj[u]) {
      if (of[v] == mu)
        out.internal[mu] += w / 2;  // each inner edge is seen from both ends
      else
        acc[mu][of[v]] += w;
    }
  }
  for (std::uint32_t i = 0; i < k; ++i)
    for (auto [j, w] : acc[i]) out.adj[i].emplace_back(j, w);
  return out;
}

// Compacts module ids to 0..k-1 in order of first node; returns k.
std::uint32_t compact(std::vector<std::uint32_t>& of) {
  std::vector<std::int64_t> remap;
  std::uint32_t k = 0;
  for (auto& m : of) {
    if (m >= remap.size()) remap.resize(m + 1, -1);
    if (remap[m] < 0) remap[m] = k++;
    m = static_cast<std::uint32_t>(remap[m]);
  }
  return k;
}

// Multi-level local moving from an initial assignment of base nodes.
std::vector<std::uint32_t> optimize(const Level& base, std::vector<std::uint32_t> assignment, Shuffler& rng) {
  if (base.total <= 0) {
    std::iota(assignment.begin(), assignment.end(), 0u);
    return assignment;
  }
  // First level starts from the given assignment on base nodes.
  Modules m = init_modules(base, assignment);
  local_moves(base, m, rng);
  std::vector<std::uint32_t> node_module = m.of;
  std::uint32_t k = compact(node_module);
  Level lv = aggregate(base, node_module, k);
  while (k > 1) {
    std::vector<std::uint32_t> singles(k);
    std::iota(singles.begin(), singles.end(), 0u);
    Modules mm = init_modules(lv, singles);
    if (!local_moves(lv, mm, rng)) break;
    std::vector<std::uint32_t> of = mm.of;
    const auto k2 = compact(of);
    for (auto& x : node_module) x = of[x];
    if (k2 == k) break;
    lv = aggregate(lv, of, k2);
    k = k2;
  }
  return node_module;
}

double codelength(const Level& lv, const std::vector<std::uint32_t>& of) {
  if (lv.total <= 0) return 0.0;
  Modules m = init_modules(lv, of);
  double node_term = 0;
  for (std::uint32_t u = 0; u < lv.size(); ++u) node_term += plogp(lv.strength[u] / lv.total);
  double sum = plogp(m.exit_sum / m.T);
  for (std::size_t i = 0; i < m.exit.size(); ++i)
    if (m.members[i]) sum += m.term(m.exit[i], m.flow[i]);
  return sum - node_term;
}

// Module-level merge toward `target` modules while the codelength stays under `bound`.
void merge_toward(const Level& base, std::vector<std::uint32_t>& of, std::uint32_t target, double bound) {
  std::uint32_t k = compact(of);
  Level agg = aggregate(base, of, k);
  std::vector<double> exit(k), flow(k);
  std::vector<std::map<std::uint32_t, double>> links(k);
  double exit_sum = 0;
  for (std::uint32_t i = 0; i < k; ++i) {
    flow[i] = agg.strength[i];
    exit[i] = agg.strength[i] - 2 * agg.internal[i];
    exit_sum += exit[i];
    for (auto [j, w] : agg.adj[i]) links[i][j] += w;
  }
  std::vector<std::uint32_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0u);
  std::vector<char> alive(k, 1);
  const double T = base.total;
  auto term = [&](double e, double s) { return -2 * plogp(e / T) + plogp((e + s) / T); };
  double L = codelength(base, of);
  std::uint32_t count = k;
  while (count > target) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t ba = 0, bb = 0;
    for (std::uint32_t a = 0; a < k; ++a) {
      if (!alive[a]) continue;
      for (auto [b, w] : links[a]) {
        if (b <= a) continue;
        const double e = std::max(0.0, exit[a] + exit[b] - 2 * w);
        const double es = exit_sum - exit[a] - exit[b] + e;
        const double delta = plogp(es / T) - plogp(exit_sum / T) + term(e, flow[a] + flow[b]) -
                             term(exit[a], flow[a]) - term(exit[b], flow[b]);
        if (delta < best) {
          best = delta;
          ba = a;
          bb = b;
        }
      }
    }
    if (!std::isfinite(best) || L + best > bound) break;
    const double w = links[ba][bb];
    const double e = std::max(0.0, exit[ba] + exit[bb] - 2 * w);
    exit_sum += e - exit[ba] - exit[bb];
    exit[ba] = e;
    flow[ba] += flow[bb];
    alive[bb] = 0;
    parent[bb] = ba;
    for (auto [c, wc] : links[bb]) {
      if (c == ba) continue;
      links[ba][c] += wc;
      links[c].erase(bb);
      links[c][ba] += wc;
    }
    links[ba].erase(bb);
    links[bb].clear();
    L += best;
    --count;
  }
  for (auto& x : of) {
    auto r = x;
    while (parent[r] != r) r = parent[r];
    x = r;
  }
  compact(of);
}

// Splits modules by optimizing their induced subgraphs, best split first.
void split_toward(const Level& base, std::vector<std::uint32_t>& of, std::uint32_t target, double bound,
                  Shuffler& rng) {
  std::uint32_t k = compact(of);
  std::vector<char> tried(k, 0);
  while (k < target) {
    double best_L = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> best_of;
    std::int64_t best_module = -1;
    for (std::uint32_t mod = 0; mod < k; ++mod) {
      if (tried[mod]) continue;
      std::vector<std::uint32_t> members;
      for (std::uint32_t u = 0; u < of.size(); ++u)
        if (of[u] == mod) members.push_back(u);
      if (members.size() < 2) {
        tried[mod] = 1;
        continue;
      }
      std::vector<std::int64_t> local(of.size(), -1);
      for (std::uint32_t i = 0; i < members.size(); ++i) local[members[i]] = i;
      Level sub;
      sub.adj.resize(members.size());
      sub.strength.assign(members.size(), 0.0);
      sub.internal.assign(members.size(), 0.0);
      for (std::uint32_t i = 0; i < members.size(); ++i) {
        const auto u = members[i];
        sub.internal[i] = base.internal[u];
        sub.strength[i] = 2 * base.internal[u];
        for (auto [v, w] : base.adj[u]) {
          if (local[v] < 0) continue;
          sub.adj[i].emplace_back(static_cast<std::uint32_t>(local[v]), w);
          sub.strength[i] += w;
        }
        sub.total += sub.strength[i];
      }
      std::vector<std::uint32_t> singles(members.size());
      std::iota(singles.begin(), singles.end(), 0u);
      auto parts = optimize(sub, singles, rng);
      const auto pk = compact(parts);
      if (pk < 2) {
        tried[mod] = 1;
        continue;
      }
      auto cand = of;
      for (std::uint32_t i = 0; i < members.size(); ++i)
        cand[members[i]] = parts[i] == 0 ? mod : k + parts[i] - 1;
      const double L = codelength(base, cand);
      if (L < best_L) {
        best_L = L;
        best_of = std::move(cand);
        best_module = mod;
      }
    }
    if (best_module < 0 || best_L > bound) break;
    of = std::move(best_of);
    tried[static_cast<std::size_t>(best_module)] = 0;
    const auto k2 = *std::max_element(of.begin(), of.end()) + 1;
    tried.resize(k2, 0);
    k = k2;
  }
  compact(of);
}

}  // namespace

double map_equation(const FlowGraph& g, const std::vector<std::uint32_t>& modules) {
  if (modules.size() != g.size()) throw Error("module assignment does not match the graph");
  std::vector<std::uint32_t> of = modules;
  compact(of);
  return codelength(base_level(g), of);
}

std::vector<std::uint32_t> canonical_labels(const std::vector<std::uint32_t>& modules) {
  std::vector<std::uint32_t> out = modules;
  compact(out);
  return out;
}

std::vector<std::uint32_t> cluster_modules(const FlowGraph& g, const ClusterOptions& opts) {
  const auto n = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> of(n);
  std::iota(of.begin(), of.end(), 0u);
  if (n == 0) return of;
  const Level base = base_level(g);
  Shuffler rng(opts.seed);
  of = optimize(base, of, rng);
  double L = codelength(base, of);
  for (int round = 0; round < 4; ++round) {
    auto again = optimize(base, of, rng);
    const double L2 = codelength(base, again);
    if (L2 >= L - 1e-10) break;
    of = std::move(again);
    L = L2;
  }
  if (opts.steer && base.total > 0) {
    const double bound = L + opts.slack * std::abs(L);
    const auto k = compact(of);
    if (k > opts.preferred_modules)
      merge_toward(base, of, opts.preferred_modules, bound);
    else if (k < opts.preferred_modules)
      split_toward(base, of, opts.preferred_modules, bound, rng);
  }
  return canonical_labels(of);
}

// --- consensus -----------------------------------------------------------------------

std::uint64_t run_seed(std::uint64_t master_seed, std::uint32_t run) {
  std::uint64_t z = master_seed + run + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<std::uint32_t> coclassification(const FlowGraph& g, const ConsensusOptions& opts) {
  const std::size_t n = g.size();
  const std::size_t pairs = n < 2 ? 0 : n * (n - 1) / 2;
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.jobs, opts.runs));
  std::vector<std::vector<std::uint32_t>> partial(workers, std::vector<std::uint32_t>(pairs, 0));
  // Runs are dealt round-robin to workers; counts are summed afterwards.
  parallel_for(workers, workers, [&](std::size_t w) {
    auto& counts = partial[w];
    std::vector<std::vector<std::uint32_t>> groups;
    for (std::uint32_t r = static_cast<std::uint32_t>(w); r < opts.runs; r += workers) {
      ClusterOptions co;
      co.preferred_modules = opts.preferred_modules;
      co.slack = opts.slack;
      co.seed = run_seed(opts.master_seed, r);
      const auto of = cluster_modules(g, co);
      const auto k = of.empty() ? 0u : *std::max_element(of.begin(), of.end()) + 1;
      groups.assign(k, {});
      for (std::uint32_t u = 0; u < n; ++u) groups[of[u]].push_back(u);
      for (const auto& members : groups) {
        for (std::size_t i = 0; i < members.size(); ++i) {
          const std::size_t a = members[i];
          const std::size_t row = a * (2 * n - a - 1) / 2;
          for (std::size_t j = i + 1; j < members.size(); ++j) ++counts[row + members[j] - a - 1];
        }
      }
    }
  });
  for (unsigned w = 1; w < workers; ++w)
    for (std::size_t i = 0; i < pairs; ++i) partial[0][i] += partial[w][i];
  return std::move(partial[0]);
}

std::vector<std::uint32_t> consensus_modules(const FlowGraph& g, const ConsensusOptions& opts) {
  if (opts.runs == 0) throw ConfigError("consensus needs at least one run");
  if (!(opts.agreement > 0 && opts.agreement <= 1)) throw ConfigError("agreement must lie in (0, 1]");
  const std::size_t n = g.size();
  const auto counts = coclassification(g, opts);
  const auto need = static_cast<std::uint32_t>(std::ceil(opts.agreement * opts.runs - 1e-9));
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t idx = 0;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b, ++idx) {
      if (counts[idx] < need) continue;
      const auto ra = find(a), rb = find(b);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::vector<std::uint32_t> of(n);
  for (std::uint32_t u = 0; u < n; ++u) of[u] = find(u);
  return canonical_labels(of);
}

}  // namespace lexnet::meso
