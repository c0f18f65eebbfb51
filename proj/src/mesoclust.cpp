#include "lexnet/mesoclust.hpp"

#include <algorithm>

#include "lexnet/csv.hpp"

namespace lexnet::meso {

std::uint32_t Clustering::clusters() const {
  return cluster.empty() ? 0 : *std::max_element(cluster.begin(), cluster.end()) + 1;
}

std::optional<std::uint32_t> Clustering::cluster_of(std::string_view key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return cluster[static_cast<std::size_t>(it - keys.begin())];
}

namespace {

Clustering make_clustering(const graph::QuotientGraph& q, const FlowGraph& g, std::vector<std::uint32_t> of) {
  Clustering c;
  c.year = q.year;
  c.keys = g.keys;
  c.cluster = std::move(of);
  const auto k = c.clusters();
  c.tokens_statute.assign(k, 0);
  c.tokens_regulation.assign(k, 0);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    c.tokens_statute[c.cluster[i]] += q.nodes[i].tokens_statute;
    c.tokens_regulation[c.cluster[i]] += q.nodes[i].tokens_regulation;
  }
  c.codelength = map_equation(g, c.cluster);
  return c;
}

}  // namespace

Clustering map_equation_cluster(const graph::QuotientGraph& q, const ClusterOptions& opts) {
  const FlowGraph g = flow_graph(q);
  return make_clustering(q, g, cluster_modules(g, opts));
}

Clustering consensus_cluster(const graph::QuotientGraph& q, const ConsensusOptions& opts) {
  const FlowGraph g = flow_graph(q);
  return make_clustering(q, g, consensus_modules(g, opts));
}

std::string clustering_csv(const Clustering& c) {
  std::string out;
  csv::append_row(out, {"key", "cluster"});
  for (std::size_t i = 0; i < c.keys.size(); ++i) csv::append_row(out, {c.keys[i], std::to_string(c.cluster[i])});
  return out;
}

std::map<std::string, std::string> read_clustering_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "key")
    throw ParseError("clustering table lacks the header key,cluster", 1);
  std::map<std::string, std::string> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() < 2) throw ParseError("clustering row needs two fields", i + 1);
    if (!out.emplace(rows[i][0], rows[i][1]).second)
      throw ParseError("node '" + rows[i][0] + "' listed twice", i + 1);
  }
  return out;
}

// --- leaves and cluster overlap -----------------------------------------------------

YearClusters year_clusters(const corpus::Snapshot& snapshot, const graph::QuotientGraph& q, const Clustering& c,
                           const corpus::TokenizeOptions& tok) {
  YearClusters y;
  y.year = snapshot.year;
  y.clusters = c.clusters();
  for (const auto& tree : snapshot.trees) {
    corpus::walk(tree, [&](const corpus::CorpusNode& n, const corpus::CorpusNode*) {
      if (!n.text) return;
      const auto tokens = corpus::tokenize(*n.text, tok).tokens;
      if (tokens == 0) return;
      auto it = q.member_of.find(n.key);
      if (it == q.member_of.end()) return;
      const auto cl = c.cluster_of(q.nodes[it->second].key);
      if (!cl) return;
      y.leaves.push_back({n.key, *cl, tokens, n.doc_type});
    });
  }
  std::sort(y.leaves.begin(), y.leaves.end(), [](const Leaf& a, const Leaf& b) { return a.key < b.key; });
  return y;
}

std::uint64_t cluster_similarity(const YearClusters& from, std::uint32_t a, const YearClusters& to, std::uint32_t b,
                                 const Alignment& alignment) {
  std::uint64_t total = 0;
  for (const auto& leaf : from.leaves) {
    if (leaf.cluster != a) continue;
    const auto img = alignment.image(leaf.key);
    if (!img) continue;
    auto it = std::lower_bound(to.leaves.begin(), to.leaves.end(), *img,
                               [](const Leaf& l, const std::string& k) { return l.key < k; });
    if (it != to.leaves.end() && it->key == *img && it->cluster == b) total += leaf.tokens;
  }
  return total;
}

}  // namespace lexnet::meso
