#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexnet/common.hpp"
#include "lexnet/corpus.hpp"
#include "lexnet/graphcore.hpp"

namespace lexnet::meso {

// --- map equation -------------------------------------------------------------------

// Undirected weighted graph. Self-loops are not represented.
struct FlowGraph {
  std::vector<std::string> keys;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // neighbor, weight
  std::vector<double> strength;
  double total_weight = 0;  // sum of edge weights, each undirected edge once

  std::size_t size() const { return keys.size(); }
  void add_edge(std::uint32_t a, std::uint32_t b, double w);
};

/// Symmetrized quotient graph: w(a,b) = w(a->b) + w(b->a); self-loops dropped.
FlowGraph flow_graph(const graph::QuotientGraph& q);

/// Two-level map equation in bits for the given module assignment, with node
/// visit rates proportional to weighted degree.
double map_equation(const FlowGraph& g, const std::vector<std::uint32_t>& modules);

struct ClusterOptions {
  std::uint32_t preferred_modules = 100;
  double slack = 0.01;  // relative codelength increase allowed when steering the module count
  std::uint64_t seed = 0;
  bool steer = true;
};

/// Relabels modules 0..k-1 in order of each module's smallest node index.
std::vector<std::uint32_t> canonical_labels(const std::vector<std::uint32_t>& modules);

/// Local moves and aggregation minimizing the map equation, followed by the
/// merge/split pass toward `preferred_modules`. Deterministic for a seed.
std::vector<std::uint32_t> cluster_modules(const FlowGraph& g, const ClusterOptions& opts);

struct Clustering {
  int year = 0;
  std::vector<std::string> keys;        // sorted
  std::vector<std::uint32_t> cluster;   // per key, ids 0..k-1 ordered by smallest member key
  std::vector<std::uint64_t> tokens_statute, tokens_regulation;  // per cluster
  double codelength = 0;

  std::uint32_t clusters() const;
  std::optional<std::uint32_t> cluster_of(std::string_view key) const;
};

Clustering map_equation_cluster(const graph::QuotientGraph& q, const ClusterOptions& opts);

struct ConsensusOptions {
  std::uint32_t runs = 1000;
  double agreement = 0.95;
  std::uint32_t preferred_modules = 100;
  double slack = 0.01;
  std::uint64_t master_seed = 0;
  unsigned jobs = 1;
};

/// Seed of run i: splitmix64(master_seed + i).
std::uint64_t run_seed(std::uint64_t master_seed, std::uint32_t run);

/// Co-classification counts over all runs for node pairs i < j, row-major
/// upper triangle.
std::vector<std::uint32_t> coclassification(const FlowGraph& g, const ConsensusOptions& opts);

/// Connected components of the graph joining pairs co-clustered in at least
/// ceil(agreement * runs) runs.
std::vector<std::uint32_t> consensus_modules(const FlowGraph& g, const ConsensusOptions& opts);

Clustering consensus_cluster(const graph::QuotientGraph& q, const ConsensusOptions& opts);

std::string clustering_csv(const Clustering& c);
/// key -> cluster label from a two-column CSV (header "key,cluster").
std::map<std::string, std::string> read_clustering_csv(std::string_view text);

// --- alignment ------------------------------------------------------------------------

/// Jaro-Winkler similarity over code points, prefix scale 0.1, prefix up to 4.
double jaro_winkler(std::string_view a, std::string_view b);

struct AlignOptions {
  std::size_t min_chars = 50;   // pass 1 text length in code points
  double similarity = 0.9;      // pass 4 threshold (strictly above)
  int hops = 5;                 // pass 4 neighborhood radius
};

struct Match {
  std::string from;
  std::string to;
  int pass = 0;
};

// Partial injective map between the text-bearing nodes of two snapshots.
struct Alignment {
  int year_from = 0;
  int year_to = 0;
  std::vector<Match> matches;  // sorted by `from`

  std::optional<std::string> image(std::string_view from) const;
  std::map<int, std::size_t> per_pass() const;
};

/// Four passes: unique long text, same key and text, containment with a
/// remainder shorter than the matched part, and Jaro-Winkler near matched
/// anchors (repeated until no new match). Neighborhoods use the hierarchy and
/// reference edges of `ga` and `gb` without direction.
Alignment align(const corpus::Snapshot& a, const corpus::Snapshot& b, const graph::LegalGraph& ga,
                const graph::LegalGraph& gb, const AlignOptions& opts = {});

std::string alignment_csv(const Alignment& a);

// --- cluster families ---------------------------------------------------------------

// Leaf-level view of one year: every text-bearing node mapped to a cluster.
struct Leaf {
  std::string key;
  std::uint32_t cluster = 0;
  std::uint64_t tokens = 0;
  DocType doc_type = DocType::statute;
};

struct YearClusters {
  int year = 0;
  std::uint32_t clusters = 0;
  std::vector<Leaf> leaves;
};

/// Assigns each text-bearing node of `snapshot` to the cluster of its
/// representative in `q`; nodes dropped by the quotient are skipped.
YearClusters year_clusters(const corpus::Snapshot& snapshot, const graph::QuotientGraph& q,
                           const Clustering& c, const corpus::TokenizeOptions& tok = {});

/// Tokens of leaves in cluster `a` of `from` whose aligned image lies in
/// cluster `b` of `to`.
std::uint64_t cluster_similarity(const YearClusters& from, std::uint32_t a, const YearClusters& to,
                                 std::uint32_t b, const Alignment& alignment);

struct FamilyOptions {
  double threshold = 0.15;
  // Weight tokens so statutes and regulations carry equal mass per year.
  bool rescale_doc_types = false;
};

struct FamilyNode {
  int year = 0;
  std::uint32_t cluster = 0;
  double tokens_statute = 0;
  double tokens_regulation = 0;
  std::uint32_t family = 0;

  double tokens() const { return tokens_statute + tokens_regulation; }
};

struct FamilyEdge {
  std::uint32_t from = 0;  // index into nodes, year t
  std::uint32_t to = 0;    // index into nodes, year t+1
  double overlap = 0;
  double share_from = 0;  // overlap / size(from)
  double share_to = 0;    // overlap / size(to)
};

struct FamilyYear {
  double statute = 0;
  double regulation = 0;
};

struct Family {
  std::uint32_t id = 0;
  std::vector<std::uint32_t> nodes;
  std::map<int, FamilyYear> series;
};

struct FamilyGraph {
  std::vector<FamilyNode> nodes;  // sorted by (year, cluster)
  std::vector<FamilyEdge> edges;
  std::vector<Family> families;   // ids by smallest member node
};

/// `years` sorted and contiguous; `alignments[i]` maps years[i] to years[i+1].
FamilyGraph build_family_graph(const std::vector<YearClusters>& years,
                               const std::vector<Alignment>& alignments, const FamilyOptions& opts = {});

std::string family_graph_json(const FamilyGraph& fg);

// --- classification -----------------------------------------------------------------

enum class Composition { statute_heavy, regulation_heavy, mixed };
enum class GrowthDriver { statute_driven, regulation_driven, mixed };
std::string_view to_string(Composition c);
std::string_view to_string(GrowthDriver g);

struct FamilyClass {
  Composition average = Composition::mixed;   // mean statute share over years with tokens
  Composition majority = Composition::mixed;  // majority of years' dominant type
  GrowthDriver growth = GrowthDriver::mixed;
};

/// `first`/`last` bound the period; years missing from the series count as 0.
FamilyClass classify_family(const std::map<int, FamilyYear>& series, int first, int last,
                            Diagnostics& diag, double share = 0.8);

// --- TF-IDF -------------------------------------------------------------------------

struct TermScore {
  std::string term;
  double score = 0;
};

/// Lower-cases, strips punctuation, drops stoplisted terms and terms with digits.
std::vector<std::string> terms(std::string_view text, const std::vector<std::string>& stoplist);

/// One document per family; idf = ln(N / df). Zero-score terms are omitted;
/// ties are broken by term.
std::vector<std::vector<TermScore>> family_tfidf(const std::vector<std::string>& documents,
                                                 const std::vector<std::string>& stoplist,
                                                 std::size_t top_k);

std::vector<std::string> default_stoplist();
std::vector<std::string> load_stoplist(std::string_view text);

}  // namespace lexnet::meso
