#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexnet/citeparse.hpp"
#include "lexnet/common.hpp"
#include "lexnet/corpus.hpp"

namespace lexnet::graph {

enum class EdgeType { hierarchy, reference };
enum class ReferenceClass { lateral_statute, lateral_regulation, upward, downward };
inline constexpr std::size_t kReferenceClasses = 4;

std::string_view to_string(EdgeType t);
std::string_view to_string(ReferenceClass c);
EdgeType parse_edge_type(std::string_view s);
ReferenceClass parse_reference_class(std::string_view s);

/// Upward = regulation to statute, downward = statute to regulation.
ReferenceClass classify_reference(DocType source, DocType target);

struct GraphNode {
  std::string key;
  LevelKind level_kind = LevelKind::container;
  int level_depth = 0;
  DocType doc_type = DocType::statute;
  std::string level;    // structural level name, may be empty
  std::string heading;
  std::string citekey;
  std::uint64_t tokens = 0;          // own text
  std::uint64_t subtree_tokens = 0;  // own text plus all descendants
  std::int64_t parent = -1;          // index into nodes, -1 for roots

  bool operator==(const GraphNode&) const = default;
};

struct Edge {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  EdgeType type = EdgeType::reference;
  ReferenceClass cls = ReferenceClass::lateral_statute;  // reference edges only

  bool operator==(const Edge&) const = default;
};

// Directed multigraph over every node of a snapshot. Nodes are sorted by key;
// edges are sorted by (source, target, type, class), parallel edges kept.
// Hierarchy edges point from parent to child.
class LegalGraph {
 public:
  Country country = Country::US;
  int year = 0;
  std::vector<GraphNode> nodes;
  std::vector<Edge> edges;

  std::optional<std::uint32_t> find(std::string_view key) const;
  std::size_t reference_count() const;
  /// Sorts nodes and edges into canonical order and rebuilds the key index.
  void finalize();

  bool operator==(const LegalGraph& o) const {
    return country == o.country && year == o.year && nodes == o.nodes && edges == o.edges;
  }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
};

LegalGraph build_graph(const corpus::Snapshot& snapshot,
                       const std::vector<citeparse::Reference>& refs, Diagnostics& diag,
                       const corpus::TokenizeOptions& tok = {});

// --- quotient -------------------------------------------------------------------

// Chooses the representative level of each tree:
//   "level:chapter" or "level:book,chapter"  nodes whose level name is listed
//   "depth:2"                                nodes at that tree depth
//   "root"                                   tree roots
// A trailing '!' sets `strict`.
// A node with no representative ancestor-or-self is merged into its highest
// ancestor whose subtree holds no representative, unless `strict` is set.
struct LevelSelector {
  enum class Kind { levels, depth, root };
  Kind kind = Kind::root;
  std::vector<std::string> levels;
  int depth = 0;
  bool strict = false;

  static LevelSelector parse(std::string_view text);
  static LevelSelector default_for(Country country);
  std::string str() const;
  bool matches(const GraphNode& node) const;
};

struct QuotientNode {
  std::string key;
  std::string level;
  std::string heading;
  DocType doc_type = DocType::statute;
  std::uint64_t tokens_statute = 0;
  std::uint64_t tokens_regulation = 0;
  std::uint64_t members = 0;  // underlying nodes mapped here

  std::uint64_t tokens() const { return tokens_statute + tokens_regulation; }
  bool operator==(const QuotientNode&) const = default;
};

struct QuotientEdge {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  std::uint64_t weight = 0;
  std::array<std::uint64_t, kReferenceClasses> by_class{};

  bool operator==(const QuotientEdge&) const = default;
};

class QuotientGraph {
 public:
  std::string level;  // selector text
  Country country = Country::US;
  int year = 0;
  std::vector<QuotientNode> nodes;  // sorted by key
  std::vector<QuotientEdge> edges;  // sorted by (source, target), one per pair
  // Underlying node key -> index of its representative; absent for dropped nodes.
  std::unordered_map<std::string, std::uint32_t> member_of;

  std::optional<std::uint32_t> find(std::string_view key) const;
  std::uint64_t total_weight() const;
  void finalize();

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
};

QuotientGraph quotient(const LegalGraph& graph, const LevelSelector& selector, Diagnostics& diag);

// --- export -----------------------------------------------------------------------

struct ExportOptions {
  bool gzip = false;
};

/// Writes `<prefix>nodes.csv` and `<prefix>edges.csv` (".gz" appended when
/// compressed). Returns the written paths.
std::vector<std::filesystem::path> export_csv(const LegalGraph& graph,
                                              const std::filesystem::path& dir,
                                              const std::string& prefix,
                                              const ExportOptions& opts = {});
std::vector<std::filesystem::path> export_csv(const QuotientGraph& graph,
                                              const std::filesystem::path& dir,
                                              const std::string& prefix,
                                              const ExportOptions& opts = {});

std::string nodes_csv(const LegalGraph& graph);
std::string edges_csv(const LegalGraph& graph);
std::string nodes_csv(const QuotientGraph& graph);
std::string edges_csv(const QuotientGraph& graph);

LegalGraph import_csv(std::string_view nodes, std::string_view edges, Country country, int year);
/// Reads the files written by export_csv, transparently gunzipping ".gz".
LegalGraph import_csv(const std::filesystem::path& nodes, const std::filesystem::path& edges,
                      Country country, int year);

std::string graphml(const LegalGraph& graph);
std::string graphml(const QuotientGraph& graph);

}  // namespace lexnet::graph
