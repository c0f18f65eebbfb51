#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexnet/common.hpp"
#include "lexnet/graphcore.hpp"

namespace lexnet::macro {

// --- growth -----------------------------------------------------------------------

struct GrowthRow {
  DocType doc_type = DocType::statute;
  int year = 0;
  std::uint64_t tokens = 0;
  std::uint64_t structures = 0;  // all nodes of this document type
  std::uint64_t lateral_references = 0;
  // Relative to the baseline year; nullopt when the baseline value is 0.
  std::optional<double> rel_tokens, rel_structures, rel_lateral;
};

struct GrowthDelta {
  DocType doc_type = DocType::statute;
  // Percent change first year -> last year; nullopt when the first value is 0.
  std::optional<double> tokens, structures, lateral_references;
};

struct GrowthSeries {
  Country country = Country::US;
  int baseline = 0;
  std::vector<GrowthRow> rows;  // sorted by (doc_type, year)
  // Reference counts per year and class (upward/downward are cross-type).
  std::map<int, std::array<std::uint64_t, graph::kReferenceClasses>> by_class;
  std::vector<GrowthDelta> deltas;
};

/// `graphs` must be sorted by year, one per year, all of the same country.
GrowthSeries growth(const std::vector<const graph::LegalGraph*>& graphs, int baseline);

// --- degree distributions -------------------------------------------------------

enum class Direction { in, out };

// Which seqitems are counted: statutes, regulations or both.
enum class Scope { statutes, regulations, all };
std::string_view to_string(Scope s);
Scope parse_scope(std::string_view s);
bool in_scope(Scope scope, DocType d);

struct DegreeOptions {
  Direction direction = Direction::in;
  std::vector<graph::ReferenceClass> classes;  // empty = every class
  bool weighted = true;                        // false: count distinct neighbors
  bool per_token = false;
  Scope scope = Scope::all;
};

struct DegreeDistribution {
  std::map<std::uint64_t, std::uint64_t> counts;  // degree -> seqitems
  std::map<double, std::uint64_t> per_token;       // degree/tokens -> seqitems (per_token only)
  std::uint64_t empty_text = 0;                    // seqitems without tokens (per_token only)
  std::uint64_t seqitems = 0;
};

DegreeDistribution degree_distribution(const graph::LegalGraph& g, const DegreeOptions& opts);

// --- components -----------------------------------------------------------------

struct ComponentStats {
  std::uint64_t nodes = 0;
  std::uint64_t lcc_nodes = 0;        // 0 when no component has an edge
  std::uint64_t satellite_nodes = 0;  // in non-trivial components other than the LCC
  std::uint64_t isolates = 0;
  std::uint64_t nontrivial_components = 0;  // including the LCC
  std::uint64_t tokens = 0;

  double lcc_fraction() const;
  double satellite_fraction() const;
  double isolate_fraction() const;
  double components_per_1000_tokens() const;
};

/// Weak components of the seqitem reference subgraph restricted to `scope`.
/// A node whose only reference is a self-loop counts as isolated.
ComponentStats components(const graph::LegalGraph& g, Scope scope = Scope::all);

// --- rocket decomposition -------------------------------------------------------

struct Digraph {
  std::vector<std::string> keys;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

/// Seqitem reference subgraph in `scope`, parallel edges kept.
Digraph reference_digraph(const graph::LegalGraph& g, Scope scope = Scope::all);

struct RocketDecomposition {
  std::vector<std::string> lcc, scc, in, out, tt;  // each sorted
  std::uint64_t total_nodes = 0;
  bool all_singleton = false;  // every SCC of the LCC has one node
};

/// Largest weak component (ties: smallest member key), its largest SCC
/// (ties: smallest member key), and the IN / OUT / tendrils-and-tubes sets.
RocketDecomposition rocket(const Digraph& g, Diagnostics& diag);

}  // namespace lexnet::macro
