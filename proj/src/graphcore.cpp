#include "lexnet/graphcore.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <tuple>

#include "lexnet/csv.hpp"
#include "lexnet/io.hpp"

namespace lexnet::graph {

namespace {

constexpr std::array<std::string_view, kReferenceClasses> kClassNames = {
    "lateral_statute", "lateral_regulation", "upward", "downward"};

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("expected an integer, got '" + s + "'", line);
  return v;
}

std::int64_t parse_i64(const std::string& s, std::size_t line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("expected an integer, got '" + s + "'", line);
  return v;
}

void xml_escape(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
}

}  // namespace

std::string_view to_string(EdgeType t) { return t == EdgeType::hierarchy ? "hierarchy" : "reference"; }

std::string_view to_string(ReferenceClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

EdgeType parse_edge_type(std::string_view s) {
  if (s == "hierarchy") return EdgeType::hierarchy;
  if (s == "reference") return EdgeType::reference;
  throw ParseError("unknown edge type '" + std::string(s) + "'");
}

ReferenceClass parse_reference_class(std::string_view s) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i)
    if (kClassNames[i] == s) return static_cast<ReferenceClass>(i);
  throw ParseError("unknown reference class '" + std::string(s) + "'");
}

ReferenceClass classify_reference(DocType source, DocType target) {
  if (source == target)
    return source == DocType::statute ? ReferenceClass::lateral_statute
                                      : ReferenceClass::lateral_regulation;
  return source == DocType::regulation ? ReferenceClass::upward : ReferenceClass::downward;
}

// --- LegalGraph -----------------------------------------------------------------

std::optional<std::uint32_t> LegalGraph::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LegalGraph::reference_count() const {
  return static_cast<std::size_t>(std::count_if(
      edges.begin(), edges.end(), [](const Edge& e) { return e.type == EdgeType::reference; }));
}

void LegalGraph::finalize() {
  std::vector<std::uint32_t> order(nodes.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return nodes[a].key < nodes[b].key; });
  std::vector<std::uint32_t> rank(nodes.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  std::vector<GraphNode> sorted;
  sorted.reserve(nodes.size());
  for (auto i : order) {
    sorted.push_back(std::move(nodes[i]));
    auto& n = sorted.back();
    if (n.parent >= 0) n.parent = rank[static_cast<std::size_t>(n.parent)];
  }
  nodes = std::move(sorted);
  for (auto& e : edges) {
    e.source = rank[e.source];
    e.target = rank[e.target];
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.source, a.target, a.type, a.cls) < std::tie(b.source, b.target, b.type, b.cls);
  });
  index_.clear();
  index_.reserve(nodes.size());
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    if (!index_.emplace(nodes[i].key, i).second)
      throw SchemaError("duplicate node key '" + nodes[i].key + "'");
  }
}

LegalGraph build_graph(const corpus::Snapshot& snapshot, const std::vector<citeparse::Reference>& refs,
                       Diagnostics& diag, const corpus::TokenizeOptions& tok) {
  LegalGraph g;
  g.country = snapshot.country;
  g.year = snapshot.year;

  // Post-order accumulation of subtree tokens over an explicit stack.
  struct Frame {
    const corpus::CorpusNode* node;
    std::int64_t parent;
    std::size_t next_child;
    std::uint32_t index;
  };
  for (const auto& tree : snapshot.trees) {
    std::vector<Frame> stack;
    auto push = [&](const corpus::CorpusNode* n, std::int64_t parent) {
      GraphNode gn;
      gn.key = n->key;
      gn.level_kind = n->level_kind;
      gn.level_depth = n->level_depth;
      gn.doc_type = n->doc_type;
      gn.level = n->level.value_or("");
      gn.heading = n->heading.value_or("");
      gn.citekey = n->citekey.value_or("");
      gn.tokens = n->text ? corpus::tokenize(*n->text, tok).tokens : 0;
      gn.subtree_tokens = gn.tokens;
      gn.parent = parent;
      const auto idx = static_cast<std::uint32_t>(g.nodes.size());
      g.nodes.push_back(std::move(gn));
      if (parent >= 0) g.edges.push_back({static_cast<std::uint32_t>(parent), idx, EdgeType::hierarchy, {}});
      stack.push_back({n, parent, 0, idx});
    };
    push(&tree, -1);
    while (!stack.empty()) {
      auto& f = stack.back();
      if (f.next_child < f.node->children.size()) {
        const auto* child = &f.node->children[f.next_child++];
        push(child, f.index);
        continue;
      }
      const auto idx = f.index;
      const auto parent = f.parent;
      stack.pop_back();
      if (parent >= 0) g.nodes[static_cast<std::size_t>(parent)].subtree_tokens += g.nodes[idx].subtree_tokens;
    }
  }
  g.finalize();

  std::uint64_t rejected = 0;
  for (const auto& ref : refs) {
    const auto src = g.find(ref.source_key);
    if (!src || g.nodes[*src].level_kind != LevelKind::seqitem) {
      rejected += ref.resolved.size();
      continue;
    }
    for (const auto& target : ref.resolved) {
      const auto dst = g.find(target);
      if (!dst || g.nodes[*dst].level_kind != LevelKind::seqitem) {
        ++rejected;
        continue;
      }
      g.edges.push_back({*src, *dst, EdgeType::reference,
                         classify_reference(g.nodes[*src].doc_type, g.nodes[*dst].doc_type)});
    }
  }
  if (rejected)
    diag.note(std::to_string(rejected) + " reference endpoints are not seqitems of the snapshot");
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.source, a.target, a.type, a.cls) < std::tie(b.source, b.target, b.type, b.cls);
  });
  return g;
}

// --- LevelSelector ----------------------------------------------------------------

LevelSelector LevelSelector::parse(std::string_view text) {
  LevelSelector s;
  if (!text.empty() && text.back() == '!') {
    s.strict = true;
    text.remove_suffix(1);
  }
  if (text == "root") return s;
  if (text.rfind("depth:", 0) == 0) {
    s.kind = Kind::depth;
    const auto num = text.substr(6);
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), s.depth);
    if (ec != std::errc() || p != num.data() + num.size() || s.depth < 0)
      throw ConfigError("invalid depth selector '" + std::string(text) + "'");
    return s;
  }
  if (text.rfind("level:", 0) == 0) {
    s.kind = Kind::levels;
    std::string_view rest = text.substr(6);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto name = rest.substr(0, comma);
      if (!name.empty()) s.levels.emplace_back(name);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (s.levels.empty()) throw ConfigError("level selector without level names");
    std::sort(s.levels.begin(), s.levels.end());
    return s;
  }
  throw ConfigError("unknown level selector '" + std::string(text) + "'");
}

LevelSelector LevelSelector::default_for(Country country) {
  return parse(country == Country::US ? "level:chapter" : "level:book");
}

std::string LevelSelector::str() const {
  std::string out;
  switch (kind) {
    case Kind::root: out = "root"; break;
    case Kind::depth: out = "depth:" + std::to_string(depth); break;
    case Kind::levels:
      out = "level:";
      for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i) out += ',';
        out += levels[i];
      }
      break;
  }
  if (strict) out += '!';
  return out;
}

bool LevelSelector::matches(const GraphNode& node) const {
  switch (kind) {
    case Kind::root: return node.parent < 0;
    case Kind::depth: return node.level_depth == depth;
    case Kind::levels: return std::binary_search(levels.begin(), levels.end(), node.level);
  }
  return false;
}

// --- QuotientGraph ----------------------------------------------------------------

std::optional<std::uint32_t> QuotientGraph::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t QuotientGraph::total_weight() const {
  std::uint64_t w = 0;
  for (const auto& e : edges) w += e.weight;
  return w;
}

void QuotientGraph::finalize() {
  index_.clear();
  for (std::uint32_t i = 0; i < nodes.size(); ++i) index_.emplace(nodes[i].key, i);
}

QuotientGraph quotient(const LegalGraph& graph, const LevelSelector& selector, Diagnostics& diag) {
  const auto n = graph.nodes.size();
  std::vector<char> is_rep(n, 0), holds_rep(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!selector.matches(graph.nodes[i])) continue;
    is_rep[i] = 1;
    for (std::int64_t a = static_cast<std::int64_t>(i); a >= 0 && !holds_rep[static_cast<std::size_t>(a)];
         a = graph.nodes[static_cast<std::size_t>(a)].parent)
      holds_rep[static_cast<std::size_t>(a)] = 1;
  }

  constexpr std::int64_t kUnknown = -2, kDropped = -1;
  std::vector<std::int64_t> rep(n, kUnknown);
  std::uint64_t fallback_nodes = 0;
  std::vector<std::size_t> chain;
  for (std::size_t i = 0; i < n; ++i) {
    if (rep[i] != kUnknown) continue;
    // Climb to the nearest node whose representative is known or decidable.
    chain.clear();
    std::int64_t a = static_cast<std::int64_t>(i);
    std::int64_t found = kUnknown;
    while (a >= 0) {
      const auto ua = static_cast<std::size_t>(a);
      if (rep[ua] >= 0) {
        found = rep[ua];
        break;
      }
      if (is_rep[ua]) {
        rep[ua] = a;
        found = a;
        break;
      }
      chain.push_back(ua);
      a = graph.nodes[ua].parent;
    }
    if (found >= 0) {
      for (auto c : chain) rep[c] = found;
      continue;
    }
    // No representative above: nodes holding one are dropped, the rest merge
    // into their highest ancestor without a representative below it.
    for (auto c : chain) {
      if (holds_rep[c]) {
        rep[c] = kDropped;
        continue;
      }
      if (selector.strict)
        throw StructuralError("node '" + graph.nodes[c].key + "' has no representative at level " +
                              selector.str());
      std::size_t top = c;
      while (graph.nodes[top].parent >= 0 && !holds_rep[static_cast<std::size_t>(graph.nodes[top].parent)])
        top = static_cast<std::size_t>(graph.nodes[top].parent);
      rep[c] = static_cast<std::int64_t>(top);
      ++fallback_nodes;
    }
  }

  QuotientGraph q;
  q.level = selector.str();
  q.country = graph.country;
  q.year = graph.year;
  std::vector<std::int64_t> qindex(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (rep[i] != static_cast<std::int64_t>(i)) continue;
    const auto& gn = graph.nodes[i];
    qindex[i] = static_cast<std::int64_t>(q.nodes.size());
    q.nodes.push_back({gn.key, gn.level, gn.heading, gn.doc_type, 0, 0, 0});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rep[i] < 0) continue;
    const auto qi = static_cast<std::uint32_t>(qindex[static_cast<std::size_t>(rep[i])]);
    auto& qn = q.nodes[qi];
    const auto& gn = graph.nodes[i];
    (gn.doc_type == DocType::statute ? qn.tokens_statute : qn.tokens_regulation) += gn.tokens;
    ++qn.members;
    q.member_of.emplace(gn.key, qi);
  }

  std::map<std::pair<std::uint32_t, std::uint32_t>, QuotientEdge> agg;
  std::uint64_t dropped_refs = 0;
  for (const auto& e : graph.edges) {
    if (e.type != EdgeType::reference) continue;
    if (rep[e.source] < 0 || rep[e.target] < 0) {
      ++dropped_refs;
      continue;
    }
    const auto s = static_cast<std::uint32_t>(qindex[static_cast<std::size_t>(rep[e.source])]);
    const auto t = static_cast<std::uint32_t>(qindex[static_cast<std::size_t>(rep[e.target])]);
    auto& qe = agg[{s, t}];
    qe.source = s;
    qe.target = t;
    ++qe.weight;
    ++qe.by_class[static_cast<std::size_t>(e.cls)];
  }
  for (auto& [_, e] : agg) q.edges.push_back(e);
  q.finalize();

  if (fallback_nodes)
    diag.note(std::to_string(fallback_nodes) + " nodes without a " + selector.str() +
              " ancestor merged into their highest representative-free ancestor");
  if (dropped_refs)
    diag.note(std::to_string(dropped_refs) + " references touch nodes above level " + selector.str() +
              " and were dropped");
  return q;
}

// --- CSV export -----------------------------------------------------------------

std::string nodes_csv(const LegalGraph& graph) {
  std::string out;
  csv::append_row(out, {"key", "level_kind", "level_depth", "level", "doc_type", "tokens",
                        "subtree_tokens", "parent", "heading", "citekey"});
  for (const auto& n : graph.nodes) {
    csv::append_row(out, {n.key, std::string(to_string(n.level_kind)), std::to_string(n.level_depth),
                          n.level, std::string(to_string(n.doc_type)), std::to_string(n.tokens),
                          std::to_string(n.subtree_tokens),
                          n.parent >= 0 ? graph.nodes[static_cast<std::size_t>(n.parent)].key : "",
                          n.heading, n.citekey});
  }
  return out;
}

std::string edges_csv(const LegalGraph& graph) {
  // Rows sorted by (source key, target key, type, class); node order is key order.
  std::string out;
  csv::append_row(out, {"source", "target", "type", "class"});
  for (const auto& e : graph.edges) {
    csv::append_row(out, {graph.nodes[e.source].key, graph.nodes[e.target].key,
                          std::string(to_string(e.type)),
                          e.type == EdgeType::reference ? std::string(to_string(e.cls)) : ""});
  }
  return out;
}

std::string nodes_csv(const QuotientGraph& graph) {
  std::string out;
  csv::append_row(out, {"key", "level", "doc_type", "tokens", "tokens_statute", "tokens_regulation",
                        "members", "heading"});
  for (const auto& n : graph.nodes) {
    csv::append_row(out, {n.key, n.level, std::string(to_string(n.doc_type)), std::to_string(n.tokens()),
                          std::to_string(n.tokens_statute), std::to_string(n.tokens_regulation),
                          std::to_string(n.members), n.heading});
  }
  return out;
}

std::string edges_csv(const QuotientGraph& graph) {
  std::string out;
  csv::Row header{"source", "target", "weight"};
  for (auto name : kClassNames) header.emplace_back(name);
  csv::append_row(out, header);
  for (const auto& e : graph.edges) {
    csv::Row row{graph.nodes[e.source].key, graph.nodes[e.target].key, std::to_string(e.weight)};
    for (auto c : e.by_class) row.push_back(std::to_string(c));
    csv::append_row(out, row);
  }
  return out;
}

namespace {

std::vector<std::filesystem::path> write_pair(const std::filesystem::path& dir, const std::string& prefix,
                                              const std::string& nodes, const std::string& edges,
                                              const ExportOptions& opts) {
  const std::string ext = opts.gzip ? ".csv.gz" : ".csv";
  const auto np = dir / (prefix + "nodes" + ext);
  const auto ep = dir / (prefix + "edges" + ext);
  csv::write_file(np, opts.gzip ? io::gzip(nodes) : nodes);
  csv::write_file(ep, opts.gzip ? io::gzip(edges) : edges);
  return {np, ep};
}

std::string read_maybe_gz(const std::filesystem::path& p) {
  auto data = csv::read_file(p);
  return p.extension() == ".gz" ? io::gunzip(data) : data;
}

}  // namespace

std::vector<std::filesystem::path> export_csv(const LegalGraph& graph, const std::filesystem::path& dir,
                                              const std::string& prefix, const ExportOptions& opts) {
  return write_pair(dir, prefix, nodes_csv(graph), edges_csv(graph), opts);
}

std::vector<std::filesystem::path> export_csv(const QuotientGraph& graph, const std::filesystem::path& dir,
                                              const std::string& prefix, const ExportOptions& opts) {
  return write_pair(dir, prefix, nodes_csv(graph), edges_csv(graph), opts);
}

LegalGraph import_csv(std::string_view nodes, std::string_view edges, Country country, int year) {
  LegalGraph g;
  g.country = country;
  g.year = year;
  const auto nrows = csv::parse(nodes);
  if (nrows.empty() || nrows[0].size() != 10 || nrows[0][0] != "key")
    throw ParseError("node table lacks the expected header", 1);
  std::vector<std::string> parent_keys;
  for (std::size_t i = 1; i < nrows.size(); ++i) {
    const auto& r = nrows[i];
    if (r.size() != 10) throw ParseError("node row needs 10 fields", i + 1);
    GraphNode n;
    n.key = r[0];
    n.level_kind = parse_level_kind(r[1]);
    n.level_depth = static_cast<int>(parse_i64(r[2], i + 1));
    n.level = r[3];
    n.doc_type = parse_doc_type(r[4]);
    n.tokens = parse_u64(r[5], i + 1);
    n.subtree_tokens = parse_u64(r[6], i + 1);
    n.heading = r[8];
    n.citekey = r[9];
    parent_keys.push_back(r[7]);
    g.nodes.push_back(std::move(n));
  }
  std::unordered_map<std::string, std::uint32_t> idx;
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) idx.emplace(g.nodes[i].key, i);
  auto lookup = [&](const std::string& key, std::size_t line) {
    auto it = idx.find(key);
    if (it == idx.end()) throw ParseError("unknown node '" + key + "'", line);
    return it->second;
  };
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    g.nodes[i].parent = parent_keys[i].empty() ? std::int64_t{-1} : std::int64_t{lookup(parent_keys[i], i + 2)};

  const auto erows = csv::parse(edges);
  if (erows.empty() || erows[0].size() != 4 || erows[0][0] != "source")
    throw ParseError("edge table lacks the expected header", 1);
  for (std::size_t i = 1; i < erows.size(); ++i) {
    const auto& r = erows[i];
    if (r.size() != 4) throw ParseError("edge row needs 4 fields", i + 1);
    Edge e;
    e.source = lookup(r[0], i + 1);
    e.target = lookup(r[1], i + 1);
    e.type = parse_edge_type(r[2]);
    if (e.type == EdgeType::reference) e.cls = parse_reference_class(r[3]);
    g.edges.push_back(e);
  }
  g.finalize();
  return g;
}

LegalGraph import_csv(const std::filesystem::path& nodes, const std::filesystem::path& edges,
                      Country country, int year) {
  const std::string n = read_maybe_gz(nodes), e = read_maybe_gz(edges);
  return import_csv(std::string_view(n), std::string_view(e), country, year);
}

// --- GraphML ----------------------------------------------------------------------

namespace {

struct KeyDef {
  std::string id, domain, name, type;
};

std::string graphml_document(const std::vector<KeyDef>& keys,
                             const std::vector<std::pair<std::string, std::vector<std::string>>>& nodes,
                             const std::vector<std::tuple<std::string, std::string, std::vector<std::string>>>& edges,
                             std::size_t node_keys) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  for (const auto& k : keys) {
    out += "  <key id=\"" + k.id + "\" for=\"" + k.domain + "\" attr.name=\"" + k.name + "\" attr.type=\"" +
           k.type + "\"/>\n";
  }
  out += "  <graph id=\"G\" edgedefault=\"directed\">\n";
  for (const auto& [id, values] : nodes) {
    out += "    <node id=\"";
    xml_escape(out, id);
    out += "\">\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      out += "      <data key=\"" + keys[i].id + "\">";
      xml_escape(out, values[i]);
      out += "</data>\n";
    }
    out += "    </node>\n";
  }
  std::size_t eid = 0;
  for (const auto& [s, t, values] : edges) {
    out += "    <edge id=\"e" + std::to_string(eid++) + "\" source=\"";
    xml_escape(out, s);
    out += "\" target=\"";
    xml_escape(out, t);
    out += "\">\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      out += "      <data key=\"" + keys[node_keys + i].id + "\">";
      xml_escape(out, values[i]);
      out += "</data>\n";
    }
    out += "    </edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

}  // namespace

std::string graphml(const LegalGraph& graph) {
  const std::vector<KeyDef> keys = {
      {"d0", "node", "level_kind", "string"}, {"d1", "node", "level_depth", "int"},
      {"d2", "node", "level", "string"},      {"d3", "node", "doc_type", "string"},
      {"d4", "node", "tokens", "long"},       {"d5", "node", "heading", "string"},
      {"d6", "node", "citekey", "string"},    {"d7", "edge", "type", "string"},
      {"d8", "edge", "class", "string"}};
  std::vector<std::pair<std::string, std::vector<std::string>>> nodes;
  for (const auto& n : graph.nodes) {
    nodes.push_back({n.key,
                     {std::string(to_string(n.level_kind)), std::to_string(n.level_depth), n.level,
                      std::string(to_string(n.doc_type)), std::to_string(n.tokens), n.heading, n.citekey}});
  }
  std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> edges;
  for (const auto& e : graph.edges) {
    edges.emplace_back(graph.nodes[e.source].key, graph.nodes[e.target].key,
                       std::vector<std::string>{std::string(to_string(e.type)),
                                                e.type == EdgeType::reference ? std::string(to_string(e.cls)) : ""});
  }
  return graphml_document(keys, nodes, edges, 7);
}

std::string graphml(const QuotientGraph& graph) {
  std::vector<KeyDef> keys = {{"d0", "node", "level", "string"},
                              {"d1", "node", "doc_type", "string"},
                              {"d2", "node", "tokens_statute", "long"},
                              {"d3", "node", "tokens_regulation", "long"},
                              {"d4", "node", "heading", "string"},
                              {"d5", "edge", "weight", "long"}};
  for (std::size_t i = 0; i < kClassNames.size(); ++i)
    keys.push_back({"d" + std::to_string(6 + i), "edge", std::string(kClassNames[i]), "long"});
  std::vector<std::pair<std::string, std::vector<std::string>>> nodes;
  for (const auto& n : graph.nodes) {
    nodes.push_back({n.key,
                     {n.level, std::string(to_string(n.doc_type)), std::to_string(n.tokens_statute),
                      std::to_string(n.tokens_regulation), n.heading}});
  }
  std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> edges;
  for (const auto& e : graph.edges) {
    std::vector<std::string> values{std::to_string(e.weight)};
    for (auto c : e.by_class) values.push_back(std::to_string(c));
    edges.emplace_back(graph.nodes[e.source].key, graph.nodes[e.target].key, std::move(values));
  }
  return graphml_document(keys, nodes, edges, 5);
}

}  // namespace lexnet::graph
