// Python extension module lexnet._core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lexnet/citeparse.hpp"
#include "lexnet/corpus.hpp"
#include "lexnet/macrostats.hpp"
#include "lexnet/mesoclust.hpp"
#include "lexnet/microstars.hpp"
#include "lexnet/partcmp.hpp"

namespace py = pybind11;
using namespace lexnet;

namespace {

using WeightedEdges = std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>;

meso::FlowGraph make_flow(std::uint32_t n, const WeightedEdges& edges) {
  meso::FlowGraph g;
  for (std::uint32_t i = 0; i < n; ++i) g.keys.push_back(std::to_string(i));
  g.adj.resize(n);
  g.strength.assign(n, 0);
  for (auto [a, b, w] : edges) {
    if (a >= n || b >= n) throw py::index_error("edge endpoint out of range");
    if (!(w > 0)) throw py::value_error("edge weights must be positive");
    g.add_edge(a, b, w);
  }
  return g;
}

macro::Digraph make_digraph(const std::vector<std::string>& keys,
                            const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  macro::Digraph g{keys, edges};
  for (auto [a, b] : edges)
    if (a >= keys.size() || b >= keys.size()) throw py::index_error("edge endpoint out of range");
  return g;
}

citeparse::CiteContext context(const std::string& country, std::optional<std::string> collection,
                               std::optional<std::string> title, std::optional<std::string> law) {
  citeparse::CiteContext ctx;
  ctx.country = parse_country(country);
  if (collection) {
    if (*collection == "USC") ctx.collection = citeparse::Collection::USC;
    else if (*collection == "CFR") ctx.collection = citeparse::Collection::CFR;
    else throw py::value_error("collection must be USC or CFR");
  }
  ctx.title = std::move(title);
  ctx.law = std::move(law);
  return ctx;
}

py::int_ to_py(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  std::string digits;
  do {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  } while (u);
  if (neg) digits.insert(digits.begin(), '-');
  return py::reinterpret_steal<py::int_>(PyLong_FromString(digits.c_str(), nullptr, 10));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Citation networks of statutes and regulations";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_LookupError);
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def(
      "tokenize",
      [](std::string_view text, bool fold) {
        const auto s = corpus::tokenize(text, {fold});
        return std::make_pair(s.tokens, s.unique_tokens);
      },
      py::arg("text"), py::arg("fold_case") = true, "Returns (tokens, unique tokens) of a text.");

  m.def(
      "find_citations",
      [](std::string_view text, const std::string& country, std::optional<std::string> collection,
         std::optional<std::string> title, std::optional<std::string> law) {
        const auto ctx = context(country, std::move(collection), std::move(title), std::move(law));
        const auto ps = citeparse::PatternSet::builtin(ctx.country);
        std::vector<py::dict> out;
        for (const auto& sp : citeparse::find_references(text, ps)) {
          const auto raw = text.substr(sp.offset, sp.length);
          const auto res = citeparse::parse_reference(raw, ctx, ps);
          std::vector<std::string> keys;
          for (const auto& k : res.keys) keys.push_back(k.str());
          py::dict d;
          d["text"] = std::string(raw);
          d["byte_offset"] = sp.offset;
          d["keys"] = keys;
          d["deferred"] = res.deferred;
          out.push_back(d);
        }
        return out;
      },
      py::arg("text"), py::arg("country") = "US", py::arg("collection") = py::none(), py::arg("title") = py::none(),
      py::arg("law") = py::none(), "Finds references with the built-in patterns and parses them into cite keys.");

  m.def(
      "estimate_unextracted",
      [](const std::vector<std::pair<std::string, std::optional<std::vector<std::pair<std::size_t, std::size_t>>>>>&
             texts,
         const std::string& country) {
        const auto ps = citeparse::PatternSet::builtin(parse_country(country));
        std::vector<citeparse::TextWithSpans> in;
        for (const auto& [t, given] : texts) {
          citeparse::TextWithSpans ts{t, {}};
          if (given) {
            for (auto [off, len] : *given) {
              if (off + len > t.size()) throw py::index_error("span outside text");
              ts.spans.push_back({off, len});
            }
          } else {
            ts.spans = citeparse::find_references(t, ps);
          }
          in.push_back(std::move(ts));
        }
        const auto e = citeparse::estimate_unextracted(in);
        return py::make_tuple(e.fraction, e.extracted, e.outside);
      },
      py::arg("texts"), py::arg("country") = "US",
      "Takes (text, spans) pairs, spans as (byte offset, byte length) or None for the built-in patterns.\n"
      "Returns (fraction, extracted, outside).");

  m.def(
      "nmi", [](const partcmp::Partition& a, const partcmp::Partition& b) { return partcmp::nmi(a, b); },
      py::arg("a"), py::arg("b"), "Normalized mutual information of two key -> label mappings.");
  m.def(
      "ari", [](const partcmp::Partition& a, const partcmp::Partition& b) { return partcmp::ari(a, b); },
      py::arg("a"), py::arg("b"), "Adjusted Rand index of two key -> label mappings.");
  m.def(
      "ari_exact",
      [](const partcmp::Partition& a, const partcmp::Partition& b) {
        const auto r = partcmp::ari_exact(a, b);
        return py::make_tuple(to_py(r.num), to_py(r.den));
      },
      py::arg("a"), py::arg("b"), "Adjusted Rand index as (numerator, denominator).");

  m.def(
      "map_equation",
      [](std::uint32_t n, const WeightedEdges& edges, const std::vector<std::uint32_t>& modules) {
        if (modules.size() != n) throw py::value_error("one module per node required");
        return meso::map_equation(make_flow(n, edges), modules);
      },
      py::arg("n"), py::arg("edges"), py::arg("modules"), "Two-level map equation codelength in bits.");

  m.def(
      "cluster",
      [](std::uint32_t n, const WeightedEdges& edges, std::uint32_t preferred_modules, std::uint64_t seed) {
        meso::ClusterOptions o;
        o.preferred_modules = preferred_modules;
        o.seed = seed;
        return meso::canonical_labels(meso::cluster_modules(make_flow(n, edges), o));
      },
      py::arg("n"), py::arg("edges"), py::arg("preferred_modules") = 100, py::arg("seed") = 0,
      "Map-equation modules of an undirected weighted graph.");

  m.def(
      "consensus",
      [](std::uint32_t n, const WeightedEdges& edges, std::uint32_t runs, double agreement,
         std::uint32_t preferred_modules, std::uint64_t seed, unsigned jobs) {
        if (runs == 0) throw py::value_error("runs must be positive");
        if (!(agreement > 0 && agreement <= 1)) throw py::value_error("agreement must lie in (0, 1]");
        meso::ConsensusOptions o;
        o.runs = runs;
        o.agreement = agreement;
        o.preferred_modules = preferred_modules;
        o.master_seed = seed;
        o.jobs = jobs;
        const auto g = make_flow(n, edges);
        py::gil_scoped_release release;
        return meso::canonical_labels(meso::consensus_modules(g, o));
      },
      py::arg("n"), py::arg("edges"), py::arg("runs") = 1000, py::arg("agreement") = 0.95,
      py::arg("preferred_modules") = 100, py::arg("seed") = 0, py::arg("jobs") = 1,
      "Consensus modules over repeated seeded clustering runs.");

  m.def(
      "rocket",
      [](const std::vector<std::string>& keys, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
        Diagnostics diag;
        const auto r = macro::rocket(make_digraph(keys, edges), diag);
        py::dict d;
        d["lcc"] = r.lcc;
        d["scc"] = r.scc;
        d["in"] = r.in;
        d["out"] = r.out;
        d["tt"] = r.tt;
        return d;
      },
      py::arg("keys"), py::arg("edges"), "Bow-tie decomposition of the largest weak component.");

  m.def(
      "classify_star",
      [](std::uint64_t out, std::uint64_t in, std::uint64_t ratio) {
        return std::string(micro::to_string(micro::classify_star(out, in, ratio)));
      },
      py::arg("delta_out"), py::arg("delta_in"), py::arg("ratio") = 10);

  m.def(
      "extract_stars",
      [](const std::vector<std::string>& keys, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
         std::size_t min_size, double density_cap, std::uint64_t ratio) {
        if (!(density_cap >= 0 && density_cap <= 1)) throw py::value_error("density_cap must lie in [0, 1]");
        micro::StarOptions o;
        o.min_size = min_size;
        o.density_cap = density_cap;
        o.ratio = ratio;
        std::vector<py::dict> out;
        for (const auto& s : micro::extract_stars(make_digraph(keys, edges), o)) {
          py::dict d;
          d["hub"] = s.hub;
          d["spokes"] = s.spokes;
          d["n"] = s.n;
          d["m_s"] = s.m_s;
          d["delta_out"] = s.delta_out;
          d["delta_in"] = s.delta_in;
          d["type"] = std::string(micro::to_string(s.type));
          out.push_back(d);
        }
        return out;
      },
      py::arg("keys"), py::arg("edges"), py::arg("min_size") = 10, py::arg("density_cap") = 0.05,
      py::arg("ratio") = 10, "Stars with pruned spokes, largest first.");

  m.attr("__version__") = "0.1.0";
}
