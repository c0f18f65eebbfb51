#include "stages.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <set>

#include "lexnet/csv.hpp"
#include "lexnet/io.hpp"
#include "lexnet/macrostats.hpp"
#include "lexnet/microstars.hpp"
#include "lexnet/partcmp.hpp"
#include "lexnet/profiles.hpp"

#ifndef LEXNET_DEFAULT_DATA
#define LEXNET_DEFAULT_DATA ""
#endif

namespace lexnet::cli {

using nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string country_dir(Country c) { return std::string(to_string(c)); }

std::string file_safe(std::string_view key) {
  std::string out;
  for (char ch : key) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                    ch == '-' || ch == '_' || ch == '.';
    out += ok ? ch : '_';
  }
  return out;
}

fs::path data_dir() {
  if (const char* env = std::getenv("LEXNET_DATA"); env && *env) return env;
  return LEXNET_DEFAULT_DATA;
}

template <class T>
T get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

// --- configuration ----------------------------------------------------------------

void RunConfig::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  static const std::set<std::string> known = {
      "input",   "out",       "countries", "from",     "to",         "levels",  "runs",
      "agreement", "prefer",  "seed",      "threshold", "rescale",   "min_size", "ratio",
      "density_cap", "top_terms", "jobs",  "fold_case", "gzip",      "graphml", "patterns",
      "registry", "stoplist", "units"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

  if (j.contains("input")) input = get<std::string>(j, "input");
  if (j.contains("out")) out = get<std::string>(j, "out");
  if (j.contains("countries")) {
    countries.clear();
    for (const auto& c : get<std::vector<std::string>>(j, "countries")) countries.push_back(parse_country(c));
  }
  if (j.contains("from")) year_from = get<int>(j, "from");
  if (j.contains("to")) year_to = get<int>(j, "to");
  if (j.contains("levels")) {
    const auto& lv = j.at("levels");
    if (lv.is_string()) {
      levels[Country::US] = levels[Country::DE] = lv.get<std::string>();
    } else if (lv.is_object()) {
      for (const auto& [c, sel] : lv.items()) {
        if (!sel.is_string()) throw ConfigError("level selector for " + c + " must be a string");
        levels[parse_country(c)] = sel.get<std::string>();
      }
    } else {
      throw ConfigError("config key 'levels' must be a string or an object");
    }
  }
  if (j.contains("runs")) runs = get<std::uint32_t>(j, "runs");
  if (j.contains("agreement")) agreement = get<double>(j, "agreement");
  if (j.contains("prefer")) prefer = get<std::uint32_t>(j, "prefer");
  if (j.contains("seed")) seed = get<std::uint64_t>(j, "seed");
  if (j.contains("threshold")) threshold = get<double>(j, "threshold");
  if (j.contains("rescale")) rescale = get<bool>(j, "rescale");
  if (j.contains("min_size")) min_size = get<std::size_t>(j, "min_size");
  if (j.contains("ratio")) ratio = get<std::uint64_t>(j, "ratio");
  if (j.contains("density_cap")) density_cap = get<double>(j, "density_cap");
  if (j.contains("top_terms")) top_terms = get<std::size_t>(j, "top_terms");
  if (j.contains("jobs")) jobs = get<unsigned>(j, "jobs");
  if (j.contains("fold_case")) fold_case = get<bool>(j, "fold_case");
  if (j.contains("gzip")) gzip = get<bool>(j, "gzip");
  if (j.contains("graphml")) graphml = get<bool>(j, "graphml");
  if (j.contains("patterns")) patterns = get<std::string>(j, "patterns");
  if (j.contains("registry")) registry = get<std::string>(j, "registry");
  if (j.contains("stoplist")) stoplist = get<std::string>(j, "stoplist");
  if (j.contains("units")) units = get<std::vector<std::string>>(j, "units");
}

void RunConfig::validate(bool needs_seed) const {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (!(agreement > 0 && agreement <= 1)) throw ConfigError("agreement must lie in (0, 1]");
  if (prefer < 1) throw ConfigError("prefer must be at least 1");
  if (!(threshold > 0 && threshold <= 1)) throw ConfigError("threshold must lie in (0, 1]");
  if (min_size < 2) throw ConfigError("min_size must be at least 2");
  if (ratio < 1) throw ConfigError("ratio must be at least 1");
  if (!(density_cap >= 0 && density_cap < 1)) throw ConfigError("density_cap must lie in [0, 1)");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (year_from && year_to && *year_from > *year_to) throw ConfigError("year range is empty");
  for (const auto& [c, sel] : levels) graph::LevelSelector::parse(sel);
  if (needs_seed && !seed) throw ConfigError("this command clusters and needs --seed");
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  ordered_json cs = ordered_json::array();
  for (auto c : countries) cs.push_back(to_string(c));
  j["countries"] = cs;
  j["from"] = year_from ? ordered_json(*year_from) : ordered_json(nullptr);
  j["to"] = year_to ? ordered_json(*year_to) : ordered_json(nullptr);
  ordered_json lv = ordered_json::object();
  for (auto c : {Country::US, Country::DE}) {
    auto it = levels.find(c);
    lv[std::string(to_string(c))] =
        it != levels.end() ? graph::LevelSelector::parse(it->second).str() : graph::LevelSelector::default_for(c).str();
  }
  j["levels"] = lv;
  j["runs"] = runs;
  j["agreement"] = agreement;
  j["prefer"] = prefer;
  j["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
  j["threshold"] = threshold;
  j["rescale"] = rescale;
  j["min_size"] = min_size;
  j["ratio"] = ratio;
  j["density_cap"] = density_cap;
  j["top_terms"] = top_terms;
  j["fold_case"] = fold_case;
  j["gzip"] = gzip;
  j["graphml"] = graphml;
  j["units"] = units;
  return j;
}

// --- workspace ----------------------------------------------------------------------

Workspace::Workspace(RunConfig cfg) : cfg_(std::move(cfg)) {}

void Workspace::write(const fs::path& rel, std::string_view data) {
  const fs::path full = cfg_.out / rel;
  fs::create_directories(full.parent_path());
  csv::write_file(full, data);
  outputs_.push_back(rel);
}

graph::LevelSelector Workspace::selector(Country c) const {
  auto it = cfg_.levels.find(c);
  return it != cfg_.levels.end() ? graph::LevelSelector::parse(it->second) : graph::LevelSelector::default_for(c);
}

corpus::TokenizeOptions Workspace::tokenize_options() const {
  corpus::TokenizeOptions t;
  t.fold_case = cfg_.fold_case;
  return t;
}

void Workspace::load() {
  if (loaded_) return;
  loaded_ = true;
  if (cfg_.input.empty()) throw ConfigError("no input root; pass --input or set LEXNET_INPUT");
  if (!fs::is_directory(cfg_.input)) throw NotFoundError("input root missing: " + cfg_.input.string());

  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(cfg_.input))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), cfg_.input));
  std::sort(files.begin(), files.end());
  for (const auto& f : files) inputs_.emplace_back(f.generic_string(), io::sha256_file(cfg_.input / f));

  const bool store = fs::exists(cfg_.input / "manifest.json");
  std::vector<Country> countries = cfg_.countries;
  if (countries.empty()) {
    for (auto c : {Country::US, Country::DE}) {
      if (store) {
        auto m = nlohmann::json::parse(csv::read_file(cfg_.input / "manifest.json"));
        for (const auto& s : m["snapshots"])
          if (s["country"] == to_string(c)) {
            countries.push_back(c);
            break;
          }
      } else if (fs::is_directory(cfg_.input / country_dir(c))) {
        countries.push_back(c);
      }
    }
  }
  if (countries.empty()) throw NotFoundError("no country directories under " + cfg_.input.string());

  for (auto c : countries) {
    CountryState s;
    s.country = c;
    s.series = store ? corpus::read_store(cfg_.input, c)
                     : corpus::ingest_country(cfg_.input / country_dir(c), c, diag_, cfg_.jobs);
    std::erase_if(s.series, [&](const corpus::Snapshot& snap) {
      return (cfg_.year_from && snap.year < *cfg_.year_from) || (cfg_.year_to && snap.year > *cfg_.year_to);
    });
    if (s.series.empty()) throw NotFoundError("no snapshots for " + country_dir(c) + " in the year range");
    states_.push_back(std::move(s));
  }
}

std::vector<CountryState>& Workspace::countries() {
  load();
  return states_;
}

const citeparse::PatternSet& Workspace::patterns(Country c) {
  auto it = patterns_.find(c);
  if (it != patterns_.end()) return it->second;
  citeparse::PatternSet p;
  if (cfg_.patterns.empty()) {
    p = citeparse::PatternSet::builtin(c);
  } else {
    const fs::path file = cfg_.patterns / (c == Country::US ? "us.rules" : "de.rules");
    p = citeparse::PatternSet::load(file);
    inputs_.emplace_back("patterns/" + file.filename().string(), io::sha256_file(file));
  }
  return patterns_.emplace(c, std::move(p)).first->second;
}

const citeparse::LawRegistry* Workspace::registry(Country c) {
  if (c != Country::DE) return nullptr;
  if (!registry_) {
    fs::path file = cfg_.registry.empty() ? data_dir() / "registry" / "de_laws.csv" : cfg_.registry;
    if (!fs::exists(file)) throw NotFoundError("law registry missing: " + file.string() + "; pass --registry");
    registry_ = citeparse::LawRegistry::load_csv(file);
    inputs_.emplace_back("registry/" + file.filename().string(), io::sha256_file(file));
  }
  return &*registry_;
}

void Workspace::need_refs(CountryState& s) {
  if (!s.refs.empty() || s.series.empty()) return;
  const auto& pats = patterns(s.country);
  const auto* reg = registry(s.country);
  for (const auto& snap : s.series) {
    citeparse::ExtractionStats st;
    auto refs = citeparse::extract_references(snap, pats, reg, st, cfg_.jobs);
    citeparse::resolve_references(refs, snap, st, diag_);
    s.refs.push_back(std::move(refs));
    s.stats.push_back(st);
  }
}

void Workspace::need_graphs(CountryState& s) {
  if (!s.graphs.empty()) return;
  need_refs(s);
  const auto sel = selector(s.country);
  for (std::size_t i = 0; i < s.series.size(); ++i) {
    s.graphs.push_back(graph::build_graph(s.series[i], s.refs[i], diag_, tokenize_options()));
    s.quotients.push_back(graph::quotient(s.graphs.back(), sel, diag_));
  }
}

void Workspace::need_clusterings(CountryState& s) {
  if (!s.clusterings.empty()) return;
  need_graphs(s);
  cfg_.validate(true);
  meso::ConsensusOptions opts;
  opts.runs = cfg_.runs;
  opts.agreement = cfg_.agreement;
  opts.preferred_modules = cfg_.prefer;
  opts.master_seed = *cfg_.seed;
  opts.jobs = cfg_.jobs;
  for (const auto& q : s.quotients) s.clusterings.push_back(meso::consensus_cluster(q, opts));
}

void Workspace::need_alignments(CountryState& s) {
  if (!s.alignments.empty() || s.series.size() < 2) return;
  need_graphs(s);
  for (std::size_t i = 0; i + 1 < s.series.size(); ++i)
    s.alignments.push_back(meso::align(s.series[i], s.series[i + 1], s.graphs[i], s.graphs[i + 1]));
}

// --- stages ---------------------------------------------------------------------------

void Workspace::ingest() {
  std::vector<corpus::Snapshot> all;
  for (const auto& s : countries()) all.insert(all.end(), s.series.begin(), s.series.end());
  const fs::path store = cfg_.out / "store";
  corpus::write_store(store, all);
  std::vector<fs::path> written;
  for (const auto& e : fs::recursive_directory_iterator(store))
    if (e.is_regular_file()) written.push_back(fs::relative(e.path(), cfg_.out));
  std::sort(written.begin(), written.end());
  outputs_.insert(outputs_.end(), written.begin(), written.end());
}

void Workspace::extract_refs() {
  for (auto& s : countries()) {
    need_refs(s);
    ordered_json diag = ordered_json::array();
    for (std::size_t i = 0; i < s.series.size(); ++i) {
      std::string out;
      csv::append_row(out, {"source_key", "node_key", "offset", "length", "raw", "targets", "resolved", "deferred"});
      for (const auto& r : s.refs[i]) {
        std::vector<std::string> targets;
        for (const auto& t : r.targets) targets.push_back(t.str());
        csv::append_row(out, {r.source_key, r.node_key, std::to_string(r.span.offset), std::to_string(r.span.length),
                              r.raw, join(targets, ';'), join(r.resolved, ';'), r.deferred ? "1" : "0"});
      }
      const int year = s.series[i].year;
      write(fs::path("refs") / country_dir(s.country) / (std::to_string(year) + ".csv"), out);
      const auto& st = s.stats[i];
      diag.push_back({{"year", year},
                      {"found", st.found},
                      {"parsed", st.parsed},
                      {"deferred", st.deferred},
                      {"external", st.external},
                      {"keys", st.keys},
                      {"resolved", st.resolved},
                      {"unresolved", st.unresolved},
                      {"duplicate_targets", st.duplicate_targets},
                      {"outside_container", st.outside_container}});
    }
    write(fs::path("refs") / country_dir(s.country) / "diagnostics.json", diag.dump(2) + "\n");
  }
}

void Workspace::estimate_missed() {
  ordered_json all = ordered_json::object();
  for (auto& s : countries()) {
    need_refs(s);
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < s.series.size(); ++i) {
      std::map<std::string, std::vector<citeparse::Span>> spans;
      for (const auto& r : s.refs[i]) spans[r.node_key].push_back(r.span);
      std::vector<citeparse::TextWithSpans> texts;
      for (const auto& tree : s.series[i].trees)
        corpus::walk(tree, [&](const corpus::CorpusNode& n, const corpus::CorpusNode*) {
          if (!n.text) return;
          auto it = spans.find(n.key);
          texts.push_back({*n.text, it == spans.end() ? std::vector<citeparse::Span>{} : it->second});
        });
      const auto est = citeparse::estimate_unextracted(texts);
      rows.push_back({{"year", s.series[i].year},
                      {"extracted", est.extracted},
                      {"outside", est.outside},
                      {"fraction", est.fraction}});
    }
    all[country_dir(s.country)] = rows;
  }
  write("estimate_missed.json", all.dump(2) + "\n");
}

void Workspace::graph() {
  graph::ExportOptions ex;
  ex.gzip = cfg_.gzip;
  for (auto& s : countries()) {
    need_graphs(s);
    for (std::size_t i = 0; i < s.series.size(); ++i) {
      const fs::path rel = fs::path("graph") / country_dir(s.country) / std::to_string(s.series[i].year);
      fs::create_directories(cfg_.out / rel);
      for (const auto& p : graph::export_csv(s.graphs[i], cfg_.out / rel, "", ex))
        outputs_.push_back(fs::relative(p, cfg_.out));
      for (const auto& p : graph::export_csv(s.quotients[i], cfg_.out / rel, "quotient_", ex))
        outputs_.push_back(fs::relative(p, cfg_.out));
      if (cfg_.graphml) {
        write(rel / "graph.graphml", graph::graphml(s.graphs[i]));
        write(rel / "quotient.graphml", graph::graphml(s.quotients[i]));
      }
    }
  }
}

void Workspace::growth() {
  for (auto& s : countries()) {
    need_graphs(s);
    std::vector<const graph::LegalGraph*> gs;
    for (const auto& g : s.graphs) gs.push_back(&g);
    const auto gr = macro::growth(gs, s.series.front().year);
    std::string out;
    csv::append_row(out, {"doc_type", "year", "tokens", "structures", "lateral_references", "rel_tokens",
                          "rel_structures", "rel_lateral"});
    for (const auto& r : gr.rows)
      csv::append_row(out, {std::string(to_string(r.doc_type)), std::to_string(r.year), std::to_string(r.tokens),
                            std::to_string(r.structures), std::to_string(r.lateral_references),
                            opt_num(r.rel_tokens), opt_num(r.rel_structures), opt_num(r.rel_lateral)});
    write(fs::path("growth") / (country_dir(s.country) + ".csv"), out);

    out.clear();
    csv::append_row(out, {"year", "lateral_statute", "lateral_regulation", "upward", "downward"});
    for (const auto& [year, counts] : gr.by_class) {
      csv::Row row{std::to_string(year)};
      for (auto v : counts) row.push_back(std::to_string(v));
      csv::append_row(out, row);
    }
    write(fs::path("growth") / (country_dir(s.country) + "_classes.csv"), out);

    out.clear();
    csv::append_row(out, {"doc_type", "tokens_pct", "structures_pct", "lateral_references_pct"});
    for (const auto& d : gr.deltas)
      csv::append_row(out, {std::string(to_string(d.doc_type)), opt_num(d.tokens), opt_num(d.structures),
                            opt_num(d.lateral_references)});
    write(fs::path("growth") / (country_dir(s.country) + "_deltas.csv"), out);
  }
}

void Workspace::connectivity() {
  for (auto& s : countries()) {
    need_graphs(s);
    std::string comp, rock;
    csv::append_row(comp, {"year", "scope", "nodes", "lcc_nodes", "satellite_nodes", "isolates",
                           "nontrivial_components", "tokens", "lcc_fraction", "satellite_fraction",
                           "isolate_fraction", "components_per_1000_tokens"});
    csv::append_row(rock, {"year", "scope", "total_nodes", "lcc", "scc", "in", "out", "tendrils_tubes",
                           "all_singleton"});
    for (std::size_t i = 0; i < s.graphs.size(); ++i) {
      const auto& g = s.graphs[i];
      const auto year = std::to_string(g.year);
      for (auto scope : {macro::Scope::all, macro::Scope::statutes, macro::Scope::regulations}) {
        const auto c = macro::components(g, scope);
        csv::append_row(comp, {year, std::string(to_string(scope)), std::to_string(c.nodes),
                               std::to_string(c.lcc_nodes), std::to_string(c.satellite_nodes),
                               std::to_string(c.isolates), std::to_string(c.nontrivial_components),
                               std::to_string(c.tokens), num(c.lcc_fraction()), num(c.satellite_fraction()),
                               num(c.isolate_fraction()), num(c.components_per_1000_tokens())});
        const auto r = macro::rocket(macro::reference_digraph(g, scope), diag_);
        csv::append_row(rock, {year, std::string(to_string(scope)), std::to_string(r.total_nodes),
                               std::to_string(r.lcc.size()), std::to_string(r.scc.size()), std::to_string(r.in.size()),
                               std::to_string(r.out.size()), std::to_string(r.tt.size()),
                               r.all_singleton ? "1" : "0"});
      }
      for (auto dir : {macro::Direction::in, macro::Direction::out}) {
        macro::DegreeOptions opts;
        opts.direction = dir;
        const auto d = macro::degree_distribution(g, opts);
        std::string out;
        csv::append_row(out, {"degree", "count"});
        for (const auto& [deg, count] : d.counts) csv::append_row(out, {std::to_string(deg), std::to_string(count)});
        write(fs::path("connectivity") / country_dir(s.country) /
                  (year + (dir == macro::Direction::in ? "_degree_in.csv" : "_degree_out.csv")),
              out);
      }
    }
    write(fs::path("connectivity") / country_dir(s.country) / "components.csv", comp);
    write(fs::path("connectivity") / country_dir(s.country) / "rocket.csv", rock);
  }
}

void Workspace::cluster() {
  for (auto& s : countries()) {
    need_clusterings(s);
    std::string summary;
    csv::append_row(summary, {"year", "level", "nodes", "clusters", "codelength"});
    for (std::size_t i = 0; i < s.clusterings.size(); ++i) {
      const auto& c = s.clusterings[i];
      write(fs::path("clusters") / country_dir(s.country) / (std::to_string(c.year) + ".csv"),
            meso::clustering_csv(c));
      csv::append_row(summary, {std::to_string(c.year), s.quotients[i].level, std::to_string(c.keys.size()),
                                std::to_string(c.clusters()), num(c.codelength)});
    }
    write(fs::path("clusters") / country_dir(s.country) / "summary.csv", summary);
  }
}

void Workspace::align() {
  for (auto& s : countries()) {
    need_alignments(s);
    std::string summary;
    csv::append_row(summary, {"from", "to", "pass1", "pass2", "pass3", "pass4", "matched"});
    for (const auto& a : s.alignments) {
      const auto name = std::to_string(a.year_from) + "_" + std::to_string(a.year_to);
      write(fs::path("align") / country_dir(s.country) / (name + ".csv"), meso::alignment_csv(a));
      const auto pp = a.per_pass();
      csv::Row row{std::to_string(a.year_from), std::to_string(a.year_to)};
      for (int p = 1; p <= 4; ++p) {
        auto it = pp.find(p);
        row.push_back(std::to_string(it == pp.end() ? 0 : it->second));
      }
      row.push_back(std::to_string(a.matches.size()));
      csv::append_row(summary, row);
    }
    write(fs::path("align") / country_dir(s.country) / "summary.csv", summary);
  }
}

void Workspace::families() {
  std::vector<std::string> stop =
      cfg_.stoplist.empty() ? meso::default_stoplist() : meso::load_stoplist(csv::read_file(cfg_.stoplist));
  if (!cfg_.stoplist.empty()) inputs_.emplace_back("stoplist/" + cfg_.stoplist.filename().string(),
                                                   io::sha256_file(cfg_.stoplist));
  for (auto& s : countries()) {
    need_clusterings(s);
    need_alignments(s);
    std::vector<meso::YearClusters> years;
    for (std::size_t i = 0; i < s.series.size(); ++i)
      years.push_back(meso::year_clusters(s.series[i], s.quotients[i], s.clusterings[i], tokenize_options()));
    meso::FamilyOptions fo;
    fo.threshold = cfg_.threshold;
    fo.rescale_doc_types = cfg_.rescale;
    const auto fg = meso::build_family_graph(years, s.alignments, fo);
    const fs::path dir = fs::path("families") / country_dir(s.country);
    write(dir / "family_graph.json", meso::family_graph_json(fg));

    const int first = s.series.front().year, last = s.series.back().year;
    std::string classes;
    csv::append_row(classes, {"family", "nodes", "first_year", "last_year", "average", "majority", "growth"});
    std::vector<std::string> documents;
    for (const auto& f : fg.families) {
      const auto cls = meso::classify_family(f.series, first, last, diag_);
      csv::append_row(classes, {std::to_string(f.id), std::to_string(f.nodes.size()),
                                std::to_string(f.series.begin()->first), std::to_string(f.series.rbegin()->first),
                                std::string(to_string(cls.average)), std::string(to_string(cls.majority)),
                                std::string(to_string(cls.growth))});
      // The family's text in its last year.
      const int fy = f.series.rbegin()->first;
      std::size_t yi = 0;
      while (s.series[yi].year != fy) ++yi;
      std::map<std::string, const std::string*> text;
      for (const auto& tree : s.series[yi].trees)
        corpus::walk(tree, [&](const corpus::CorpusNode& n, const corpus::CorpusNode*) {
          if (n.text) text[n.key] = &*n.text;
        });
      std::set<std::uint32_t> member_clusters;
      for (auto n : f.nodes)
        if (fg.nodes[n].year == fy) member_clusters.insert(fg.nodes[n].cluster);
      std::string doc;
      for (const auto& leaf : years[yi].leaves) {
        if (!member_clusters.count(leaf.cluster)) continue;
        if (auto it = text.find(leaf.key); it != text.end()) {
          doc += *it->second;
          doc += '\n';
        }
      }
      documents.push_back(std::move(doc));
    }
    write(dir / "classes.csv", classes);

    const auto top = meso::family_tfidf(documents, stop, cfg_.top_terms);
    std::string tfidf;
    csv::append_row(tfidf, {"family", "rank", "term", "score"});
    for (std::size_t f = 0; f < top.size(); ++f)
      for (std::size_t r = 0; r < top[f].size(); ++r)
        csv::append_row(tfidf, {std::to_string(fg.families[f].id), std::to_string(r + 1), top[f][r].term,
                                num(top[f][r].score)});
    write(dir / "tfidf.csv", tfidf);
  }
}

void Workspace::stars() {
  micro::StarOptions so;
  so.min_size = cfg_.min_size;
  so.density_cap = cfg_.density_cap;
  so.ratio = cfg_.ratio;
  so.jobs = cfg_.jobs;
  for (auto& s : countries()) {
    need_graphs(s);
    for (const auto& g : s.graphs) {
      auto found = micro::extract_stars(macro::reference_digraph(g), so);
      for (auto& st : found)
        if (auto i = g.find(st.hub)) st.heading = g.nodes[*i].heading;
      write(fs::path("stars") / country_dir(s.country) / (std::to_string(g.year) + ".csv"), micro::stars_csv(found));
    }
  }
}

void Workspace::profile() {
  for (auto& s : countries()) {
    need_graphs(s);
    const fs::path dir = fs::path("profiles") / country_dir(s.country);
    std::vector<std::string> units = cfg_.units;
    if (units.empty()) {
      std::set<std::string> all;
      for (const auto& q : s.quotients)
        for (const auto& n : q.nodes) all.insert(n.key);
      units.assign(all.begin(), all.end());
    }
    std::vector<profiles::ProfileSeries> series;
    std::string table;
    for (const auto& unit : units) {
      std::vector<profiles::YearInput> in;
      for (std::size_t i = 0; i < s.series.size(); ++i)
        if (s.quotients[i].find(unit)) in.push_back({&s.series[i], &s.quotients[i]});
      if (in.empty()) {
        if (!cfg_.units.empty()) throw NotFoundError("unit '" + unit + "' is not a unit in any year");
        continue;
      }
      auto p = profiles::profile(unit, in, diag_, tokenize_options());
      const auto csv_text = profiles::profile_csv(p);
      table += table.empty() ? csv_text : csv_text.substr(csv_text.find('\n') + 1);
      series.push_back(std::move(p));
    }
    write(dir / "profiles.csv", table);
    if (s.series.size() >= 2)
      write(dir / ("delta_" + std::to_string(s.series.front().year) + "_" + std::to_string(s.series.back().year) +
                   ".csv"),
            profiles::delta_csv(profiles::profile_delta(series, s.series.front().year, s.series.back().year)));
    // Ego views in the last year, for explicitly requested units.
    const auto& q = s.quotients.back();
    for (const auto& unit : cfg_.units) {
      if (!q.find(unit)) continue;
      const auto [rel, resp] = profiles::ego_views(unit, q);
      const auto base = file_safe(unit) + "_" + std::to_string(q.year);
      write(dir / (base + "_ego.json"), profiles::ego_json(rel, resp));
      write(dir / (base + "_reliance.dot"), profiles::ego_dot(rel));
      write(dir / (base + "_responsibility.dot"), profiles::ego_dot(resp));
    }
  }
}

void Workspace::write_manifest(const std::string& command) {
  ordered_json m;
  m["command"] = command;
  const auto cfg = cfg_.to_json();
  m["config"] = cfg;
  m["config_sha256"] = io::sha256_hex(cfg.dump());
  ordered_json ins = ordered_json::array();
  for (const auto& [path, digest] : inputs_) ins.push_back({{"path", path}, {"sha256", digest}});
  m["inputs"] = ins;
  ordered_json outs = ordered_json::array();
  for (const auto& p : outputs_)
    outs.push_back({{"path", p.generic_string()}, {"sha256", io::sha256_file(cfg_.out / p)}});
  m["outputs"] = outs;
  m["diagnostics"] = diag_.messages;
  const fs::path rel = fs::path("manifests") / (command + ".json");
  fs::create_directories((cfg_.out / rel).parent_path());
  csv::write_file(cfg_.out / rel, m.dump(2) + "\n");
}

std::string evaluate(const fs::path& a, const fs::path& b, const std::string& metric) {
  for (const auto& p : {a, b})
    if (!fs::exists(p)) throw NotFoundError("clustering file missing: " + p.string());
  const partcmp::Partition x = meso::read_clustering_csv(csv::read_file(a));
  const partcmp::Partition y = meso::read_clustering_csv(csv::read_file(b));
  Diagnostics diag;
  if (metric == "nmi") return ordered_json(partcmp::nmi(x, y, &diag)).dump() + "\n";
  if (metric == "ari") return ordered_json(partcmp::ari(x, y, &diag)).dump() + "\n";
  if (metric != "all") throw ConfigError("unknown metric '" + metric + "'; use nmi, ari or all");
  ordered_json j;
  j["nmi"] = partcmp::nmi(x, y, &diag);
  j["ari"] = partcmp::ari(x, y, &diag);
  j["diagnostics"] = diag.messages;
  return j.dump(2) + "\n";
}

}  // namespace lexnet::cli
