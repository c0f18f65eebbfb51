#include "lexnet/profiles.hpp"

#include <algorithm>

#include "json.hpp"
#include "lexnet/csv.hpp"

namespace lexnet::profiles {

namespace {

const corpus::CorpusNode* find_node(const corpus::CorpusNode& n, const std::string& key) {
  if (n.key == key) return &n;
  for (const auto& c : n.children)
    if (const auto* hit = find_node(c, key)) return hit;
  return nullptr;
}

const corpus::CorpusNode* find_node(const corpus::Snapshot& s, const std::string& key) {
  for (const auto& t : s.trees)
    if (const auto* hit = find_node(t, key)) return hit;
  return nullptr;
}

std::array<std::uint64_t, 10> values(const ProfileRow& r) {
  return {r.tokens,       r.unique_tokens, r.items_above, r.items_on,    r.items_below,
          r.self_loops,   r.weighted_in,   r.weighted_out, r.binary_in, r.binary_out};
}

constexpr std::array<const char*, 10> kIndicators = {
    "tokens",     "unique_tokens", "items_above",  "items_on",  "items_below",
    "self_loops", "weighted_in",   "weighted_out", "binary_in", "binary_out"};

}  // namespace

ProfileRow profile_row(const std::string& unit, const corpus::Snapshot& snapshot, const graph::QuotientGraph& q,
                       const corpus::TokenizeOptions& tok) {
  const auto* root = find_node(snapshot, unit);
  if (!root) throw NotFoundError("unit '" + unit + "' not in snapshot " + std::to_string(snapshot.year));
  const auto qi = q.find(unit);
  if (!qi) throw ConfigError("unit '" + unit + "' is not a node of the quotient at " + q.level);

  ProfileRow r;
  r.year = snapshot.year;
  const auto ts = corpus::tokenize(corpus::subtree_text(*root), tok);
  r.tokens = ts.tokens;
  r.unique_tokens = ts.unique_tokens;
  corpus::walk(*root, [&](const corpus::CorpusNode& n, const corpus::CorpusNode*) {
    if (&n == root) return;
    switch (n.level_kind) {
      case LevelKind::container: ++r.items_above; break;
      case LevelKind::seqitem: ++r.items_on; break;
      case LevelKind::subseqitem: ++r.items_below; break;
    }
  });
  for (const auto& e : q.edges) {
    if (e.source == *qi) {
      r.weighted_out += e.weight;
      ++r.binary_out;
    }
    if (e.target == *qi) {
      r.weighted_in += e.weight;
      ++r.binary_in;
    }
    if (e.source == *qi && e.target == *qi) r.self_loops += e.weight;
  }
  return r;
}

ProfileSeries profile(const std::string& unit, const std::vector<YearInput>& years, Diagnostics& diag,
                      const corpus::TokenizeOptions& tok) {
  ProfileSeries p;
  p.unit = unit;
  for (const auto& y : years) {
    if (!find_node(*y.snapshot, unit)) continue;
    p.rows.push_back(profile_row(unit, *y.snapshot, *y.quotient, tok));
  }
  if (p.rows.empty()) throw NotFoundError("unit '" + unit + "' is absent from every snapshot");
  for (std::size_t i = 1; i < p.rows.size(); ++i) {
    const auto before = p.rows[i - 1].tokens, after = p.rows[i].tokens;
    if (before > 0 && after * 10 <= before)
      diag.note("unit " + unit + ": tokens drop from " + std::to_string(before) + " in " +
                std::to_string(p.rows[i - 1].year) + " to " + std::to_string(after) + " in " +
                std::to_string(p.rows[i].year) + "; possible data artifact");
  }
  return p;
}

std::string profile_csv(const ProfileSeries& p) {
  std::string out;
  csv::Row header{"unit", "year"};
  for (auto name : kIndicators) header.emplace_back(name);
  csv::append_row(out, header);
  for (const auto& r : p.rows) {
    csv::Row row{p.unit, std::to_string(r.year)};
    for (auto v : values(r)) row.push_back(std::to_string(v));
    csv::append_row(out, row);
  }
  return out;
}

std::pair<EgoView, EgoView> ego_views(const std::string& unit, const graph::QuotientGraph& q) {
  const auto qi = q.find(unit);
  if (!qi) throw NotFoundError("unit '" + unit + "' is not a node of the quotient at " + q.level);
  EgoView rel, resp;
  rel.unit = resp.unit = unit;
  rel.direction = EgoDirection::reliance;
  resp.direction = EgoDirection::responsibility;
  rel.unit_tokens = resp.unit_tokens = q.nodes[*qi].tokens();
  for (const auto& e : q.edges) {
    if (e.source == e.target) continue;
    if (e.source == *qi) {
      const auto& nb = q.nodes[e.target];
      rel.edges.push_back({nb.key, nb.tokens(), e.weight, e.by_class});
    } else if (e.target == *qi) {
      const auto& nb = q.nodes[e.source];
      resp.edges.push_back({nb.key, nb.tokens(), e.weight, e.by_class});
    }
  }
  auto by_key = [](const EgoEdge& a, const EgoEdge& b) { return a.neighbor < b.neighbor; };
  std::sort(rel.edges.begin(), rel.edges.end(), by_key);
  std::sort(resp.edges.begin(), resp.edges.end(), by_key);
  return {rel, resp};
}

namespace {

nlohmann::ordered_json view_json(const EgoView& v) {
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& e : v.edges) {
    nlohmann::ordered_json classes;
    for (std::size_t c = 0; c < graph::kReferenceClasses; ++c)
      if (e.by_class[c]) classes[std::string(graph::to_string(static_cast<graph::ReferenceClass>(c)))] = e.by_class[c];
    edges.push_back({{"neighbor", e.neighbor},
                     {"neighbor_tokens", e.neighbor_tokens},
                     {"weight", e.weight},
                     {"classes", classes}});
  }
  return edges;
}

std::string dot_id(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ego_json(const EgoView& reliance, const EgoView& responsibility) {
  nlohmann::ordered_json j;
  j["unit"] = reliance.unit;
  j["tokens"] = reliance.unit_tokens;
  j["reliance"] = view_json(reliance);
  j["responsibility"] = view_json(responsibility);
  return j.dump(2) + "\n";
}

std::string ego_dot(const EgoView& view) {
  const bool out = view.direction == EgoDirection::reliance;
  std::string s = std::string("digraph ") + (out ? "reliance" : "responsibility") + " {\n";
  s += "  " + dot_id(view.unit) + " [tokens=" + std::to_string(view.unit_tokens) + "];\n";
  for (const auto& e : view.edges)
    s += "  " + dot_id(e.neighbor) + " [tokens=" + std::to_string(e.neighbor_tokens) + "];\n";
  for (const auto& e : view.edges) {
    const auto& from = out ? view.unit : e.neighbor;
    const auto& to = out ? e.neighbor : view.unit;
    s += "  " + dot_id(from) + " -> " + dot_id(to) + " [weight=" + std::to_string(e.weight) + "];\n";
  }
  return s + "}\n";
}

std::vector<DeltaRow> profile_delta(const std::vector<ProfileSeries>& series, int from, int to) {
  std::vector<DeltaRow> out;
  for (const auto& p : series) {
    const ProfileRow* a = nullptr;
    const ProfileRow* b = nullptr;
    for (const auto& r : p.rows) {
      if (r.year == from) a = &r;
      if (r.year == to) b = &r;
    }
    if (!a || !b) continue;
    DeltaRow d;
    d.unit = p.unit;
    const auto va = values(*a), vb = values(*b);
    for (std::size_t i = 0; i < va.size(); ++i)
      d.delta[i] = static_cast<std::int64_t>(vb[i]) - static_cast<std::int64_t>(va[i]);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const DeltaRow& x, const DeltaRow& y) { return x.unit < y.unit; });
  return out;
}

std::string delta_csv(const std::vector<DeltaRow>& rows) {
  std::string out;
  csv::Row header{"unit"};
  for (auto name : kIndicators) header.emplace_back(name);
  csv::append_row(out, header);
  for (const auto& r : rows) {
    csv::Row row{r.unit};
    for (auto v : r.delta) row.push_back(std::to_string(v));
    csv::append_row(out, row);
  }
  return out;
}

}  // namespace lexnet::profiles
