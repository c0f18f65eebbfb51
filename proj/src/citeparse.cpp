#include "lexnet/citeparse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <unordered_map>

#include "lexnet/csv.hpp"
#include "lexnet/parallel.hpp"

namespace lexnet::citeparse {

std::string_view to_string(Collection c) { return c == Collection::USC ? "USC" : "CFR"; }

// --- CiteKey ------------------------------------------------------------------

std::string normalize_section(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b) {
    const char c = raw[e - 1];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == ',' || c == ';' || c == ':' ||
        c == '-')
      --e;
    else
      break;
  }
  std::string out(raw.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

CiteKey CiteKey::us(Collection collection, std::string title, std::string section) {
  CiteKey k;
  k.country_ = Country::US;
  k.collection_ = collection;
  k.title_ = normalize_section(title);
  k.section_ = normalize_section(section);
  return k;
}

CiteKey CiteKey::de(std::string law_abbrev, std::string section_label) {
  CiteKey k;
  k.country_ = Country::DE;
  k.title_ = std::move(law_abbrev);
  k.section_ = normalize_section(section_label);
  return k;
}

std::optional<CiteKey> CiteKey::parse(std::string_view text) {
  const auto c1 = text.find(':');
  if (c1 == std::string_view::npos) return std::nullopt;
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) return std::nullopt;
  const auto head = text.substr(0, c1);
  const auto mid = text.substr(c1 + 1, c2 - c1 - 1);
  const auto tail = text.substr(c2 + 1);
  if (mid.empty() || tail.empty() || tail.find(':') != std::string_view::npos) return std::nullopt;
  if (head == "USC") return us(Collection::USC, std::string(mid), std::string(tail));
  if (head == "CFR") return us(Collection::CFR, std::string(mid), std::string(tail));
  if (head == "DE") return de(std::string(mid), std::string(tail));
  return std::nullopt;
}

std::string CiteKey::str() const {
  std::string out = country_ == Country::DE ? "DE" : std::string(to_string(collection_));
  out += ':';
  out += title_;
  out += ':';
  out += section_;
  return out;
}

// --- PatternSet -----------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string expand(std::string_view src, const std::map<std::string, std::string>& defines,
                   std::size_t line) {
  std::string out;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == '{') {
      const auto close = src.find('}', i);
      if (close != std::string_view::npos) {
        const std::string name(src.substr(i + 1, close - i - 1));
        const bool identifier =
            !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
              return std::isupper(static_cast<unsigned char>(c)) || c == '_';
            });
        if (identifier) {
          auto it = defines.find(name);
          if (it == defines.end()) throw ParseError("undefined pattern macro {" + name + "}", line);
          out += it->second;
          i = close;
          continue;
        }
      }
    }
    out += src[i];
  }
  return out;
}

constexpr auto kRegexFlags = std::regex::ECMAScript | std::regex::icase | std::regex::optimize;

}  // namespace

PatternSet PatternSet::parse(std::string_view text) {
  PatternSet ps;
  std::map<std::string, std::string> defines;
  bool have_country = false;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("pattern rule without '='", line_no);
    const auto lhs = trim(line.substr(0, eq));
    const auto rhs = trim(line.substr(eq + 1));
    const auto space = lhs.find(' ');
    const auto kind = lhs.substr(0, space);
    const std::string name(space == std::string_view::npos ? std::string_view{} : trim(lhs.substr(space)));

    if (kind == "country") {
      ps.country_ = parse_country(rhs);
      have_country = true;
    } else if (kind == "version") {
      ps.version_ = std::string(rhs);
    } else if (kind == "define" || kind == "find" || kind == "unit") {
      if (name.empty()) throw ParseError("rule without a name", line_no);
      std::string source = expand(rhs, defines, line_no);
      if (kind == "define") {
        defines[name] = std::move(source);
        continue;
      }
      Rule rule;
      rule.name = name;
      try {
        rule.regex = std::regex(source, kRegexFlags);
      } catch (const std::regex_error& e) {
        throw ParseError("invalid regex in rule '" + name + "': " + e.what(), line_no);
      }
      rule.source = std::move(source);
      if (kind == "find") ps.finds_.push_back(std::move(rule));
      else ps.aux_[name] = std::move(rule);
    } else {
      throw ParseError("unknown rule kind '" + std::string(kind) + "'", line_no);
    }
    if (pos > text.size()) break;
  }
  if (!have_country) throw ParseError("pattern file does not declare a country");
  if (ps.finds_.empty()) throw ParseError("pattern file has no find rules");
  return ps;
}

PatternSet PatternSet::load(const std::filesystem::path& path) {
  return parse(csv::read_file(path));
}

PatternSet PatternSet::builtin(Country country) { return parse(builtin_text(country)); }

const PatternSet::Rule& PatternSet::aux(const std::string& name) const {
  auto it = aux_.find(name);
  if (it == aux_.end()) throw ConfigError("pattern file lacks helper rule '" + name + "'");
  return it->second;
}

// --- LawRegistry ------------------------------------------------------------------

bool LawRegistry::Entry::valid_in(int year) const {
  return (!valid_from || *valid_from <= year) && (!valid_to || year <= *valid_to);
}

void LawRegistry::add(Entry e) { entries_.push_back(std::move(e)); }

LawRegistry LawRegistry::parse_csv(std::string_view text) {
  auto rows = csv::parse(text);
  LawRegistry reg;
  auto year = [](const std::string& s, std::size_t line) -> std::optional<int> {
    if (s.empty()) return std::nullopt;
    int y = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
    if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("invalid year '" + s + "'", line);
    return y;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i == 0 && !r.empty() && r[0] == "abbrev") continue;
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != 4) throw ParseError("registry row needs 4 fields", i + 1);
    reg.add({r[0], r[1], year(r[2], i + 1), year(r[3], i + 1)});
  }
  return reg;
}

LawRegistry LawRegistry::load_csv(const std::filesystem::path& path) {
  return parse_csv(csv::read_file(path));
}

bool LawRegistry::has_abbrev(std::string_view abbrev, int year) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.abbrev == abbrev && e.valid_in(year); });
}

std::optional<std::pair<std::string, std::size_t>> LawRegistry::match_prefix(std::string_view text,
                                                                             int year) const {
  std::optional<std::pair<std::string, std::size_t>> best;
  auto boundary = [&](std::size_t len) {
    if (len >= text.size()) return true;
    const auto c = static_cast<unsigned char>(text[len]);
    return !(std::isalnum(c) || c >= 0x80);
  };
  for (const auto& e : entries_) {
    if (!e.valid_in(year)) continue;
    for (const auto* cand : {&e.abbrev, &e.name}) {
      if (cand->empty() || text.substr(0, cand->size()) != *cand || !boundary(cand->size())) continue;
      if (!best || cand->size() > best->second) best = std::pair(e.abbrev, cand->size());
    }
  }
  return best;
}

// --- find -------------------------------------------------------------------------

namespace {

bool word_char_before(std::string_view text, std::size_t offset) {
  if (offset == 0) return false;
  const auto c = static_cast<unsigned char>(text[offset - 1]);
  return std::isalnum(c) != 0;
}

std::size_t skip_spaces(std::string_view s, std::size_t i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i;
}

// Length of the law designation directly following a German § reference, or 0.
std::size_t german_law_suffix(std::string_view rest, const PatternSet& ps, const LawRegistry* registry,
                              int year) {
  std::match_results<std::string_view::const_iterator> m;
  const auto& self = ps.aux("self_ref").regex;
  if (std::regex_search(rest.begin(), rest.end(), m, self, std::regex_constants::match_continuous))
    return static_cast<std::size_t>(m.length(0));

  if (registry) {
    const std::size_t start = skip_spaces(rest, 0);
    if (start > 0) {
      if (auto hit = registry->match_prefix(rest.substr(start), year)) return start + hit->second;
      if (std::regex_search(rest.begin(), rest.end(), m, ps.aux("article_word").regex,
                            std::regex_constants::match_continuous)) {
        const auto after = static_cast<std::size_t>(m.length(0));
        if (auto hit = registry->match_prefix(rest.substr(after), year)) return after + hit->second;
      }
    }
  }
  if (std::regex_search(rest.begin(), rest.end(), m, ps.aux("foreign").regex,
                        std::regex_constants::match_continuous))
    return static_cast<std::size_t>(m.length(0));
  return 0;
}

}  // namespace

std::vector<Span> find_references(std::string_view text, const PatternSet& patterns,
                                  const LawRegistry* registry, int year) {
  std::vector<Span> candidates;
  using It = std::string_view::const_iterator;
  for (const auto& rule : patterns.finds()) {
    for (std::regex_iterator<It> it(text.begin(), text.end(), rule.regex), end; it != end; ++it) {
      const auto off = static_cast<std::size_t>(it->position(0));
      const auto len = static_cast<std::size_t>(it->length(0));
      if (len == 0 || word_char_before(text, off)) continue;
      candidates.push_back({off, len});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Span& a, const Span& b) {
    return a.offset != b.offset ? a.offset < b.offset : a.length > b.length;
  });
  std::vector<Span> out;
  std::size_t last_end = 0;
  for (const auto& c : candidates) {
    if (c.offset < last_end) continue;
    out.push_back(c);
    last_end = c.offset + c.length;
  }
  if (patterns.country() == Country::DE) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::size_t end = out[i].offset + out[i].length;
      const std::size_t limit = i + 1 < out.size() ? out[i + 1].offset : text.size();
      const std::size_t extra = german_law_suffix(text.substr(end, limit - end), patterns, registry, year);
      out[i].length += extra;
    }
  }
  return out;
}

// --- parse ------------------------------------------------------------------------

namespace {

using SvMatch = std::match_results<std::string_view::const_iterator>;

bool search(std::string_view s, const std::regex& re, SvMatch& m,
            std::regex_constants::match_flag_type flags = std::regex_constants::match_default) {
  return std::regex_search(s.begin(), s.end(), m, re, flags);
}

void push_unique(std::vector<CiteKey>& keys, CiteKey k) {
  if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(std::move(k));
}

ParseResult parse_us(std::string_view span, const CiteContext& ctx, const PatternSet& ps) {
  ParseResult res;
  SvMatch m;
  std::optional<Collection> collection;
  std::optional<std::string> title;
  std::string_view body = span;

  if (search(span, ps.aux("title_prefix").regex, m, std::regex_constants::match_continuous)) {
    title = m.str(1);
    collection = search(m.str(2), ps.aux("coll_cfr").regex, m) ? Collection::CFR : Collection::USC;
    SvMatch pre;
    search(span, ps.aux("title_prefix").regex, pre, std::regex_constants::match_continuous);
    body = span.substr(static_cast<std::size_t>(pre.length(0)));
  } else {
    std::string_view location;
    if (search(span, ps.aux("location").regex, m) && m.length(0) > 0) {
      location = span.substr(static_cast<std::size_t>(m.position(0)));
      body = span.substr(0, static_cast<std::size_t>(m.position(0)));
    }
    SvMatch lm;
    if (!location.empty()) {
      if (search(location, ps.aux("code_cfr").regex, lm)) collection = Collection::CFR;
      else if (search(location, ps.aux("code_usc").regex, lm)) collection = Collection::USC;
      if (search(location, ps.aux("loc_title").regex, lm)) title = lm.str(1);
    }
    if (!collection) collection = ctx.collection;
    if (!title) {
      // Relative or absent location: the enclosing title, if it is the same collection.
      if (ctx.collection && collection == ctx.collection) title = ctx.title;
    }
  }
  if (!collection || !title || title->empty()) {
    res.deferred = true;
    return res;
  }

  // Every section number in the body becomes a key; unit words are skipped.
  const auto& unit_re = ps.aux("unit_word").regex;
  const auto& item_re = ps.aux("item").regex;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto rest = body.substr(pos);
    SvMatch um;
    if (search(rest, unit_re, um, std::regex_constants::match_continuous)) {
      pos += static_cast<std::size_t>(um.length(0));
      continue;
    }
    SvMatch im;
    if (std::isdigit(static_cast<unsigned char>(rest.front())) &&
        search(rest, item_re, im, std::regex_constants::match_continuous)) {
      push_unique(res.keys, CiteKey::us(*collection, *title, im.str(0)));
      pos += static_cast<std::size_t>(im.length(0));
      // Skip a pinpoint such as (d)(5).
      while (pos < body.size()) {
        std::size_t p = pos;
        if (p < body.size() && body[p] == ' ' && p + 1 < body.size() && body[p + 1] == '(') ++p;
        if (p < body.size() && body[p] == '(') {
          const auto close = body.find(')', p);
          if (close == std::string_view::npos) break;
          pos = close + 1;
        } else {
          break;
        }
      }
      continue;
    }
    ++pos;
  }
  return res;
}

ParseResult parse_de(std::string_view span, const CiteContext& ctx, const PatternSet& ps) {
  ParseResult res;
  SvMatch m;
  // Split the span into the § part and the trailing law designation.
  if (!search(span, ps.finds().front().regex, m, std::regex_constants::match_continuous)) {
    res.deferred = true;
    return res;
  }
  const auto head_len = static_cast<std::size_t>(m.length(0));
  std::string_view part = span.substr(0, head_len);
  std::string_view rest = span.substr(head_len);

  std::optional<std::string> law;
  const std::size_t start = skip_spaces(rest, 0);
  if (start >= rest.size()) {
    law = ctx.law;
  } else if (search(rest, ps.aux("self_ref").regex, m, std::regex_constants::match_continuous)) {
    law = ctx.law;
  } else {
    std::optional<std::pair<std::string, std::size_t>> hit;
    if (ctx.registry) {
      hit = ctx.registry->match_prefix(rest.substr(start), ctx.year);
      if (!hit && search(rest, ps.aux("article_word").regex, m, std::regex_constants::match_continuous))
        hit = ctx.registry->match_prefix(rest.substr(static_cast<std::size_t>(m.length(0))), ctx.year);
    }
    if (!hit) {
      res.external = true;
      return res;
    }
    law = hit->first;
  }
  if (!law || law->empty() || !ctx.registry || !ctx.registry->has_abbrev(*law, ctx.year)) {
    res.deferred = true;
    return res;
  }

  // Numbers directly after § or Art. (and list continuations) are sections;
  // numbers after a unit word (Abs., Satz, Nr.) belong to that unit.
  const auto& token_re = ps.aux("token").regex;
  const auto& head_re = ps.aux("head").regex;
  const auto& article_re = ps.aux("article").regex;
  bool section_mode = false, article = false;
  using It = std::string_view::const_iterator;
  for (std::regex_iterator<It> it(part.begin(), part.end(), token_re), end; it != end; ++it) {
    const std::string tok = it->str(0);
    if (std::regex_match(tok, head_re)) {
      section_mode = true;
      article = std::regex_match(tok, article_re);
    } else if (std::isdigit(static_cast<unsigned char>(tok.front()))) {
      if (section_mode) push_unique(res.keys, CiteKey::de(*law, (article ? "art" : "") + tok));
    } else {
      section_mode = false;
    }
  }
  return res;
}

}  // namespace

ParseResult parse_reference(std::string_view span_text, const CiteContext& ctx,
                            const PatternSet& patterns) {
  return ctx.country == Country::US ? parse_us(span_text, ctx, patterns)
                                    : parse_de(span_text, ctx, patterns);
}

CiteContext context_for(const corpus::CorpusNode* seqitem, Country country, int year,
                        const LawRegistry* registry) {
  CiteContext ctx;
  ctx.country = country;
  ctx.year = year;
  ctx.registry = registry;
  if (seqitem && seqitem->citekey) {
    if (auto key = CiteKey::parse(*seqitem->citekey)) {
      if (key->country() == Country::US) {
        ctx.collection = key->collection();
        ctx.title = key->title();
      } else {
        ctx.law = key->law();
      }
    }
  }
  if (!ctx.collection && seqitem && country == Country::US)
    ctx.collection = seqitem->doc_type == DocType::statute ? Collection::USC : Collection::CFR;
  return ctx;
}

ExtractionStats& ExtractionStats::operator+=(const ExtractionStats& o) {
  found += o.found;
  parsed += o.parsed;
  deferred += o.deferred;
  external += o.external;
  keys += o.keys;
  resolved += o.resolved;
  unresolved += o.unresolved;
  duplicate_targets += o.duplicate_targets;
  outside_container += o.outside_container;
  return *this;
}

std::vector<Reference> extract_references(const corpus::Snapshot& snapshot,
                                          const PatternSet& patterns, const LawRegistry* registry,
                                          ExtractionStats& stats, unsigned jobs) {
  struct Work {
    const corpus::CorpusNode* node;
    const corpus::CorpusNode* seqitem;  // nullptr for text above the sequence level
    const corpus::CorpusNode* fallback;  // first seqitem with a cite key in the tree
  };
  std::vector<Work> work;
  for (const auto& tree : snapshot.trees) {
    const corpus::CorpusNode* fallback = nullptr;
    corpus::walk(tree, [&](const corpus::CorpusNode& n, const corpus::CorpusNode*) {
      if (!fallback && n.level_kind == LevelKind::seqitem && n.citekey) fallback = &n;
    });
    // Track the enclosing seqitem with an explicit stack.
    std::vector<std::pair<const corpus::CorpusNode*, const corpus::CorpusNode*>> stack{{&tree, nullptr}};
    while (!stack.empty()) {
      auto [node, seq] = stack.back();
      stack.pop_back();
      if (node->level_kind == LevelKind::seqitem) seq = node;
      if (node->text && !node->text->empty()) work.push_back({node, seq, fallback});
      for (auto it = node->children.rbegin(); it != node->children.rend(); ++it)
        stack.emplace_back(&*it, seq);
    }
  }

  std::vector<std::vector<Reference>> per_node(work.size());
  std::vector<ExtractionStats> per_stats(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const auto& w = work[i];
    const std::string_view text = *w.node->text;
    auto spans = find_references(text, patterns, registry, snapshot.year);
    auto& st = per_stats[i];
    st.found += spans.size();
    if (!w.seqitem) {
      st.outside_container += spans.size();
      return;
    }
    const corpus::CorpusNode* ctx_node = w.seqitem->citekey ? w.seqitem : w.fallback;
    CiteContext ctx = context_for(ctx_node, snapshot.country, snapshot.year, registry);
    if (!ctx_node && snapshot.country == Country::US)
      ctx.collection = w.seqitem->doc_type == DocType::statute ? Collection::USC : Collection::CFR;
    for (const auto& sp : spans) {
      Reference ref;
      ref.source_key = w.seqitem->key;
      ref.node_key = w.node->key;
      ref.span = sp;
      ref.raw = std::string(text.substr(sp.offset, sp.length));
      auto parsed = parse_reference(ref.raw, ctx, patterns);
      if (parsed.external) {
        ++st.external;
        continue;
      }
      ref.deferred = parsed.deferred;
      if (parsed.deferred) ++st.deferred;
      if (!parsed.keys.empty()) ++st.parsed;
      st.keys += parsed.keys.size();
      ref.targets = std::move(parsed.keys);
      per_node[i].push_back(std::move(ref));
    }
  });

  std::vector<Reference> out;
  for (std::size_t i = 0; i < work.size(); ++i) {
    stats += per_stats[i];
    for (auto& r : per_node[i]) out.push_back(std::move(r));
  }
  return out;
}

void resolve_references(std::vector<Reference>& refs, const corpus::Snapshot& snapshot,
                        ExtractionStats& stats, Diagnostics& diag) {
  std::unordered_map<std::string, std::vector<std::string>> index;
  for (const auto& tree : snapshot.trees) {
    corpus::walk(tree, [&](const corpus::CorpusNode& n, const corpus::CorpusNode*) {
      if (n.level_kind != LevelKind::seqitem || !n.citekey) return;
      auto key = CiteKey::parse(*n.citekey);
      if (!key) {
        diag.note("seqitem " + n.key + " has malformed citekey '" + *n.citekey + "'");
        return;
      }
      index[key->str()].push_back(n.key);
    });
  }
  std::set<std::string> reported;
  for (auto& ref : refs) {
    ref.resolved.clear();
    for (const auto& target : ref.targets) {
      auto it = index.find(target.str());
      if (it == index.end()) {
        ++stats.unresolved;
        continue;
      }
      ++stats.resolved;
      if (it->second.size() > 1) {
        ++stats.duplicate_targets;
        if (reported.insert(it->first).second)
          diag.note("citekey " + it->first + " is carried by " + std::to_string(it->second.size()) +
                    " seqitems");
      }
      ref.resolved.insert(ref.resolved.end(), it->second.begin(), it->second.end());
    }
  }
}

// --- coverage estimate ------------------------------------------------------

CoverageEstimate estimate_unextracted(const std::vector<TextWithSpans>& texts) {
  static const std::regex hit_re(R"((?:\b(?:sections?|sect\.|sec\.|parts?)|§)[ ]+\d)",
                                 std::regex::ECMAScript | std::regex::icase);
  CoverageEstimate est;
  using It = std::string_view::const_iterator;
  for (const auto& t : texts) {
    est.extracted += t.spans.size();
    for (std::regex_iterator<It> it(t.text.begin(), t.text.end(), hit_re), end; it != end; ++it) {
      const auto off = static_cast<std::size_t>(it->position(0));
      const bool inside = std::any_of(t.spans.begin(), t.spans.end(), [&](const Span& s) {
        return off >= s.offset && off < s.offset + s.length;
      });
      if (!inside) ++est.outside;
    }
  }
  const auto total = est.extracted + est.outside;
  est.fraction = total == 0 ? 1.0 : static_cast<double>(est.extracted) / static_cast<double>(total);
  return est;
}

}  // namespace lexnet::citeparse
