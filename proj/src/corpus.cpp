#include "lexnet/corpus.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "lexnet/parallel.hpp"
#include "utf8.hpp"

namespace lexnet::corpus {

namespace fs = std::filesystem;

std::string_view to_string(Provenance p) {
  return p == Provenance::native ? "native" : "forward_filled";
}

const CorpusNode* Snapshot::find_root(std::string_view key) const {
  for (const auto& t : trees)
    if (t.key == key) return &t;
  return nullptr;
}

// --- tokens -------------------------------------------------------------------

std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0, start = std::string_view::npos;
  while (pos < text.size()) {
    const std::size_t at = pos;
    const char32_t cp = utf8::next(text, pos);
    if (utf8::is_space(cp)) {
      if (start != std::string_view::npos) {
        out.push_back(text.substr(start, at - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = at;
    }
  }
  if (start != std::string_view::npos) out.push_back(text.substr(start));
  return out;
}

namespace {

char32_t fold_code_point(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if ((cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)) return cp + 32;
  if (cp >= 0x100 && cp <= 0x137) return cp | 1;
  if (cp >= 0x139 && cp <= 0x148) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return cp | 1;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  if (cp == 0x1E9E) return 0xDF;  // capital sharp s
  return cp;
}

}  // namespace

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t at = pos;
    const char32_t cp = utf8::next(text, pos);
    if (pos - at == 1 && cp >= 0x80) {
      out.push_back(text[at]);  // malformed byte, keep verbatim
      continue;
    }
    utf8::append(out, fold_code_point(cp));
  }
  return out;
}

TokenStats tokenize(std::string_view text, const TokenizeOptions& opts) {
  const auto tokens = split_tokens(text);
  std::unordered_set<std::string> unique;
  for (auto t : tokens) unique.insert(opts.fold_case ? fold_case(t) : std::string(t));
  return {tokens.size(), unique.size()};
}

// --- XML parsing ------------------------------------------------------------

namespace {

struct XmlState {
  XML_Parser parser = nullptr;
  std::optional<DocType> doc_type;
  Country country;
  std::vector<CorpusNode*> stack;
  std::optional<CorpusNode> root;
  std::unordered_set<std::string> keys;
  bool in_text = false;
  std::string text_buf;
  std::string error;
  std::size_t error_line = 0;
  bool schema_error = false;

  void fail(std::string msg) {
    if (!error.empty()) return;
    error = std::move(msg);
    error_line = XML_GetCurrentLineNumber(parser);
    schema_error = true;
    XML_StopParser(parser, XML_FALSE);
  }

  bool has_ancestor(LevelKind kind) const {
    for (const auto* n : stack)
      if (n->level_kind == kind) return true;
    return false;
  }
};

std::map<std::string, std::string> attributes(const XML_Char** atts) {
  std::map<std::string, std::string> out;
  for (int i = 0; atts[i]; i += 2) out[atts[i]] = atts[i + 1];
  return out;
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto& st = *static_cast<XmlState*>(data);
  if (!st.error.empty()) return;
  const std::string tag = name;
  if (st.in_text) return st.fail("element <" + tag + "> inside <text>");

  if (tag == "text") {
    if (st.stack.empty()) return st.fail("<text> outside of <document>");
    st.in_text = true;
    st.text_buf.clear();
    return;
  }

  auto attrs = attributes(atts);
  CorpusNode node;
  if (tag == "document") {
    if (st.root || !st.stack.empty()) return st.fail("nested or repeated <document>");
    node.level_kind = LevelKind::container;
    if (auto it = attrs.find("doc_type"); it != attrs.end()) {
      DocType dt;
      if (it->second == "statute") dt = DocType::statute;
      else if (it->second == "regulation") dt = DocType::regulation;
      else return st.fail("invalid doc_type '" + it->second + "'");
      if (st.doc_type && *st.doc_type != dt)
        return st.fail("doc_type attribute contradicts requested document type");
      st.doc_type = dt;
    }
    if (!st.doc_type) return st.fail("document type unknown: no doc_type attribute");
    if (auto it = attrs.find("country"); it != attrs.end() && it->second != to_string(st.country))
      return st.fail("country attribute '" + it->second + "' does not match snapshot country");
  } else if (tag == "item") {
    if (st.stack.empty()) return st.fail("<item> outside of <document>");
    if (st.has_ancestor(LevelKind::seqitem)) return st.fail("container <item> below a seqitem");
    node.level_kind = LevelKind::container;
  } else if (tag == "seqitem") {
    if (st.stack.empty()) return st.fail("<seqitem> outside of <document>");
    if (st.has_ancestor(LevelKind::seqitem)) return st.fail("seqitem nested in seqitem");
    node.level_kind = LevelKind::seqitem;
  } else if (tag == "subseqitem") {
    if (!st.has_ancestor(LevelKind::seqitem)) return st.fail("subseqitem outside of a seqitem");
    node.level_kind = LevelKind::subseqitem;
  } else {
    return st.fail("unknown element <" + tag + ">");
  }

  auto key = attrs.find("key");
  if (key == attrs.end() || key->second.empty()) return st.fail("<" + tag + "> without key");
  if (!st.keys.insert(key->second).second) return st.fail("duplicate key '" + key->second + "'");
  node.key = key->second;
  if (auto it = attrs.find("level"); it != attrs.end()) node.level = it->second;
  if (auto it = attrs.find("heading"); it != attrs.end()) node.heading = it->second;
  if (auto it = attrs.find("citekey"); it != attrs.end()) {
    if (node.level_kind != LevelKind::seqitem) return st.fail("citekey on a non-seqitem element");
    node.citekey = it->second;
  }
  node.doc_type = *st.doc_type;
  node.level_depth = static_cast<int>(st.stack.size());

  if (st.stack.empty()) {
    st.root = std::move(node);
    st.stack.push_back(&*st.root);
  } else {
    auto& children = st.stack.back()->children;
    children.push_back(std::move(node));
    st.stack.push_back(&children.back());
  }
}

void XMLCALL on_end(void* data, const XML_Char* name) {
  auto& st = *static_cast<XmlState*>(data);
  if (!st.error.empty()) return;
  if (std::string_view(name) == "text") {
    st.in_text = false;
    auto& node = *st.stack.back();
    if (node.text) {
      *node.text += '\n';
      *node.text += st.text_buf;
    } else {
      node.text = st.text_buf;
    }
    return;
  }
  st.stack.pop_back();
}

void XMLCALL on_chars(void* data, const XML_Char* s, int len) {
  auto& st = *static_cast<XmlState*>(data);
  if (!st.error.empty()) return;
  if (st.in_text) {
    st.text_buf.append(s, static_cast<std::size_t>(len));
    return;
  }
  for (int i = 0; i < len; ++i) {
    const char c = s[i];
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r')
      return st.fail("character data outside of <text>");
  }
}

struct ParserHandle {
  XML_Parser p;
  explicit ParserHandle(XML_Parser parser) : p(parser) {}
  ~ParserHandle() { XML_ParserFree(p); }
  ParserHandle(const ParserHandle&) = delete;
  ParserHandle& operator=(const ParserHandle&) = delete;
};

void xml_escape(std::string& out, std::string_view s, bool attr) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attr) out += "&quot;";
        else out += c;
        break;
      case '\n':
        if (attr) out += "&#10;";
        else out += c;
        break;
      case '\r': out += "&#13;"; break;
      case '\t':
        if (attr) out += "&#9;";
        else out += c;
        break;
      default: out += c;
    }
  }
}

void serialize_node(std::string& out, const CorpusNode& n, bool is_root, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const char* tag = is_root ? "document"
                    : n.level_kind == LevelKind::container ? "item"
                    : n.level_kind == LevelKind::seqitem   ? "seqitem"
                                                           : "subseqitem";
  out += pad;
  out += '<';
  out += tag;
  auto attr = [&](std::string_view name, std::string_view value) {
    out += ' ';
    out += name;
    out += "=\"";
    xml_escape(out, value, true);
    out += '"';
  };
  attr("key", n.key);
  if (n.level) attr("level", *n.level);
  if (n.heading) attr("heading", *n.heading);
  if (n.citekey) attr("citekey", *n.citekey);
  if (is_root) attr("doc_type", to_string(n.doc_type));
  if (!n.text && n.children.empty()) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  if (n.text) {
    out += pad;
    out += "  <text>";
    xml_escape(out, *n.text, false);
    out += "</text>\n";
  }
  for (const auto& c : n.children) serialize_node(out, c, false, indent + 1);
  out += pad;
  out += "</";
  out += tag;
  out += ">\n";
}

}  // namespace

CorpusNode parse_snapshot_xml(std::string_view xml, std::optional<DocType> doc_type,
                              Country country) {
  ParserHandle handle(XML_ParserCreate("UTF-8"));
  XmlState st;
  st.parser = handle.p;
  st.doc_type = doc_type;
  st.country = country;
  XML_SetUserData(handle.p, &st);
  XML_SetElementHandler(handle.p, on_start, on_end);
  XML_SetCharacterDataHandler(handle.p, on_chars);

  const auto status =
      XML_Parse(handle.p, xml.data(), static_cast<int>(xml.size()), XML_TRUE);
  if (st.schema_error) throw SchemaError(st.error + " (line " + std::to_string(st.error_line) + ")");
  if (status != XML_STATUS_OK) {
    throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(handle.p)),
                     XML_GetCurrentLineNumber(handle.p));
  }
  if (!st.root) throw SchemaError("no <document> element");
  return std::move(*st.root);
}

std::string serialize_snapshot_xml(const CorpusNode& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  serialize_node(out, root, true, 0);
  return out;
}

std::size_t count_nodes(const CorpusNode& root) {
  std::size_t n = 0;
  walk(root, [&](const CorpusNode&, const CorpusNode*) { ++n; });
  return n;
}

std::string subtree_text(const CorpusNode& root) {
  std::string out;
  walk(root, [&](const CorpusNode& n, const CorpusNode*) {
    if (!n.text) return;
    if (!out.empty()) out += '\n';
    out += *n.text;
  });
  return out;
}

// --- forward fill -------------------------------------------------------------

std::vector<Snapshot> forward_fill(std::vector<Snapshot> series) {
  std::set<std::string> all_roots;
  for (const auto& s : series)
    for (const auto& t : s.trees) all_roots.insert(t.key);

  for (const auto& key : all_roots) {
    std::vector<bool> present(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) present[i] = series[i].find_root(key) != nullptr;
    const auto first = std::find(present.begin(), present.end(), true) - present.begin();
    const auto last = series.size() - 1 - (std::find(present.rbegin(), present.rend(), true) - present.rbegin());
    for (std::size_t i = static_cast<std::size_t>(first) + 1; i < last; ++i) {
      if (present[i]) continue;
      const CorpusNode* source = series[i - 1].find_root(key);
      series[i].trees.push_back(*source);
      series[i].provenance[key] = Provenance::forward_filled;
      present[i] = true;
    }
  }
  for (auto& s : series) {
    for (const auto& t : s.trees) s.provenance.try_emplace(t.key, Provenance::native);
    std::stable_sort(s.trees.begin(), s.trees.end(),
                     [](const CorpusNode& a, const CorpusNode& b) { return a.key < b.key; });
  }
  return series;
}

// --- store --------------------------------------------------------------------

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view data) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

std::optional<int> parse_year(const std::string& s) {
  int y = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return y;
}

}  // namespace

std::vector<Snapshot> ingest_country(const fs::path& country_dir, Country country,
                                     Diagnostics& diag, unsigned jobs) {
  if (!fs::is_directory(country_dir)) throw NotFoundError("input directory missing: " + country_dir.string());
  std::map<int, std::vector<fs::path>> files;
  for (const auto& entry : fs::directory_iterator(country_dir)) {
    if (!entry.is_directory()) continue;
    auto year = parse_year(entry.path().filename().string());
    if (!year) continue;
    auto& list = files[*year];
    for (const auto& f : fs::directory_iterator(entry.path()))
      if (f.is_regular_file() && f.path().extension() == ".xml") list.push_back(f.path());
    std::sort(list.begin(), list.end());
  }
  if (files.empty()) return {};

  std::vector<Snapshot> series;
  for (int y = files.begin()->first; y <= files.rbegin()->first; ++y) {
    Snapshot s;
    s.country = country;
    s.year = y;
    auto it = files.find(y);
    if (it == files.end()) {
      diag.note("no input directory for year " + std::to_string(y));
      series.push_back(std::move(s));
      continue;
    }
    s.trees.resize(it->second.size());
    parallel_for(it->second.size(), jobs, [&](std::size_t i) {
      const auto& path = it->second[i];
      try {
        s.trees[i] = parse_snapshot_xml(read_file(path), std::nullopt, country);
      } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
      } catch (const SchemaError& e) {
        throw SchemaError(path.string() + ": " + e.what());
      }
    });
    std::set<std::string> seen;
    for (const auto& t : s.trees) {
      if (!seen.insert(t.key).second)
        throw SchemaError("duplicate root key '" + t.key + "' in year " + std::to_string(y));
    }
    // Keys must be unique across the whole snapshot, not only per file.
    std::unordered_set<std::string> all_keys;
    for (const auto& t : s.trees)
      walk(t, [&](const CorpusNode& n, const CorpusNode*) {
        if (!all_keys.insert(n.key).second)
          throw SchemaError("duplicate key '" + n.key + "' in year " + std::to_string(y));
      });
    series.push_back(std::move(s));
  }
  auto filled = forward_fill(std::move(series));
  for (const auto& s : filled)
    for (const auto& [key, prov] : s.provenance)
      if (prov == Provenance::forward_filled)
        diag.note("forward-filled " + key + " in " + std::to_string(s.year));
  return filled;
}

void write_store(const fs::path& out, const std::vector<Snapshot>& series) {
  using nlohmann::ordered_json;
  const fs::path manifest_path = out / "manifest.json";
  ordered_json manifest = {{"format", "lexnet-store/1"}, {"snapshots", ordered_json::array()}};
  if (fs::exists(manifest_path)) {
    auto old = ordered_json::parse(read_file(manifest_path));
    for (const auto& s : old["snapshots"]) {
      bool replaced = false;
      for (const auto& n : series)
        if (s["country"] == to_string(n.country)) replaced = true;
      if (!replaced) manifest["snapshots"].push_back(s);
    }
  }
  std::set<Country> countries;
  for (const auto& s : series) countries.insert(s.country);
  for (auto c : countries) fs::remove_all(out / std::string(to_string(c)));
  for (const auto& s : series) {
    ordered_json roots = ordered_json::array();
    std::size_t idx = 0;
    for (const auto& t : s.trees) {
      const std::string file = std::string(to_string(s.country)) + "/" + std::to_string(s.year) +
                               "/" + std::to_string(idx++) + ".xml";
      write_file(out / file, serialize_snapshot_xml(t));
      auto prov = s.provenance.find(t.key);
      roots.push_back({{"key", t.key},
                       {"doc_type", to_string(t.doc_type)},
                       {"file", file},
                       {"provenance", to_string(prov == s.provenance.end() ? Provenance::native
                                                                           : prov->second)}});
    }
    manifest["snapshots"].push_back(
        {{"country", to_string(s.country)}, {"year", s.year}, {"roots", std::move(roots)}});
  }
  auto& snaps = manifest["snapshots"];
  std::stable_sort(snaps.begin(), snaps.end(), [](const auto& a, const auto& b) {
    return std::pair(a["country"].template get<std::string>(), a["year"].template get<int>()) <
           std::pair(b["country"].template get<std::string>(), b["year"].template get<int>());
  });
  write_file(manifest_path, manifest.dump(2) + "\n");
}

std::vector<Snapshot> read_store(const fs::path& store, Country country) {
  const fs::path manifest_path = store / "manifest.json";
  if (!fs::exists(manifest_path)) throw NotFoundError("no store manifest at " + manifest_path.string());
  auto manifest = nlohmann::json::parse(read_file(manifest_path));
  std::vector<Snapshot> series;
  for (const auto& s : manifest["snapshots"]) {
    if (s["country"] != to_string(country)) continue;
    Snapshot snap;
    snap.country = country;
    snap.year = s["year"].get<int>();
    for (const auto& r : s["roots"]) {
      snap.trees.push_back(parse_snapshot_xml(read_file(store / r["file"].get<std::string>()),
                                              parse_doc_type(r["doc_type"].get<std::string>()),
                                              country));
      snap.provenance[r["key"].get<std::string>()] =
          r["provenance"] == "native" ? Provenance::native : Provenance::forward_filled;
    }
    series.push_back(std::move(snap));
  }
  std::sort(series.begin(), series.end(),
            [](const Snapshot& a, const Snapshot& b) { return a.year < b.year; });
  return series;
}

}  // namespace lexnet::corpus
