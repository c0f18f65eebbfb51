#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexnet/common.hpp"

namespace lexnet::corpus {

// One element of a document tree. Containers sit above the sequence level,
// seqitems on it (sections, paragraphs, articles), subseqitems below it.
struct CorpusNode {
  std::string key;
  LevelKind level_kind = LevelKind::container;
  int level_depth = 0;
  DocType doc_type = DocType::statute;
  std::optional<std::string> level;  // structural level name, e.g. "title", "chapter"
  std::optional<std::string> heading;
  std::optional<std::string> citekey;
  std::optional<std::string> text;
  std::vector<CorpusNode> children;

  bool operator==(const CorpusNode&) const = default;
};

enum class Provenance { native, forward_filled };

std::string_view to_string(Provenance p);

struct Snapshot {
  Country country = Country::US;
  int year = 0;
  std::vector<CorpusNode> trees;
  std::map<std::string, Provenance> provenance;  // root key -> origin

  const CorpusNode* find_root(std::string_view key) const;
};

struct TokenStats {
  std::uint64_t tokens = 0;
  std::uint64_t unique_tokens = 0;

  bool operator==(const TokenStats&) const = default;
};

struct TokenizeOptions {
  bool fold_case = true;
};

/// Splits on Unicode whitespace; returns the maximal non-whitespace runs.
std::vector<std::string_view> split_tokens(std::string_view text);

/// Simple case folding for Latin, Greek and Cyrillic letters. Other code
/// points, and malformed UTF-8 bytes, pass through unchanged.
std::string fold_case(std::string_view text);

TokenStats tokenize(std::string_view text, const TokenizeOptions& opts = {});

/// Parses one document tree in the normalized schema. `doc_type` supplies the
/// document type when the root element carries no `doc_type` attribute; when
/// both are present they must agree.
CorpusNode parse_snapshot_xml(std::string_view xml, std::optional<DocType> doc_type,
                              Country country);

std::string serialize_snapshot_xml(const CorpusNode& root);

/// Fills gaps in a year-sorted series: a root missing in year t but present in
/// some earlier and some later year is copied from the closest earlier year.
std::vector<Snapshot> forward_fill(std::vector<Snapshot> series);

// Depth-first pre-order traversal; `fn(node, parent)` with parent == nullptr at roots.
template <class Fn>
void walk(const CorpusNode& node, Fn&& fn, const CorpusNode* parent = nullptr) {
  fn(node, parent);
  for (const auto& child : node.children) walk(child, fn, &node);
}

std::size_t count_nodes(const CorpusNode& root);

/// Concatenated text of a subtree in document order, separated by newlines.
std::string subtree_text(const CorpusNode& root);

// --- snapshot store ---------------------------------------------------------

/// Reads `<country_dir>/<year>/*.xml` for every year directory, sorts by year,
/// inserts empty snapshots for missing years and applies forward fill.
std::vector<Snapshot> ingest_country(const std::filesystem::path& country_dir,
                                     Country country, Diagnostics& diag,
                                     unsigned jobs = 1);

/// Writes the canonical store: `<out>/<country>/<year>/<n>.xml` per root plus
/// `<out>/manifest.json`. Merges with an existing manifest for other countries.
void write_store(const std::filesystem::path& out, const std::vector<Snapshot>& series);

std::vector<Snapshot> read_store(const std::filesystem::path& store, Country country);

}  // namespace lexnet::corpus
