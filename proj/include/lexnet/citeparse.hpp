#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "lexnet/common.hpp"
#include "lexnet/corpus.hpp"

namespace lexnet::citeparse {

enum class Collection { USC, CFR };

std::string_view to_string(Collection c);

// A resolvable citation target at section level.
//
// Textual form: "USC:<title>:<section>", "CFR:<title>:<section>" or
// "DE:<law>:<label>". Section labels are lower-cased; German article labels
// carry an "art" prefix ("DE:EGBGB:art229").
class CiteKey {
 public:
  static CiteKey us(Collection collection, std::string title, std::string section);
  static CiteKey de(std::string law_abbrev, std::string section_label);
  /// Accepts the textual form; returns nullopt when it is not a valid key.
  static std::optional<CiteKey> parse(std::string_view text);

  Country country() const { return country_; }
  Collection collection() const { return collection_; }
  const std::string& title() const { return title_; }      // US only
  const std::string& law() const { return title_; }        // DE only
  const std::string& section() const { return section_; }
  std::string str() const;

  auto operator<=>(const CiteKey&) const = default;

 private:
  CiteKey() = default;
  Country country_ = Country::US;
  Collection collection_ = Collection::USC;
  std::string title_;
  std::string section_;
};

/// Normalizes a section label: trims, lower-cases ASCII letters, drops
/// trailing punctuation.
std::string normalize_section(std::string_view raw);

// --- pattern files ------------------------------------------------------------

// Plain-text rule file. One rule per line, '#' starts a comment:
//   country = US|DE
//   version = <free text>
//   define NAME = <regex>     (referenced as {NAME} in later rules)
//   find NAME = <regex>       (a find pattern; all are case-insensitive)
//   unit NAME = <regex>       (auxiliary patterns consumed by the parser)
class PatternSet {
 public:
  struct Rule {
    std::string name;
    std::string source;  // after {NAME} expansion
    std::regex regex;
  };

  static PatternSet parse(std::string_view text);
  static PatternSet load(const std::filesystem::path& path);
  static PatternSet builtin(Country country);
  static std::string_view builtin_text(Country country);

  Country country() const { return country_; }
  const std::string& version() const { return version_; }
  const std::vector<Rule>& finds() const { return finds_; }
  const Rule& aux(const std::string& name) const;

 private:
  Country country_ = Country::US;
  std::string version_;
  std::vector<Rule> finds_;
  std::map<std::string, Rule> aux_;
};

// German law-name registry: abbreviation -> names, with validity in years
// (inclusive; open-ended when absent).
class LawRegistry {
 public:
  struct Entry {
    std::string abbrev;
    std::string name;
    std::optional<int> valid_from;
    std::optional<int> valid_to;
    bool valid_in(int year) const;
  };

  void add(Entry e);
  /// CSV with header `abbrev,name,valid_from,valid_to`.
  static LawRegistry load_csv(const std::filesystem::path& path);
  static LawRegistry parse_csv(std::string_view text);

  bool has_abbrev(std::string_view abbrev, int year) const;
  /// Longest abbreviation or name valid in `year` that prefixes `text` at a
  /// word boundary. Returns (abbrev, matched length).
  std::optional<std::pair<std::string, std::size_t>> match_prefix(std::string_view text,
                                                                   int year) const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

// --- find / parse / resolve -------------------------------------------------

struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const Span&) const = default;
};

/// Finds candidate references: non-overlapping, left to right, longest match
/// at each start. For German text a following law name from `registry` that is
/// valid in `year` extends the span.
std::vector<Span> find_references(std::string_view text, const PatternSet& patterns,
                                  const LawRegistry* registry = nullptr, int year = 0);

struct CiteContext {
  Country country = Country::US;
  std::optional<Collection> collection;  // enclosing collection (US)
  std::optional<std::string> title;      // enclosing title (US)
  std::optional<std::string> law;        // enclosing law abbreviation (DE)
  int year = 0;
  const LawRegistry* registry = nullptr;  // DE only
};

/// Context of text inside a seqitem, derived from its cite key.
CiteContext context_for(const corpus::CorpusNode* seqitem, Country country, int year,
                        const LawRegistry* registry);

struct ParseResult {
  std::vector<CiteKey> keys;
  bool deferred = false;  // relative location could not be resolved from context
  bool external = false;  // DE: points to a law outside the registry
};

ParseResult parse_reference(std::string_view span_text, const CiteContext& ctx,
                            const PatternSet& patterns);

struct Reference {
  std::string source_key;  // enclosing seqitem
  std::string node_key;    // node whose text holds the span
  Span span;
  std::string raw;
  std::vector<CiteKey> targets;
  std::vector<std::string> resolved;  // seqitem keys
  bool deferred = false;
};

struct ExtractionStats {
  std::uint64_t found = 0;
  std::uint64_t parsed = 0;
  std::uint64_t deferred = 0;
  std::uint64_t external = 0;
  std::uint64_t keys = 0;
  std::uint64_t resolved = 0;
  std::uint64_t unresolved = 0;
  std::uint64_t duplicate_targets = 0;
  std::uint64_t outside_container = 0;  // spans in text above the sequence level

  ExtractionStats& operator+=(const ExtractionStats& o);
};

/// Runs find and parse over every text-bearing node below a seqitem.
std::vector<Reference> extract_references(const corpus::Snapshot& snapshot,
                                          const PatternSet& patterns,
                                          const LawRegistry* registry, ExtractionStats& stats,
                                          unsigned jobs = 1);

/// Maps each target key to the seqitems carrying it. Targets that match
/// nothing are counted as unresolved; keys carried by several seqitems resolve
/// to all of them with a diagnostic.
void resolve_references(std::vector<Reference>& refs, const corpus::Snapshot& snapshot,
                        ExtractionStats& stats, Diagnostics& diag);

struct CoverageEstimate {
  std::uint64_t extracted = 0;
  std::uint64_t outside = 0;
  double fraction = 1.0;
};

struct TextWithSpans {
  std::string_view text;
  std::vector<Span> spans;
};

/// Counts case-insensitive hits of (sections?|sec.|sect.|parts?|§) followed by
/// one or more spaces and a digit that start outside every extracted span, and
/// returns extracted / (extracted + outside). No references at all gives 1.
CoverageEstimate estimate_unextracted(const std::vector<TextWithSpans>& texts);

}  // namespace lexnet::citeparse
