#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexnet/citeparse.hpp"
#include "lexnet/corpus.hpp"
#include "lexnet/graphcore.hpp"
#include "lexnet/mesoclust.hpp"

namespace lexnet::cli {

namespace fs = std::filesystem;

struct RunConfig {
  fs::path input;
  fs::path out = "out";
  std::vector<Country> countries;  // empty: every country found in the input
  std::optional<int> year_from, year_to;
  std::map<Country, std::string> levels;
  std::uint32_t runs = 1000;
  double agreement = 0.95;
  std::uint32_t prefer = 100;
  std::optional<std::uint64_t> seed;
  double threshold = 0.15;
  bool rescale = false;
  std::size_t min_size = 10;
  std::uint64_t ratio = 10;
  double density_cap = 0.05;
  std::size_t top_terms = 10;
  unsigned jobs = 1;
  bool fold_case = true;
  bool gzip = false;
  bool graphml = false;
  fs::path patterns;  // directory with us.rules / de.rules; empty: built in
  fs::path registry;
  fs::path stoplist;
  std::vector<std::string> units;

  /// Overwrites fields with the keys present in a JSON object.
  void apply_json(const nlohmann::json& j);
  void validate(bool needs_seed) const;
  /// Settings that shape the outputs; paths are left out so the record does
  /// not depend on where the run happens.
  nlohmann::ordered_json to_json() const;
};

// Lazily computed per-country state shared by the stages of one run.
struct CountryState {
  Country country = Country::US;
  std::vector<corpus::Snapshot> series;
  std::vector<std::vector<citeparse::Reference>> refs;
  std::vector<citeparse::ExtractionStats> stats;
  std::vector<graph::LegalGraph> graphs;
  std::vector<graph::QuotientGraph> quotients;
  std::vector<meso::Clustering> clusterings;
  std::vector<meso::Alignment> alignments;
};

class Workspace {
 public:
  explicit Workspace(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  Diagnostics& diagnostics() { return diag_; }

  void ingest();
  void extract_refs();
  void graph();
  void growth();
  void connectivity();
  void cluster();
  void align();
  void families();
  void stars();
  void profile();
  void estimate_missed();

  /// Writes `<out>/manifests/<command>.json`.
  void write_manifest(const std::string& command);

 private:
  void load();
  std::vector<CountryState>& countries();
  void need_refs(CountryState& s);
  void need_graphs(CountryState& s);
  void need_clusterings(CountryState& s);
  void need_alignments(CountryState& s);
  const citeparse::PatternSet& patterns(Country c);
  const citeparse::LawRegistry* registry(Country c);
  graph::LevelSelector selector(Country c) const;
  corpus::TokenizeOptions tokenize_options() const;
  void write(const fs::path& rel, std::string_view data);

  RunConfig cfg_;
  Diagnostics diag_;
  bool loaded_ = false;
  std::vector<CountryState> states_;
  std::vector<std::pair<std::string, std::string>> inputs_;  // relative path, digest
  std::vector<fs::path> outputs_;
  std::map<Country, citeparse::PatternSet> patterns_;
  std::optional<citeparse::LawRegistry> registry_;
};

/// `eval`: prints NMI and ARI of two clustering CSVs.
std::string evaluate(const fs::path& a, const fs::path& b, const std::string& metric);

}  // namespace lexnet::cli
