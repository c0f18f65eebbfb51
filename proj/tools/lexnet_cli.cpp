// lexnet: command-line driver for the legal-network pipeline.

#include <fstream>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "lexnet/csv.hpp"
#include "stages.hpp"

using namespace lexnet;
using lexnet::cli::RunConfig;
using lexnet::cli::Workspace;

namespace {

struct Flags {
  RunConfig cfg;
  std::string config_file;
  std::vector<std::string> countries;
  std::string level;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--input,-i", f.cfg.input, "Input root: <country>/<year>/*.xml or a snapshot store")
      ->envname("LEXNET_INPUT");
  sub->add_option("--out,-o", f.cfg.out, "Output directory")->capture_default_str();
  sub->add_option("--config", f.config_file, "JSON config file; its keys override flags");
  sub->add_option("--country", f.countries, "Countries to process (US, DE); default: all in the input");
  sub->add_option("--from", f.cfg.year_from, "First year");
  sub->add_option("--to", f.cfg.year_to, "Last year");
  sub->add_option("--level", f.level, "Level selector for quotient graphs, e.g. level:chapter, depth:2, root");
  sub->add_option("--jobs,-j", f.cfg.jobs, "Worker threads")->capture_default_str();
  sub->add_flag("--no-fold-case{false}", f.cfg.fold_case, "Count unique tokens case-sensitively");
  sub->add_option("--patterns", f.cfg.patterns, "Directory with us.rules / de.rules");
  sub->add_option("--registry", f.cfg.registry, "German law-name registry CSV");
}

void add_cluster_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--runs", f.cfg.runs, "Clustering runs for consensus")->capture_default_str();
  sub->add_option("--agreement", f.cfg.agreement, "Co-classification share for consensus")->capture_default_str();
  sub->add_option("--prefer", f.cfg.prefer, "Preferred number of modules")->capture_default_str();
  sub->add_option("--seed", f.seed, "Master seed");
}

void add_family_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--threshold", f.cfg.threshold, "Both-direction token share for family edges")
      ->capture_default_str();
  sub->add_flag("--rescale", f.cfg.rescale, "Give statutes and regulations equal mass per year");
  sub->add_option("--stoplist", f.cfg.stoplist, "Stoplist file for TF-IDF terms");
  sub->add_option("--top-terms", f.cfg.top_terms, "TF-IDF terms per family")->capture_default_str();
}

void add_star_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--min-size", f.cfg.min_size, "Minimum star size, hub included")->capture_default_str();
  sub->add_option("--ratio", f.cfg.ratio, "Degree ratio separating sinks and sources")->capture_default_str();
  sub->add_option("--density-cap", f.cfg.density_cap, "Maximum spoke density")->capture_default_str();
}

RunConfig finish(Flags& f, CLI::App* sub, bool needs_seed) {
  RunConfig cfg = f.cfg;
  for (const auto& c : f.countries) cfg.countries.push_back(parse_country(c));
  if (!f.level.empty()) cfg.levels[Country::US] = cfg.levels[Country::DE] = f.level;
  if (sub->get_option_no_throw("--seed") && sub->count("--seed")) cfg.seed = f.seed;
  if (!f.config_file.empty()) {
    if (!std::filesystem::exists(f.config_file)) throw NotFoundError("config file missing: " + f.config_file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(csv::read_file(f.config_file));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    cfg.apply_json(j);
  }
  cfg.validate(needs_seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build and analyze citation networks of statutes and regulations."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lexnet 0.1.0");
  Flags flags;

  struct Command {
    const char* name;
    const char* help;
    bool cluster, family, star, needs_seed;
    std::function<void(Workspace&)> run;
  };
  const std::vector<Command> commands = {
      {"ingest", "Read XML snapshots and write the canonical store", false, false, false, false,
       [](Workspace& w) { w.ingest(); }},
      {"extract-refs", "Find, parse and resolve references", false, false, false, false,
       [](Workspace& w) { w.extract_refs(); }},
      {"graph", "Export reference graphs and quotient graphs", false, false, false, false,
       [](Workspace& w) { w.graph(); }},
      {"growth", "Token, structure and reference growth", false, false, false, false,
       [](Workspace& w) { w.growth(); }},
      {"connectivity", "Components, rocket decomposition and degree distributions", false, false, false, false,
       [](Workspace& w) { w.connectivity(); }},
      {"cluster", "Consensus map-equation clustering of quotient graphs", true, false, false, true,
       [](Workspace& w) { w.cluster(); }},
      {"align", "Align text-bearing nodes of consecutive years", false, false, false, false,
       [](Workspace& w) { w.align(); }},
      {"families", "Cluster family graph, classification and TF-IDF terms", true, true, false, true,
       [](Workspace& w) { w.families(); }},
      {"stars", "Extract stars from the seqitem reference graph", false, false, true, false,
       [](Workspace& w) { w.stars(); }},
      {"profile", "Unit profiles, ego views and profile deltas", false, false, false, false,
       [](Workspace& w) { w.profile(); }},
      {"estimate-missed", "Estimate the share of references the patterns miss", false, false, false, false,
       [](Workspace& w) { w.estimate_missed(); }},
      {"pipeline", "Run every stage in order", true, true, true, true,
       [](Workspace& w) {
         w.ingest();
         w.extract_refs();
         w.estimate_missed();
         w.graph();
         w.growth();
         w.connectivity();
         w.cluster();
         w.align();
         w.families();
         w.stars();
         w.profile();
       }},
  };

  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, flags);
    if (c.cluster) add_cluster_flags(sub, flags);
    if (c.family) add_family_flags(sub, flags);
    if (c.star) add_star_flags(sub, flags);
    if (std::string(c.name) == "graph" || std::string(c.name) == "pipeline") {
      sub->add_flag("--gzip", flags.cfg.gzip, "Compress CSV exports");
      sub->add_flag("--graphml", flags.cfg.graphml, "Also write GraphML");
    }
    if (std::string(c.name) == "profile" || std::string(c.name) == "pipeline")
      sub->add_option("--unit", flags.cfg.units, "Unit keys to profile; ego views are written for these");
    subs.push_back(sub);
  }

  std::vector<std::string> eval_args;
  auto* eval = app.add_subcommand("eval", "Compare two clustering CSVs: eval [nmi|ari|all] A.csv B.csv");
  eval->add_option("args", eval_args, "Optional metric, then two clustering CSV files")->required()->expected(2, 3);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) {
      std::string metric = "all";
      if (eval_args.size() == 3) metric = eval_args[0];
      const auto n = eval_args.size();
      std::cout << cli::evaluate(eval_args[n - 2], eval_args[n - 1], metric);
      return 0;
    }
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      Workspace w(finish(flags, subs[i], commands[i].needs_seed));
      commands[i].run(w);
      w.write_manifest(commands[i].name);
      for (const auto& msg : w.diagnostics().messages) std::cerr << "lexnet: note: " << msg << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "lexnet: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const NotFoundError& e) {
    std::cerr << "lexnet: missing input: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "lexnet: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
