#include "lexnet/common.hpp"

namespace lexnet {

std::string_view to_string(Country c) { return c == Country::US ? "US" : "DE"; }

std::string_view to_string(DocType d) {
  return d == DocType::statute ? "statute" : "regulation";
}

std::string_view to_string(LevelKind k) {
  switch (k) {
    case LevelKind::container: return "container";
    case LevelKind::seqitem: return "seqitem";
    case LevelKind::subseqitem: return "subseqitem";
  }
  return "container";
}

Country parse_country(std::string_view s) {
  if (s == "US" || s == "us") return Country::US;
  if (s == "DE" || s == "de") return Country::DE;
  throw ConfigError("unknown country '" + std::string(s) + "'");
}

DocType parse_doc_type(std::string_view s) {
  if (s == "statute") return DocType::statute;
  if (s == "regulation") return DocType::regulation;
  throw ConfigError("unknown doc_type '" + std::string(s) + "'");
}

LevelKind parse_level_kind(std::string_view s) {
  if (s == "container") return LevelKind::container;
  if (s == "seqitem") return LevelKind::seqitem;
  if (s == "subseqitem") return LevelKind::subseqitem;
  throw ConfigError("unknown level kind '" + std::string(s) + "'");
}

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

}  // namespace lexnet
