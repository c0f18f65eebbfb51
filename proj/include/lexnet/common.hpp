#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lexnet {

enum class Country { US, DE };
enum class DocType { statute, regulation };
enum class LevelKind { container, seqitem, subseqitem };

std::string_view to_string(Country c);
std::string_view to_string(DocType d);
std::string_view to_string(LevelKind k);

Country parse_country(std::string_view s);
DocType parse_doc_type(std::string_view s);
LevelKind parse_level_kind(std::string_view s);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (XML, CSV, pattern files). `line` is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that breaks a structural invariant of the document model.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class StructuralError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-fatal findings accumulated by an operation.
struct Diagnostics {
  std::vector<std::string> messages;

  void note(std::string msg) { messages.push_back(std::move(msg)); }
  bool empty() const { return messages.empty(); }
  void merge(const Diagnostics& other) {
    messages.insert(messages.end(), other.messages.begin(), other.messages.end());
  }
};

}  // namespace lexnet
