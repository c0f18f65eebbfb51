#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lexnet::csv {

using Row = std::vector<std::string>;

/// RFC 4180 field quoting: fields containing comma, quote, CR or LF are quoted.
void append_field(std::string& out, std::string_view field);
void append_row(std::string& out, const Row& row);

/// Parses RFC 4180 text. Accepts LF or CRLF record separators.
std::vector<Row> parse(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

}  // namespace lexnet::csv
