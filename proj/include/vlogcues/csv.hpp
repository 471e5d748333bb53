#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vlogcues::csv {

using Row = std::vector<std::string>;

/// One parsed record with the 1-based line number it started on.
struct Record {
    std::size_t line = 0;
    Row fields;
};

/// RFC-4180 style parsing: comma separated, fields may be double-quoted,
/// quotes inside quoted fields are doubled, quoted fields may span lines.
/// Accepts LF or CRLF line endings. Blank lines are skipped.
/// Throws LoadError on an unterminated quote.
std::vector<Record> parse(std::string_view text);

std::vector<Record> read_file(const std::filesystem::path& path);

/// Reads a file whose first row must equal `header` exactly.
/// Returns the data rows; each must have header.size() fields.
std::vector<Record> read_with_header(const std::filesystem::path& path,
                                     const std::vector<std::string>& header);

std::string escape(std::string_view field);
std::string join(const Row& fields);

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double value);

}  // namespace vlogcues::csv

namespace vlogcues {

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`, so readers
/// never observe a half-written output.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace vlogcues
