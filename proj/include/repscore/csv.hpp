#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repscore {

// Comma-delimited UTF-8 text with a header row. Lines starting with '#' are
// comments; "# key: value" comments before the header become metadata.
struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row
    std::map<std::string, std::string> metadata;

    std::optional<std::size_t> find_column(std::string_view name) const;
    std::size_t column(std::string_view name) const;  // throws SchemaError
};

std::vector<std::string> split_csv_line(std::string_view line);
CsvTable parse_csv(std::string_view text, std::string source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_field(std::string_view value);
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

std::string trim(std::string_view text);
std::string lowercase(std::string_view text);

}  // namespace repscore
