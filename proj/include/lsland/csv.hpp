#pragma once

// Minimal CSV helpers. Fields never contain commas or quotes in any file the
// library reads or writes, so no quoting is supported.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace lsland {

// Shortest representation that parses back to the identical double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);

std::vector<std::string> split_fields(std::string_view line);

// Reads a header line plus rows. Blank lines are skipped, CR is stripped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    // Index of a column, or nullopt.
    std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace lsland
