#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zice::app {

/// printf %.17g; parses back to the same double.
std::string format_double(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws ConfigError when the row width differs from the header.
    void add_row(std::vector<std::string> row);
    /// Column index by name; throws std::out_of_range.
    std::size_t column(const std::string& name) const;
    std::vector<double> numbers(const std::string& name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);
/// Comma-separated, no quoting; a missing trailing newline is accepted.
CsvTable parse_csv(const std::string& text);

} // namespace zice::app
