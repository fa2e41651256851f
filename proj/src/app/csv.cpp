#include "zice/app/csv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "zice/errors.hpp"

namespace zice::app {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) {
        throw ConfigError("csv row has " + std::to_string(row.size()) + " fields, header has " +
                          std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw std::out_of_range("csv has no column " + name);
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& field = row[c];
        double v = 0.0;
        const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || end != field.data() + field.size()) {
            throw ConfigError("csv column " + name + ": not a number: " + field);
        }
        values.push_back(v);
    }
    return values;
}

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << fields[i];
    }
    out << '\n';
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

} // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
    write_line(out, table.header);
    for (const auto& row : table.rows) {
        write_line(out, row);
    }
}

std::string to_csv(const CsvTable& table) {
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (first) {
            table.header = split(line);
            first = false;
        } else if (!line.empty()) {
            table.add_row(split(line));
        }
    }
    return table;
}

} // namespace zice::app
