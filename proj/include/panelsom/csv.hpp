#ifndef PANELSOM_CSV_HPP
#define PANELSOM_CSV_HPP

#include <charconv>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "panelsom/errors.hpp"

namespace panelsom::csv {

// Minimal CSV: comma separated, optional double-quote quoting, UTF-8 passthrough.
inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline Table read(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("csv: empty input, header row required");
    t.header = split_line(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r'))
            continue;
        auto fields = split_line(line);
        if (fields.size() != t.header.size())
            throw ParseError("csv: line " + std::to_string(line_no) + ": expected " +
                             std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

inline double parse_double(std::string_view s, std::size_t line_no, std::string_view column) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("csv: line " + std::to_string(line_no) + ": non-numeric value '" +
                         std::string(s) + "' in column " + std::string(column));
    return v;
}

inline long parse_long(std::string_view s, std::size_t line_no, std::string_view column) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("csv: line " + std::to_string(line_no) + ": non-integer value '" +
                         std::string(s) + "' in column " + std::string(column));
    return v;
}

inline std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

} // namespace panelsom::csv

#endif
