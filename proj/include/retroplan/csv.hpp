#pragma once
// Strict CSV tables: named headers, comma separated, no quoting, UTF-8.
// All numeric output goes through format_sig10 so files are diff-able and
// writing the same data twice is byte identical.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "retroplan/errors.hpp"

namespace retroplan::csv {

// Canonical 10-significant-digit float formatting.
inline std::string format_sig10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct Table {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    }
    const std::string& cell(size_t row, int c) const { return rows[row][c]; }
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    out.push_back(field);
    return out;
}

inline Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("missing file: " + path.string());
    Table t;
    t.path = path.string();
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty file, header required");
    t.header = split_line(line);
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line);
        if (fields.size() != t.header.size())
            throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

// Headers must match the expected set exactly; unknown columns are rejected.
inline void require_columns(const Table& t, const std::vector<std::string>& expected) {
    std::set<std::string> have(t.header.begin(), t.header.end());
    std::set<std::string> want(expected.begin(), expected.end());
    for (const auto& c : want)
        if (!have.count(c)) throw SchemaError(t.path + ": missing column '" + c + "'");
    for (const auto& c : have)
        if (!want.count(c)) throw SchemaError(t.path + ": unknown column '" + c + "'");
}

inline bool cell_empty(const std::string& s) {
    return s.empty() || std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

inline double parse_double(const Table& t, size_t row, const std::string& column) {
    int c = t.col(column);
    const std::string& s = t.rows[row][c];
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw schema_error(t.path, static_cast<long>(row + 2), column, "not a number: '" + s + "'");
    }
}

inline long parse_int(const Table& t, size_t row, const std::string& column) {
    int c = t.col(column);
    const std::string& s = t.rows[row][c];
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw schema_error(t.path, static_cast<long>(row + 2), column, "not an integer: '" + s + "'");
    }
}

inline bool parse_bool(const Table& t, size_t row, const std::string& column) {
    int c = t.col(column);
    const std::string& s = t.rows[row][c];
    if (s == "true") return true;
    if (s == "false") return false;
    throw schema_error(t.path, static_cast<long>(row + 2), column, "expected true/false, got '" + s + "'");
}

inline const std::string& parse_string(const Table& t, size_t row, const std::string& column) {
    return t.rows[row][t.col(column)];
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : path_(path.string()), out_(path) {
        if (!out_) throw IoError("cannot open for writing: " + path.string());
    }
    void row(const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }
    void close() {
        out_.flush();
        if (!out_) throw IoError("write failed: " + path_);
        out_.close();
    }

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace retroplan::csv
