#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace softucb {

// Shortest decimal string that parses back to exactly the same double.
// Keeps CSV output byte-stable and lossless.
inline std::string format_double(double value) {
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) return buf;
    }
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

inline std::string join_csv(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += ',';
        line += fields[i];
    }
    return line;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw std::runtime_error("csv: no column named '" + std::string(name) + "'");
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        auto fields = split_csv_line(line);
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (first) throw std::runtime_error("csv: '" + path + "' is empty (missing header row)");
    return table;
}

// Streaming writer; every file gets a header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw std::runtime_error("csv: cannot create '" + path + "'");
        out_ << join_csv(header) << '\n';
        width_ = header.size();
    }

    void row(const std::vector<std::string>& fields) {
        if (fields.size() != width_)
            throw std::runtime_error("csv: row width " + std::to_string(fields.size()) +
                                     " does not match header width " + std::to_string(width_));
        out_ << join_csv(fields) << '\n';
    }

    void close() { out_.close(); }

private:
    std::ofstream out_;
    std::size_t width_ = 0;
};

}  // namespace softucb
