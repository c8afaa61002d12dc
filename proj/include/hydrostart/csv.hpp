#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hydrostart/errors.hpp"

namespace hydrostart::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    size_t col(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ValidationError("csv: missing column '" + name + "'");
    }
};

inline std::vector<std::string> split_line(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        // trim surrounding whitespace
        size_t b = cell.find_first_not_of(" \t\r");
        size_t e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == sep) out.emplace_back("");
    return out;
}

inline Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("csv: cannot open '" + path + "'");
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("csv: empty file '" + path + "'");
    t.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (cells.size() != t.header.size())
            throw ValidationError("csv: row with " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(t.header.size()) +
                                  " in '" + path + "'");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            try {
                size_t pos = 0;
                double v = std::stod(c, &pos);
                if (pos != c.size()) throw std::invalid_argument(c);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ValidationError("csv: non-numeric cell '" + c + "' in '" + path + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Shortest-round-trip double formatting, stable across runs.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        if (std::stod(probe) == v) return probe;
    }
    return buf;
}

// Atomic write: stream to <path>.tmp then rename over the target.
class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), tmp_(path + ".tmp"), out_(tmp_) {
        if (!out_) throw ValidationError("csv: cannot write '" + tmp_ + "'");
    }

    void header(const std::vector<std::string>& names) { line(names); }

    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << fmt(values[i]);
        }
        out_ << '\n';
    }

    void line(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void close() {
        if (closed_) return;
        out_.close();
        std::filesystem::rename(tmp_, path_);
        closed_ = true;
    }

    ~Writer() {
        try {
            close();
        } catch (...) {
        }
    }

private:
    std::string path_, tmp_;
    std::ofstream out_;
    bool closed_ = false;
};

}  // namespace hydrostart::csv
