#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ctising/errors.hpp"

namespace ctising {

// Minimal CSV: comma-separated, no quoting (fields never contain commas here),
// doubles printed with 17 significant digits so bodies round-trip bit-exactly.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw ConfigError("cannot open for writing: " + path);
    }
    void header(const std::vector<std::string>& cols) { row_strings(cols); }
    void row_strings(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    static std::string num(double v) {
        char buf[40];
        snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    static std::string num(int v) { return std::to_string(v); }
    static std::string num(uint64_t v) { return std::to_string(v); }

  private:
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return int(i);
        throw ContractError("csv: no column '" + name + "'");
    }
    double num(size_t row, const std::string& name) const {
        return std::stod(rows.at(row).at(size_t(col(name))));
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for reading: " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (first) {
            t.columns = cells;
            first = false;
        } else {
            if (cells.size() != t.columns.size())
                throw ContractError("csv: ragged row in " + path);
            t.rows.push_back(cells);
        }
    }
    if (first) throw ContractError("csv: empty file " + path);
    return t;
}

}  // namespace ctising
