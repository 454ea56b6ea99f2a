#include "gmvp/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gmvp/errors.hpp"

namespace gmvp::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::vector<std::string>> parse_cells(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::vector<std::vector<std::string>> read_cells(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cells(buf.str());
}

void write_cells(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    if (!out) throw InputError("write failed for " + path);
}

namespace {

Table cells_to_table(std::vector<std::vector<std::string>> cells,
                     const std::string& origin) {
    if (cells.size() < 2) {
        throw InputError(origin + ": need a header row and at least one data row");
    }
    Table table;
    table.header = cells.front();
    const std::size_t cols = table.header.size();
    const std::size_t rows = cells.size() - 1;
    table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = cells[r + 1];
        if (row.size() != cols) {
            throw InputError(origin + ": ragged row " + std::to_string(r + 2));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(row[c], &used);
            } catch (const std::exception&) {
                throw InputError(origin + ": non-numeric cell at row " +
                                 std::to_string(r + 2));
            }
            if (used != row[c].size() || !std::isfinite(v)) {
                throw InputError(origin + ": non-finite or malformed cell at row " +
                                 std::to_string(r + 2));
            }
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return table;
}

}  // namespace

Table read_table(const std::string& path) {
    return cells_to_table(read_cells(path), path);
}

Table parse_table(const std::string& text) {
    return cells_to_table(parse_cells(text), "csv");
}

}  // namespace gmvp::csv
