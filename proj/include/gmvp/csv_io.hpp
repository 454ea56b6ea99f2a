#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace gmvp::csv {

// Serialize a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

// Generic comma-separated cells; first row is the header.
std::vector<std::vector<std::string>> parse_cells(const std::string& text);
std::vector<std::vector<std::string>> read_cells(const std::string& path);

void write_cells(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

// Numeric CSV with a header row. Every cell must parse as a finite double.
struct Table {
    std::vector<std::string> header;
    Eigen::MatrixXd values;
};

Table read_table(const std::string& path);
Table parse_table(const std::string& text);

}  // namespace gmvp::csv
