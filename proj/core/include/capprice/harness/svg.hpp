#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace capprice::harness {

struct Series {
    std::string name;
    std::vector<double> values;
    bool dashed = false;
};

/// Line chart over periods 1..n with a legend.
void write_line_plot(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                     const std::vector<Series>& series);

/// Grid of colored cells with the value printed in each cell.
void write_heat_table(const std::filesystem::path& path, const std::string& title,
                      const std::vector<std::string>& row_labels, const std::vector<std::string>& col_labels,
                      const std::vector<std::vector<double>>& values);

}  // namespace capprice::harness
