#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace fedccfa {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (round, value)
};

/// One series per (file, seed) taken from the `round` column and `column`.
/// Empty cells are skipped. Throws DataError when a file lacks the column.
std::vector<PlotSeries> load_series(const std::vector<std::filesystem::path>& csv_files,
                                    const std::string& column);

// Standalone SVG: linear axes, one polyline per series, legend on the right.
std::string render_svg(const std::vector<PlotSeries>& series, const std::string& y_label);

void emit_plot(const std::vector<std::filesystem::path>& csv_files, const std::string& column,
               const std::filesystem::path& out);

}  // namespace fedccfa
