#include "fedccfa/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fedccfa/error.hpp"

namespace fedccfa {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') {
            cell.pop_back();
        }
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string num(double v, const char* f = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::vector<PlotSeries> load_series(const std::vector<std::filesystem::path>& csv_files,
                                    const std::string& column) {
    std::vector<PlotSeries> out;
    for (const auto& path : csv_files) {
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot read " + path.string());
        }
        std::string line;
        if (!std::getline(in, line)) {
            throw DataError(path.string() + ": empty file");
        }
        const auto header = split_csv(line);
        auto find = [&](const std::string& name) -> long {
            auto it = std::find(header.begin(), header.end(), name);
            return it == header.end() ? -1 : static_cast<long>(it - header.begin());
        };
        const long round_col = find("round");
        const long value_col = find(column);
        const long seed_col = find("seed");
        if (round_col < 0) {
            throw DataError(path.string() + ": no 'round' column");
        }
        if (value_col < 0) {
            throw DataError(path.string() + ": no column named '" + column + "'");
        }
        std::vector<std::string> seeds;
        std::vector<PlotSeries> local;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) {
                continue;
            }
            const auto cells = split_csv(line);
            if (cells.size() != header.size()) {
                throw DataError(path.string() + ":" + std::to_string(lineno) +
                                ": column count differs from header");
            }
            const std::string seed = seed_col >= 0 ? cells[static_cast<std::size_t>(seed_col)] : "";
            auto it = std::find(seeds.begin(), seeds.end(), seed);
            std::size_t idx = static_cast<std::size_t>(it - seeds.begin());
            if (it == seeds.end()) {
                seeds.push_back(seed);
                local.push_back(PlotSeries{});
            }
            const std::string& v = cells[static_cast<std::size_t>(value_col)];
            if (v.empty()) {
                continue;
            }
            try {
                local[idx].points.emplace_back(std::stod(cells[static_cast<std::size_t>(round_col)]),
                                               std::stod(v));
            } catch (const std::exception&) {
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad number");
            }
        }
        std::string base = path.stem().string();
        if (path.has_parent_path() && !path.parent_path().filename().empty()) {
            base = path.parent_path().filename().string() + "/" + base;
        }
        for (std::size_t i = 0; i < local.size(); ++i) {
            local[i].label = seeds.size() > 1 ? base + " seed " + seeds[i] : base;
            out.push_back(std::move(local[i]));
        }
    }
    return out;
}

std::string render_svg(const std::vector<PlotSeries>& series, const std::string& y_label) {
    constexpr double width = 760, height = 440;
    constexpr double left = 70, right = 210, top = 30, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool any = false;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            if (!any) {
                x0 = x1 = x;
                y0 = y1 = y;
                any = true;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (x1 <= x0) {
        x1 = x0 + 1;
    }
    if (y1 <= y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width, "%.0f")
        << "\" height=\"" << num(height, "%.0f") << "\" viewBox=\"0 0 " << num(width, "%.0f") << ' '
        << num(height, "%.0f") << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    // axes
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw)
        << "\" y2=\"" << num(top + ph) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
        << "\" y2=\"" << num(top + ph) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0;
        const double fy = y0 + (y1 - y0) * i / 4.0;
        svg << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(top + ph + 16)
            << "\" text-anchor=\"middle\">" << num(fx, "%.4g") << "</text>\n";
        svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(fy) + 4)
            << "\" text-anchor=\"end\">" << num(fy, "%.4g") << "</text>\n";
    }
    svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 12)
        << "\" text-anchor=\"middle\">round</text>\n";
    svg << "<text x=\"14\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << num(top + ph / 2) << ")\">" << escape(y_label) << "</text>\n";
    svg << "</g>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t p = 0; p < series[i].points.size(); ++p) {
            const auto [x, y] = series[i].points[p];
            svg << (p ? " " : "") << num(sx(x)) << ',' << num(sy(y));
        }
        svg << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(i);
        svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\"><line x1=\""
            << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 36)
            << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\""
            << num(left + pw + 42) << "\" y=\"" << num(ly + 4) << "\">" << escape(series[i].label)
            << "</text></g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const std::vector<std::filesystem::path>& csv_files, const std::string& column,
               const std::filesystem::path& out) {
    const auto series = load_series(csv_files, column);
    std::ofstream f(out);
    if (!f) {
        throw IoError("cannot write " + out.string());
    }
    f << render_svg(series, column);
    if (!f) {
        throw IoError("write failed for " + out.string());
    }
}

}  // namespace fedccfa
