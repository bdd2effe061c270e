#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fedccfa/error.hpp"
#include "fedccfa/plot.hpp"

using namespace fedccfa;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
}

std::string points_of_first_polyline(const std::string& svg) {
    const auto p = svg.find("<polyline");
    const auto a = svg.find("points=\"", p) + 8;
    return svg.substr(a, svg.find('"', a) - a);
}

fs::path write_csv(const std::string& dir, const std::string& body) {
    const auto d = fs::temp_directory_path() / "fedccfa_plot" / dir;
    fs::create_directories(d);
    const auto p = d / "metrics.csv";
    std::ofstream(p) << body;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Plot, SingleSeriesOfTwoPoints) {
    const auto svg = render_svg({{"run", {{0.0, 0.5}, {1.0, 0.75}}}}, "mean_acc");
    EXPECT_EQ(count(svg, "<polyline"), 1u);
    std::istringstream pts(points_of_first_polyline(svg));
    std::string pair;
    std::size_t pairs = 0;
    while (pts >> pair) {
        EXPECT_NE(pair.find(','), std::string::npos);
        ++pairs;
    }
    EXPECT_EQ(pairs, 2u);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, TwoRunsOverlaid) {
    const auto a = write_csv("a", "seed,round,mean_acc\n0,0,0.1\n0,1,0.2\n");
    const auto b = write_csv("b", "seed,round,mean_acc\n0,0,0.3\n0,1,0.4\n");
    const auto series = load_series({a, b}, "mean_acc");
    ASSERT_EQ(series.size(), 2u);
    EXPECT_EQ(series[0].label, "a/metrics");
    EXPECT_EQ(series[1].points.back(), (std::pair<double, double>{1.0, 0.4}));
    const auto svg = render_svg(series, "mean_acc");
    EXPECT_EQ(count(svg, "<polyline"), 2u);
    EXPECT_EQ(count(svg, "class=\"legend\""), 2u);
    EXPECT_NE(svg.find("a/metrics"), std::string::npos);
    EXPECT_NE(svg.find("b/metrics"), std::string::npos);
}

TEST(Plot, OneSeriesPerSeedAndEmptyCellsSkipped) {
    const auto p = write_csv("seeds", "seed,round,rand_index\n0,0,\n0,1,1\n1,0,0.5\n1,1,1\n");
    const auto series = load_series({p}, "rand_index");
    ASSERT_EQ(series.size(), 2u);
    EXPECT_EQ(series[0].points.size(), 1u);
    EXPECT_EQ(series[1].label, "seeds/metrics seed 1");
}

TEST(Plot, ByteDeterministic) {
    const auto p = write_csv("det", "seed,round,frob_norm\n0,0,1.5\n0,1,0.25\n0,2,3\n");
    const auto dir = p.parent_path();
    emit_plot({p}, "frob_norm", dir / "one.svg");
    emit_plot({p}, "frob_norm", dir / "two.svg");
    EXPECT_EQ(slurp(dir / "one.svg"), slurp(dir / "two.svg"));
    EXPECT_FALSE(slurp(dir / "one.svg").empty());
}

TEST(Plot, MissingColumnIsADataError) {
    const auto p = write_csv("missing", "seed,round,mean_acc\n0,0,0.1\n");
    EXPECT_THROW(load_series({p}, "frob_norm"), DataError);
    EXPECT_THROW(load_series({p.parent_path() / "nope.csv"}, "mean_acc"), IoError);
}

TEST(Plot, EmptyInputStillRendersAxes) {
    const auto svg = render_svg({}, "mean_acc");
    EXPECT_EQ(count(svg, "<polyline"), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
