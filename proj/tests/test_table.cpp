#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "sslr/svg_plot.hpp"
#include "sslr/table.hpp"

using namespace sslr;

namespace {

ResultTable sample_table() {
    ResultTable t;
    t.name = "sample";
    t.columns = {"x_m", "y_w"};
    t.add_row({0.1, 1.5});
    t.add_row({0.2, 2.5e-7});
    t.add_row({0.30000000025, 3.0});
    t.seed = 42;
    t.config_hash = "00ff00ff00ff00ff";
    t.tool_version = "sslr-lab 0.1.0";
    t.timestamp = "2026-01-02T03:04:05Z";
    return t;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("row width must match the header", "[table]") {
    ResultTable t = sample_table();
    CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(t.add_row({1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_NOTHROW(t.add_row({1.0, 2.0}));
}

TEST_CASE("CSV serialization carries the provenance block", "[table]") {
    const std::string csv = to_csv(sample_table());
    CHECK(csv.find("# tool_version: sslr-lab 0.1.0\n") != std::string::npos);
    CHECK(csv.find("# seed: 42\n") != std::string::npos);
    CHECK(csv.find("# config_hash: 00ff00ff00ff00ff\n") != std::string::npos);
    CHECK(csv.find("# timestamp: 2026-01-02T03:04:05Z\n") != std::string::npos);
    CHECK(csv.find("x_m,y_w\n") != std::string::npos);
    CHECK(csv.find("0.1,1.5\n") != std::string::npos);
    // Nine significant digits, compactly formatted.
    CHECK(csv.find("0.2,2.5e-07\n") != std::string::npos);
    CHECK(csv.find("0.3,3\n") != std::string::npos);
    // Metadata precedes the header, which precedes the data.
    CHECK(csv.find("# seed") < csv.find("x_m"));
    CHECK(csv.find("x_m") < csv.find("0.1,"));
}

TEST_CASE("CSV files round-trip through disk", "[table]") {
    const ResultTable t = sample_table();
    const std::string path = "test_table_tmp.csv";
    write_csv(t, path);
    const ResultTable back = read_csv(path);
    CHECK(back.columns == t.columns);
    CHECK(back.seed == t.seed);
    CHECK(back.config_hash == t.config_hash);
    CHECK(back.tool_version == t.tool_version);
    CHECK(back.timestamp == t.timestamp);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            CHECK(back.rows[r][c] == Catch::Approx(t.rows[r][c]).epsilon(1e-8));
    // No temp file left behind by the atomic write.
    CHECK(!std::ifstream(path + ".tmp"));
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_csv("no_such_table.csv"), std::runtime_error);
}

TEST_CASE("payload comparison ignores exactly the timestamp", "[table]") {
    ResultTable a = sample_table();
    ResultTable b = sample_table();
    b.timestamp = "2027-12-31T23:59:59Z";
    CHECK(to_csv(a) != to_csv(b));
    CHECK(csv_payload(to_csv(a)) == csv_payload(to_csv(b)));
    CHECK(csv_payload(to_csv(a)).find("# timestamp") == std::string::npos);
    CHECK(csv_payload(to_csv(a)).find("# seed: 42") != std::string::npos);

    // Any payload difference still shows.
    b = sample_table();
    b.rows[0][1] = 1.6;
    CHECK(csv_payload(to_csv(a)) != csv_payload(to_csv(b)));
    b = sample_table();
    b.seed = 43;
    CHECK(csv_payload(to_csv(a)) != csv_payload(to_csv(b)));
}

TEST_CASE("plots reject degenerate tables", "[table]") {
    ResultTable empty;
    empty.name = "empty";
    empty.columns = {"x_m", "y_w"};
    CHECK_THROWS_AS(emit_plot(empty, PlotKind::line, "never_written.svg"), std::invalid_argument);

    ResultTable narrow;
    narrow.name = "narrow";
    narrow.columns = {"x_m"};
    narrow.add_row({1.0});
    CHECK_THROWS_AS(emit_plot(narrow, PlotKind::line, "never_written.svg"), std::invalid_argument);
}

TEST_CASE("line plot draws one polyline per value column", "[table]") {
    ResultTable t;
    t.name = "three_series";
    t.columns = {"x_m", "a_w", "b_w", "c_w"};
    for (int i = 0; i <= 10; ++i)
        t.add_row({0.1 * i, 1.0 + i, 2.0 * i, 30.0 - i});
    const std::string path = "test_plot_line.svg";
    emit_plot(t, PlotKind::line, path);
    const std::string svg = slurp(path);
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 3);
    CHECK(svg.find("<circle") == std::string::npos);
    // Axis and legend text carry the column names.
    CHECK(svg.find(">x_m<") != std::string::npos);
    CHECK(svg.find(">b_w<") != std::string::npos);
    CHECK(svg.find(">three_series<") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("boundary plot is one marked curve of the last two columns", "[table]") {
    ResultTable t;
    t.name = "frontier";
    t.columns = {"l_s_m", "p_chg_w", "r_b_bits_per_s_per_hz"};
    t.add_row({0.0, 1.7, 0.0});
    t.add_row({1e-3, 1.2, 11.0});
    t.add_row({2e-3, 0.6, 12.0});
    const std::string path = "test_plot_boundary.svg";
    emit_plot(t, PlotKind::boundary, path);
    const std::string svg = slurp(path);
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 1);
    std::size_t circles = 0;
    for (std::size_t pos = svg.find("<circle"); pos != std::string::npos;
         pos = svg.find("<circle", pos + 1))
        ++circles;
    CHECK(circles == 2);
    CHECK(svg.find(">p_chg_w<") != std::string::npos);
    CHECK(svg.find(">r_b_bits_per_s_per_hz<") != std::string::npos);
    std::remove(path.c_str());
}
