// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>

#include "netid/timeseries.hpp"

using namespace netid;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        path = std::string(std::tmpnam(nullptr)) + ".csv";
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("load_csv parses values and records gaps") {
    TempFile f("t,a,b\n0,1.0,2.0\n1,1.5,NaN\n2,2.0,4.0\n3,2.5,5.0\n");
    const auto series = load_csv(f.path);
    REQUIRE(series.size() == 2);
    CHECK(series[0].node_id == "a");
    CHECK(series[0].size() == 4);
    // NaN cell at day 1 becomes a gap in b
    CHECK(series[1].size() == 3);
    CHECK(series[1].timestamps == std::vector<std::int64_t>{0, 2, 3});
}

TEST_CASE("load_csv accepts ISO dates") {
    TempFile f("date,a,b\n2020-01-01,1,2\n2020-01-02,2,3\n2020-01-04,3,4\n");
    const auto series = load_csv(f.path);
    REQUIRE(series[0].size() == 3);
    CHECK(series[0].timestamps[1] - series[0].timestamps[0] == 1);
    CHECK(series[0].timestamps[2] - series[0].timestamps[1] == 2);
}

TEST_CASE("load_csv error paths") {
    TempFile few("t,a\n0,1\n1,2\n");
    CHECK_THROWS_AS(load_csv(few.path), DimensionError);
    TempFile bad_header("t,,b\n0,1,2\n");
    CHECK_THROWS_AS(load_csv(bad_header.path), ParseError);
    TempFile ragged("t,a,b\n0,1,2\n1,3\n");
    CHECK_THROWS_AS(load_csv(ragged.path), ParseError);
    CHECK_THROWS_AS(load_csv("/nonexistent/nope.csv"), IoError);
}

TEST_CASE("spline_fill reproduces knots and fills affine gaps exactly") {
    RawSeries s;
    s.node_id = "a";
    s.timestamps = {0, 1, 2, 4, 5};
    for (auto t : s.timestamps) s.values.push_back(3.0 * t + 1.0);

    std::vector<std::int64_t> grid = {0, 1, 2, 3, 4, 5};
    const auto filled = spline_fill(s, grid);
    REQUIRE(filled.size() == 6);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(filled.values[i] == doctest::Approx(3.0 * grid[i] + 1.0).epsilon(1e-12));
}

TEST_CASE("spline_fill at its own knots is the identity") {
    RawSeries s;
    s.node_id = "a";
    s.timestamps = {0, 2, 3, 7, 11};
    s.values = {1.0, -2.0, 0.5, 4.0, 3.0};
    const auto filled = spline_fill(s, s.timestamps);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(filled.values[i] == s.values[i]);
}

TEST_CASE("spline_fill refuses extrapolation and short series") {
    RawSeries s;
    s.timestamps = {0, 1, 2, 3};
    s.values = {0, 1, 2, 3};
    CHECK_THROWS_AS(spline_fill(s, {0, 1, 2, 3, 4}), ConfigError);
    RawSeries shorty;
    shorty.timestamps = {0, 1, 2};
    shorty.values = {0, 1, 2};
    CHECK_THROWS_AS(spline_fill(shorty, {0, 1, 2}), ConfigError);
}

TEST_CASE("log_returns definitional cases") {
    RawSeries constant;
    constant.timestamps = {0, 1, 2, 3};
    constant.values = {5.0, 5.0, 5.0, 5.0};
    const auto zero = log_returns(constant);
    REQUIRE(zero.size() == 3);
    for (double v : zero.values) CHECK(v == doctest::Approx(0.0));

    RawSeries doubling;
    for (int t = 0; t < 10; ++t) {
        doubling.timestamps.push_back(t);
        doubling.values.push_back(std::ldexp(1.0, t));
    }
    const auto r = log_returns(doubling);
    REQUIRE(r.size() == 9);
    for (double v : r.values) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("log_returns is invariant to positive scaling") {
    RawSeries s;
    for (int t = 0; t < 20; ++t) {
        s.timestamps.push_back(t);
        s.values.push_back(1.0 + 0.1 * t + 0.01 * t * t);
    }
    RawSeries scaled = s;
    for (double& v : scaled.values) v *= 37.5;
    const auto a = log_returns(s);
    const auto b = log_returns(scaled);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
}

TEST_CASE("log_returns rejects nonpositive values") {
    RawSeries s;
    s.timestamps = {0, 1, 2};
    s.values = {1.0, -1.0, 2.0};
    CHECK_THROWS_WITH_AS(log_returns(s), doctest::Contains("index 1"), NumericalError);
}

TEST_CASE("assemble stacks, centers, and validates") {
    RawSeries a, b;
    a.node_id = "a";
    b.node_id = "b";
    for (int t = 0; t < 10; ++t) {
        a.timestamps.push_back(t);
        b.timestamps.push_back(t);
        a.values.push_back(t + 1.0);
        b.values.push_back(2.0 * t);
    }
    const auto ts = assemble({a, b});
    CHECK(ts.n() == 2);
    CHECK(ts.t() == 10);
    CHECK(ts.mean_removed);
    for (int i = 0; i < 2; ++i) {
        const double sd = std::sqrt(ts.data.row(i).squaredNorm() / 10.0);
        CHECK(std::abs(ts.data.row(i).mean()) <= 1e-9 * (sd + 1.0));
    }

    RawSeries shorter = b;
    shorter.timestamps.pop_back();
    shorter.values.pop_back();
    CHECK_THROWS_WITH_AS(assemble({a, shorter}), doctest::Contains("b"), DimensionError);
}

TEST_CASE("assemble is idempotent on zero-mean input") {
    RawSeries a, b;
    a.node_id = "a";
    b.node_id = "b";
    for (int t = 0; t < 6; ++t) {
        a.timestamps.push_back(t);
        b.timestamps.push_back(t);
    }
    a.values = {1, -1, 2, -2, 3, -3};
    b.values = {0.5, -0.5, 0.5, -0.5, 0.5, -0.5};
    const auto ts = assemble({a, b});
    for (int t = 0; t < 6; ++t) {
        CHECK(ts.data(0, t) == doctest::Approx(a.values[t]).epsilon(1e-12));
        CHECK(ts.data(1, t) == doctest::Approx(b.values[t]).epsilon(1e-12));
    }
}
