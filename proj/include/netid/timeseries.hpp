// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef NETID_TIMESERIES_HPP
#define NETID_TIMESERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netid/errors.hpp"

namespace netid {

/// One scalar sequence with possibly missing day-indices. Only known
/// points are stored; a gap is a timestamp absent from `timestamps`.
struct RawSeries {
    std::string node_id;
    std::vector<std::int64_t> timestamps; // strictly increasing
    std::vector<double> values;           // same length as timestamps

    std::size_t size() const { return timestamps.size(); }
};

/// N aligned, equal-length scalar sequences, one row per node.
struct TimeSeriesSet {
    std::vector<std::string> node_ids;
    Eigen::MatrixXd data; // N x T
    bool mean_removed = false;

    int n() const { return static_cast<int>(data.rows()); }
    long t() const { return data.cols(); }
};

struct CsvSchema {
    char delimiter = ',';
    // Column used for timestamps; by index into the header row.
    int timestamp_column = 0;
};

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian date.
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// Accepts plain integers or ISO dates (YYYY-MM-DD).
inline bool parse_timestamp(const std::string& cell, std::int64_t& out) {
    if (cell.size() == 10 && cell[4] == '-' && cell[7] == '-') {
        int y;
        unsigned m, d;
        char dash1, dash2;
        std::istringstream iss(cell);
        if ((iss >> y >> dash1 >> m >> dash2 >> d) && dash1 == '-' && dash2 == '-') {
            out = days_from_civil(y, m, d);
            return true;
        }
    }
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(cell, &pos);
        if (pos == cell.size()) {
            out = v;
            return true;
        }
    } catch (const std::exception&) {
    }
    return false;
}

inline bool parse_value(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    try {
        std::size_t pos = 0;
        out = std::stod(cell, &pos);
        if (pos != cell.size()) return false;
        return std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream iss(line);
    while (std::getline(iss, cell, delim)) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == delim) cells.emplace_back();
    return cells;
}

} // namespace detail

/// Reads a delimited text file with a header row. One timestamp column,
/// every other column becomes a RawSeries; unparseable or empty cells are
/// recorded as gaps.
inline std::vector<RawSeries> load_csv(const std::string& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    const auto header = detail::split_line(line, schema.delimiter);
    if (header.empty()) throw ParseError(path + ": empty header row");
    const int ts_col = schema.timestamp_column;
    if (ts_col < 0 || ts_col >= static_cast<int>(header.size()))
        throw ParseError(path + ": timestamp column index " + std::to_string(ts_col) + " out of range");
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c].empty())
            throw ParseError(path + ": unnamed column " + std::to_string(c) + " in header");

    const int n_series = static_cast<int>(header.size()) - 1;
    if (n_series < 2)
        throw DimensionError(path + ": need at least 2 value columns, found " + std::to_string(n_series));

    std::vector<RawSeries> series(n_series);
    {
        int k = 0;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (static_cast<int>(c) == ts_col) continue;
            series[k++].node_id = header[c];
        }
    }

    std::size_t lineno = 1;
    std::int64_t prev_ts = std::numeric_limits<std::int64_t>::min();
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = detail::split_line(line, schema.delimiter);
        if (cells.size() != header.size())
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
        std::int64_t ts;
        if (!detail::parse_timestamp(cells[ts_col], ts))
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad timestamp '" + cells[ts_col] + "'");
        if (ts <= prev_ts)
            throw ParseError(path + ":" + std::to_string(lineno) + ": timestamps not strictly increasing");
        prev_ts = ts;
        int k = 0;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (static_cast<int>(c) == ts_col) continue;
            double v;
            if (detail::parse_value(cells[c], v)) {
                series[k].timestamps.push_back(ts);
                series[k].values.push_back(v);
            }
            ++k;
        }
    }
    for (const auto& s : series)
        if (s.size() < 2)
            throw DimensionError(path + ": series '" + s.node_id + "' has fewer than 2 usable samples");
    return series;
}

namespace detail {

// Natural cubic spline through (x_i, y_i): second derivative zero at both
// ends. Returns the second derivatives at the knots (tridiagonal solve).
inline std::vector<double> natural_spline_m(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 3) return m;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1];
        const double h1 = x[i + 1] - x[i];
        a[i] = h0 / 6.0;
        b[i] = (h0 + h1) / 3.0;
        c[i] = h1 / 6.0;
        r[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    // Thomas algorithm on rows 1..n-2
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m[i] = (r[i] - c[i] * m[i + 1]) / b[i];
        if (i == 1) break;
    }
    return m;
}

} // namespace detail

/// Fills a series onto `grid` with a natural cubic spline through its known
/// points. Known points are reproduced exactly; no extrapolation.
inline RawSeries spline_fill(const RawSeries& series, const std::vector<std::int64_t>& grid) {
    if (series.size() < 4)
        throw ConfigError("spline_fill: need at least 4 known points, series '" + series.node_id +
                          "' has " + std::to_string(series.size()));
    const std::int64_t lo = series.timestamps.front();
    const std::int64_t hi = series.timestamps.back();
    for (auto g : grid)
        if (g < lo || g > hi)
            throw ConfigError("spline_fill: grid point " + std::to_string(g) +
                              " outside known range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");

    const std::size_t n = series.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(series.timestamps[i]);
        y[i] = series.values[i];
    }
    const auto m = detail::natural_spline_m(x, y);

    RawSeries out;
    out.node_id = series.node_id;
    out.timestamps = grid;
    out.values.resize(grid.size());
    std::size_t seg = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double g = static_cast<double>(grid[k]);
        // exact pass-through at knots
        const auto it = std::lower_bound(series.timestamps.begin(), series.timestamps.end(), grid[k]);
        if (it != series.timestamps.end() && *it == grid[k]) {
            out.values[k] = y[static_cast<std::size_t>(it - series.timestamps.begin())];
            continue;
        }
        while (seg + 2 < n && x[seg + 1] < g) ++seg;
        while (seg > 0 && x[seg] > g) --seg;
        const double h = x[seg + 1] - x[seg];
        const double A = (x[seg + 1] - g) / h;
        const double B = (g - x[seg]) / h;
        out.values[k] = A * y[seg] + B * y[seg + 1] +
                        ((A * A * A - A) * m[seg] + (B * B * B - B) * m[seg + 1]) * h * h / 6.0;
    }
    return out;
}

/// out[t] = ln(in[t+1] / in[t]); length T-1.
inline RawSeries log_returns(const RawSeries& series) {
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series.values[i] <= 0.0)
            throw NumericalError("log_returns: nonpositive value at index " + std::to_string(i) +
                                 " of series '" + series.node_id + "'");
    RawSeries out;
    out.node_id = series.node_id;
    const std::size_t t = series.size();
    if (t < 2) throw ConfigError("log_returns: series too short");
    out.timestamps.assign(series.timestamps.begin(), series.timestamps.end() - 1);
    out.values.resize(t - 1);
    for (std::size_t i = 0; i + 1 < t; ++i)
        out.values[i] = std::log(series.values[i + 1] / series.values[i]);
    return out;
}

/// Stacks gap-free, identically gridded series into a mean-removed set.
inline TimeSeriesSet assemble(const std::vector<RawSeries>& series_list) {
    if (series_list.size() < 2) throw DimensionError("assemble: need at least 2 series");
    const std::size_t t = series_list.front().size();
    std::string offenders;
    for (const auto& s : series_list)
        if (s.size() != t) offenders += (offenders.empty() ? "" : ", ") + s.node_id;
    if (!offenders.empty())
        throw DimensionError("assemble: length mismatch for series: " + offenders);
    for (const auto& s : series_list)
        if (s.timestamps != series_list.front().timestamps)
            throw DimensionError("assemble: series '" + s.node_id + "' is not on the common grid");

    TimeSeriesSet out;
    out.data.resize(static_cast<long>(series_list.size()), static_cast<long>(t));
    for (std::size_t i = 0; i < series_list.size(); ++i) {
        out.node_ids.push_back(series_list[i].node_id);
        for (std::size_t k = 0; k < t; ++k) out.data(static_cast<long>(i), static_cast<long>(k)) = series_list[i].values[k];
        const double mean = out.data.row(static_cast<long>(i)).mean();
        out.data.row(static_cast<long>(i)).array() -= mean;
    }
    out.mean_removed = true;
    return out;
}

} // namespace netid

#endif // NETID_TIMESERIES_HPP
