// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

// Independent oracles used only by tests. None of these share code with
// the library paths they check: covariances by double-loop summation,
// Wiener taps by a data-domain QR regression, spectra by periodogram
// averaging.

#ifndef NETID_TESTS_ORACLES_HPP
#define NETID_TESTS_ORACLES_HPP

#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "netid/timeseries.hpp"

namespace oracles {

inline Eigen::MatrixXd white_noise(int n, long t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd x(n, t);
    for (int i = 0; i < n; ++i)
        for (long k = 0; k < t; ++k) x(i, k) = gauss(rng);
    return x;
}

inline netid::TimeSeriesSet make_set(Eigen::MatrixXd data) {
    netid::TimeSeriesSet ts;
    for (long i = 0; i < data.rows(); ++i) {
        ts.node_ids.push_back("x" + std::to_string(i));
        data.row(i).array() -= data.row(i).mean();
    }
    ts.data = std::move(data);
    ts.mean_removed = true;
    return ts;
}

/// Biased sample cross-covariance by direct double-loop summation.
inline double covariance_sum(const Eigen::MatrixXd& data, int i, int j, int tau) {
    const long t = data.cols();
    double sum = 0.0;
    for (long s = 0; s < t; ++s) {
        const long s2 = s + tau;
        if (s2 < 0 || s2 >= t) continue;
        sum += data(i, s) * data(j, s2);
    }
    return sum / static_cast<double>(t);
}

struct RegressionFit {
    Eigen::VectorXd taps; // per input, lags -L..L concatenated
    double residual_variance = 0.0;
};

/// Dense lagged regression on the zero-padded realization, solved by QR in
/// the data domain. With zero padding its normal equations coincide with
/// the biased covariance ones, so it is a full-accuracy cross-check.
inline RegressionFit lagged_regression(const Eigen::MatrixXd& data, int target,
                                       const std::vector<int>& inputs, int l) {
    const long t = data.cols();
    const long rows = t + 2 * l; // padded support
    const int width = 2 * l + 1;
    const int dim = static_cast<int>(inputs.size()) * width;

    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(rows, dim);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
    for (long r = 0; r < rows; ++r) {
        const long time = r - l;
        if (time >= 0 && time < t) y(r) = data(target, time);
        for (std::size_t a = 0; a < inputs.size(); ++a)
            for (int u = -l; u <= l; ++u) {
                const long s = time - u;
                if (s >= 0 && s < t)
                    design(r, static_cast<int>(a) * width + (u + l)) = data(inputs[a], s);
            }
    }
    RegressionFit fit;
    fit.taps = design.colPivHouseholderQr().solve(y);
    fit.residual_variance = (y - design * fit.taps).squaredNorm() / static_cast<double>(t);
    return fit;
}

/// Averaged-periodogram (Bartlett's method) auto-spectrum at `omega`.
inline double periodogram_average(const Eigen::MatrixXd& data, int node, double omega, long seg_len) {
    const long t = data.cols();
    const long segments = t / seg_len;
    double acc = 0.0;
    for (long s = 0; s < segments; ++s) {
        std::complex<double> dft = 0.0;
        for (long k = 0; k < seg_len; ++k)
            dft += data(node, s * seg_len + k) * std::exp(std::complex<double>(0.0, -omega * k));
        acc += std::norm(dft) / static_cast<double>(seg_len);
    }
    return acc / static_cast<double>(segments);
}

} // namespace oracles

#endif // NETID_TESTS_ORACLES_HPP
