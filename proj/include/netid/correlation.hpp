// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef NETID_CORRELATION_HPP
#define NETID_CORRELATION_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netid/errors.hpp"
#include "netid/netsim.hpp"
#include "netid/timeseries.hpp"

namespace netid {

/// Sample cross-covariance sequences R(i,j,tau) for |tau| <= l_max, the
/// sufficient statistic every solver works from. Biased (1/T) estimator,
/// which keeps the block-Toeplitz forms positive semidefinite.
class CovarianceModel {
public:
    CovarianceModel(int n, int l_max, long t)
        : n_(n), l_max_(l_max), t_(t), r_(static_cast<std::size_t>(n) * n * (2 * l_max + 1), 0.0) {}

    int n() const { return n_; }
    int l_max() const { return l_max_; }
    long t() const { return t_; }

    // R(i,j,tau) = (1/T) sum_t x_i(t) x_j(t+tau); R(i,j,tau) = R(j,i,-tau)
    double r(int i, int j, int tau) const {
        check_index(i);
        check_index(j);
        if (tau < -l_max_ || tau > l_max_)
            throw ConfigError("covariance lag " + std::to_string(tau) + " exceeds l_max " + std::to_string(l_max_));
        return r_[idx(i, j, tau)];
    }

    void set_symmetric(int i, int j, int tau, double value) {
        r_[idx(i, j, tau)] = value;
        r_[idx(j, i, -tau)] = value;
    }

private:
    std::size_t idx(int i, int j, int tau) const {
        return (static_cast<std::size_t>(i) * n_ + j) * (2 * l_max_ + 1) + (tau + l_max_);
    }
    void check_index(int i) const {
        if (i < 0 || i >= n_) throw DimensionError("node index " + std::to_string(i) + " out of range");
    }

    int n_;
    int l_max_;
    long t_;
    std::vector<double> r_;
};

enum class Taper { Bartlett, Rectangular, Hann };

/// Smoothed cross-spectra on an equispaced frequency grid in [-pi, pi).
struct SpectrumEstimate {
    int n = 0;
    std::vector<double> grid; // K frequencies
    // s[(i*n + j)*K + k]
    std::vector<std::complex<double>> s;

    std::complex<double> at(int i, int j, int k) const {
        return s[(static_cast<std::size_t>(i) * n + j) * grid.size() + k];
    }
};

inline CovarianceModel estimate_covariances(const TimeSeriesSet& ts, int l_max) {
    const int n = ts.n();
    const long t = ts.t();
    if (!ts.mean_removed) throw ConfigError("estimate_covariances: input must be mean-removed");
    if (l_max < 0 || l_max >= t / 4)
        throw ConfigError("estimate_covariances: l_max must satisfy 0 <= l_max < T/4 (l_max=" +
                          std::to_string(l_max) + ", T=" + std::to_string(t) + ")");

    CovarianceModel model(n, l_max, t);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int tau = 0; tau <= l_max; ++tau) {
                const long len = t - tau;
                const double sum = ts.data.row(i).head(len).dot(ts.data.row(j).segment(tau, len));
                model.set_symmetric(i, j, tau, sum / static_cast<double>(t));
            }
        }
    }
    return model;
}

/// <x_i, x_j> := R(i,j,0), the stationary-process inner product.
inline double inner_product(const CovarianceModel& model, int i, int j) {
    return model.r(i, j, 0);
}

inline double taper_weight(Taper taper, int tau, int l_max) {
    const double a = static_cast<double>(std::abs(tau)) / (l_max + 1);
    switch (taper) {
        case Taper::Bartlett: return 1.0 - a;
        case Taper::Hann: return 0.5 * (1.0 + std::cos(std::numbers::pi * a));
        case Taper::Rectangular: return 1.0;
    }
    return 1.0;
}

/// Windowed transform of the covariance sequences (Blackman-Tukey style).
/// The Bartlett taper keeps auto-spectra nonnegative up to rounding.
inline SpectrumEstimate estimate_spectra(const CovarianceModel& model, int k_grid,
                                         Taper taper = Taper::Bartlett) {
    const int n = model.n();
    const int l = model.l_max();
    if (k_grid < 2 * l + 1)
        throw ConfigError("estimate_spectra: grid size " + std::to_string(k_grid) +
                          " must be >= 2*l_max+1 = " + std::to_string(2 * l + 1));

    SpectrumEstimate est;
    est.n = n;
    est.grid.resize(k_grid);
    for (int k = 0; k < k_grid; ++k)
        est.grid[k] = -std::numbers::pi + 2.0 * std::numbers::pi * k / k_grid;
    est.s.resize(static_cast<std::size_t>(n) * n * k_grid);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < k_grid; ++k) {
                std::complex<double> acc = 0.0;
                for (int tau = -l; tau <= l; ++tau) {
                    const double w = taper_weight(taper, tau, l);
                    acc += w * model.r(i, j, tau) *
                           std::exp(std::complex<double>(0.0, -est.grid[k] * tau));
                }
                est.s[(static_cast<std::size_t>(i) * n + j) * k_grid + k] = acc;
            }
        }
    }
    return est;
}

/// Closed-loop spectral matrix of `spec` at frequency omega:
/// (I - H)^{-1} diag(sigma^2) (I - H)^{-H}, with H[j][i] the edge filter
/// i -> j evaluated on the unit circle.
inline Eigen::MatrixXcd theoretical_spectrum(const NetworkSpec& spec, const std::vector<double>& noise_std,
                                             double omega) {
    const int n = spec.n;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [key, taps] : spec.edges) {
        const auto [from, to] = key;
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k)
            acc += taps[k] * std::exp(std::complex<double>(0.0, -omega * static_cast<double>(k)));
        h(to, from) = acc;
    }
    const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) - h;
    Eigen::MatrixXcd g = a.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
    Eigen::VectorXd d(n);
    for (int j = 0; j < n; ++j) d(j) = noise_std[j] * noise_std[j];
    return g * d.asDiagonal() * g.adjoint();
}

/// Max absolute deviation between an estimated spectrum and the spec's
/// closed-form one, over all pairs and grid frequencies.
inline double filtered_spectra_check(const NetworkSpec& spec, const std::vector<double>& noise_std,
                                     const SpectrumEstimate& estimate) {
    if (estimate.n != spec.n)
        throw DimensionError("filtered_spectra_check: spec has " + std::to_string(spec.n) +
                             " nodes, estimate has " + std::to_string(estimate.n));
    double worst = 0.0;
    const int n = spec.n;
    for (std::size_t k = 0; k < estimate.grid.size(); ++k) {
        const Eigen::MatrixXcd phi = theoretical_spectrum(spec, noise_std, estimate.grid[k]);
        // estimate.at(i,j) transforms R(i,j,tau) = E[x_i(t) x_j(t+tau)],
        // which is entry (j,i) of the closed-form spectral matrix
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::abs(estimate.at(i, j, static_cast<int>(k)) - phi(j, i)));
    }
    return worst;
}

} // namespace netid

#endif // NETID_CORRELATION_HPP
