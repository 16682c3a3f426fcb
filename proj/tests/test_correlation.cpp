// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>
#include <complex>

#include <doctest.h>

#include "netid/correlation.hpp"
#include "netid/netsim.hpp"
#include "oracles.hpp"

using namespace netid;

TEST_CASE("identical rows give equal auto/cross covariance at lag 0") {
    Eigen::MatrixXd data = oracles::white_noise(1, 500, 11);
    Eigen::MatrixXd both(2, 500);
    both.row(0) = data.row(0);
    both.row(1) = data.row(0);
    const auto model = estimate_covariances(oracles::make_set(both), 5);
    CHECK(model.r(0, 1, 0) == doctest::Approx(model.r(0, 0, 0)).epsilon(1e-12));
    CHECK(model.r(0, 0, 0) > 0.0);
}

TEST_CASE("all-zero rows give zero covariances") {
    const auto model = estimate_covariances(oracles::make_set(Eigen::MatrixXd::Zero(2, 100)), 4);
    for (int tau = -4; tau <= 4; ++tau)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(model.r(i, j, tau) == 0.0);
}

TEST_CASE("lag-1 copy recovered, against the brute-force sum oracle") {
    const long t = 10000;
    Eigen::MatrixXd noise = oracles::white_noise(1, t, 42);
    Eigen::MatrixXd data(2, t);
    data.row(0) = noise.row(0);
    data(1, 0) = 0.0;
    for (long s = 1; s < t; ++s) data(1, s) = noise(0, s - 1);
    const auto ts = oracles::make_set(data);
    const auto model = estimate_covariances(ts, 10);
    CHECK(std::abs(model.r(0, 1, 1) - 1.0) < 0.05);
    for (int tau = -3; tau <= 3; ++tau)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(model.r(i, j, tau) ==
                      doctest::Approx(oracles::covariance_sum(ts.data, i, j, tau)).epsilon(1e-10));
}

TEST_CASE("covariance symmetry and Cauchy-Schwarz hold on random data") {
    const auto ts = oracles::make_set(oracles::white_noise(4, 800, 7));
    const auto model = estimate_covariances(ts, 12);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int tau = -12; tau <= 12; ++tau) {
                CHECK(model.r(i, j, tau) == model.r(j, i, -tau));
                CHECK(std::abs(model.r(i, j, tau)) <=
                      std::sqrt(model.r(i, i, 0) * model.r(j, j, 0)) + 1e-9);
            }
}

TEST_CASE("estimate_covariances preconditions") {
    auto ts = oracles::make_set(oracles::white_noise(2, 100, 1));
    CHECK_THROWS_AS(estimate_covariances(ts, 25), ConfigError);
    ts.mean_removed = false;
    CHECK_THROWS_AS(estimate_covariances(ts, 5), ConfigError);
}

TEST_CASE("inner_product is R(i,j,0) and symmetric") {
    const auto ts = oracles::make_set(oracles::white_noise(2, 10000, 3));
    const auto model = estimate_covariances(ts, 5);
    CHECK(inner_product(model, 0, 0) == doctest::Approx(oracles::covariance_sum(ts.data, 0, 0, 0)));
    CHECK(inner_product(model, 0, 1) == inner_product(model, 1, 0));
    // independent rows: near-zero inner product
    CHECK(std::abs(inner_product(model, 0, 1)) <= 0.05);
    CHECK_THROWS_AS(inner_product(model, 0, 5), DimensionError);
}

TEST_CASE("white-noise auto-spectrum is flat, against periodogram averaging") {
    const long t = 10000;
    const auto ts = oracles::make_set(oracles::white_noise(2, t, 99));
    const auto model = estimate_covariances(ts, 20);
    const double variance = model.r(0, 0, 0);
    const auto est = estimate_spectra(model, 64);
    for (int k = 0; k < 64; ++k) {
        const double s = est.at(0, 0, k).real();
        CHECK(std::abs(s - variance) <= 0.15 * variance);
        CHECK(std::abs(est.at(0, 0, k).imag()) < 1e-10);
    }
    // spot-check a few frequencies against Bartlett's periodogram average
    for (int k : {5, 20, 40}) {
        const double oracle = oracles::periodogram_average(ts.data, 0, est.grid[k], 200);
        CHECK(std::abs(est.at(0, 0, k).real() - oracle) <= 0.2 * variance);
    }
}

TEST_CASE("spectrum invariants: Hermitian symmetry and nonnegative auto-spectra") {
    const auto ts = oracles::make_set(oracles::white_noise(3, 2000, 5));
    const auto model = estimate_covariances(ts, 15);
    const auto est = estimate_spectra(model, 41);
    for (int k = 0; k < 41; ++k)
        for (int i = 0; i < 3; ++i) {
            CHECK(est.at(i, i, k).real() >= -1e-12);
            for (int j = 0; j < 3; ++j) {
                CHECK(est.at(i, j, k).real() == doctest::Approx(std::conj(est.at(j, i, k)).real()).epsilon(1e-10));
                CHECK(est.at(i, j, k).imag() == doctest::Approx(std::conj(est.at(j, i, k)).imag()).epsilon(1e-10));
            }
        }
    CHECK_THROWS_AS(estimate_spectra(model, 10), ConfigError);
}

TEST_CASE("zero covariances give zero spectrum") {
    const auto model = estimate_covariances(oracles::make_set(Eigen::MatrixXd::Zero(2, 200)), 8);
    const auto est = estimate_spectra(model, 32);
    for (int k = 0; k < 32; ++k) CHECK(std::abs(est.at(0, 1, k)) == 0.0);
}

TEST_CASE("filtered-spectra check: empty spec reduces to white-noise error") {
    NetworkSpec spec;
    spec.n = 2;
    spec.noise_std = {1.0, 1.0};
    spec.seed = 17;
    const auto sim = simulate(spec, 20000);
    const auto model = estimate_covariances(sim.ts, 20);
    const auto est = estimate_spectra(model, 64);
    CHECK(filtered_spectra_check(spec, sim.effective_noise_std, est) <= 0.2);
}

TEST_CASE("filtered-spectra check: 2-node chain with a known delay filter") {
    NetworkSpec spec;
    spec.n = 2;
    spec.noise_std = {1.0, 1.0};
    spec.seed = 23;
    spec.edges[{0, 1}] = {0.0, 0.5};
    const auto sim = simulate(spec, 20000);
    const auto model = estimate_covariances(sim.ts, 20);
    const auto est = estimate_spectra(model, 64);
    const double dev = filtered_spectra_check(spec, sim.effective_noise_std, est);
    CHECK(dev >= 0.0);
    CHECK(dev <= 0.1);
    // the theoretical cross-spectrum really is 0.5 e^{-i omega} * Phi_e
    const auto phi = theoretical_spectrum(spec, spec.noise_std, 0.7);
    CHECK(std::abs(phi(1, 0) - 0.5 * std::exp(std::complex<double>(0, -0.7))) < 1e-12);
}

TEST_CASE("filtered-spectra check rejects dimension mismatch") {
    NetworkSpec spec;
    spec.n = 3;
    spec.noise_std = {1, 1, 1};
    const auto model = estimate_covariances(oracles::make_set(oracles::white_noise(2, 500, 2)), 10);
    const auto est = estimate_spectra(model, 32);
    CHECK_THROWS_AS(filtered_spectra_check(spec, spec.noise_std, est), DimensionError);
}
