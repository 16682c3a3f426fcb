// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef NETID_WIENER_HPP
#define NETID_WIENER_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netid/correlation.hpp"
#include "netid/errors.hpp"

namespace netid {

/// Project node `target` onto the span of `inputs`, each carrying a
/// two-sided FIR filter with taps at lags -half_width..+half_width.
struct ProjectionRequest {
    int target = 0;
    std::vector<int> inputs;
    int half_width = 10; // order 2L+1
    double ridge = -1.0; // < 0 means the proportional default
};

/// FIR Wiener projection result. taps[c] holds input c's 2L+1 coefficients
/// indexed by lag -L..+L.
struct WienerSolution {
    ProjectionRequest request;
    std::vector<Eigen::VectorXd> taps;
    double residual_variance = 0.0;

    double channel_norm(std::size_t c) const { return taps[c].squaredNorm(); }
};

namespace detail {

inline void validate_request(const CovarianceModel& model, const ProjectionRequest& req) {
    const int n = model.n();
    if (req.target < 0 || req.target >= n)
        throw DimensionError("project: target " + std::to_string(req.target) + " out of range");
    if (req.half_width < 0) throw ConfigError("project: half_width must be >= 0");
    if (2 * req.half_width > model.l_max())
        throw ConfigError("project: need l_max >= 2*half_width (l_max=" + std::to_string(model.l_max()) +
                          ", half_width=" + std::to_string(req.half_width) + ")");
    std::vector<int> seen;
    for (int i : req.inputs) {
        if (i < 0 || i >= n) throw DimensionError("project: input " + std::to_string(i) + " out of range");
        if (i == req.target) throw ConfigError("project: input set contains the target");
        if (std::find(seen.begin(), seen.end(), i) != seen.end())
            throw ConfigError("project: duplicate input " + std::to_string(i));
        seen.push_back(i);
    }
}

// Normal-equation blocks over lags -L..L:
//   gamma[(a,u)]        = R(input_a, target, u)
//   Gamma[(a,u),(b,v)]  = R(input_a, input_b, u - v)
inline void build_normal_equations(const CovarianceModel& model, int target, const std::vector<int>& inputs,
                                   int l, Eigen::MatrixXd& gram, Eigen::VectorXd& rhs) {
    const int w = 2 * l + 1;
    const int dim = static_cast<int>(inputs.size()) * w;
    gram.resize(dim, dim);
    rhs.resize(dim);
    for (std::size_t a = 0; a < inputs.size(); ++a) {
        for (int u = -l; u <= l; ++u) {
            const int row = static_cast<int>(a) * w + (u + l);
            rhs(row) = model.r(inputs[a], target, u);
            for (std::size_t b = 0; b < inputs.size(); ++b)
                for (int v = -l; v <= l; ++v)
                    gram(row, static_cast<int>(b) * w + (v + l)) = model.r(inputs[a], inputs[b], u - v);
        }
    }
}

inline double effective_ridge(const ProjectionRequest& req, const Eigen::MatrixXd& gram) {
    if (req.ridge >= 0.0) return req.ridge;
    const int dim = static_cast<int>(gram.rows());
    return dim > 0 ? 1e-8 * gram.trace() / dim : 0.0;
}

} // namespace detail

/// Solves (Gamma + ridge I) w = gamma for the FIR taps and returns the
/// residual variance R(j,j,0) - gamma' w, clamped at zero.
inline WienerSolution project(const CovarianceModel& model, const ProjectionRequest& req) {
    detail::validate_request(model, req);
    WienerSolution sol;
    sol.request = req;
    const double target_var = model.r(req.target, req.target, 0);
    if (req.inputs.empty()) {
        sol.residual_variance = target_var;
        return sol;
    }

    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
    detail::build_normal_equations(model, req.target, req.inputs, req.half_width, gram, rhs);
    const double ridge = detail::effective_ridge(req, gram);
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += ridge;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw NumericalError("project: singular normal equations for target " + std::to_string(req.target) +
                             (ridge == 0.0 ? "; retry with ridge > 0" : ""));
    const Eigen::VectorXd w = ldlt.solve(rhs);
    if (!w.allFinite())
        throw NumericalError("project: singular normal equations for target " + std::to_string(req.target) +
                             (ridge == 0.0 ? "; retry with ridge > 0" : ""));

    const int width = 2 * req.half_width + 1;
    for (std::size_t c = 0; c < req.inputs.size(); ++c)
        sol.taps.push_back(w.segment(static_cast<int>(c) * width, width));
    sol.residual_variance = std::max(0.0, target_var - rhs.dot(w));
    return sol;
}

/// Normal-equation residual max |gamma - Gamma w| over inputs and lags;
/// zero (up to solver tolerance) exactly when the prediction error is
/// orthogonal to every lagged input.
inline double orthogonality_defect(const CovarianceModel& model, const WienerSolution& sol) {
    if (sol.request.inputs.empty()) return 0.0;
    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
    detail::build_normal_equations(model, sol.request.target, sol.request.inputs, sol.request.half_width,
                                   gram, rhs);
    const int width = 2 * sol.request.half_width + 1;
    Eigen::VectorXd w(static_cast<int>(sol.taps.size()) * width);
    for (std::size_t c = 0; c < sol.taps.size(); ++c) w.segment(static_cast<int>(c) * width, width) = sol.taps[c];
    return (rhs - gram * w).cwiseAbs().maxCoeff();
}

} // namespace netid

#endif // NETID_WIENER_HPP
