#pragma once

// Levenberg-Marquardt solver for small weighted nonlinear least-squares
// problems: minimise sum_i w_i (y_i - f_i(p))^2.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "platecharge/errors.hpp"

namespace platecharge::lsq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Observations and their weights (inverse variances).
struct WeightedData {
    Vector y;
    Vector w;
};

struct SolverOptions {
    int max_iterations = 200;
    double relative_cost_tolerance = 1e-12;  ///< stop when an accepted step lowers the cost by less
    double relative_step_tolerance = 1e-15;  ///< stop when every |step_j| <= tol * (|p_j| + tol)
    double initial_damping = 1e-10;          ///< Marquardt lambda, relative to diag(J^T W J)
    double damping_factor = 10.0;
};

struct SolverResult {
    Vector parameters;
    Matrix covariance;  ///< (J^T W J)^-1 at the solution, undamped
    double cost = 0.0;  ///< weighted sum of squared residuals
    int iterations = 0;
    int accepted_steps = 0;
};

template <class M>
concept PredictionModel = requires(const M& m, const Vector& p) {
    { m.predict(p) } -> std::convertible_to<Vector>;
};

template <class M>
concept AnalyticJacobian = PredictionModel<M> && requires(const M& m, const Vector& p) {
    { m.jacobian(p) } -> std::convertible_to<Matrix>;
};

/// Wraps a callable p -> predictions as a model.
template <class F>
struct FunctionModel {
    F f;
    Vector predict(const Vector& p) const { return f(p); }
};
template <class F>
FunctionModel(F) -> FunctionModel<F>;

template <PredictionModel M>
Matrix jacobian(const M& model, const Vector& p) {
    if constexpr (AnalyticJacobian<M>) {
        return model.jacobian(p);
    } else {
        // Central differences.
        const double base = std::cbrt(std::numeric_limits<double>::epsilon());
        const Vector f0 = model.predict(p);
        Matrix J(f0.size(), p.size());
        for (Eigen::Index j = 0; j < p.size(); ++j) {
            const double h = base * (p[j] != 0.0 ? std::abs(p[j]) : 1.0);
            Vector hi = p, lo = p;
            hi[j] += h;
            lo[j] -= h;
            J.col(j) = (model.predict(hi) - model.predict(lo)) / (hi[j] - lo[j]);
        }
        return J;
    }
}

namespace detail {

inline double weighted_cost(const Vector& residual, const Vector& w) {
    return (w.array() * residual.array().square()).sum();
}

/// Throws DegenerateDesign when the normal matrix is numerically singular.
inline void check_information(const Matrix& normal) {
    const Vector d = normal.diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0) || !std::isfinite(d[i]))
            throw DegenerateDesign("parameter " + std::to_string(i) + " is not constrained by the data");
    }
    const Vector s = d.cwiseSqrt().cwiseInverse();
    const Matrix scaled = s.asDiagonal() * normal * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(scaled, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * hi)) throw DegenerateDesign("normal matrix is singular: parameters are not separable");
}

}  // namespace detail

/// Damping rises x10 after a rejected step and falls x10 after an accepted one.
/// Converges when an accepted step lowers the cost by less than the relative
/// tolerance, when the proposed step is negligible, or when the cost is zero.
template <PredictionModel M>
SolverResult iterative_damped_least_squares(const M& model, const WeightedData& data, Vector init,
                                            const SolverOptions& opt = {}) {
    const Eigen::Index n_obs = data.y.size();
    const Eigen::Index n_par = init.size();
    if (data.w.size() != n_obs) throw InvalidArgument("weights and observations differ in length");
    if (n_par < 1) throw InvalidArgument("no parameters to fit");
    if (n_obs < n_par) throw InvalidArgument("fewer observations than parameters");
    if (!init.allFinite()) throw InvalidArgument("initial parameters must be finite");
    if (!data.y.allFinite() || !data.w.allFinite() || (data.w.array() < 0.0).any())
        throw InvalidArgument("observations must be finite with non-negative weights");

    SolverResult out;
    Vector p = std::move(init);
    Vector residual = data.y - model.predict(p);
    double cost = detail::weighted_cost(residual, data.w);
    if (!std::isfinite(cost)) throw InvalidArgument("model is not finite at the initial parameters");
    double lambda = opt.initial_damping;

    auto finish = [&] {
        const Matrix J = jacobian(model, p);
        const Matrix normal = J.transpose() * data.w.asDiagonal() * J;
        detail::check_information(normal);
        out.parameters = p;
        out.covariance = normal.ldlt().solve(Matrix::Identity(n_par, n_par));
        out.cost = cost;
        return out;
    };

    for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
        if (cost == 0.0) return finish();
        const Matrix J = jacobian(model, p);
        const Matrix normal = J.transpose() * data.w.asDiagonal() * J;
        detail::check_information(normal);
        const Vector gradient = J.transpose() * (data.w.array() * residual.array()).matrix();

        Matrix damped = normal;
        damped.diagonal() *= (1.0 + lambda);
        const Vector step = damped.ldlt().solve(gradient);

        bool negligible = true;
        for (Eigen::Index j = 0; j < n_par; ++j) {
            const double tol = opt.relative_step_tolerance;
            if (std::abs(step[j]) > tol * (std::abs(p[j]) + tol)) negligible = false;
        }
        if (negligible) return finish();

        const Vector trial = p + step;
        const Vector trial_residual = data.y - model.predict(trial);
        const double trial_cost = detail::weighted_cost(trial_residual, data.w);
        if (std::isfinite(trial_cost) && trial_cost < cost) {
            const double decrease = cost - trial_cost;
            const double previous = cost;
            p = trial;
            residual = trial_residual;
            cost = trial_cost;
            ++out.accepted_steps;
            lambda /= opt.damping_factor;
            if (decrease <= opt.relative_cost_tolerance * previous) {
                ++out.iterations;
                return finish();
            }
        } else {
            lambda *= opt.damping_factor;
        }
    }
    throw NonConvergence("damped least squares did not converge in " + std::to_string(opt.max_iterations)
                             + " iterations",
                         std::vector<double>(p.data(), p.data() + p.size()));
}

}  // namespace platecharge::lsq
