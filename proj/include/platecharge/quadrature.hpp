#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "platecharge/errors.hpp"

namespace platecharge::quadrature {

/// Pairwise (cascade) summation. The split points depend only on the length,
/// so the result is reproducible for a given input order.
inline double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kLeaf = 16;
    if (values.size() <= kLeaf) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Midpoint rule on the square [-half_side, half_side]^2 with n x n cells.
/// `integrand(x, y)` is evaluated at cell centres.
template <class Integrand>
double midpoint_square(Integrand&& integrand, double half_side, int n) {
    if (n < 2) throw InvalidArgument("midpoint grid needs n >= 2 cells per axis");
    const double h = 2.0 * half_side / n;
    std::vector<double> row(static_cast<std::size_t>(n));
    std::vector<double> row_sums(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double y = -half_side + (j + 0.5) * h;
        for (int i = 0; i < n; ++i) {
            const double x = -half_side + (i + 0.5) * h;
            row[static_cast<std::size_t>(i)] = integrand(x, y);
        }
        row_sums[static_cast<std::size_t>(j)] = pairwise_sum(row);
    }
    return pairwise_sum(row_sums) * h * h;
}

/// Successive grid doubling of a quadrature `evaluate(n)`.
struct RefinementStudy {
    std::vector<int> grid_sizes;
    std::vector<double> values;
    /// orders[k] = log2(|v[k]-v[k+1]| / |v[k+1]-v[k+2]|); size = values.size() - 2.
    std::vector<double> observed_orders;
    /// Richardson extrapolation of the last two values assuming order 2.
    double extrapolated = 0.0;
};

template <class Evaluate>
RefinementStudy refine(Evaluate&& evaluate, int n0, int levels) {
    if (levels < 1) throw InvalidArgument("refinement needs at least one level");
    RefinementStudy study;
    int n = n0;
    for (int k = 0; k < levels; ++k, n *= 2) {
        study.grid_sizes.push_back(n);
        study.values.push_back(evaluate(n));
    }
    const auto& v = study.values;
    for (std::size_t k = 0; k + 2 < v.size(); ++k) {
        const double d0 = std::abs(v[k] - v[k + 1]);
        const double d1 = std::abs(v[k + 1] - v[k + 2]);
        study.observed_orders.push_back(std::log2(d0 / d1));
    }
    study.extrapolated = v.size() >= 2 ? (4.0 * v.back() - v[v.size() - 2]) / 3.0 : v.back();
    return study;
}

}  // namespace platecharge::quadrature
