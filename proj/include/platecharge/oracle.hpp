#pragma once

// Closed-form reference results used to check the numerical routes.
// Nothing here shares code with the quadrature or the iterative solver.

#include <cmath>
#include <numbers>
#include <span>

#include "platecharge/errors.hpp"

namespace platecharge::oracle {

inline constexpr double kEps0 = 8.854187817e-12;

/// On-axis field of a uniformly charged a x a square at distance z, from the
/// subtended solid angle: E = sigma/(pi eps0) * atan(a^2 / (4 z sqrt(z^2 + a^2/2))).
inline double solid_angle_axial_field(double sigma, double a, double z) {
    return sigma / (std::numbers::pi * kEps0) * std::atan(a * a / (4.0 * z * std::sqrt(z * z + 0.5 * a * a)));
}

/// r -> 0 limit of the centreline potential.
inline double centerline_limit(double sigma, double z) { return z * sigma / (2.0 * kEps0); }

/// Weighted least-squares slope through the origin: argmin_s sum w (y - s x)^2.
struct WeightedSlope {
    double slope;
    double information;  ///< sum w x^2
};

inline WeightedSlope weighted_slope(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> w) {
    if (x.size() != y.size() || x.size() != w.size()) throw InvalidArgument("weighted_slope: size mismatch");
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += w[i] * x[i] * y[i];
        sxx += w[i] * x[i] * x[i];
    }
    return {sxy / sxx, sxx};
}

}  // namespace platecharge::oracle
