#pragma once

// Oracle suites run by `platecharge oracle`: each compares a numerical route
// against a closed form from oracle.hpp and reports the measured deviation.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "platecharge/fields.hpp"
#include "platecharge/inference.hpp"
#include "platecharge/oracle.hpp"
#include "platecharge/records_csv.hpp"

namespace platecharge::checks {

struct CheckResult {
    std::string name;
    bool passed = false;
    double deviation = 0.0;
    double threshold = 0.0;
};

inline CheckResult at_most(std::string name, double deviation, double threshold) {
    return {std::move(name), deviation <= threshold, deviation, threshold};
}

inline CheckResult at_least(std::string name, double value, double threshold) {
    return {std::move(name), value >= threshold, value, threshold};
}

inline double relative(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline std::vector<CheckResult> eq1_limits() {
    const ChargedPlate plate{1.0, 1e-11, Vec3::Zero(), Vec3::UnitZ()};
    const double z = 0.462;
    const double limit = oracle::centerline_limit(plate.sigma, z);
    std::vector<CheckResult> out;
    out.push_back(at_most("V(0) equals z*sigma/(2 eps0)", relative(eq1_potential({z, 0.0}, plate), limit), 1e-9));
    out.push_back(at_most("V(1e-12) continuous with the limit", relative(eq1_potential({z, 1e-12}, plate), limit),
                          1e-9));

    // 1000-point grid on (0, 0.5].
    double odd_part = 0.0;
    int increases = 0;
    double previous = limit;
    for (int i = 1; i <= 1000; ++i) {
        const double r = 0.5 * i / 1000.0;
        const double plus = eq1_potential({z, r}, plate);
        const double minus = eq1_potential({z, -r}, plate);
        odd_part = std::max(odd_part, std::abs(plus - minus));
        if (!(plus < previous)) ++increases;
        previous = plus;
    }
    out.push_back(at_most("even in r (max |V(r)-V(-r)|, V)", odd_part, 0.0));
    out.push_back(at_most("strictly decreasing in |r| (violations)", increases, 0.0));
    return out;
}

inline std::vector<CheckResult> quadrature_agreement() {
    std::vector<CheckResult> out;
    const double sigma = 1e-9;
    const std::pair<double, double> cases[] = {{1.0, 0.462}, {1.0, 0.1}, {2.0, 1.0}};
    for (auto [a, z] : cases) {
        const ChargedPlate plate{a, sigma, Vec3::Zero(), Vec3::UnitZ()};
        const std::string tag = "(a=" + csv::format_double(a) + ", z=" + csv::format_double(z) + ")";
        const double e = integral_field_axial(z, plate, {1024, false});
        out.push_back(at_most("axial field vs solid angle " + tag, relative(e, oracle::solid_angle_axial_field(sigma, a, z)),
                              1e-6));
        const auto study = axial_field_refinement(z, plate, 64, 6);
        out.push_back(at_least("axial field midpoint order " + tag,
                               *std::min_element(study.observed_orders.begin(), study.observed_orders.end()), 1.99));
    }
    const ChargedPlate plate{1.0, sigma, Vec3::Zero(), Vec3::UnitZ()};
    const auto study = potential_refinement(Vec3(0.1, 0.05, -0.3), plate, 32, 6);
    out.push_back(at_least("off-axis potential midpoint order",
                           *std::min_element(study.observed_orders.begin(), study.observed_orders.end()), 1.99));
    return out;
}

/// Random weighted datasets: solver estimate vs the closed-form weighted slope.
inline std::vector<CheckResult> fit_closed_form(int datasets = 100, std::uint64_t seed = 2024) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const FitGeometry geom{0.462, 1.0};
    double worst = 0.0;
    for (int k = 0; k < datasets; ++k) {
        const int n = 2 + static_cast<int>(unit(gen) * 8);
        const double sigma = (1.0 + 99.0 * unit(gen)) * 1e-12;
        std::vector<PositionSummary> s;
        std::vector<double> x, y, w;
        for (int i = 0; i < n; ++i) {
            PositionSummary p;
            p.r = -0.5 + (i + unit(gen) * 0.9) / n;
            const double g = eq1_shape({geom.z, p.r}, geom.side_a);
            p.mean = sigma * g * (1.0 + 0.3 * (unit(gen) - 0.5));
            p.se = (0.02 + 0.3 * unit(gen)) * std::abs(p.mean);
            p.n = 5;
            s.push_back(p);
            x.push_back(g);
            y.push_back(p.mean);
            w.push_back(1.0 / (p.se * p.se));
        }
        const double want = oracle::weighted_slope(x, y, w).slope;
        worst = std::max(worst, relative(fit_sigma(s, geom).sigma_hat, want));
    }
    std::vector<CheckResult> out;
    out.push_back(at_most("solver vs closed-form weighted estimator (max rel, " + std::to_string(datasets) + " sets)",
                          worst, 1e-10));

    const double sigma_true = 5e-11;
    std::vector<PositionSummary> clean;
    for (double r : {-0.4, -0.2, 0.0, 0.2, 0.4}) {
        PositionSummary p;
        p.r = r;
        p.mean = sigma_true * eq1_shape({geom.z, r}, geom.side_a);
        p.se = 0.1 * p.mean;
        p.n = 5;
        clean.push_back(p);
    }
    out.push_back(at_most("noiseless recovery of sigma", relative(fit_sigma(clean, geom).sigma_hat, sigma_true), 1e-9));
    return out;
}

}  // namespace platecharge::checks
