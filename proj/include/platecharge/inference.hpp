#pragma once

// Summary statistics of survey records and weighted least-squares recovery of
// the plate's surface charge density.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "platecharge/errors.hpp"
#include "platecharge/fields.hpp"
#include "platecharge/least_squares.hpp"
#include "platecharge/quadrature.hpp"
#include "platecharge/survey.hpp"

namespace platecharge {

struct PositionSummary {
    std::string position_label;
    double r = 0.0;
    double mean = 0.0;
    double std_dev = 0.0;  ///< sample, n-1 denominator
    double se = 0.0;       ///< std_dev / sqrt(n)
    double fractional_se = 0.0;
    int n = 0;
    double median = 0.0;
    bool single_reading = false;  ///< n == 1: se is reported as 0 and carries no information
};

/// Two-standard-error band centred on the median.
inline std::pair<double, double> two_se_band(const PositionSummary& s) {
    return {s.median - 2.0 * s.se, s.median + 2.0 * s.se};
}

enum class GroupKey { Position, Condition };

/// Label of a factorial cell, e.g. "P1_FLUSH_FRONT/motor_on/wheels_c".
inline std::string condition_label(const MeasurementRecord& m) {
    std::string label = m.mount ? std::string(to_string(*m.mount)) : std::string(to_string(m.platform));
    label += m.motor_on ? "/motor_on" : "/motor_off";
    label += m.wheels_charged ? "/wheels_c" : "/wheels_n";
    return label;
}

/// Statistics of one group of readings. Readings are sorted before any
/// reduction, so the result does not depend on input order.
inline PositionSummary summarize_readings(std::string label, double r, std::vector<double> readings) {
    if (readings.empty()) throw InvalidArgument("cannot summarise an empty group");
    std::sort(readings.begin(), readings.end());
    PositionSummary s;
    s.position_label = std::move(label);
    s.r = r;
    s.n = static_cast<int>(readings.size());
    s.mean = quadrature::pairwise_sum(readings) / s.n;
    const std::size_t mid = readings.size() / 2;
    s.median = readings.size() % 2 ? readings[mid] : 0.5 * (readings[mid - 1] + readings[mid]);
    if (s.n > 1) {
        std::vector<double> sq(readings.size());
        std::transform(readings.begin(), readings.end(), sq.begin(),
                       [&](double x) { return (x - s.mean) * (x - s.mean); });
        std::sort(sq.begin(), sq.end());
        s.std_dev = std::sqrt(quadrature::pairwise_sum(sq) / (s.n - 1));
        s.se = s.std_dev / std::sqrt(static_cast<double>(s.n));
    } else {
        s.single_reading = true;
    }
    if (s.se == 0.0) s.fractional_se = 0.0;
    else if (s.mean == 0.0) s.fractional_se = std::numeric_limits<double>::infinity();
    else s.fractional_se = s.se / std::abs(s.mean);
    return s;
}

/// Per-group summaries, ordered by group label. Empty input gives empty output.
inline std::vector<PositionSummary> summarize(const std::vector<MeasurementRecord>& records,
                                              GroupKey key = GroupKey::Position) {
    struct Group {
        double r = 0.0;
        std::vector<double> readings;
    };
    std::map<std::string, Group> groups;
    for (const auto& m : records) {
        const std::string label = key == GroupKey::Position ? m.position_label : condition_label(m);
        auto [it, inserted] = groups.try_emplace(label);
        if (inserted) it->second.r = m.r;
        else if (key == GroupKey::Position && it->second.r != m.r)
            throw DataError("position '" + label + "' appears with different r values");
        it->second.readings.push_back(m.reading);
    }
    std::vector<PositionSummary> out;
    out.reserve(groups.size());
    for (auto& [label, g] : groups) out.push_back(summarize_readings(label, g.r, std::move(g.readings)));
    return out;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

/// Fixed geometry of the centreline fit.
struct FitGeometry {
    double z = 0.462;     ///< standoff [m]
    double side_a = 1.0;  ///< plate side [m]
};

struct FitResult {
    double sigma_hat = 0.0;  ///< [C/m^2]
    double sigma_se = 0.0;   ///< [C/m^2]
    double chi2 = 0.0;
    int dof = 0;
    double reduced_chi2 = 0.0;
    std::vector<double> residuals;  ///< mean - fitted potential, per summary [V]
};

struct OffsetFitResult {
    double sigma_hat = 0.0;
    double r0_hat = 0.0;  ///< centring offset [m]
    double sigma_se = 0.0;
    double r0_se = 0.0;
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  ///< scaled like the standard errors
    double chi2 = 0.0;
    int dof = 0;
    double reduced_chi2 = 0.0;
};

/// Inverse-variance weights; zero-se entries get ten times the largest finite weight.
inline std::vector<double> fit_weights(const std::vector<PositionSummary>& summaries) {
    double max_w = 0.0;
    for (const auto& s : summaries) {
        if (!std::isfinite(s.se) || s.se < 0.0) throw InvalidArgument("standard errors must be finite and >= 0");
        if (s.se > 0.0) max_w = std::max(max_w, 1.0 / (s.se * s.se));
    }
    const double zero_se_weight = max_w > 0.0 ? 10.0 * max_w : 1.0;
    std::vector<double> w;
    w.reserve(summaries.size());
    for (const auto& s : summaries) w.push_back(s.se > 0.0 ? 1.0 / (s.se * s.se) : zero_se_weight);
    return w;
}

namespace detail {

inline void require_distinct_r(const std::vector<PositionSummary>& summaries, std::size_t needed) {
    std::set<double> rs;
    for (const auto& s : summaries) rs.insert(s.r);
    if (rs.size() < needed)
        throw DegenerateDesign("fit needs at least " + std::to_string(needed) + " distinct positions, found "
                               + std::to_string(rs.size()));
}

/// sigma -> sigma * g(r_i); linear, with an exact Jacobian.
struct SigmaModel {
    std::vector<double> shape;
    lsq::Vector predict(const lsq::Vector& p) const {
        lsq::Vector out(static_cast<Eigen::Index>(shape.size()));
        for (std::size_t i = 0; i < shape.size(); ++i) out[static_cast<Eigen::Index>(i)] = p[0] * shape[i];
        return out;
    }
    lsq::Matrix jacobian(const lsq::Vector&) const {
        lsq::Matrix J(static_cast<Eigen::Index>(shape.size()), 1);
        for (std::size_t i = 0; i < shape.size(); ++i) J(static_cast<Eigen::Index>(i), 0) = shape[i];
        return J;
    }
};

/// (sigma, r0) -> sigma * g(r_i - r0).
struct OffsetModel {
    std::vector<double> r;
    FitGeometry geometry;
    lsq::Vector predict(const lsq::Vector& p) const {
        lsq::Vector out(static_cast<Eigen::Index>(r.size()));
        for (std::size_t i = 0; i < r.size(); ++i)
            out[static_cast<Eigen::Index>(i)] = p[0] * eq1_shape({geometry.z, r[i] - p[1]}, geometry.side_a);
        return out;
    }
    lsq::Matrix jacobian(const lsq::Vector& p) const {
        lsq::Matrix J(static_cast<Eigen::Index>(r.size()), 2);
        for (std::size_t i = 0; i < r.size(); ++i) {
            const CenterlineGeometry g{geometry.z, r[i] - p[1]};
            const auto row = static_cast<Eigen::Index>(i);
            J(row, 0) = eq1_shape(g, geometry.side_a);
            J(row, 1) = -p[0] * eq1_shape_slope(g, geometry.side_a);
        }
        return J;
    }
};

inline double error_scale(double reduced_chi2, int dof) { return dof >= 1 && reduced_chi2 > 1.0 ? reduced_chi2 : 1.0; }

}  // namespace detail

/// Weighted least-squares estimate of sigma from per-position means, solved
/// with the damped least-squares engine. Standard errors are inflated by the
/// reduced chi-square when it exceeds 1.
inline FitResult fit_sigma(const std::vector<PositionSummary>& summaries, const FitGeometry& geometry) {
    if (summaries.size() < 2) throw DegenerateDesign("fit needs at least 2 positions");
    detail::require_distinct_r(summaries, 2);
    const auto w = fit_weights(summaries);

    detail::SigmaModel model;
    lsq::WeightedData data{lsq::Vector(static_cast<Eigen::Index>(summaries.size())),
                           lsq::Vector(static_cast<Eigen::Index>(summaries.size()))};
    std::vector<double> ratios;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const double g = eq1_shape({geometry.z, summaries[i].r}, geometry.side_a);
        model.shape.push_back(g);
        data.y[static_cast<Eigen::Index>(i)] = summaries[i].mean;
        data.w[static_cast<Eigen::Index>(i)] = w[i];
        ratios.push_back(summaries[i].mean / g);
    }
    std::nth_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2), ratios.end());
    lsq::Vector init(1);
    init[0] = ratios[ratios.size() / 2];

    const auto solved = lsq::iterative_damped_least_squares(model, data, init);

    FitResult fit;
    fit.sigma_hat = solved.parameters[0];
    fit.dof = static_cast<int>(summaries.size()) - 1;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const double res = summaries[i].mean - fit.sigma_hat * model.shape[i];
        fit.residuals.push_back(res);
        fit.chi2 += w[i] * res * res;
    }
    fit.reduced_chi2 = fit.chi2 / fit.dof;
    fit.sigma_se = std::sqrt(detail::error_scale(fit.reduced_chi2, fit.dof) * solved.covariance(0, 0));
    return fit;
}

/// Two-parameter fit of sigma and a centring offset r0 of the transect.
inline OffsetFitResult fit_sigma_offset(const std::vector<PositionSummary>& summaries, const FitGeometry& geometry,
                                        double r0_init = 0.0) {
    if (summaries.size() < 3) throw DegenerateDesign("offset fit needs at least 3 positions");
    detail::require_distinct_r(summaries, 3);
    const auto w = fit_weights(summaries);
    const FitResult start = fit_sigma(summaries, geometry);

    detail::OffsetModel model{{}, geometry};
    lsq::WeightedData data{lsq::Vector(static_cast<Eigen::Index>(summaries.size())),
                           lsq::Vector(static_cast<Eigen::Index>(summaries.size()))};
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        model.r.push_back(summaries[i].r);
        data.y[static_cast<Eigen::Index>(i)] = summaries[i].mean;
        data.w[static_cast<Eigen::Index>(i)] = w[i];
    }
    lsq::SolverOptions opt;
    opt.initial_damping = 1e-3;
    const auto solved = lsq::iterative_damped_least_squares(model, data, lsq::Vector{{start.sigma_hat, r0_init}}, opt);

    OffsetFitResult fit;
    fit.sigma_hat = solved.parameters[0];
    fit.r0_hat = solved.parameters[1];
    fit.chi2 = solved.cost;
    fit.dof = static_cast<int>(summaries.size()) - 2;
    fit.reduced_chi2 = fit.chi2 / fit.dof;
    fit.covariance = detail::error_scale(fit.reduced_chi2, fit.dof) * solved.covariance;
    fit.sigma_se = std::sqrt(fit.covariance(0, 0));
    fit.r0_se = std::sqrt(fit.covariance(1, 1));
    return fit;
}

// ---------------------------------------------------------------------------
// Platform comparison
// ---------------------------------------------------------------------------

struct ComparisonReport {
    std::vector<PositionSummary> robot;
    std::vector<PositionSummary> handheld;
    std::pair<double, double> robot_fse_range{0.0, 0.0};
    std::pair<double, double> handheld_fse_range{0.0, 0.0};
    double variability_ratio = 1.0;  ///< mean handheld fractional se / mean robot fractional se
    FitResult robot_fit;
    FitResult handheld_fit;
    bool sigma_consistent = false;  ///< |sigma_robot - sigma_hand| <= combined fit standard error
};

namespace detail {

inline std::pair<double, double> fse_range(const std::vector<PositionSummary>& s) {
    auto [lo, hi] = std::minmax_element(s.begin(), s.end(), [](const auto& a, const auto& b) {
        return a.fractional_se < b.fractional_se;
    });
    return {lo->fractional_se, hi->fractional_se};
}

inline double mean_fse(const std::vector<PositionSummary>& s) {
    std::vector<double> f;
    for (const auto& x : s) f.push_back(x.fractional_se);
    std::sort(f.begin(), f.end());
    return quadrature::pairwise_sum(f) / static_cast<double>(f.size());
}

}  // namespace detail

inline ComparisonReport compare_platforms(const std::vector<MeasurementRecord>& robot_records,
                                          const std::vector<MeasurementRecord>& handheld_records,
                                          const FitGeometry& geometry) {
    ComparisonReport rep;
    rep.robot = summarize(robot_records);
    rep.handheld = summarize(handheld_records);
    if (rep.robot.empty() || rep.handheld.empty()) throw DataError("comparison needs records for both platforms");

    std::set<std::string> a, b;
    for (const auto& s : rep.robot) a.insert(s.position_label);
    for (const auto& s : rep.handheld) b.insert(s.position_label);
    if (a != b) {
        std::string msg = "positions do not match:";
        for (const auto& l : a)
            if (!b.count(l)) msg += " " + l + " (robot only)";
        for (const auto& l : b)
            if (!a.count(l)) msg += " " + l + " (handheld only)";
        throw DataError(msg);
    }

    rep.robot_fse_range = detail::fse_range(rep.robot);
    rep.handheld_fse_range = detail::fse_range(rep.handheld);
    const double fr = detail::mean_fse(rep.robot);
    const double fh = detail::mean_fse(rep.handheld);
    rep.variability_ratio = fh == fr ? 1.0 : fh / fr;
    rep.robot_fit = fit_sigma(rep.robot, geometry);
    rep.handheld_fit = fit_sigma(rep.handheld, geometry);
    rep.sigma_consistent = std::abs(rep.robot_fit.sigma_hat - rep.handheld_fit.sigma_hat)
                           <= std::hypot(rep.robot_fit.sigma_se, rep.handheld_fit.sigma_se);
    return rep;
}

}  // namespace platecharge
