#pragma once

// Forward electrostatic models of a uniformly charged square plate.
//
// Two independent routes are provided:
//  * the empirical centreline potential V(r) = sigma * g(r) used for fitting,
//  * midpoint quadrature of the Coulomb kernel over the plate, with optional
//    superposed point charges, for arbitrary evaluation points.
// The two are not expected to agree; the quadrature model is checked against
// the closed-form solid-angle field on the plate axis instead.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "platecharge/errors.hpp"
#include "platecharge/quadrature.hpp"

namespace platecharge {

using Vec3 = Eigen::Vector3d;

/// Permittivity of free space [F/m]. Not configurable.
inline constexpr double kEpsilon0 = 8.854187817e-12;

/// 1 / (4 pi eps0) [m/F]
inline constexpr double kCoulomb = 1.0 / (4.0 * std::numbers::pi * kEpsilon0);

/// Points closer than this to the plate surface are rejected by the quadrature model [m].
inline constexpr double kPlateExclusion = 1e-9;

namespace detail {

inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const Vec3& v) { return v.allFinite(); }

inline void require(bool ok, const char* what) {
    if (!ok) throw InvalidArgument(what);
}

}  // namespace detail

struct ChargedPlate {
    double side_a = 1.0;      ///< [m]
    double sigma = 0.0;       ///< [C/m^2]
    Vec3 center = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();

    void validate() const {
        detail::require(detail::finite(side_a) && side_a > 0.0, "plate side must be finite and > 0");
        detail::require(detail::finite(sigma), "plate sigma must be finite");
        detail::require(detail::finite(center), "plate center must be finite");
        detail::require(detail::finite(normal) && std::abs(normal.norm() - 1.0) <= 1e-12,
                        "plate normal must be a unit vector");
    }

    /// In-plane orthonormal axes (u, v) with u x v = normal. For normal = +z
    /// this is (x, y).
    std::pair<Vec3, Vec3> plane_axes() const {
        Vec3 u = Vec3::UnitY().cross(normal);
        if (u.norm() < 1e-8) u = normal.cross(Vec3::UnitZ());
        u.normalize();
        return {u, normal.cross(u)};
    }
};

struct PointCharge {
    double q = 0.0;  ///< [C]
    Vec3 position = Vec3::Zero();

    void validate() const {
        detail::require(detail::finite(q), "point charge must be finite");
        detail::require(detail::finite(position), "point charge position must be finite");
    }
};

struct World {
    ChargedPlate plate;
    std::vector<PointCharge> extra_charges;
    static constexpr double epsilon0 = kEpsilon0;

    void validate() const {
        plate.validate();
        for (const auto& c : extra_charges) c.validate();
    }
};

/// Sensor location along the plate centreline: standoff z below the plate and
/// signed offset r from the plate centre.
struct CenterlineGeometry {
    double z = 0.462;  ///< [m], > 0
    double r = 0.0;    ///< [m]

    void validate() const {
        detail::require(detail::finite(z) && z > 0.0, "standoff z must be finite and > 0");
        detail::require(detail::finite(r), "centreline offset r must be finite");
    }
};

struct QuadratureSpec {
    int n = 256;                       ///< cells per axis
    bool refine_check = true;          ///< also evaluate at 2n and require agreement
    double refine_tolerance = 1e-5;    ///< max relative change n -> 2n
};

// ---------------------------------------------------------------------------
// Centreline model
// ---------------------------------------------------------------------------

/// Shape factor g(r) [V m^2/C] with V(r) = sigma * g(r). Even in r; at r = 0
/// the arctan argument diverges and g takes its limit z / (2 eps0).
inline double eq1_shape(const CenterlineGeometry& geom, double plate_side) {
    geom.validate();
    detail::require(detail::finite(plate_side) && plate_side > 0.0, "plate side must be finite and > 0");
    const double a2 = plate_side * plate_side;
    const double r = std::abs(geom.r);
    // atan2 gives pi/2 at r = 0 without a special case.
    const double angle = std::atan2(a2, 4.0 * r * std::sqrt(a2 + r * r));
    return geom.z / (std::numbers::pi * kEpsilon0) * angle;
}

/// Empirical centreline potential [V].
inline double eq1_potential(const CenterlineGeometry& geom, const ChargedPlate& plate) {
    detail::require(detail::finite(plate.sigma), "plate sigma must be finite");
    return plate.sigma * eq1_shape(geom, plate.side_a);
}

/// dg/dr of the shape factor. Zero at r = 0 where g has a cusp.
inline double eq1_shape_slope(const CenterlineGeometry& geom, double plate_side) {
    geom.validate();
    detail::require(detail::finite(plate_side) && plate_side > 0.0, "plate side must be finite and > 0");
    if (geom.r == 0.0) return 0.0;
    const double a2 = plate_side * plate_side;
    const double rho = std::abs(geom.r);
    const double s = std::sqrt(a2 + rho * rho);
    const double dg = -geom.z / (std::numbers::pi * kEpsilon0) * 4.0 * a2 * (a2 + 2.0 * rho * rho)
                      / (s * (16.0 * rho * rho * s * s + a2 * a2));
    return geom.r > 0.0 ? dg : -dg;
}

// ---------------------------------------------------------------------------
// Quadrature model
// ---------------------------------------------------------------------------

/// Coulomb potential of the point charges at `point`, summed in list order.
inline double point_charges_potential(const Vec3& point, const std::vector<PointCharge>& charges) {
    double v = 0.0;
    for (const auto& c : charges) {
        const double d = (point - c.position).norm();
        detail::require(d > 0.0, "evaluation point coincides with a point charge");
        v += kCoulomb * c.q / d;
    }
    return v;
}

namespace detail {

inline Vec3 plate_local(const Vec3& point, const ChargedPlate& plate) {
    const auto [u, v] = plate.plane_axes();
    const Vec3 d = point - plate.center;
    return {d.dot(u), d.dot(v), d.dot(plate.normal)};
}

inline void check_quadrature(const QuadratureSpec& quad) {
    require(quad.n >= 2, "quadrature grid needs n >= 2 per axis");
    require(quad.refine_tolerance > 0.0, "refinement tolerance must be > 0");
}

template <class Evaluate>
double with_refinement(Evaluate&& evaluate, const QuadratureSpec& quad) {
    const double coarse = evaluate(quad.n);
    if (!quad.refine_check) return coarse;
    const double fine = evaluate(2 * quad.n);
    const double scale = std::max(std::abs(fine), std::abs(coarse));
    if (scale > 0.0 && std::abs(fine - coarse) > quad.refine_tolerance * scale) {
        throw NonConvergence("quadrature refinement " + std::to_string(quad.n) + " -> "
                                 + std::to_string(2 * quad.n) + " changed the result by more than "
                                 + std::to_string(quad.refine_tolerance) + " relative",
                             {fine});
    }
    return fine;
}

inline double plate_potential_n(const Vec3& local, const ChargedPlate& plate, int n) {
    const double pz2 = local.z() * local.z();
    const double sum = quadrature::midpoint_square(
        [&](double x, double y) {
            const double dx = local.x() - x;
            const double dy = local.y() - y;
            return 1.0 / std::sqrt(dx * dx + dy * dy + pz2);
        },
        0.5 * plate.side_a, n);
    return kCoulomb * plate.sigma * sum;
}

inline double axial_field_n(double z, const ChargedPlate& plate, int n) {
    const double z2 = z * z;
    const double sum = quadrature::midpoint_square(
        [&](double x, double y) {
            const double rho2 = x * x + y * y + z2;
            return z / (rho2 * std::sqrt(rho2));
        },
        0.5 * plate.side_a, n);
    return kCoulomb * plate.sigma * sum;
}

inline void check_off_plate(const Vec3& local, const ChargedPlate& plate) {
    const double half = 0.5 * plate.side_a;
    const bool over_footprint = std::abs(local.x()) <= half && std::abs(local.y()) <= half;
    require(!(over_footprint && std::abs(local.z()) <= kPlateExclusion),
            "evaluation point lies on the plate surface");
}

}  // namespace detail

/// Plate-only potential by midpoint quadrature [V].
inline double plate_potential(const Vec3& point, const ChargedPlate& plate, const QuadratureSpec& quad = {}) {
    plate.validate();
    detail::check_quadrature(quad);
    detail::require(detail::finite(point), "evaluation point must be finite");
    const Vec3 local = detail::plate_local(point, plate);
    detail::check_off_plate(local, plate);
    if (plate.sigma == 0.0) return 0.0;
    return detail::with_refinement([&](int n) { return detail::plate_potential_n(local, plate, n); }, quad);
}

/// Potential of the whole world: plate quadrature plus point-charge superposition [V].
inline double integral_potential(const Vec3& point, const World& world, const QuadratureSpec& quad = {}) {
    world.validate();
    return plate_potential(point, world.plate, quad) + point_charges_potential(point, world.extra_charges);
}

/// Axial field E_z at distance z from the plate centre on the normal [V/m].
inline double integral_field_axial(double z, const ChargedPlate& plate, const QuadratureSpec& quad = {}) {
    plate.validate();
    detail::check_quadrature(quad);
    detail::require(detail::finite(z) && z > 0.0, "axial distance z must be finite and > 0");
    if (plate.sigma == 0.0) return 0.0;
    return detail::with_refinement([&](int n) { return detail::axial_field_n(z, plate, n); }, quad);
}

/// Grid-doubling study of the plate potential at `point`, starting at n0.
inline quadrature::RefinementStudy potential_refinement(const Vec3& point, const ChargedPlate& plate, int n0,
                                                        int levels) {
    plate.validate();
    detail::check_quadrature({n0, false});
    const Vec3 local = detail::plate_local(point, plate);
    detail::check_off_plate(local, plate);
    return quadrature::refine([&](int n) { return detail::plate_potential_n(local, plate, n); }, n0, levels);
}

inline quadrature::RefinementStudy axial_field_refinement(double z, const ChargedPlate& plate, int n0, int levels) {
    plate.validate();
    detail::check_quadrature({n0, false});
    detail::require(detail::finite(z) && z > 0.0, "axial distance z must be finite and > 0");
    return quadrature::refine([&](int n) { return detail::axial_field_n(z, plate, n); }, n0, levels);
}

/// World-frame sensor location for a centreline geometry: z below the plate
/// along -normal, r along the first in-plane axis.
inline Vec3 centerline_point(const CenterlineGeometry& geom, const ChargedPlate& plate) {
    const auto [u, v] = plate.plane_axes();
    (void)v;
    return plate.center - geom.z * plate.normal + geom.r * u;
}

}  // namespace platecharge
