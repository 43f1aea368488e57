#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "platecharge/fields.hpp"

using namespace platecharge;

namespace {

ChargedPlate plate(double sigma, double a = 1.0) { return {a, sigma, Vec3::Zero(), Vec3::UnitZ()}; }

// Independent closed form of the on-axis field of a square (solid-angle route).
double solid_angle_field(double sigma, double a, double z) {
    const double eps0 = 8.854187817e-12;
    return sigma / (std::numbers::pi * eps0) * std::atan(a * a / (4.0 * z * std::sqrt(z * z + a * a / 2.0)));
}

}  // namespace

TEST(CenterlinePotential, CentreValueIsTheLimit) {
    // z*sigma/(2 eps0) for z=0.462, sigma=1e-11, evaluated in extended precision.
    EXPECT_NEAR(eq1_potential({0.462, 0.0}, plate(1e-11)), 0.260893494439412116, 1e-15);
}

TEST(CenterlinePotential, ZeroChargeGivesZero) {
    for (double r : {-0.4, 0.0, 0.3, 2.0}) EXPECT_EQ(eq1_potential({0.462, r}, plate(0.0)), 0.0);
}

TEST(CenterlinePotential, EvenInR) {
    EXPECT_EQ(eq1_potential({0.462, 0.3}, plate(1e-11)), eq1_potential({0.462, -0.3}, plate(1e-11)));
}

TEST(CenterlinePotential, ContinuousAtCentre) {
    const double limit = 0.462 * 1e-11 / (2.0 * kEpsilon0);
    EXPECT_LE(std::abs(eq1_potential({0.462, 1e-12}, plate(1e-11)) - limit) / limit, 1e-9);
}

TEST(CenterlinePotential, StrictlyDecreasingInAbsR) {
    double previous = eq1_potential({0.462, 0.0}, plate(1e-11));
    for (int i = 1; i <= 1000; ++i) {
        const double v = eq1_potential({0.462, 2.0 * i / 1000.0}, plate(1e-11));
        ASSERT_LT(v, previous) << "at step " << i;
        previous = v;
    }
}

TEST(CenterlinePotential, RejectsBadInputs) {
    EXPECT_THROW(eq1_potential({0.0, 0.1}, plate(1e-11)), InvalidArgument);
    EXPECT_THROW(eq1_potential({-0.1, 0.1}, plate(1e-11)), InvalidArgument);
    EXPECT_THROW(eq1_potential({0.462, 0.1}, plate(1e-11, 0.0)), InvalidArgument);
    EXPECT_THROW(eq1_potential({0.462, std::nan("")}, plate(1e-11)), InvalidArgument);
    EXPECT_THROW(eq1_potential({0.462, 0.1}, plate(std::numeric_limits<double>::infinity())), InvalidArgument);
}

TEST(CenterlineShape, LinearInSigmaExactly) {
    for (double sigma : {1e-12, 1e-9, 3.7e-11})
        for (double r : {0.0, 0.25, 0.5, -0.17}) {
            const CenterlineGeometry g{0.462, r};
            EXPECT_EQ(eq1_shape(g, 1.0) * sigma, eq1_potential(g, plate(sigma)));
        }
}

TEST(CenterlineShape, LimitAndPositivity) {
    EXPECT_DOUBLE_EQ(eq1_shape({0.462, 0.0}, 1.0), 0.462 / (2.0 * kEpsilon0));
    for (double r : {1e-9, 0.1, 1.0, 100.0, -3.0}) EXPECT_GT(eq1_shape({0.462, r}, 1.0), 0.0);
}

TEST(CenterlineShape, SlopeMatchesFiniteDifference) {
    for (double r : {-0.4, -0.05, 0.03, 0.2, 0.7}) {
        const double h = 1e-6;
        const double fd = (eq1_shape({0.462, r + h}, 1.0) - eq1_shape({0.462, r - h}, 1.0)) / (2 * h);
        EXPECT_NEAR(eq1_shape_slope({0.462, r}, 1.0), fd, 1e-6 * std::abs(fd)) << "r=" << r;
    }
    EXPECT_EQ(eq1_shape_slope({0.462, 0.0}, 1.0), 0.0);
}

TEST(IntegralPotential, PointChargeOnly) {
    World w{plate(0.0), {{2e-10, Vec3::Zero()}}};
    EXPECT_NEAR(integral_potential(Vec3(0, 0, 1.0), w), 2e-10 * kCoulomb, 1e-15);
}

TEST(IntegralPotential, FarFieldApproachesPointCharge) {
    const double sigma = 1e-9;
    const double d = 100.0;
    const double v = integral_potential(Vec3(0, 0, -d), World{plate(sigma), {}}, {16, false});
    EXPECT_NEAR(v / (kCoulomb * sigma / d), 1.0, 0.01);
}

TEST(IntegralPotential, MatchesAdaptiveQuadratureReference) {
    // Reference from an independent adaptive quadrature at 30 digits.
    const double v = integral_potential(Vec3(0.1, 0.05, -0.3), World{plate(1e-9), {}}, {1024, false});
    EXPECT_NEAR(v, 18.8067637288375263, 18.8 * 1e-6);
}

TEST(IntegralPotential, MirrorSymmetric) {
    const World w{plate(1e-9), {}};
    const QuadratureSpec q{128, false};
    EXPECT_DOUBLE_EQ(integral_potential(Vec3(0.2, 0.1, -0.4), w, q), integral_potential(Vec3(-0.2, -0.1, -0.4), w, q));
    EXPECT_DOUBLE_EQ(integral_potential(Vec3(0.2, 0.0, -0.4), w, q), integral_potential(Vec3(-0.2, 0.0, -0.4), w, q));
}

TEST(IntegralPotential, SuperpositionIsExact) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        std::vector<PointCharge> charges;
        for (int i = 0; i < 3; ++i) charges.push_back({u(gen) * 1e-10, Vec3(u(gen), u(gen), -1.5 + 0.2 * u(gen))});
        const Vec3 p(u(gen), u(gen), -0.3 + 0.1 * u(gen));
        const QuadratureSpec q{64, false};
        const double whole = integral_potential(p, World{plate(1e-9), charges}, q);
        const double parts = integral_potential(p, World{plate(1e-9), {}}, q) + point_charges_potential(p, charges);
        EXPECT_EQ(whole, parts);
        double by_hand = 0.0;
        for (const auto& c : charges) by_hand += c.q / (4 * std::numbers::pi * 8.854187817e-12 * (p - c.position).norm());
        EXPECT_NEAR(point_charges_potential(p, charges), by_hand, 1e-12 * std::abs(by_hand) + 1e-18);
    }
}

TEST(IntegralPotential, SecondOrderConvergence) {
    const auto study = potential_refinement(Vec3(0.1, 0.05, -0.3), plate(1e-9), 32, 6);
    ASSERT_EQ(study.observed_orders.size(), 4u);
    for (double p : study.observed_orders) EXPECT_GE(p, 1.99);
    // Each doubling shrinks the change by at least ~4x.
    for (std::size_t k = 0; k + 2 < study.values.size(); ++k) {
        const double d0 = std::abs(study.values[k] - study.values[k + 1]);
        const double d1 = std::abs(study.values[k + 1] - study.values[k + 2]);
        EXPECT_GE(d0 / d1, 3.97);
    }
}

TEST(IntegralPotential, DefaultSpecPassesRefinementCheck) {
    EXPECT_NO_THROW(integral_potential(Vec3(0.0, 0.0, -0.462), World{plate(1e-9), {}}));
}

TEST(IntegralPotential, RejectsPointsOnPlateAndTinyGrids) {
    const World w{plate(1e-9), {}};
    EXPECT_THROW(integral_potential(Vec3(0.1, 0.1, 0.0), w), InvalidArgument);
    EXPECT_THROW(integral_potential(Vec3(0.1, 0.1, 5e-10), w), InvalidArgument);
    EXPECT_NO_THROW(integral_potential(Vec3(0.1, 0.1, 2e-9), w, {4, false}));
    EXPECT_NO_THROW(integral_potential(Vec3(0.8, 0.1, 0.0), w, {8, false}));  // in plane, off the footprint
    EXPECT_THROW(integral_potential(Vec3(0, 0, -1), w, {1, false}), InvalidArgument);
}

TEST(IntegralPotential, TiltedPlateMatchesAxisAligned) {
    ChargedPlate tilted = plate(1e-9);
    tilted.normal = Vec3(1, 0, 0);
    tilted.center = Vec3(2, 0, 0);
    const double ref = integral_potential(Vec3(0, 0, -0.5), World{plate(1e-9), {}}, {64, false});
    const double rot = integral_potential(Vec3(1.5, 0, 0), World{tilted, {}}, {64, false});
    EXPECT_NEAR(rot, ref, 1e-12 * ref);
}

TEST(IntegralFieldAxial, MatchesSolidAngleFormula) {
    // Closed form at (a=1, z=0.462, sigma=1e-9), extended precision: 20.48339664470824 V/m.
    EXPECT_NEAR(solid_angle_field(1e-9, 1.0, 0.462), 20.4833966447082412, 1e-12);
    for (auto [a, z] : {std::pair{1.0, 0.462}, {1.0, 0.1}, {2.0, 1.0}}) {
        const double e = integral_field_axial(z, plate(1e-9, a), {1024, false});
        const double want = solid_angle_field(1e-9, a, z);
        EXPECT_LE(std::abs(e - want) / want, 1e-6) << "a=" << a << " z=" << z;
    }
}

TEST(IntegralFieldAxial, InfinitePlaneLimit) {
    const double sigma = 1e-9;
    const double e = integral_field_axial(1.0, plate(sigma, 1000.0), {4096, false});
    EXPECT_NEAR(e / (sigma / (2 * kEpsilon0)), 1.0, 0.005);
}

TEST(IntegralFieldAxial, ZeroChargeAndBadZ) {
    EXPECT_EQ(integral_field_axial(0.462, plate(0.0)), 0.0);
    EXPECT_THROW(integral_field_axial(0.0, plate(1e-9)), InvalidArgument);
    EXPECT_THROW(integral_field_axial(-1.0, plate(1e-9)), InvalidArgument);
}

TEST(IntegralFieldAxial, RefinementCheckFlagsUnderResolvedGrid) {
    // At z = 0.02 a 16x16 grid is far from converged.
    EXPECT_THROW(integral_field_axial(0.02, plate(1e-9), {16, true, 1e-5}), NonConvergence);
}

TEST(Plate, Validation) {
    ChargedPlate p = plate(1e-9);
    p.normal = Vec3(0, 0, 1.0 + 1e-9);
    EXPECT_THROW(p.validate(), InvalidArgument);
    p = plate(1e-9, -1.0);
    EXPECT_THROW(p.validate(), InvalidArgument);
    PointCharge c{1e-9, Vec3(0, std::nan(""), 0)};
    EXPECT_THROW(c.validate(), InvalidArgument);
}
