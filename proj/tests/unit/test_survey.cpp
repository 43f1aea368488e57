#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "platecharge/inference.hpp"
#include "platecharge/survey.hpp"

using namespace platecharge;

namespace {

World world(double sigma) { return World{{1.0, sigma, Vec3::Zero(), Vec3::UnitZ()}, {}}; }

PlatformModel still(PlatformModel p) {
    p.position_jitter = 0.0;
    p.height_jitter = 0.0;
    return p;
}

const SensorConfig kQuiet{1.0, 0.0, 0.0, 0.0};

}  // namespace

TEST(Transect, DefaultPlanGivesTwentyFiveRecords) {
    const auto recs = run_transect({}, PlatformModel::robot(), SensorConfig{}, world(5e-11), 1);
    EXPECT_EQ(recs.size(), 25u);
    std::set<std::pair<std::string, int>> cells;
    for (const auto& m : recs) cells.insert({m.position_label, m.run});
    EXPECT_EQ(cells.size(), 25u);
}

TEST(Transect, NoiselessReadingsCollapseToTheModel) {
    const auto w = world(1e-11);
    for (const auto& m : run_transect({}, still(PlatformModel::handheld()), kQuiet, w, 3))
        EXPECT_EQ(m.reading, eq1_potential({0.462, m.r}, w.plate)) << m.position_label;
}

TEST(Transect, SameSeedSameRecords) {
    const auto a = run_transect({}, PlatformModel::handheld(), SensorConfig{}, world(5e-11), 42);
    const auto b = run_transect({}, PlatformModel::handheld(), SensorConfig{}, world(5e-11), 42);
    EXPECT_EQ(a, b);
    const auto c = run_transect({}, PlatformModel::handheld(), SensorConfig{}, world(5e-11), 43);
    EXPECT_NE(a, c);
}

TEST(Transect, RecordsDoNotDependOnPlanOrder) {
    TransectPlan forward;
    TransectPlan reversed = forward;
    std::reverse(reversed.labels.begin(), reversed.labels.end());
    std::reverse(reversed.r_values.begin(), reversed.r_values.end());
    const auto a = run_transect(forward, PlatformModel::robot(), SensorConfig{}, world(5e-11), 8);
    const auto b = run_transect(reversed, PlatformModel::robot(), SensorConfig{}, world(5e-11), 8);
    EXPECT_EQ(a, b);
}

TEST(Transect, InvalidPlansAreRejected) {
    TransectPlan p;
    p.r_values.pop_back();
    EXPECT_THROW(run_transect(p, PlatformModel::robot(), SensorConfig{}, world(5e-11), 1), InvalidArgument);
    p = {};
    p.runs = 0;
    EXPECT_THROW(run_transect(p, PlatformModel::robot(), SensorConfig{}, world(5e-11), 1), InvalidArgument);
    p = {};
    p.labels = {"A"};
    p.r_values = {0.0};
    EXPECT_THROW(run_transect(p, PlatformModel::robot(), SensorConfig{}, world(5e-11), 1), InvalidArgument);
}

TEST(Factorial, DefaultPlanGivesEightyRecords) {
    const auto recs = run_factorial({}, PlatformModel::robot(), SensorConfig{}, world(5e-11), 1);
    EXPECT_EQ(recs.size(), 80u);
    std::set<std::string> cells;
    for (const auto& m : recs) cells.insert(condition_label(m) + "#" + std::to_string(m.run));
    EXPECT_EQ(cells.size(), 80u);
}

TEST(Factorial, MotorCellsMatchWithoutEmi) {
    const auto recs = run_factorial({}, PlatformModel::robot(), SensorConfig{}, world(5e-11), 6);
    for (const auto& off : recs) {
        if (off.motor_on) continue;
        auto on = std::find_if(recs.begin(), recs.end(), [&](const auto& m) {
            return m.motor_on && m.mount == off.mount && m.wheels_charged == off.wheels_charged && m.run == off.run;
        });
        ASSERT_NE(on, recs.end());
        EXPECT_EQ(on->reading, off.reading);
    }
}

TEST(Factorial, MotorEmiSeparatesCells) {
    auto robot = PlatformModel::robot();
    robot.motor_emi_sigma = 0.5;
    const auto recs = run_factorial({}, robot, SensorConfig{}, world(5e-11), 6);
    int differ = 0;
    for (const auto& a : recs)
        for (const auto& b : recs)
            if (!a.motor_on && b.motor_on && a.mount == b.mount && a.wheels_charged == b.wheels_charged
                && a.run == b.run && a.reading != b.reading)
                ++differ;
    EXPECT_EQ(differ, 40);
}

TEST(Factorial, WheelChargeShiftsFlushMountMean) {
    // Hand-computed 5 nC point-charge sum at the flush mount: 734.6745285020688 V.
    FactorialPlan plan;
    plan.mounts = {MountLabel::P1_FLUSH_FRONT};
    plan.repeats = 20;
    const auto recs = run_factorial(plan, PlatformModel::robot(), SensorConfig{0.5, 0.0, 0.01, 0.0}, world(5e-11), 2);
    double sum_c = 0.0, sum_n = 0.0;
    for (const auto& m : recs) {
        if (m.motor_on) continue;
        (m.wheels_charged ? sum_c : sum_n) += m.reading;
    }
    // Matched substreams cancel the additive noise and jitter to first order; gain 0.5 halves the shift.
    EXPECT_NEAR((sum_c - sum_n) / plan.repeats, 0.5 * 734.6745285020688, 0.5 * 734.67 * 0.02);
}

TEST(Factorial, NeedsARobot) {
    EXPECT_THROW(run_factorial({}, PlatformModel::handheld(), SensorConfig{}, world(5e-11), 1), InvalidArgument);
    FactorialPlan plan;
    plan.mounts.clear();
    EXPECT_THROW(run_factorial(plan, PlatformModel::robot(), SensorConfig{}, world(5e-11), 1), InvalidArgument);
}

TEST(HandheldReference, ZeroJitterMatchesRobotFrontMount) {
    const auto w = world(5e-11);
    const auto hand = handheld_reference(TransectPlan{}, still(PlatformModel::handheld()), SensorConfig{}, w, 5);
    const auto robot = run_transect({}, still(PlatformModel::robot(MountLabel::P2_FRONT)), SensorConfig{}, w, 5);
    const auto sh = summarize(hand);
    const auto sr = summarize(robot);
    ASSERT_EQ(sh.size(), sr.size());
    for (std::size_t i = 0; i < sh.size(); ++i) {
        EXPECT_EQ(sh[i].mean, sr[i].mean);
        EXPECT_EQ(sh[i].se, sr[i].se);
    }
}

TEST(HandheldReference, NoisierThanRobotAtMatchedSeeds) {
    const auto w = world(5e-11);
    double hand = 0.0, robot = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        for (const auto& s : summarize(handheld_reference(TransectPlan{}, PlatformModel::handheld(), {}, w, seed)))
            hand += s.fractional_se;
        for (const auto& s : summarize(run_transect({}, PlatformModel::robot(), {}, w, seed))) robot += s.fractional_se;
    }
    EXPECT_GT(hand, robot);
}

TEST(HandheldReference, EmptyPlanGivesNoRecords) {
    TransectPlan empty;
    empty.labels.clear();
    empty.r_values.clear();
    EXPECT_TRUE(handheld_reference(empty, PlatformModel::handheld(), {}, world(5e-11), 1).empty());
    FactorialPlan none;
    none.repeats = 0;
    EXPECT_TRUE(handheld_reference(none, PlatformModel::handheld(), {}, world(5e-11), 1).empty());
}

TEST(HandheldReference, FactorialReferenceIsOnePerRepeat) {
    const auto recs = handheld_reference(FactorialPlan{}, PlatformModel::handheld(), {}, world(5e-11), 1);
    ASSERT_EQ(recs.size(), 5u);
    for (const auto& m : recs) {
        EXPECT_EQ(m.platform, PlatformKind::Handheld);
        EXPECT_FALSE(m.mount.has_value());
        EXPECT_EQ(m.position_label, "center");
    }
}
