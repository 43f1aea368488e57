#pragma once

// Measurement campaigns: the centreline transect and the mount/motor/wheel
// factorial experiment.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "platecharge/errors.hpp"
#include "platecharge/fields.hpp"
#include "platecharge/instrument.hpp"
#include "platecharge/random.hpp"

namespace platecharge {

struct TransectPlan {
    std::vector<std::string> labels = {"A", "B", "C", "D", "E"};
    std::vector<double> r_values = {-0.4, -0.2, 0.0, 0.2, 0.4};
    double z = 0.462;
    int runs = 5;

    void validate() const {
        detail::require(labels.size() == r_values.size(), "transect labels and r values differ in length");
        detail::require(labels.size() >= 2, "transect needs at least two positions");
        detail::require(runs >= 1, "transect needs at least one run");
        detail::require(std::isfinite(z) && z > 0.0, "transect z must be > 0");
        for (double r : r_values) detail::require(std::isfinite(r), "transect r values must be finite");
    }
};

struct FactorialPlan {
    std::vector<MountLabel> mounts = {kAllMounts.begin(), kAllMounts.end()};
    std::vector<bool> motor_states = {false, true};
    std::vector<bool> wheel_states = {false, true};
    int repeats = 5;
    CenterlineGeometry geometry{0.462, 0.0};
    std::string position_label = "center";

    void validate() const {
        detail::require(!mounts.empty() && !motor_states.empty() && !wheel_states.empty(),
                        "factorial plan lists must be non-empty");
        detail::require(repeats >= 1, "factorial plan needs repeats >= 1");
        geometry.validate();
    }
};

struct MeasurementRecord {
    PlatformKind platform = PlatformKind::Robot;
    std::optional<MountLabel> mount;
    std::string position_label;
    double r = 0.0;
    int run = 0;
    bool motor_on = false;
    bool wheels_charged = false;
    double reading = 0.0;  ///< [V]
    std::uint64_t seed = 0;

    friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

/// Records sorted by (platform, mount, position, run, motor, wheels).
inline void sort_records(std::vector<MeasurementRecord>& records) {
    auto key = [](const MeasurementRecord& m) {
        const int mount = m.mount ? static_cast<int>(*m.mount) : -1;
        return std::tuple(static_cast<int>(m.platform), mount, std::string_view(m.position_label), m.run,
                          m.motor_on, m.wheels_charged);
    };
    std::stable_sort(records.begin(), records.end(),
                     [&](const auto& a, const auto& b) { return key(a) < key(b); });
}

namespace detail {

inline MeasurementRecord measure(const PlatformModel& platform, const CenterlineGeometry& geom,
                                 const Condition& condition, const SensorConfig& sensor, const World& world,
                                 Substream& stream) {
    const double v = true_potential_at_sensor(platform, geom, condition, world, stream);
    const double emi = condition.motor_on ? platform.motor_emi_sigma : 0.0;
    MeasurementRecord rec;
    rec.platform = platform.kind;
    if (platform.mount) rec.mount = platform.mount->label;
    rec.r = geom.r;
    rec.motor_on = condition.motor_on;
    rec.wheels_charged = condition.wheels_charged;
    rec.reading = sensor_read(v, sensor, emi, stream);
    if (!std::isfinite(rec.reading)) throw InvalidArgument("simulated reading is not finite");
    return rec;
}

}  // namespace detail

/// One record per (run, position). Each cell draws from its own substream keyed
/// by (seed, position label, run); the platform is not part of the key, so robot
/// and handheld campaigns with the same seed see the same underlying draws.
inline std::vector<MeasurementRecord> run_transect(const TransectPlan& plan, const PlatformModel& platform,
                                                   const SensorConfig& sensor, const World& world,
                                                   std::uint64_t seed) {
    plan.validate();
    platform.validate();
    sensor.validate();
    world.validate();
    std::vector<MeasurementRecord> records;
    records.reserve(plan.labels.size() * static_cast<std::size_t>(plan.runs));
    for (int run = 0; run < plan.runs; ++run) {
        const std::string run_key = std::to_string(run);
        for (std::size_t p = 0; p < plan.labels.size(); ++p) {
            Substream stream(seed, {"transect", plan.labels[p], run_key});
            auto rec = detail::measure(platform, {plan.z, plan.r_values[p]}, Condition::natural(false), sensor,
                                       world, stream);
            rec.position_label = plan.labels[p];
            rec.run = run;
            rec.seed = seed;
            records.push_back(std::move(rec));
        }
    }
    sort_records(records);
    return records;
}

/// Mount geometry and wheel charge used by the factorial experiment.
struct FactorialSetup {
    std::vector<MountPosition> mounts = [] {
        auto d = default_mounts();
        return std::vector<MountPosition>(d.begin(), d.end());
    }();
    double wheel_charge_q = kDefaultWheelCharge;  ///< [C] per wheel in charged cells

    MountPosition mount(MountLabel label) const {
        for (const auto& m : mounts)
            if (m.label == label) return m;
        return default_mount(label);
    }
};

/// One record per (mount, motor, wheels, repeat) cell. Substreams are keyed by
/// (seed, mount, repeat) only, so motor and wheel cells of the same repeat are
/// matched: with zero motor EMI the motor on/off cells are identical and the
/// wheel-charge shift is isolated from the noise draws.
inline std::vector<MeasurementRecord> run_factorial(const FactorialPlan& plan, const PlatformModel& robot,
                                                    const SensorConfig& sensor, const World& world,
                                                    std::uint64_t seed, const FactorialSetup& setup = {}) {
    plan.validate();
    if (robot.kind != PlatformKind::Robot) throw InvalidArgument("factorial experiment needs a robot platform");
    robot.validate();
    sensor.validate();
    world.validate();

    std::vector<MeasurementRecord> records;
    for (MountLabel label : plan.mounts) {
        PlatformModel platform = robot;
        platform.mount = setup.mount(label);
        for (bool motor : plan.motor_states) {
            for (bool wheels : plan.wheel_states) {
                const Condition condition =
                    wheels ? Condition::charged(motor, setup.wheel_charge_q) : Condition::natural(motor);
                for (int rep = 0; rep < plan.repeats; ++rep) {
                    Substream stream(seed, {"factorial", to_string(label), std::to_string(rep)});
                    auto rec = detail::measure(platform, plan.geometry, condition, sensor, world, stream);
                    rec.position_label = plan.position_label;
                    rec.run = rep;
                    rec.seed = seed;
                    records.push_back(std::move(rec));
                }
            }
        }
    }
    sort_records(records);
    return records;
}

/// Handheld reference for a transect: identical to run_transect with a handheld platform.
inline std::vector<MeasurementRecord> handheld_reference(const TransectPlan& plan, const PlatformModel& handheld,
                                                         const SensorConfig& sensor, const World& world,
                                                         std::uint64_t seed) {
    if (handheld.kind != PlatformKind::Handheld) throw InvalidArgument("handheld reference needs a handheld platform");
    if ((plan.labels.empty() && plan.r_values.empty()) || plan.runs == 0) return {};
    return run_transect(plan, handheld, sensor, world, seed);
}

/// Handheld reference for the factorial experiment: `repeats` readings at the
/// plan geometry, no motor and no wheels.
inline std::vector<MeasurementRecord> handheld_reference(const FactorialPlan& plan, const PlatformModel& handheld,
                                                         const SensorConfig& sensor, const World& world,
                                                         std::uint64_t seed) {
    if (handheld.kind != PlatformKind::Handheld) throw InvalidArgument("handheld reference needs a handheld platform");
    if (plan.repeats == 0) return {};
    plan.validate();
    handheld.validate();
    sensor.validate();
    world.validate();
    std::vector<MeasurementRecord> records;
    for (int rep = 0; rep < plan.repeats; ++rep) {
        Substream stream(seed, {"factorial-reference", std::to_string(rep)});
        auto rec = detail::measure(handheld, plan.geometry, Condition::natural(false), sensor, world, stream);
        rec.position_label = plan.position_label;
        rec.run = rep;
        rec.seed = seed;
        records.push_back(std::move(rec));
    }
    sort_records(records);
    return records;
}

}  // namespace platecharge
