#pragma once

// Field mill and carrying-platform models.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "platecharge/errors.hpp"
#include "platecharge/fields.hpp"
#include "platecharge/random.hpp"

namespace platecharge {

/// Lowest standoff a jittered sensor can reach [m]; keeps the centreline model defined.
inline constexpr double kMinStandoff = 0.01;

struct SensorConfig {
    double gain = 1.0;               ///< reading per volt
    double noise_fraction = 0.42;    ///< std-dev of multiplicative noise
    double noise_floor = 0.005;      ///< [V] std-dev of additive noise
    double quantization_step = 0.0;  ///< [V], 0 disables

    void validate() const {
        detail::require(std::isfinite(gain) && gain > 0.0, "sensor gain must be > 0");
        detail::require(std::isfinite(noise_fraction) && noise_fraction >= 0.0, "noise_fraction must be >= 0");
        detail::require(std::isfinite(noise_floor) && noise_floor >= 0.0, "noise_floor must be >= 0");
        detail::require(std::isfinite(quantization_step) && quantization_step >= 0.0,
                        "quantization_step must be >= 0");
    }
};

enum class MountLabel { P1_FLUSH_FRONT, P2_FRONT, P3_BACK, P4_TOP };

inline constexpr std::array<MountLabel, 4> kAllMounts = {MountLabel::P1_FLUSH_FRONT, MountLabel::P2_FRONT,
                                                         MountLabel::P3_BACK, MountLabel::P4_TOP};

inline std::string_view to_string(MountLabel label) {
    switch (label) {
        case MountLabel::P1_FLUSH_FRONT: return "P1_FLUSH_FRONT";
        case MountLabel::P2_FRONT: return "P2_FRONT";
        case MountLabel::P3_BACK: return "P3_BACK";
        case MountLabel::P4_TOP: return "P4_TOP";
    }
    return "?";
}

inline std::optional<MountLabel> parse_mount(std::string_view text) {
    for (MountLabel m : kAllMounts)
        if (to_string(m) == text) return m;
    return std::nullopt;
}

struct MountPosition {
    MountLabel label = MountLabel::P2_FRONT;
    Vec3 offset = Vec3::Zero();  ///< robot frame [m]
    double enhancement = 1.0;

    void validate() const {
        detail::require(offset.allFinite(), "mount offset must be finite");
        detail::require(std::isfinite(enhancement) && enhancement > 0.0, "mount enhancement must be > 0");
    }
};

/// The four canonical chassis positions with their default geometry.
inline std::array<MountPosition, 4> default_mounts() {
    return {{
        {MountLabel::P1_FLUSH_FRONT, Vec3(0.20, 0.0, 0.05), 1.00},
        {MountLabel::P2_FRONT, Vec3(0.20, 0.0, 0.15), 1.00},
        {MountLabel::P3_BACK, Vec3(-0.20, 0.0, 0.15), 0.95},
        {MountLabel::P4_TOP, Vec3(0.0, 0.0, 0.30), 1.30},
    }};
}

inline MountPosition default_mount(MountLabel label) {
    for (const auto& m : default_mounts())
        if (m.label == label) return m;
    return {};
}

inline std::vector<Vec3> default_wheel_positions() {
    return {Vec3(0.15, 0.17, 0.03), Vec3(0.15, -0.17, 0.03), Vec3(-0.15, 0.17, 0.03), Vec3(-0.15, -0.17, 0.03)};
}

/// Default charge placed on each wheel when the wheels are rubbed [C].
inline constexpr double kDefaultWheelCharge = 5e-9;

enum class PlatformKind { Robot, Handheld };

inline std::string_view to_string(PlatformKind kind) { return kind == PlatformKind::Robot ? "robot" : "handheld"; }

struct PlatformModel {
    PlatformKind kind = PlatformKind::Handheld;
    std::optional<MountPosition> mount;  ///< robot only
    double position_jitter = 0.0;        ///< [m] per horizontal axis
    double height_jitter = 0.0;          ///< [m]
    std::vector<Vec3> wheel_positions;   ///< robot frame, robot only
    double motor_emi_sigma = 0.0;        ///< [V] added while the motor runs

    void validate() const {
        detail::require(std::isfinite(position_jitter) && position_jitter >= 0.0, "position_jitter must be >= 0");
        detail::require(std::isfinite(height_jitter) && height_jitter >= 0.0, "height_jitter must be >= 0");
        detail::require(std::isfinite(motor_emi_sigma) && motor_emi_sigma >= 0.0, "motor_emi_sigma must be >= 0");
        if (kind == PlatformKind::Robot) {
            detail::require(mount.has_value(), "robot platform needs a mount position");
            mount->validate();
            for (const auto& w : wheel_positions) detail::require(w.allFinite(), "wheel position must be finite");
        } else {
            detail::require(!mount.has_value(), "handheld platform has no mount");
            detail::require(wheel_positions.empty(), "handheld platform has no wheels");
        }
    }

    double enhancement() const { return mount ? mount->enhancement : 1.0; }

    static PlatformModel robot(MountPosition mount) {
        PlatformModel p;
        p.kind = PlatformKind::Robot;
        p.mount = mount;
        p.position_jitter = 0.005;
        p.height_jitter = 0.005;
        p.wheel_positions = default_wheel_positions();
        return p;
    }

    static PlatformModel robot(MountLabel label = MountLabel::P2_FRONT) { return robot(default_mount(label)); }

    static PlatformModel handheld() {
        PlatformModel p;
        p.kind = PlatformKind::Handheld;
        p.position_jitter = 0.02;
        p.height_jitter = 0.22;
        return p;
    }
};

struct Condition {
    bool motor_on = false;
    bool wheels_charged = false;
    double wheel_charge_q = 0.0;  ///< [C] per wheel

    void validate() const {
        detail::require(std::isfinite(wheel_charge_q), "wheel charge must be finite");
        detail::require(wheels_charged || wheel_charge_q == 0.0, "wheel charge must be 0 when wheels are grounded");
    }

    static Condition natural(bool motor_on = false) { return {motor_on, false, 0.0}; }
    static Condition charged(bool motor_on = false, double q = kDefaultWheelCharge) { return {motor_on, true, q}; }
};

/// Wheel charges placed in the world for a sensor sitting at `sensor` [world frame].
/// The robot frame is axis-aligned with the world frame.
inline std::vector<PointCharge> wheel_charges(const PlatformModel& platform, const Vec3& sensor, double q) {
    std::vector<PointCharge> charges;
    if (!platform.mount) return charges;
    const Vec3 origin = sensor - platform.mount->offset;
    charges.reserve(platform.wheel_positions.size());
    for (const auto& w : platform.wheel_positions) charges.push_back({q, origin + w});
    return charges;
}

/// Potential at the sensor before the reading chain [V].
///
/// Draws three standard normals from `rng` (horizontal x, horizontal y,
/// height), always in that order, so downstream draws stay aligned whatever
/// the jitter settings. The centreline model is evaluated at the horizontal distance
/// hypot(r + dx, dy) and the jittered standoff (floored at kMinStandoff), then
/// scaled by the mount enhancement. Wheel charge and any extra world charges
/// are added by point-charge superposition at the sensor location.
inline double true_potential_at_sensor(const PlatformModel& platform, const CenterlineGeometry& nominal,
                                       const Condition& condition, const World& world, Substream& rng) {
    platform.validate();
    nominal.validate();
    condition.validate();
    world.validate();

    const double dx = rng.normal() * platform.position_jitter;
    const double dy = rng.normal() * platform.position_jitter;
    const double dz = rng.normal() * platform.height_jitter;

    CenterlineGeometry geom;
    geom.r = std::hypot(nominal.r + dx, dy);
    geom.z = std::max(nominal.z + dz, kMinStandoff);

    double v = platform.enhancement() * eq1_potential(geom, world.plate);

    const Vec3 sensor = centerline_point(geom, world.plate);
    if (!world.extra_charges.empty()) v += point_charges_potential(sensor, world.extra_charges);
    if (condition.wheels_charged && platform.kind == PlatformKind::Robot)
        v += point_charges_potential(sensor, wheel_charges(platform, sensor, condition.wheel_charge_q));
    return v;
}

/// Field-mill reading chain. Draws three standard normals (multiplicative,
/// additive, motor EMI) in that order.
inline double sensor_read(double true_potential, const SensorConfig& sensor, double motor_noise_sigma,
                          Substream& rng) {
    sensor.validate();
    detail::require(std::isfinite(true_potential), "true potential must be finite");
    detail::require(std::isfinite(motor_noise_sigma) && motor_noise_sigma >= 0.0, "motor noise must be >= 0");
    const double e_mult = rng.normal() * sensor.noise_fraction;
    const double e_add = rng.normal() * sensor.noise_floor;
    const double e_emi = rng.normal() * motor_noise_sigma;
    double reading = sensor.gain * true_potential * (1.0 + e_mult) + e_add + e_emi;
    if (sensor.quantization_step > 0.0)
        reading = sensor.quantization_step * std::round(reading / sensor.quantization_step);
    return reading;
}

}  // namespace platecharge
