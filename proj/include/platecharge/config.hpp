#pragma once

// Run configuration: a YAML document with unit-suffixed keys. Every key is
// optional and falls back to the built-in defaults; unknown keys are errors.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "platecharge/errors.hpp"
#include "platecharge/fields.hpp"
#include "platecharge/inference.hpp"
#include "platecharge/instrument.hpp"
#include "platecharge/survey.hpp"

namespace platecharge {

/// Interface unit of sigma.
inline constexpr double kPicoCoulombPerM2 = 1e-12;

struct RunConfig {
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    double z = 0.462;  ///< sensor standoff below the plate [m]
    World world{ChargedPlate{1.0, 50.0 * kPicoCoulombPerM2, Vec3::Zero(), Vec3::UnitZ()}, {}};
    SensorConfig sensor;
    PlatformModel robot = PlatformModel::robot(MountLabel::P2_FRONT);
    FactorialSetup factorial_setup;
    PlatformModel handheld = PlatformModel::handheld();
    TransectPlan transect;
    FactorialPlan factorial;

    FitGeometry fit_geometry() const { return {z, world.plate.side_a}; }

    void validate() const {
        world.validate();
        sensor.validate();
        robot.validate();
        handheld.validate();
        transect.validate();
        factorial.validate();
    }
};

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

inline void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
    if (!map.IsMap()) throw ConfigError(where + " must be a mapping", line_of(map));
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where, line_of(kv.first));
    }
}

template <class T>
void read(const YAML::Node& map, const char* key, T& value) {
    const YAML::Node n = map[key];
    if (!n) return;
    try {
        value = n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'", line_of(n));
    }
}

inline Vec3 read_vec3(const YAML::Node& n, const char* key) {
    if (!n.IsSequence() || n.size() != 3) throw ConfigError(std::string(key) + " must be a 3-element list", line_of(n));
    try {
        return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
    } catch (const YAML::Exception&) {
        throw ConfigError(std::string("bad number in '") + key + "'", line_of(n));
    }
}

inline MountLabel read_mount_label(const YAML::Node& n) {
    const auto text = n.as<std::string>();
    const auto m = parse_mount(text);
    if (!m) throw ConfigError("unknown mount '" + text + "' (expected P1_FLUSH_FRONT, P2_FRONT, P3_BACK, P4_TOP)",
                              line_of(n));
    return *m;
}

template <class Fn>
void validated(const YAML::Node& section, Fn&& fn) {
    try {
        fn();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what(), line_of(section));
    }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    RunConfig cfg;
    if (root.IsNull()) return cfg;
    using detail::read;
    detail::check_keys(root, {"seed", "output_dir", "world", "sensor", "robot", "handheld", "transect", "factorial"},
                       "top level");
    read(root, "seed", cfg.seed);
    if (root["output_dir"]) cfg.output_dir = root["output_dir"].as<std::string>();

    if (const auto w = root["world"]) {
        detail::check_keys(w, {"side_a_m", "sigma_pC_m2", "z_m"}, "world");
        double sigma_pc = cfg.world.plate.sigma / kPicoCoulombPerM2;
        read(w, "side_a_m", cfg.world.plate.side_a);
        read(w, "sigma_pC_m2", sigma_pc);
        read(w, "z_m", cfg.z);
        cfg.world.plate.sigma = sigma_pc * kPicoCoulombPerM2;
        detail::validated(w, [&] {
            cfg.world.validate();
            CenterlineGeometry{cfg.z, 0.0}.validate();
        });
    }

    if (const auto s = root["sensor"]) {
        detail::check_keys(s, {"gain", "noise_fraction", "noise_floor_V", "quantization_step_V"}, "sensor");
        read(s, "gain", cfg.sensor.gain);
        read(s, "noise_fraction", cfg.sensor.noise_fraction);
        read(s, "noise_floor_V", cfg.sensor.noise_floor);
        read(s, "quantization_step_V", cfg.sensor.quantization_step);
        detail::validated(s, [&] { cfg.sensor.validate(); });
    }

    if (const auto r = root["robot"]) {
        detail::check_keys(r, {"mount", "position_jitter_m", "height_jitter_m", "motor_emi_sigma_V", "wheel_charge_nC",
                               "wheels_m", "mounts"},
                           "robot");
        read(r, "position_jitter_m", cfg.robot.position_jitter);
        read(r, "height_jitter_m", cfg.robot.height_jitter);
        read(r, "motor_emi_sigma_V", cfg.robot.motor_emi_sigma);
        double q_nc = cfg.factorial_setup.wheel_charge_q * 1e9;
        read(r, "wheel_charge_nC", q_nc);
        cfg.factorial_setup.wheel_charge_q = q_nc * 1e-9;
        if (const auto wheels = r["wheels_m"]) {
            if (!wheels.IsSequence()) throw ConfigError("wheels_m must be a list", detail::line_of(wheels));
            cfg.robot.wheel_positions.clear();
            for (const auto& w : wheels) cfg.robot.wheel_positions.push_back(detail::read_vec3(w, "wheels_m"));
        }
        if (const auto mounts = r["mounts"]) {
            if (!mounts.IsMap()) throw ConfigError("mounts must be a mapping", detail::line_of(mounts));
            for (const auto& kv : mounts) {
                const MountLabel label = detail::read_mount_label(kv.first);
                detail::check_keys(kv.second, {"offset_m", "enhancement"}, std::string(to_string(label)));
                MountPosition m = cfg.factorial_setup.mount(label);
                if (kv.second["offset_m"]) m.offset = detail::read_vec3(kv.second["offset_m"], "offset_m");
                read(kv.second, "enhancement", m.enhancement);
                detail::validated(kv.second, [&] { m.validate(); });
                for (auto& existing : cfg.factorial_setup.mounts)
                    if (existing.label == label) existing = m;
            }
        }
        MountLabel transect_mount = cfg.robot.mount ? cfg.robot.mount->label : MountLabel::P2_FRONT;
        if (r["mount"]) transect_mount = detail::read_mount_label(r["mount"]);
        cfg.robot.mount = cfg.factorial_setup.mount(transect_mount);
        detail::validated(r, [&] {
            cfg.robot.validate();
            Condition::charged(false, cfg.factorial_setup.wheel_charge_q).validate();
        });
    }

    if (const auto h = root["handheld"]) {
        detail::check_keys(h, {"position_jitter_m", "height_jitter_m"}, "handheld");
        read(h, "position_jitter_m", cfg.handheld.position_jitter);
        read(h, "height_jitter_m", cfg.handheld.height_jitter);
        detail::validated(h, [&] { cfg.handheld.validate(); });
    }

    cfg.transect.z = cfg.z;
    if (const auto t = root["transect"]) {
        detail::check_keys(t, {"labels", "r_m", "runs"}, "transect");
        read(t, "labels", cfg.transect.labels);
        read(t, "r_m", cfg.transect.r_values);
        read(t, "runs", cfg.transect.runs);
        detail::validated(t, [&] { cfg.transect.validate(); });
    }

    cfg.factorial.geometry.z = cfg.z;
    if (const auto f = root["factorial"]) {
        detail::check_keys(f, {"mounts", "motor_states", "wheel_states", "repeats", "r_m"}, "factorial");
        if (const auto mounts = f["mounts"]) {
            if (!mounts.IsSequence()) throw ConfigError("factorial mounts must be a list", detail::line_of(mounts));
            cfg.factorial.mounts.clear();
            for (const auto& m : mounts) cfg.factorial.mounts.push_back(detail::read_mount_label(m));
        }
        auto read_states = [&](const char* key, std::vector<bool>& out) {
            if (!f[key]) return;
            std::vector<bool> v;
            read(f, key, v);
            out = v;
        };
        read_states("motor_states", cfg.factorial.motor_states);
        read_states("wheel_states", cfg.factorial.wheel_states);
        read(f, "repeats", cfg.factorial.repeats);
        read(f, "r_m", cfg.factorial.geometry.r);
        detail::validated(f, [&] { cfg.factorial.validate(); });
    }

    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace platecharge
