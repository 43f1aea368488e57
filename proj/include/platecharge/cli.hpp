#pragma once

// Subcommands of the `platecharge` tool. Each returns a process exit code and
// writes human-facing text to the given streams, so tests can drive them
// in-process.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "platecharge/checks.hpp"
#include "platecharge/config.hpp"
#include "platecharge/errors.hpp"
#include "platecharge/inference.hpp"
#include "platecharge/records_csv.hpp"
#include "platecharge/survey.hpp"

namespace platecharge::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kOracleFailure = 3 };

namespace fs = std::filesystem;

/// Writes every (path, content) pair to a temporary sibling first, then renames
/// them all. Nothing is renamed unless every temporary was written.
inline void write_files_atomically(const std::vector<std::pair<fs::path, std::string>>& files) {
    std::vector<fs::path> temps;
    try {
        for (const auto& [path, content] : files) {
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            fs::path tmp = path;
            tmp += ".tmp";
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write '" + tmp.string() + "'");
            temps.push_back(tmp);
            out << content;
            out.close();
            if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& t : temps) fs::remove(t, ec);
        throw;
    }
    for (std::size_t i = 0; i < files.size(); ++i) fs::rename(temps[i], files[i].first);
}

/// --seed flag, then PLATECHARGE_SEED, then the config file.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t config_seed) {
    if (flag) return *flag;
    if (const char* env = std::getenv("PLATECHARGE_SEED"); env && *env) {
        std::uint64_t v = 0;
        const std::string_view text(env);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw ConfigError("PLATECHARGE_SEED is not an unsigned integer: '" + std::string(text) + "'");
        return v;
    }
    return config_seed;
}

inline std::string records_to_string(const std::vector<MeasurementRecord>& records) {
    std::ostringstream out;
    csv::write_records(out, records);
    return out.str();
}

inline std::vector<MeasurementRecord> load_records(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open records file '" + path.string() + "'");
    return csv::read_records(in);
}

// ---------------------------------------------------------------------------
// Structured text reports (YAML-compatible key: value lines)
// ---------------------------------------------------------------------------

inline std::string num(double v) { return csv::format_double(v); }

inline void write_summaries(std::ostream& out, const std::vector<PositionSummary>& summaries,
                            const std::string& indent) {
    for (const auto& s : summaries) {
        const auto [lo, hi] = two_se_band(s);
        out << indent << "- position: " << s.position_label << '\n'
            << indent << "  r_m: " << num(s.r) << '\n'
            << indent << "  n: " << s.n << '\n'
            << indent << "  mean_V: " << num(s.mean) << '\n'
            << indent << "  std_dev_V: " << num(s.std_dev) << '\n'
            << indent << "  se_V: " << num(s.se) << '\n'
            << indent << "  fractional_se: " << num(s.fractional_se) << '\n'
            << indent << "  median_V: " << num(s.median) << '\n'
            << indent << "  band_low_V: " << num(lo) << '\n'
            << indent << "  band_high_V: " << num(hi) << '\n';
        if (s.single_reading) out << indent << "  warning: single reading, se undefined\n";
    }
}

inline void write_fit(std::ostream& out, const FitResult& fit, const std::string& prefix = "") {
    out << prefix << "sigma_pC_m2: " << num(fit.sigma_hat / kPicoCoulombPerM2) << '\n'
        << prefix << "sigma_se_pC_m2: " << num(fit.sigma_se / kPicoCoulombPerM2) << '\n'
        << prefix << "chi2: " << num(fit.chi2) << '\n'
        << prefix << "dof: " << fit.dof << '\n'
        << prefix << "reduced_chi2: " << num(fit.reduced_chi2) << '\n';
}

inline std::string fit_report(const std::vector<PositionSummary>& summaries, const FitResult& fit) {
    std::ostringstream out;
    write_fit(out, fit);
    out << "positions:\n";
    write_summaries(out, summaries, "  ");
    return out.str();
}

inline std::string comparison_report(const ComparisonReport& rep) {
    std::ostringstream out;
    out << "variability_ratio: " << num(rep.variability_ratio) << '\n'
        << "robot_fse_min: " << num(rep.robot_fse_range.first) << '\n'
        << "robot_fse_max: " << num(rep.robot_fse_range.second) << '\n'
        << "handheld_fse_min: " << num(rep.handheld_fse_range.first) << '\n'
        << "handheld_fse_max: " << num(rep.handheld_fse_range.second) << '\n'
        << "sigma_consistent: " << (rep.sigma_consistent ? "true" : "false") << '\n'
        << "robot_fit:\n";
    write_fit(out, rep.robot_fit, "  ");
    out << "handheld_fit:\n";
    write_fit(out, rep.handheld_fit, "  ");
    out << "robot_positions:\n";
    write_summaries(out, rep.robot, "  ");
    out << "handheld_positions:\n";
    write_summaries(out, rep.handheld, "  ");
    return out.str();
}

/// Plot-ready per-group summary table.
inline std::string summary_csv(const std::vector<std::pair<std::string, std::vector<PositionSummary>>>& sets) {
    std::ostringstream out;
    out << "platform,position,r_m,n,mean_V,std_dev_V,se_V,fractional_se,median_V,band_low_V,band_high_V\n";
    for (const auto& [platform, summaries] : sets) {
        for (const auto& s : summaries) {
            const auto [lo, hi] = two_se_band(s);
            out << platform << ',' << s.position_label << ',' << num(s.r) << ',' << s.n << ',' << num(s.mean) << ','
                << num(s.std_dev) << ',' << num(s.se) << ',' << num(s.fractional_se) << ',' << num(s.median) << ','
                << num(lo) << ',' << num(hi) << '\n';
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct SimulateOptions {
    fs::path config;
    std::string experiment = "transect";  ///< transect | factorial
    std::string platform = "both";        ///< robot | handheld | both
    std::optional<std::uint64_t> seed;
    std::optional<fs::path> output_dir;
};

/// Records for one experiment and platform, from a validated configuration.
inline std::vector<MeasurementRecord> simulate(const RunConfig& cfg, const std::string& experiment,
                                               PlatformKind platform, std::uint64_t seed) {
    if (experiment == "transect") {
        return platform == PlatformKind::Robot
                   ? run_transect(cfg.transect, cfg.robot, cfg.sensor, cfg.world, seed)
                   : handheld_reference(cfg.transect, cfg.handheld, cfg.sensor, cfg.world, seed);
    }
    return platform == PlatformKind::Robot
               ? run_factorial(cfg.factorial, cfg.robot, cfg.sensor, cfg.world, seed, cfg.factorial_setup)
               : handheld_reference(cfg.factorial, cfg.handheld, cfg.sensor, cfg.world, seed);
}

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    if (opt.experiment != "transect" && opt.experiment != "factorial") {
        err << "error: --experiment must be transect or factorial\n";
        return kUsage;
    }
    if (opt.platform != "robot" && opt.platform != "handheld" && opt.platform != "both") {
        err << "error: --platform must be robot, handheld or both\n";
        return kUsage;
    }
    RunConfig cfg;
    std::uint64_t seed = 0;
    try {
        cfg = load_config(opt.config);
        seed = resolve_seed(opt.seed, cfg.seed);
    } catch (const ConfigError& e) {
        err << "config error: " << opt.config.string() << ": " << e.what() << '\n';
        return kUsage;
    }
    const fs::path dir = opt.output_dir.value_or(cfg.output_dir);

    std::vector<PlatformKind> platforms;
    if (opt.platform != "handheld") platforms.push_back(PlatformKind::Robot);
    if (opt.platform != "robot") platforms.push_back(PlatformKind::Handheld);

    std::vector<std::pair<fs::path, std::string>> files;
    try {
        for (PlatformKind p : platforms) {
            const auto records = simulate(cfg, opt.experiment, p, seed);
            const fs::path path =
                dir / ("records_" + opt.experiment + "_" + std::string(to_string(p)) + ".csv");
            files.emplace_back(path, records_to_string(records));
        }
        write_files_atomically(files);
    } catch (const InvalidArgument& e) {
        err << "model error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << '\n';
        return kData;
    }
    for (const auto& [path, content] : files) out << "wrote " << path.string() << '\n';
    return kOk;
}

inline int cmd_fit(const fs::path& records_csv, const fs::path& config, std::ostream& out, std::ostream& err,
                   std::optional<fs::path> output_dir = std::nullopt) {
    RunConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << config.string() << ": " << e.what() << '\n';
        return kUsage;
    }
    try {
        const auto records = load_records(records_csv);
        if (records.empty()) throw DataError("records file has no rows");
        const auto summaries = summarize(records);
        const auto fit = fit_sigma(summaries, cfg.fit_geometry());
        const std::string report = fit_report(summaries, fit);
        const fs::path dir = output_dir.value_or(cfg.output_dir);
        const std::string stem = records_csv.stem().string();
        write_files_atomically({{dir / ("fit_" + stem + ".yaml"), report},
                                {dir / ("summary_" + stem + ".csv"), summary_csv({{"all", summaries}})}});
        out << report;
        return kOk;
    } catch (const DegenerateDesign& e) {
        err << "degenerate design: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    }
}

inline int cmd_compare(const fs::path& robot_csv, const fs::path& handheld_csv, const fs::path& config,
                       std::ostream& out, std::ostream& err, std::optional<fs::path> output_dir = std::nullopt) {
    RunConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ConfigError& e) {
        err << "config error: " << config.string() << ": " << e.what() << '\n';
        return kUsage;
    }
    try {
        const auto robot = load_records(robot_csv);
        const auto handheld = load_records(handheld_csv);
        if (robot.empty() || handheld.empty()) throw DataError("records file has no rows");
        const auto rep = compare_platforms(robot, handheld, cfg.fit_geometry());
        const std::string report = comparison_report(rep);
        const fs::path dir = output_dir.value_or(cfg.output_dir);
        write_files_atomically({{dir / "comparison.yaml", report},
                                {dir / "summary_comparison.csv",
                                 summary_csv({{"robot", rep.robot}, {"handheld", rep.handheld}})}});
        out << report;
        return kOk;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    }
}

/// Per-group summary CSV of a records file (factorial cells with --by condition).
inline int cmd_summarize(const fs::path& records_csv, GroupKey key, std::ostream& out, std::ostream& err) {
    try {
        const auto records = load_records(records_csv);
        out << summary_csv({{"all", summarize(records, key)}});
        return kOk;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    }
}

inline const std::vector<std::string>& oracle_names() {
    static const std::vector<std::string> names = {"eq1-limits", "quadrature", "fit-closed-form", "all"};
    return names;
}

inline int cmd_oracle(const std::string& check, std::ostream& out, std::ostream& err) {
    std::vector<checks::CheckResult> results;
    const bool all = check == "all";
    if (all || check == "eq1-limits") {
        auto r = checks::eq1_limits();
        results.insert(results.end(), r.begin(), r.end());
    }
    if (all || check == "quadrature") {
        auto r = checks::quadrature_agreement();
        results.insert(results.end(), r.begin(), r.end());
    }
    if (all || check == "fit-closed-form") {
        auto r = checks::fit_closed_form();
        results.insert(results.end(), r.begin(), r.end());
    }
    if (results.empty()) {
        err << "unknown check '" << check << "'; valid checks:";
        for (const auto& n : oracle_names()) err << ' ' << n;
        err << '\n';
        return kUsage;
    }
    bool ok = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": measured " << std::setprecision(6) << r.deviation
            << " (threshold " << r.threshold << ")\n";
        ok = ok && r.passed;
    }
    return ok ? kOk : kOracleFailure;
}

}  // namespace platecharge::cli
