#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "platecharge/cli.hpp"

namespace cli = platecharge::cli;

int main(int argc, char** argv) {
    CLI::App app{"Charged-plate survey simulator and surface charge estimator"};
    app.require_subcommand(1);

    cli::SimulateOptions sim;
    std::optional<std::uint64_t> seed;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Run a measurement campaign and write record CSVs");
    simulate->add_option("config", sim.config, "Run configuration (YAML)")->required();
    simulate->add_option("--experiment", sim.experiment, "transect | factorial")
        ->check(CLI::IsMember({"transect", "factorial"}));
    simulate->add_option("--platform", sim.platform, "robot | handheld | both")
        ->check(CLI::IsMember({"robot", "handheld", "both"}));
    simulate->add_option("--seed", seed, "Override the campaign seed");
    simulate->add_option("--out", sim_out, "Output directory (defaults to output_dir in the config)");

    std::string fit_csv, fit_config, fit_out;
    auto* fit = app.add_subcommand("fit", "Fit surface charge density to a transect record CSV");
    fit->add_option("records", fit_csv, "Record CSV")->required();
    fit->add_option("config", fit_config, "Run configuration (YAML)")->required();
    fit->add_option("--out", fit_out, "Output directory");

    std::string cmp_robot, cmp_hand, cmp_config, cmp_out;
    auto* compare = app.add_subcommand("compare", "Compare robot and handheld transects");
    compare->add_option("robot", cmp_robot, "Robot record CSV")->required();
    compare->add_option("handheld", cmp_hand, "Handheld record CSV")->required();
    compare->add_option("config", cmp_config, "Run configuration (YAML)")->required();
    compare->add_option("--out", cmp_out, "Output directory");

    std::string sum_csv, sum_by = "position";
    auto* summarize = app.add_subcommand("summarize", "Per-group summary table of a record CSV");
    summarize->add_option("records", sum_csv, "Record CSV")->required();
    summarize->add_option("--by", sum_by, "position | condition")->check(CLI::IsMember({"position", "condition"}));

    std::string check;
    auto* oracle = app.add_subcommand("oracle", "Run the built-in oracle checks");
    oracle->add_option("--check", check, "eq1-limits | quadrature | fit-closed-form | all")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kUsage;
    }

    auto out_dir = [](const std::string& s) -> std::optional<std::filesystem::path> {
        if (s.empty()) return std::nullopt;
        return std::filesystem::path(s);
    };

    if (*simulate) {
        sim.seed = seed;
        sim.output_dir = out_dir(sim_out);
        return cli::cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*fit) return cli::cmd_fit(fit_csv, fit_config, std::cout, std::cerr, out_dir(fit_out));
    if (*compare) return cli::cmd_compare(cmp_robot, cmp_hand, cmp_config, std::cout, std::cerr, out_dir(cmp_out));
    if (*summarize)
        return cli::cmd_summarize(sum_csv,
                                  sum_by == "condition" ? platecharge::GroupKey::Condition
                                                        : platecharge::GroupKey::Position,
                                  std::cout, std::cerr);
    if (*oracle) return cli::cmd_oracle(check, std::cout, std::cerr);
    return cli::kUsage;
}
