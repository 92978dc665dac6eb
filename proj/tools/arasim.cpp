// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arasim/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"deterministic PTP-over-x-haul simulator"};
    app.require_subcommand(1);

    arasim::RunManifest manifest;
    std::string scenario_path, preset_name, duration;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "run a scenario and write metrics + summary");
    auto* opt_scn = run->add_option("--scenario", scenario_path, "scenario file");
    auto* opt_preset = run->add_option("--preset", preset_name, "built-in preset name");
    opt_scn->excludes(opt_preset);
    auto* opt_seed = run->add_option("--seed", seed, "override the scenario seed");
    auto* opt_dur = run->add_option("--duration", duration, "override duration (e.g. 120s, 30m, 2h)");
    run->add_option("--out", manifest.out_dir, "output directory")->capture_default_str();
    run->add_option("--figures", manifest.figures,
                    "also derive figure CSVs ('all' or figure names)");
    run->add_flag("--plot-script", manifest.plot_script, "also write plot.gp");

    std::string report_dir = ".";
    std::vector<std::string> report_figures;
    bool report_plot = false;
    auto* report = app.add_subcommand("report", "derive figure CSVs from a finished run");
    report->add_option("--out", report_dir, "directory holding metrics.csv")
        ->capture_default_str();
    report->add_option("--figures", report_figures, "figure subset (default: all)");
    report->add_flag("--plot-script", report_plot, "also write plot.gp");

    std::string preset_sub, preset_arg;
    auto* preset = app.add_subcommand("preset", "list built-in presets or show one");
    preset->add_option("action", preset_sub, "'list' or 'show'")->required();
    preset->add_option("name", preset_arg, "preset name (for 'show')");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : arasim::kExitUsage;
    }

    if (run->parsed()) {
        if (opt_scn->count()) manifest.scenario_path = scenario_path;
        if (opt_preset->count()) manifest.preset = preset_name;
        if (opt_seed->count()) manifest.seed = seed;
        if (opt_dur->count()) manifest.duration = duration;
        return arasim::cmd_run(manifest, std::cout, std::cerr);
    }
    if (report->parsed())
        return arasim::cmd_report(report_dir, report_figures, report_plot, std::cout,
                                  std::cerr);
    return arasim::cmd_preset(preset_sub, preset_arg, std::cout, std::cerr);
}
