// SPDX-License-Identifier: Apache-2.0
#include "arasim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arasim/analysis.hpp"
#include "arasim/engine.hpp"
#include "arasim/errors.hpp"
#include "arasim/scenario.hpp"

namespace fs = std::filesystem;

namespace arasim {

const std::vector<std::string> kAllFigures = {
    "fig3_offset",   "fig4_mpd",        "fig5_hist",
    "fig6_mpd_vs_channel", "fig7_rainbins", "fig8_offset_cdf",
    "fig9_wired_vs_wireless",
};

namespace {

constexpr double kOffsetHistBinNs = 10.0;
const std::vector<double> kRainEdges = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25};

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw RangeError("cannot open for writing: " + path.string());
    return f;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RangeError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Nodes carrying servo samples, i.e. real sync consumers.
std::vector<std::string> sample_nodes(const MetricLog& log) {
    return log.nodes_with(Metric::OffsetNs);
}

bool fig3(const MetricLog& log, const fs::path& dir) {
    const auto nodes = sample_nodes(log);
    if (nodes.empty()) return false;
    auto f = open_out(dir / "fig3_offset.csv");
    f << "at_ns,node,offset_ns\n";
    for (const auto& node : nodes)
        for (const auto& [at, v] : log.series(node, Metric::OffsetNs))
            f << at << ',' << node << ',' << static_cast<long long>(std::llround(v)) << '\n';
    return true;
}

bool fig4(const MetricLog& log, const fs::path& dir) {
    const auto nodes = log.nodes_with(Metric::MpdNs);
    if (nodes.empty()) return false;
    auto f = open_out(dir / "fig4_mpd.csv");
    f << "at_ns,node,mpd_ns\n";
    for (const auto& node : nodes)
        for (const auto& [at, v] : log.series(node, Metric::MpdNs))
            f << at << ',' << node << ',' << static_cast<long long>(std::llround(v)) << '\n';
    return true;
}

bool fig5(const MetricLog& log, const fs::path& dir) {
    const auto nodes = sample_nodes(log);
    if (nodes.empty()) return false;
    auto f = open_out(dir / "fig5_hist.csv");
    f << "node,bin_lo_ns,count\n";
    for (const auto& node : nodes) {
        const auto values = log.values(node, Metric::OffsetNs);
        for (const auto& [lo, count] : histogram(values, kOffsetHistBinNs, 0.0))
            f << node << ',' << format_number(lo) << ',' << count << '\n';
    }
    return true;
}

bool fig6(const MetricLog& log, const fs::path& dir) {
    const auto nodes = log.nodes_with(Metric::SnrDb);
    if (nodes.empty()) return false;
    auto f = open_out(dir / "fig6_mpd_vs_channel.csv");
    f << "at_ns,node,mpd_ns,snr_db,rsl_dbm\n";
    auto sidecar = open_out(dir / "fig6_spearman.csv");
    sidecar << "node,key,value\n";
    for (const auto& node : nodes) {
        const auto mpd = log.series(node, Metric::MpdNs);
        const auto snr = log.values(node, Metric::SnrDb);
        const auto rsl = log.values(node, Metric::RslDbm);
        const std::size_t n = std::min({mpd.size(), snr.size(), rsl.size()});
        std::vector<double> mpd_v;
        mpd_v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            f << mpd[i].first << ',' << node << ','
              << static_cast<long long>(std::llround(mpd[i].second)) << ','
              << format_number(snr[i]) << ',' << format_number(rsl[i]) << '\n';
            mpd_v.push_back(mpd[i].second);
        }
        for (auto [key, chan] : {std::pair{"spearman_mpd_snr", &snr},
                                 std::pair{"spearman_mpd_rsl", &rsl}}) {
            std::string value = "nan";
            try {
                value = format_number(
                    spearman(mpd_v, std::span<const double>(chan->data(), n)));
            } catch (const RangeError&) {
                // constant channel: correlation undefined
            }
            sidecar << node << ',' << key << ',' << value << '\n';
        }
    }
    return true;
}

bool fig7(const MetricLog& log, const fs::path& dir) {
    const auto nodes = log.nodes_with(Metric::RainMmh);
    if (nodes.empty()) return false;
    auto f = open_out(dir / "fig7_rainbins.csv");
    f << "node,bin_lo_mmh,bin_hi_mmh,count,mpd_p50_ns,mpd_p99_ns\n";
    for (const auto& node : nodes) {
        const auto mpd = log.series(node, Metric::MpdNs);
        const auto rain = log.series(node, Metric::RainMmh);
        for (auto& bin : bin_by_rain(mpd, rain, kRainEdges)) {
            f << node << ',' << format_number(bin.lo) << ','
              << (std::isinf(bin.hi) ? std::string("inf") : format_number(bin.hi)) << ','
              << bin.values.size() << ',';
            if (bin.values.empty()) {
                f << ",\n";
            } else {
                std::sort(bin.values.begin(), bin.values.end());
                f << format_number(percentile(bin.values, 50.0)) << ','
                  << format_number(percentile(bin.values, 99.0)) << '\n';
            }
        }
    }
    return true;
}

bool fig8(const MetricLog& log, const fs::path& dir) {
    const auto nodes = sample_nodes(log);
    if (nodes.empty()) return false;
    auto f = open_out(dir / "fig8_offset_cdf.csv");
    f << "node,offset_ns,fraction\n";
    for (const auto& node : nodes)
        for (const auto& [v, frac] : cdf(log.values(node, Metric::OffsetNs)))
            f << node << ',' << format_number(v) << ',' << format_number(frac) << '\n';
    return true;
}

bool fig9(const MetricLog& log, const fs::path& dir) {
    const auto nodes = sample_nodes(log);
    if (nodes.empty()) return false;
    auto f = open_out(dir / "fig9_wired_vs_wireless.csv");
    f << "node,channel,count,mean_ns,std_ns,min_ns,max_ns,p1_ns,p50_ns,p99_ns\n";
    for (const auto& node : nodes) {
        const auto s = summarize(log.values(node, Metric::OffsetNs));
        const bool wireless = !log.values(node, Metric::SnrDb).empty();
        f << node << ',' << (wireless ? "wireless" : "wired") << ',' << s.count << ','
          << format_number(s.mean) << ',' << format_number(s.std) << ','
          << format_number(s.min) << ',' << format_number(s.max) << ','
          << format_number(s.p1) << ',' << format_number(s.p50) << ','
          << format_number(s.p99) << '\n';
    }
    return true;
}

void write_plot_script(const fs::path& dir, const std::vector<std::string>& produced) {
    auto f = open_out(dir / "plot.gp");
    f << "# gnuplot script for the derived figure CSVs\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n";
    for (const auto& fig : produced) {
        f << "set terminal pngcairo size 1000,600\n"
          << "set output '" << fig << ".png'\n";
        if (fig == "fig3_offset")
            f << "plot 'fig3_offset.csv' using 1:3 with points pointsize 0.2 title 'offset (ns)'\n";
        else if (fig == "fig4_mpd")
            f << "plot 'fig4_mpd.csv' using 1:3 with points pointsize 0.2 title 'mpd (ns)'\n";
        else if (fig == "fig5_hist")
            f << "plot 'fig5_hist.csv' using 2:3 with boxes title 'offset histogram'\n";
        else if (fig == "fig6_mpd_vs_channel")
            f << "plot 'fig6_mpd_vs_channel.csv' using 4:3 with points title 'mpd vs snr'\n";
        else if (fig == "fig7_rainbins")
            f << "plot 'fig7_rainbins.csv' using 2:5 with linespoints title 'mpd p50 by rain'\n";
        else if (fig == "fig8_offset_cdf")
            f << "plot 'fig8_offset_cdf.csv' using 2:3 with steps title 'offset cdf'\n";
        else if (fig == "fig9_wired_vs_wireless")
            f << "plot 'fig9_wired_vs_wireless.csv' using 0:5:xtic(1) with boxes title 'offset std'\n";
    }
}

int report_impl(const fs::path& dir, const std::vector<std::string>& figures,
                bool plot_script, std::ostream& out, std::ostream& err) {
    const MetricLog log = load_metrics_csv((dir / "metrics.csv").string());
    const auto& wanted = figures.empty() ? kAllFigures : figures;
    std::vector<std::string> produced;
    for (const auto& fig : wanted) {
        bool ok = false;
        if (fig == "fig3_offset") ok = fig3(log, dir);
        else if (fig == "fig4_mpd") ok = fig4(log, dir);
        else if (fig == "fig5_hist") ok = fig5(log, dir);
        else if (fig == "fig6_mpd_vs_channel") ok = fig6(log, dir);
        else if (fig == "fig7_rainbins") ok = fig7(log, dir);
        else if (fig == "fig8_offset_cdf") ok = fig8(log, dir);
        else if (fig == "fig9_wired_vs_wireless") ok = fig9(log, dir);
        else {
            err << "E_USAGE unknown figure '" << fig << "'\n";
            return kExitUsage;
        }
        if (ok) {
            produced.push_back(fig);
            out << "wrote " << fig << ".csv\n";
        } else {
            err << "W_SKIP " << fig << ": required metrics absent\n";
        }
    }
    if (produced.empty()) {
        err << "E_VALIDATION no figure could be derived from " << dir.string()
            << "/metrics.csv\n";
        return kExitUsage;
    }
    if (plot_script) write_plot_script(dir, produced);
    return kExitOk;
}

void write_summary(const fs::path& path, const Scenario& scn, const RunResult& result) {
    auto f = open_out(path);
    f << "seed = " << scn.seed << '\n'
      << "duration_s = " << format_number(scn.duration_s) << '\n'
      << "event_count = " << result.event_count << '\n'
      << "convergence_time_ns = " << result.convergence_time << '\n'
      << "discarded_exchanges = " << result.discarded_exchanges << '\n'
      << "ignored_announces = " << result.ignored_announces << '\n'
      << "ports:\n";
    for (const auto& p : result.ports)
        f << "  " << p.node << " p" << p.port_number << ' ' << port_state_name(p.state)
          << " link=" << p.link_id << " peer=" << p.peer << '\n';
}

}  // namespace

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    if (manifest.scenario_path.has_value() == manifest.preset.has_value()) {
        err << "E_USAGE exactly one of --scenario and --preset is required\n";
        return kExitUsage;
    }
    try {
        Scenario scn;
        if (manifest.preset) {
            const auto p = preset_by_name(*manifest.preset);
            if (!p) {
                err << "E_USAGE unknown preset '" << *manifest.preset << "'\n";
                return kExitUsage;
            }
            scn = *p;
        } else {
            std::string text;
            try {
                text = read_file(*manifest.scenario_path);
            } catch (const RangeError& e) {
                err << "E_USAGE " << e.what() << '\n';
                return kExitUsage;
            }
            scn = parse_scenario(text);
        }
        if (manifest.seed) scn.seed = *manifest.seed;
        if (manifest.duration) scn.duration_s = parse_duration_s(*manifest.duration);

        MetricLog log;
        Simulation sim(scn, log);
        const RunResult result = sim.run();

        const fs::path dir(manifest.out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            err << "E_IO cannot create output directory " << dir.string() << '\n';
            return kExitIo;
        }
        const std::size_t rows = export_metrics_csv(log, (dir / "metrics.csv").string());
        write_summary(dir / "summary.txt", scn, result);
        out << "events: " << result.event_count << ", metric rows: " << rows << '\n';

        if (!manifest.figures.empty()) {
            const auto& figs = manifest.figures.front() == "all"
                                   ? kAllFigures
                                   : manifest.figures;
            return report_impl(dir, figs, manifest.plot_script, out, err);
        }
        return kExitOk;
    } catch (const ScenarioError& e) {
        err << "E_VALIDATION " << e.what() << '\n';
        return kExitUsage;
    } catch (const RangeError& e) {
        err << "E_VALIDATION " << e.what() << '\n';
        return kExitUsage;
    } catch (const SimError& e) {
        err << "E_INTERNAL " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        err << "E_INTERNAL " << e.what() << '\n';
        return kExitInternal;
    }
}

int cmd_report(const std::string& dir, const std::vector<std::string>& figures,
               bool plot_script, std::ostream& out, std::ostream& err) {
    try {
        return report_impl(fs::path(dir), figures, plot_script, out, err);
    } catch (const RangeError& e) {
        err << "E_IO " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "E_INTERNAL " << e.what() << '\n';
        return kExitInternal;
    }
}

int cmd_preset(const std::string& subcommand, const std::string& name,
               std::ostream& out, std::ostream& err) {
    if (subcommand == "list") {
        for (const auto& n : preset_names()) out << n << '\n';
        return kExitOk;
    }
    if (subcommand == "show") {
        const auto p = preset_by_name(name);
        if (!p) {
            err << "E_USAGE unknown preset '" << name << "'\n";
            return kExitUsage;
        }
        out << serialize_scenario(*p);
        return kExitOk;
    }
    err << "E_USAGE preset subcommand must be 'list' or 'show'\n";
    return kExitUsage;
}

}  // namespace arasim
