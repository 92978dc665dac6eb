// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace arasim {

// Exit codes shared by all commands.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;  // usage / validation
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

/// Everything one `run` invocation needs. Exactly one of scenario_path /
/// preset must be set.
struct RunManifest {
    std::optional<std::string> scenario_path;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> duration;  // "120s" / "30m" / "2h"
    std::string out_dir = ".";
    std::vector<std::string> figures;     // empty = no report after the run
    bool plot_script = false;
};

extern const std::vector<std::string> kAllFigures;

/// Run a scenario and write metrics.csv + summary.txt under out_dir.
/// Diagnostics go to `err`, one line per problem, prefixed with a greppable
/// code (E_USAGE / E_VALIDATION / E_IO / E_INTERNAL).
int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Derive figure CSVs from <dir>/metrics.csv. Figures whose input metrics
/// are absent are skipped with a warning; all-skipped is an error.
int cmd_report(const std::string& dir, const std::vector<std::string>& figures,
               bool plot_script, std::ostream& out, std::ostream& err);

/// `preset list` / `preset show <name>`.
int cmd_preset(const std::string& subcommand, const std::string& name,
               std::ostream& out, std::ostream& err);

}  // namespace arasim
