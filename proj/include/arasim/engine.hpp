// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "arasim/analysis.hpp"
#include "arasim/channel.hpp"
#include "arasim/proto.hpp"
#include "arasim/scenario.hpp"
#include "arasim/syncmath.hpp"
#include "arasim/timebase.hpp"

namespace arasim {

/// Final per-port view of a run, enough to reconstruct the sync tree.
struct PortInfo {
    std::string node;
    int port_number = 0;
    PortState state = PortState::Initializing;
    std::string link_id;
    std::string peer;
};

struct RunResult {
    std::uint64_t event_count = 0;
    SimTime convergence_time = 0;  ///< time of the last port-state change
    std::vector<PortInfo> ports;
    std::uint64_t discarded_exchanges = 0;
    std::uint64_t ignored_announces = 0;
    std::uint64_t trace_hash = 0;  ///< order-sensitive hash of the event trace
};

/// One deterministic single-threaded simulation run. Metrics are appended to
/// the provided log. Construction draws per-node oscillator parameters and
/// per-link noise substreams from the scenario seed; two Simulations built
/// from the same scenario produce bit-identical results.
class Simulation {
public:
    /// Throws ScenarioError listing all violations when the scenario is invalid.
    Simulation(const Scenario& scenario, MetricLog& log);
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Run to the scenario duration.
    RunResult run();

    /// Run to an explicit end time (test hook). May be called repeatedly with
    /// non-decreasing times.
    RunResult run_until(SimTime t_end);

    SimTime now() const;

    /// Current port state (test hook); port_number is 1-based.
    PortState port_state(const std::string& node, int port_number) const;

    /// Measured offset of the node's most recent servo sample, if any.
    std::optional<std::int64_t> last_offset(const std::string& node) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace arasim
