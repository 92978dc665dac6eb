// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arasim/channel.hpp"
#include "arasim/syncmath.hpp"
#include "arasim/timebase.hpp"

namespace arasim {

enum class Role { Gmc, Bc, Oc, TcE2e, TcP2p };

const char* role_name(Role r);

struct ServoConfig {
    double kp = 0.7;
    double ki = 0.3;
    std::int64_t step_threshold_ns = 100'000;
    std::int64_t lock_threshold_ns = 1'000;
};

struct NodeSpec {
    std::string id;
    Role role = Role::Oc;
    bool two_step = true;  // GMC default is one-step

    // Oscillator; `draw_*` means "draw once per node from the run seed".
    OscillatorParams osc;
    bool draw_freq_offset = false;
    bool draw_initial_phase = false;

    // Announce/BMCA quality.
    std::uint8_t priority1 = 128;
    std::uint8_t clock_class = 248;
    std::uint8_t clock_accuracy = 0xFE;
    std::uint16_t variance = 0xFFFF;
    std::uint8_t priority2 = 128;

    ServoConfig servo;
    std::int64_t tc_residence_ns = 0;
};

struct LinkDecl {
    std::string id;
    std::string node_a;
    std::string node_b;
    LinkSpec spec;
    std::optional<WirelessChannelParams> wireless;
};

struct Scenario {
    std::vector<NodeSpec> nodes;
    std::vector<LinkDecl> links;
    std::vector<std::pair<double, double>> weather_segments = {{0.0, 0.0}};  // (start_s, mm/h)
    std::optional<std::string> weather_csv;

    double announce_pps = 8.0;
    double sync_pps = 16.0;
    double delay_req_pps = 16.0;  // the profile's "Delay Response" rate
    int domain_number = 24;
    double duration_s = 7200.0;
    std::uint64_t seed = 1;
    std::int64_t timestamp_granularity_ns = 8;
    std::string metrics_path = "metrics.csv";

    WeatherTrace weather_trace() const;  // resolves csv reference if present
};

/// Parse the line-oriented `section.key = value` format. Throws ScenarioError
/// with a line number on syntax problems, duplicate ids, unknown keys or
/// dangling link endpoints. Semantic invariants are reported by validate().
Scenario parse_scenario(std::string_view text);

/// Canonical text form; parse(serialize(s)) round-trips.
std::string serialize_scenario(const Scenario& s);

/// Full violation list (never just the first); empty means valid.
std::vector<std::string> validate(const Scenario& s);

/// The built-in 3-level preset: GMC -> first-level BC, wireless and fiber
/// second-level BCs (with the redundant fiber path the BMCA prunes), one OC
/// per BC; 8/16/16 pps, domain 24, one-step GMC, two-step BCs.
Scenario ara_preset();

std::vector<std::string> preset_names();
std::optional<Scenario> preset_by_name(const std::string& name);

/// "120s" / "30m" / "2h" / bare seconds. Throws RangeError on bad input.
double parse_duration_s(const std::string& text);

}  // namespace arasim
