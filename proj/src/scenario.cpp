// SPDX-License-Identifier: Apache-2.0
#include "arasim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "arasim/analysis.hpp"
#include "arasim/errors.hpp"

namespace arasim {

const char* role_name(Role r) {
    switch (r) {
        case Role::Gmc: return "gmc";
        case Role::Bc: return "bc";
        case Role::Oc: return "oc";
        case Role::TcE2e: return "tc_e2e";
        case Role::TcP2p: return "tc_p2p";
    }
    return "?";
}

namespace {

std::optional<Role> role_from_name(const std::string& s) {
    for (Role r : {Role::Gmc, Role::Bc, Role::Oc, Role::TcE2e, Role::TcP2p})
        if (s == role_name(r)) return r;
    return std::nullopt;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

struct RawEntry {
    std::string key;    // remainder after section (and id)
    std::string value;
    int line;
};

double parse_num(const RawEntry& e) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
        throw ScenarioError(e.line, "expected a number for '" + e.key + "', got '" + e.value + "'");
    }
    if (pos != e.value.size())
        throw ScenarioError(e.line, "trailing junk after number in '" + e.value + "'");
    return v;
}

bool parse_bool(const RawEntry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ScenarioError(e.line, "expected true/false for '" + e.key + "'");
}

void apply_role_defaults(NodeSpec& n) {
    switch (n.role) {
        case Role::Gmc:
            n.two_step = false;
            n.clock_class = 6;
            n.clock_accuracy = 0x21;
            n.variance = 0x4E5D;
            n.osc = {};
            break;
        case Role::Bc:
        case Role::Oc:
            n.two_step = true;
            n.draw_freq_offset = true;
            n.draw_initial_phase = true;
            n.osc.freq_walk_ppb_per_sqrt_s = 0.5;
            n.osc.white_noise_ns = 5.0;
            break;
        case Role::TcE2e:
        case Role::TcP2p:
            n.two_step = true;
            n.osc = {};
            break;
    }
}

void apply_node_field(NodeSpec& n, const RawEntry& e) {
    const std::string& k = e.key;
    if (k == "role") return;  // handled first
    if (k == "two_step") n.two_step = parse_bool(e);
    else if (k == "priority1") n.priority1 = static_cast<std::uint8_t>(parse_num(e));
    else if (k == "priority2") n.priority2 = static_cast<std::uint8_t>(parse_num(e));
    else if (k == "clock_class") n.clock_class = static_cast<std::uint8_t>(parse_num(e));
    else if (k == "clock_accuracy") n.clock_accuracy = static_cast<std::uint8_t>(parse_num(e));
    else if (k == "variance") n.variance = static_cast<std::uint16_t>(parse_num(e));
    else if (k == "freq_offset_ppb") {
        if (e.value == "random") {
            n.draw_freq_offset = true;
        } else {
            n.draw_freq_offset = false;
            n.osc.freq_offset_ppb = parse_num(e);
        }
    } else if (k == "initial_phase_ns") {
        if (e.value == "random") {
            n.draw_initial_phase = true;
        } else {
            n.draw_initial_phase = false;
            n.osc.initial_phase_ns = static_cast<std::int64_t>(parse_num(e));
        }
    } else if (k == "freq_walk_ppb_per_sqrt_s") n.osc.freq_walk_ppb_per_sqrt_s = parse_num(e);
    else if (k == "white_noise_ns") n.osc.white_noise_ns = parse_num(e);
    else if (k == "servo_kp") n.servo.kp = parse_num(e);
    else if (k == "servo_ki") n.servo.ki = parse_num(e);
    else if (k == "step_threshold_ns") n.servo.step_threshold_ns = static_cast<std::int64_t>(parse_num(e));
    else if (k == "lock_threshold_ns") n.servo.lock_threshold_ns = static_cast<std::int64_t>(parse_num(e));
    else if (k == "tc_residence_ns") n.tc_residence_ns = static_cast<std::int64_t>(parse_num(e));
    else throw ScenarioError(e.line, "unknown node key '" + k + "'");
}

void apply_link_field(LinkDecl& l, const RawEntry& e) {
    const std::string& k = e.key;
    auto wireless = [&]() -> WirelessChannelParams& {
        if (!l.wireless) l.wireless.emplace();
        return *l.wireless;
    };
    if (k == "endpoints") {
        std::istringstream ss(e.value);
        std::string extra;
        if (!(ss >> l.node_a >> l.node_b) || (ss >> extra))
            throw ScenarioError(e.line, "endpoints must name exactly two nodes");
    } else if (k == "kind") {
        if (e.value == "fiber") l.spec.kind = LinkKind::Fiber;
        else if (e.value == "wireless") l.spec.kind = LinkKind::Wireless;
        else throw ScenarioError(e.line, "link kind must be fiber or wireless");
    } else if (k == "length_km") l.spec.length_km = parse_num(e);
    else if (k == "base_residence_ns") l.spec.base_residence_ns = parse_num(e);
    else if (k == "jitter_std_ns") l.spec.jitter_std_ns = parse_num(e);
    else if (k == "asymmetry_std_ns") l.spec.asymmetry_std_ns = parse_num(e);
    else if (k == "asymmetry_tau_s") l.spec.asymmetry_tau_s = parse_num(e);
    else if (k == "carrier_ghz") wireless().carrier_ghz = parse_num(e);
    else if (k == "rsl_clear_dbm") wireless().rsl_clear_dbm = parse_num(e);
    else if (k == "noise_floor_dbm") wireless().noise_floor_dbm = parse_num(e);
    else if (k == "atten_k") wireless().atten_k = parse_num(e);
    else if (k == "atten_alpha") wireless().atten_alpha = parse_num(e);
    else if (k == "snr_ref_db") wireless().snr_ref_db = parse_num(e);
    else if (k == "penalty_ns_per_db") wireless().penalty_ns_per_db = parse_num(e);
    else if (k == "penalty_cap_ns") wireless().penalty_cap_ns = parse_num(e);
    else if (k == "fading_std_db") wireless().fading_std_db = parse_num(e);
    else if (k == "fading_tau_s") wireless().fading_tau_s = parse_num(e);
    else if (k == "noise_boost_max") wireless().noise_boost_max = parse_num(e);
    else throw ScenarioError(e.line, "unknown link key '" + k + "'");
}

}  // namespace

WeatherTrace Scenario::weather_trace() const {
    if (weather_csv) return WeatherTrace::from_csv(*weather_csv);
    std::vector<std::pair<SimTime, double>> segs;
    segs.reserve(weather_segments.size());
    for (const auto& [start_s, rain] : weather_segments) segs.emplace_back(seconds(start_s), rain);
    return WeatherTrace(std::move(segs));
}

double parse_duration_s(const std::string& text) {
    if (text.empty()) throw RangeError("empty duration");
    double scale = 1.0;
    std::string num = text;
    switch (text.back()) {
        case 's': scale = 1.0; num.pop_back(); break;
        case 'm': scale = 60.0; num.pop_back(); break;
        case 'h': scale = 3600.0; num.pop_back(); break;
        default: break;
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(num, &pos);
    } catch (const std::exception&) {
        throw RangeError("bad duration '" + text + "'");
    }
    if (pos != num.size()) throw RangeError("bad duration '" + text + "'");
    return v * scale;
}

Scenario parse_scenario(std::string_view text) {
    // Gather raw entries per section first; role defaults depend on the whole
    // stanza, not on key order.
    std::vector<std::pair<std::string, std::vector<RawEntry>>> node_raw;  // ordered by appearance
    std::vector<std::pair<std::string, std::vector<RawEntry>>> link_raw;
    std::vector<RawEntry> run_raw;
    std::vector<RawEntry> weather_raw;

    auto stanza = [](auto& list, const std::string& id) -> std::vector<RawEntry>& {
        for (auto& [sid, entries] : list)
            if (sid == id) return entries;
        list.emplace_back(id, std::vector<RawEntry>{});
        return list.back().second;
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw_line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string line{raw_line};
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ScenarioError(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ScenarioError(line_no, "expected 'key = value'");

        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            const auto dot = key.find('.', start);
            parts.push_back(key.substr(start, dot == std::string::npos ? key.size() - start : dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }

        if (parts[0] == "node" && parts.size() == 3) {
            stanza(node_raw, parts[1]).push_back({parts[2], value, line_no});
        } else if (parts[0] == "link" && parts.size() == 3) {
            stanza(link_raw, parts[1]).push_back({parts[2], value, line_no});
        } else if (parts[0] == "run" && parts.size() == 2) {
            run_raw.push_back({parts[1], value, line_no});
        } else if (parts[0] == "weather" && parts.size() == 2) {
            weather_raw.push_back({parts[1], value, line_no});
        } else {
            throw ScenarioError(line_no, "unknown section or key '" + key + "'");
        }
    }

    Scenario s;

    for (const auto& [id, entries] : node_raw) {
        NodeSpec n;
        n.id = id;
        const auto role_it = std::find_if(entries.begin(), entries.end(),
                                          [](const RawEntry& e) { return e.key == "role"; });
        if (role_it == entries.end())
            throw ScenarioError(entries.front().line, "node '" + id + "' has no role");
        const auto role = role_from_name(role_it->value);
        if (!role) throw ScenarioError(role_it->line, "unknown role '" + role_it->value + "'");
        n.role = *role;
        apply_role_defaults(n);
        for (const auto& e : entries) apply_node_field(n, e);
        s.nodes.push_back(std::move(n));
    }

    for (const auto& [id, entries] : link_raw) {
        LinkDecl l;
        l.id = id;
        for (const auto& e : entries) apply_link_field(l, e);
        if (l.node_a.empty() || l.node_b.empty())
            throw ScenarioError(entries.front().line, "link '" + id + "' has no endpoints");
        for (const std::string& ep : {l.node_a, l.node_b}) {
            if (std::none_of(s.nodes.begin(), s.nodes.end(),
                             [&](const NodeSpec& n) { return n.id == ep; }))
                throw ScenarioError(entries.front().line,
                                    "link '" + id + "' references unknown node '" + ep + "'");
        }
        s.links.push_back(std::move(l));
    }

    bool weather_cleared = false;
    for (const auto& e : weather_raw) {
        if (e.key == "segment") {
            if (!weather_cleared) {
                s.weather_segments.clear();
                weather_cleared = true;
            }
            std::istringstream ss(e.value);
            double start_s = 0.0, rain = 0.0;
            std::string extra;
            if (!(ss >> start_s >> rain) || (ss >> extra))
                throw ScenarioError(e.line, "weather segment must be '<start_s> <rain_mmh>'");
            s.weather_segments.emplace_back(start_s, rain);
        } else if (e.key == "csv") {
            s.weather_csv = e.value;
        } else {
            throw ScenarioError(e.line, "unknown weather key '" + e.key + "'");
        }
    }

    for (const auto& e : run_raw) {
        if (e.key == "domain") s.domain_number = static_cast<int>(parse_num(e));
        else if (e.key == "duration") {
            try {
                s.duration_s = parse_duration_s(e.value);
            } catch (const RangeError& err) {
                throw ScenarioError(e.line, err.what());
            }
        } else if (e.key == "seed") s.seed = static_cast<std::uint64_t>(parse_num(e));
        else if (e.key == "announce_pps") s.announce_pps = parse_num(e);
        else if (e.key == "sync_pps") s.sync_pps = parse_num(e);
        else if (e.key == "delay_req_pps") s.delay_req_pps = parse_num(e);
        else if (e.key == "timestamp_granularity_ns")
            s.timestamp_granularity_ns = static_cast<std::int64_t>(parse_num(e));
        else if (e.key == "metrics") s.metrics_path = e.value;
        else throw ScenarioError(e.line, "unknown run key '" + e.key + "'");
    }

    return s;
}

namespace {

std::string fmt(double v) { return format_number(v); }

}  // namespace

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "# arasim scenario\n";
    out << "run.domain = " << s.domain_number << "\n";
    out << "run.duration = " << fmt(s.duration_s) << "s\n";
    out << "run.seed = " << s.seed << "\n";
    out << "run.announce_pps = " << fmt(s.announce_pps) << "\n";
    out << "run.sync_pps = " << fmt(s.sync_pps) << "\n";
    out << "run.delay_req_pps = " << fmt(s.delay_req_pps) << "\n";
    out << "run.timestamp_granularity_ns = " << s.timestamp_granularity_ns << "\n";
    out << "run.metrics = " << s.metrics_path << "\n";

    for (const auto& n : s.nodes) {
        const std::string p = "node." + n.id + ".";
        out << "\n";
        out << p << "role = " << role_name(n.role) << "\n";
        out << p << "two_step = " << (n.two_step ? "true" : "false") << "\n";
        out << p << "priority1 = " << static_cast<int>(n.priority1) << "\n";
        out << p << "priority2 = " << static_cast<int>(n.priority2) << "\n";
        out << p << "clock_class = " << static_cast<int>(n.clock_class) << "\n";
        out << p << "clock_accuracy = " << static_cast<int>(n.clock_accuracy) << "\n";
        out << p << "variance = " << n.variance << "\n";
        if (n.draw_freq_offset)
            out << p << "freq_offset_ppb = random\n";
        else
            out << p << "freq_offset_ppb = " << fmt(n.osc.freq_offset_ppb) << "\n";
        if (n.draw_initial_phase)
            out << p << "initial_phase_ns = random\n";
        else
            out << p << "initial_phase_ns = " << n.osc.initial_phase_ns << "\n";
        out << p << "freq_walk_ppb_per_sqrt_s = " << fmt(n.osc.freq_walk_ppb_per_sqrt_s) << "\n";
        out << p << "white_noise_ns = " << fmt(n.osc.white_noise_ns) << "\n";
        out << p << "servo_kp = " << fmt(n.servo.kp) << "\n";
        out << p << "servo_ki = " << fmt(n.servo.ki) << "\n";
        out << p << "step_threshold_ns = " << n.servo.step_threshold_ns << "\n";
        out << p << "lock_threshold_ns = " << n.servo.lock_threshold_ns << "\n";
        if (n.role == Role::TcE2e || n.role == Role::TcP2p)
            out << p << "tc_residence_ns = " << n.tc_residence_ns << "\n";
    }

    for (const auto& l : s.links) {
        const std::string p = "link." + l.id + ".";
        out << "\n";
        out << p << "endpoints = " << l.node_a << " " << l.node_b << "\n";
        out << p << "kind = " << (l.spec.kind == LinkKind::Fiber ? "fiber" : "wireless") << "\n";
        out << p << "length_km = " << fmt(l.spec.length_km) << "\n";
        out << p << "base_residence_ns = " << fmt(l.spec.base_residence_ns) << "\n";
        out << p << "jitter_std_ns = " << fmt(l.spec.jitter_std_ns) << "\n";
        out << p << "asymmetry_std_ns = " << fmt(l.spec.asymmetry_std_ns) << "\n";
        out << p << "asymmetry_tau_s = " << fmt(l.spec.asymmetry_tau_s) << "\n";
        if (l.wireless) {
            const auto& w = *l.wireless;
            out << p << "carrier_ghz = " << fmt(w.carrier_ghz) << "\n";
            out << p << "rsl_clear_dbm = " << fmt(w.rsl_clear_dbm) << "\n";
            out << p << "noise_floor_dbm = " << fmt(w.noise_floor_dbm) << "\n";
            out << p << "atten_k = " << fmt(w.atten_k) << "\n";
            out << p << "atten_alpha = " << fmt(w.atten_alpha) << "\n";
            out << p << "snr_ref_db = " << fmt(w.snr_ref_db) << "\n";
            out << p << "penalty_ns_per_db = " << fmt(w.penalty_ns_per_db) << "\n";
            out << p << "penalty_cap_ns = " << fmt(w.penalty_cap_ns) << "\n";
            out << p << "fading_std_db = " << fmt(w.fading_std_db) << "\n";
            out << p << "fading_tau_s = " << fmt(w.fading_tau_s) << "\n";
            out << p << "noise_boost_max = " << fmt(w.noise_boost_max) << "\n";
        }
    }

    out << "\n";
    if (s.weather_csv) {
        out << "weather.csv = " << *s.weather_csv << "\n";
    } else {
        for (const auto& [start_s, rain] : s.weather_segments)
            out << "weather.segment = " << fmt(start_s) << " " << fmt(rain) << "\n";
    }
    return out.str();
}

std::vector<std::string> validate(const Scenario& s) {
    std::vector<std::string> v;

    const auto gmc_count = std::count_if(s.nodes.begin(), s.nodes.end(),
                                         [](const NodeSpec& n) { return n.role == Role::Gmc; });
    if (gmc_count == 0) v.push_back("no grandmaster defined");
    if (gmc_count > 1) v.push_back("multiple grandmasters defined");

    if (s.domain_number < 24 || s.domain_number > 43)
        v.push_back("domain_number " + std::to_string(s.domain_number) +
                    " outside the profile range 24-43");
    if (s.announce_pps <= 0 || s.sync_pps <= 0 || s.delay_req_pps <= 0)
        v.push_back("message rates must be > 0");
    if (s.duration_s <= 0) v.push_back("duration must be > 0");
    if (s.timestamp_granularity_ns < 1) v.push_back("timestamp granularity must be >= 1 ns");
    if (s.nodes.empty()) v.push_back("scenario has no nodes");

    for (const auto& n : s.nodes) {
        if (n.role == Role::Gmc && !n.osc.ideal() )
            v.push_back("grandmaster '" + n.id + "' must have a zero-error oscillator");
        if (n.osc.freq_walk_ppb_per_sqrt_s < 0 || n.osc.white_noise_ns < 0)
            v.push_back("node '" + n.id + "' has negative noise magnitudes");
        if (n.servo.kp <= 0 || n.servo.ki <= 0)
            v.push_back("node '" + n.id + "' servo gains must be > 0");
    }

    // Link sanity + per-node degree.
    std::map<std::string, int> degree;
    for (const auto& n : s.nodes) degree[n.id] = 0;
    for (const auto& l : s.links) {
        if (degree.count(l.node_a)) ++degree[l.node_a];
        else v.push_back("link '" + l.id + "' references unknown node '" + l.node_a + "'");
        if (degree.count(l.node_b)) ++degree[l.node_b];
        else v.push_back("link '" + l.id + "' references unknown node '" + l.node_b + "'");
        if (l.spec.length_km <= 0) v.push_back("link '" + l.id + "' length must be > 0");
        if (l.spec.base_residence_ns < 0 || l.spec.jitter_std_ns < 0 || l.spec.asymmetry_std_ns < 0)
            v.push_back("link '" + l.id + "' has negative ns fields");
        if (l.spec.kind == LinkKind::Wireless && !l.wireless)
            v.push_back("wireless link '" + l.id + "' has no channel parameters");
        if (l.wireless) {
            const auto& w = *l.wireless;
            if (w.carrier_ghz <= 0 || w.atten_k <= 0 || w.atten_alpha <= 0)
                v.push_back("link '" + l.id + "' channel constants must be > 0");
            if (w.penalty_ns_per_db < 0 || w.penalty_cap_ns < 0 || w.fading_std_db < 0)
                v.push_back("link '" + l.id + "' penalty/fading parameters must be >= 0");
        }
    }

    for (const auto& n : s.nodes) {
        const int d = degree.count(n.id) ? degree[n.id] : 0;
        if (n.role == Role::Oc && d != 1)
            v.push_back("ordinary clock '" + n.id + "' must have exactly one link");
        if ((n.role == Role::TcE2e || n.role == Role::TcP2p) && d != 2)
            v.push_back("transparent clock '" + n.id + "' must have exactly two links");
        if (d == 0 && !s.nodes.empty() && s.nodes.size() > 1)
            v.push_back("node '" + n.id + "' is not attached to any link");
    }

    // Connectivity over declared links (union-find).
    if (!s.nodes.empty()) {
        std::map<std::string, std::string> parent;
        for (const auto& n : s.nodes) parent[n.id] = n.id;
        std::function<std::string(const std::string&)> find = [&](const std::string& x) {
            return parent[x] == x ? x : parent[x] = find(parent[x]);
        };
        for (const auto& l : s.links)
            if (parent.count(l.node_a) && parent.count(l.node_b))
                parent[find(l.node_a)] = find(l.node_b);
        const std::string root = find(s.nodes.front().id);
        for (const auto& n : s.nodes)
            if (find(n.id) != root) {
                v.push_back("topology is not connected");
                break;
            }
    }

    // Weather coverage of [0, duration].
    try {
        const WeatherTrace trace = s.weather_trace();
        if (trace.start() > 0)
            v.push_back("weather trace starts after t=0 and does not cover the run");
    } catch (const std::exception& e) {
        v.push_back(std::string("weather trace invalid: ") + e.what());
    }

    return v;
}

Scenario ara_preset() {
    Scenario s;
    s.domain_number = 24;
    s.announce_pps = 8;
    s.sync_pps = 16;
    s.delay_req_pps = 16;
    s.duration_s = 7200;
    s.seed = 1;
    s.timestamp_granularity_ns = 8;

    auto node = [&](std::string id, Role role) -> NodeSpec& {
        NodeSpec n;
        n.id = std::move(id);
        n.role = role;
        apply_role_defaults(n);
        s.nodes.push_back(std::move(n));
        return s.nodes.back();
    };

    node("gmc", Role::Gmc);
    node("wilson_hall", Role::Bc);
    node("data_center", Role::Bc);
    auto& agronomy = node("agronomy_farm", Role::Bc);
    // Noisy wireless offsets: the default lock window would stall calibration.
    agronomy.servo.lock_threshold_ns = 8000;
    node("oc_wilson_hall", Role::Oc);
    node("oc_data_center", Role::Oc);
    node("oc_agronomy_farm", Role::Oc);

    auto fiber = [&](std::string id, std::string a, std::string b, double length_km,
                     double residence_ns, double jitter_ns) {
        LinkDecl l;
        l.id = std::move(id);
        l.node_a = std::move(a);
        l.node_b = std::move(b);
        l.spec = {LinkKind::Fiber, length_km, residence_ns, jitter_ns, 0.0, 60.0};
        s.links.push_back(std::move(l));
    };

    // GMC direct attach to the first-level BC.
    fiber("gmc_wilson", "gmc", "wilson_hall", 0.05, 200, 4);
    // Calibrated one-way delay 1.8 km * 4900 + 5180 = 14000 ns.
    fiber("wilson_dc", "wilson_hall", "data_center", 1.8, 5180, 7);
    // Redundant second path the BMCA prunes to passive.
    fiber("dc_agronomy", "data_center", "agronomy_farm", 1.8, 5180, 7);
    fiber("wilson_oc", "wilson_hall", "oc_wilson_hall", 0.05, 200, 4);
    fiber("dc_oc", "data_center", "oc_data_center", 0.05, 200, 4);
    fiber("agronomy_oc", "agronomy_farm", "oc_agronomy_farm", 0.05, 200, 4);

    // The long-range wireless hop: 10.15 km at 3336 ns/km = 33860.4 ns of
    // propagation; residence makes the clear-sky one-way delay 60000 ns.
    LinkDecl w;
    w.id = "wilson_agronomy";
    w.node_a = "wilson_hall";
    w.node_b = "agronomy_farm";
    w.spec = {LinkKind::Wireless, 10.15, 26139.6, 2600, 3000, 60.0};
    WirelessChannelParams wp;
    wp.carrier_ghz = 80;
    wp.rsl_clear_dbm = -40;
    wp.noise_floor_dbm = -70;
    // Calibrated so rain >= 0.1 mm/h saturates the penalty cap while
    // <= 0.05 mm/h stays inside the 5 dB headroom below clear-sky SNR.
    wp.atten_k = 205.7;
    wp.atten_alpha = 2.32;
    wp.snr_ref_db = 25;
    wp.penalty_ns_per_db = 4000;
    wp.penalty_cap_ns = 20000;
    wp.fading_std_db = 1.5;
    wp.fading_tau_s = 300;
    wp.noise_boost_max = 6;
    w.wireless = wp;
    s.links.push_back(std::move(w));

    s.weather_segments = {{0.0, 0.0}};
    return s;
}

std::vector<std::string> preset_names() { return {"ara"}; }

std::optional<Scenario> preset_by_name(const std::string& name) {
    if (name == "ara") return ara_preset();
    return std::nullopt;
}

}  // namespace arasim
