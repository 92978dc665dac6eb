// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arasim/rng.hpp"
#include "arasim/timebase.hpp"

namespace arasim {

enum class LinkKind { Fiber, Wireless };
enum class Direction { Forward, Reverse };

/// Group-index fiber propagation, ~1.47.
constexpr double kFiberNsPerKm = 4900.0;
/// Free-space propagation.
constexpr double kWirelessNsPerKm = 3336.0;

struct LinkSpec {
    LinkKind kind = LinkKind::Fiber;
    double length_km = 1.0;
    double base_residence_ns = 0.0;   ///< fixed equipment/serialization delay per direction
    double jitter_std_ns = 0.0;
    double asymmetry_std_ns = 0.0;    ///< wireless only; slow antisymmetric term
    double asymmetry_tau_s = 60.0;
};

struct WirelessChannelParams {
    double carrier_ghz = 80.0;
    double rsl_clear_dbm = -40.0;
    double noise_floor_dbm = -70.0;
    double atten_k = 1.0;             ///< dB/km at 1 mm/h
    double atten_alpha = 0.7;         ///< rain power-law exponent
    double snr_ref_db = 0.0;          ///< no penalty at or above this SNR
    double penalty_ns_per_db = 0.0;
    double penalty_cap_ns = 0.0;
    double fading_std_db = 0.0;       ///< slow fading, OU-autocorrelated
    double fading_tau_s = 300.0;
    double noise_boost_max = 1.0;     ///< jitter/asymmetry scale at full penalty
};

/// Piecewise-constant rain-rate series; segments left-closed.
class WeatherTrace {
public:
    /// Throws RangeError on an empty trace, unordered segments or negative rates.
    explicit WeatherTrace(std::vector<std::pair<SimTime, double>> segments);

    static WeatherTrace constant(double rain_mmh) {
        return WeatherTrace({{0, rain_mmh}});
    }

    /// Columns `start_s,rain_mmh`, header required, times strictly increasing.
    static WeatherTrace from_csv(const std::string& path);

    /// Rain rate of the segment covering t; throws RangeError before trace start.
    double rain_at(SimTime t) const;

    SimTime start() const { return segments_.front().first; }
    const std::vector<std::pair<SimTime, double>>& segments() const { return segments_; }

private:
    std::vector<std::pair<SimTime, double>> segments_;
};

/// gamma = k * rain^alpha dB/km, gamma(0) = 0.
double specific_attenuation(double rain_mmh, const WirelessChannelParams& params);

struct ChannelSample {
    SimTime at = 0;
    double rain_mmh = 0.0;
    double rsl_dbm = 0.0;
    double snr_db = 0.0;
};

/// One physical link instance. Owns the fading and asymmetry processes and
/// the per-direction jitter streams; all draws are made lazily at query
/// instants so a run is reproducible from (seed, link index) alone.
class LinkModel {
public:
    LinkModel(LinkSpec spec, std::optional<WirelessChannelParams> wireless,
              const WeatherTrace* weather, std::uint64_t seed, std::uint64_t link_index);

    /// Instantaneous RSL/SNR/rain. Throws RangeError for fiber links.
    ChannelSample sample_channel(SimTime t);

    /// One-way delay in ns, clamped >= 1. The deterministic part is
    /// propagation + residence (+ SNR penalty on wireless); jitter and the
    /// antisymmetric term ride on top, both scaled up as the penalty
    /// approaches its cap (degraded-modem proxy).
    std::int64_t one_way_delay(Direction dir, SimTime t);

    /// Deterministic delay component at zero fading for the given rain rate.
    double deterministic_delay_ns(double rain_mmh) const;

    const LinkSpec& spec() const { return spec_; }
    bool wireless() const { return spec_.kind == LinkKind::Wireless; }

private:
    double penalty_ns(double snr_db) const;
    double fading_db(SimTime t);
    double asymmetry_ns(SimTime t);

    LinkSpec spec_;
    std::optional<WirelessChannelParams> wireless_;
    const WeatherTrace* weather_;

    RandomStream jitter_fwd_;
    RandomStream jitter_rev_;
    RandomStream fade_rng_;
    RandomStream asym_rng_;

    double fade_state_db_ = 0.0;
    SimTime fade_last_ = 0;
    double asym_state_ns_ = 0.0;
    SimTime asym_last_ = 0;
};

}  // namespace arasim
