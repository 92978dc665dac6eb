// SPDX-License-Identifier: Apache-2.0
#include "arasim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "arasim/errors.hpp"

namespace arasim {

WeatherTrace::WeatherTrace(std::vector<std::pair<SimTime, double>> segments)
    : segments_(std::move(segments)) {
    if (segments_.empty()) throw RangeError("weather trace must have at least one segment");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].second < 0.0) throw RangeError("rain rate must be >= 0");
        if (i > 0 && segments_[i].first <= segments_[i - 1].first)
            throw RangeError("weather segments must be strictly time-ordered");
    }
}

WeatherTrace WeatherTrace::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RangeError("cannot open weather csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw RangeError("empty weather csv: " + path);
    // tolerate a trailing \r from foreign line endings
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "start_s,rain_mmh")
        throw RangeError("weather csv header must be 'start_s,rain_mmh', got '" + line + "'");
    std::vector<std::pair<SimTime, double>> segs;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        double start_s = 0.0, rain = 0.0;
        char comma = 0;
        if (!(ss >> start_s >> comma >> rain) || comma != ',')
            throw RangeError("bad weather csv row: '" + line + "'");
        segs.emplace_back(seconds(start_s), rain);
    }
    return WeatherTrace(std::move(segs));
}

double WeatherTrace::rain_at(SimTime t) const {
    if (t < segments_.front().first)
        throw RangeError("weather trace queried before its first segment");
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](SimTime v, const auto& seg) { return v < seg.first; });
    return std::prev(it)->second;
}

double specific_attenuation(double rain_mmh, const WirelessChannelParams& params) {
    if (rain_mmh < 0.0) throw RangeError("rain rate must be >= 0");
    if (rain_mmh == 0.0) return 0.0;
    return params.atten_k * std::pow(rain_mmh, params.atten_alpha);
}

LinkModel::LinkModel(LinkSpec spec, std::optional<WirelessChannelParams> wireless,
                     const WeatherTrace* weather, std::uint64_t seed, std::uint64_t link_index)
    : spec_(spec),
      wireless_(wireless),
      weather_(weather),
      jitter_fwd_(RandomStream::derive(seed, "link.jitter", link_index, 0)),
      jitter_rev_(RandomStream::derive(seed, "link.jitter", link_index, 1)),
      fade_rng_(RandomStream::derive(seed, "link.fade", link_index)),
      asym_rng_(RandomStream::derive(seed, "link.asym", link_index)) {
    if (spec_.length_km <= 0.0) throw RangeError("link length must be > 0");
    if (spec_.kind == LinkKind::Wireless && !wireless_)
        throw RangeError("wireless link requires channel parameters");
}

double LinkModel::fading_db(SimTime t) {
    const double std_db = wireless_ ? wireless_->fading_std_db : 0.0;
    if (std_db <= 0.0) return 0.0;
    const double dt_s = static_cast<double>(t - fade_last_) / static_cast<double>(kNsPerSec);
    if (dt_s > 0.0) {
        const double rho = std::exp(-dt_s / wireless_->fading_tau_s);
        fade_state_db_ = rho * fade_state_db_ +
                         std_db * std::sqrt(1.0 - rho * rho) * fade_rng_.gauss();
        fade_last_ = t;
    }
    return fade_state_db_;
}

double LinkModel::asymmetry_ns(SimTime t) {
    if (spec_.asymmetry_std_ns <= 0.0) return 0.0;
    const double dt_s = static_cast<double>(t - asym_last_) / static_cast<double>(kNsPerSec);
    if (dt_s > 0.0) {
        const double rho = std::exp(-dt_s / spec_.asymmetry_tau_s);
        asym_state_ns_ = rho * asym_state_ns_ +
                         spec_.asymmetry_std_ns * std::sqrt(1.0 - rho * rho) * asym_rng_.gauss();
        asym_last_ = t;
    }
    return asym_state_ns_;
}

ChannelSample LinkModel::sample_channel(SimTime t) {
    if (!wireless()) throw RangeError("channel_sample is unsupported for fiber links");
    const double rain = weather_ ? weather_->rain_at(t) : 0.0;
    const double gamma = specific_attenuation(rain, *wireless_);
    const double rsl = wireless_->rsl_clear_dbm - gamma * spec_.length_km + fading_db(t);
    return ChannelSample{
        .at = t,
        .rain_mmh = rain,
        .rsl_dbm = rsl,
        .snr_db = rsl - wireless_->noise_floor_dbm,
    };
}

double LinkModel::penalty_ns(double snr_db) const {
    const double deficit = wireless_->snr_ref_db - snr_db;
    if (deficit <= 0.0) return 0.0;
    const double p = wireless_->penalty_ns_per_db * deficit;
    return wireless_->penalty_cap_ns > 0.0 ? std::min(p, wireless_->penalty_cap_ns) : p;
}

double LinkModel::deterministic_delay_ns(double rain_mmh) const {
    if (spec_.kind == LinkKind::Fiber)
        return spec_.length_km * kFiberNsPerKm + spec_.base_residence_ns;
    const double gamma = specific_attenuation(rain_mmh, *wireless_);
    const double snr = wireless_->rsl_clear_dbm - gamma * spec_.length_km -
                       wireless_->noise_floor_dbm;
    return spec_.length_km * kWirelessNsPerKm + spec_.base_residence_ns + penalty_ns(snr);
}

std::int64_t LinkModel::one_way_delay(Direction dir, SimTime t) {
    double delay;
    RandomStream& jitter_rng = dir == Direction::Forward ? jitter_fwd_ : jitter_rev_;
    if (spec_.kind == LinkKind::Fiber) {
        delay = spec_.length_km * kFiberNsPerKm + spec_.base_residence_ns;
        if (spec_.jitter_std_ns > 0.0) delay += jitter_rng.gauss(0.0, spec_.jitter_std_ns);
    } else {
        const ChannelSample cs = sample_channel(t);
        const double pen = penalty_ns(cs.snr_db);
        // Degraded link noise: jitter and asymmetry grow with the penalty.
        double boost = 1.0;
        if (wireless_->penalty_cap_ns > 0.0 && wireless_->noise_boost_max > 1.0)
            boost = 1.0 + (pen / wireless_->penalty_cap_ns) * (wireless_->noise_boost_max - 1.0);
        delay = spec_.length_km * kWirelessNsPerKm + spec_.base_residence_ns + pen;
        if (spec_.jitter_std_ns > 0.0)
            delay += jitter_rng.gauss(0.0, spec_.jitter_std_ns * boost);
        const double a = asymmetry_ns(t) * boost;
        delay += dir == Direction::Forward ? a : -a;
    }
    return std::max<std::int64_t>(1, std::llround(delay));
}

}  // namespace arasim
