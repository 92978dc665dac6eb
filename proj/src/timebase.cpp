// SPDX-License-Identifier: Apache-2.0
#include "arasim/timebase.hpp"

#include <cmath>

#include "arasim/errors.hpp"

namespace arasim {

namespace {
constexpr double kMaxTotalFreqErrorPpb = 1e6;
}

LocalClock::LocalClock(const OscillatorParams& params)
    : params_(params),
      freq_offset_ppb_(params.freq_offset_ppb),
      accumulated_local_ns_(params.initial_phase_ns) {}

std::int64_t LocalClock::elapsed_local(SimTime t_true) const {
    if (t_true < last_update_)
        throw OrderingError("clock queried at t earlier than last update");
    const std::int64_t dt = t_true - last_update_;
    const double total_ppb = freq_offset_ppb_ + freq_adjust_ppb_;
    // dt is exact; only the fractional rate term goes through floating point.
    return dt + std::llround(total_ppb * 1e-9 * static_cast<double>(dt));
}

std::int64_t LocalClock::read(SimTime t_true, RandomStream& rng) const {
    std::int64_t v = accumulated_local_ns_ + elapsed_local(t_true) + phase_correction_ns_;
    if (params_.white_noise_ns > 0.0)
        v += std::llround(rng.gauss(0.0, params_.white_noise_ns));
    return v;
}

std::int64_t LocalClock::read_nominal(SimTime t_true) const {
    return accumulated_local_ns_ + elapsed_local(t_true) + phase_correction_ns_;
}

void LocalClock::advance(SimTime t_true, RandomStream& rng) {
    const std::int64_t add = elapsed_local(t_true);  // throws on ordering violation
    const std::int64_t dt = t_true - last_update_;
    accumulated_local_ns_ += add;
    if (params_.freq_walk_ppb_per_sqrt_s > 0.0 && dt > 0) {
        const double dt_s = static_cast<double>(dt) / static_cast<double>(kNsPerSec);
        freq_offset_ppb_ += rng.gauss(0.0, params_.freq_walk_ppb_per_sqrt_s * std::sqrt(dt_s));
    }
    last_update_ = t_true;
}

void LocalClock::apply_phase_step(std::int64_t delta_ns) {
    phase_correction_ns_ += delta_ns;
}

void LocalClock::apply_freq_adjust(double ppb) {
    if (std::abs(freq_offset_ppb_ + ppb) >= kMaxTotalFreqErrorPpb)
        throw RangeError("frequency adjustment would exceed 1e6 ppb total error");
    freq_adjust_ppb_ = ppb;
}

}  // namespace arasim
