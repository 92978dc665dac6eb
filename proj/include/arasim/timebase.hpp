// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "arasim/rng.hpp"

namespace arasim {

/// Nanoseconds since the simulation epoch (epoch = 0, event times >= 0).
using SimTime = std::int64_t;

constexpr SimTime kNsPerSec = 1'000'000'000;

constexpr SimTime seconds(double s) {
    return static_cast<SimTime>(s * static_cast<double>(kNsPerSec));
}

/// Free-running oscillator imperfections. A grandmaster has all fields zero.
struct OscillatorParams {
    std::int64_t initial_phase_ns = 0;
    double freq_offset_ppb = 0.0;            ///< static frequency error
    double freq_walk_ppb_per_sqrt_s = 0.0;   ///< random-walk density
    double white_noise_ns = 0.0;             ///< per-read white phase noise

    bool ideal() const {
        return initial_phase_ns == 0 && freq_offset_ppb == 0.0 &&
               freq_walk_ppb_per_sqrt_s == 0.0 && white_noise_ns == 0.0;
    }
};

/// Two-state clock model: phase plus frequency, with a frequency random walk
/// and white phase noise. Servo corrections are kept separate from the
/// oscillator's own error so the two can be reasoned about independently.
///
/// Noise is evaluated lazily at query instants; `advance` commits the elapsed
/// interval and performs one random-walk step, `read` is side-effect free on
/// the committed state (it only consumes the rng for white noise).
class LocalClock {
public:
    LocalClock() = default;
    explicit LocalClock(const OscillatorParams& params);

    /// Local timestamp at true time `t_true`. Throws OrderingError if
    /// `t_true` precedes the last committed update.
    std::int64_t read(SimTime t_true, RandomStream& rng) const;

    /// As `read` but without white phase noise; used for truth-series metrics.
    std::int64_t read_nominal(SimTime t_true) const;

    /// Commit the interval [last_update, t_true]; one random-walk step of the
    /// frequency with std = density * sqrt(dt in s).
    void advance(SimTime t_true, RandomStream& rng);

    /// Shift all subsequent reads by exactly `delta_ns`.
    void apply_phase_step(std::int64_t delta_ns);

    /// Absolute set (not accumulate). Throws RangeError when the resulting
    /// total frequency error reaches 1e6 ppb.
    void apply_freq_adjust(double ppb);

    double freq_offset_ppb() const { return freq_offset_ppb_; }
    double freq_adjust_ppb() const { return freq_adjust_ppb_; }
    std::int64_t phase_correction_ns() const { return phase_correction_ns_; }
    SimTime last_update() const { return last_update_; }
    const OscillatorParams& params() const { return params_; }

private:
    std::int64_t elapsed_local(SimTime t_true) const;

    OscillatorParams params_{};
    double freq_offset_ppb_ = 0.0;   // current oscillator frequency (walks)
    double freq_adjust_ppb_ = 0.0;   // servo-applied
    std::int64_t phase_correction_ns_ = 0;
    std::int64_t accumulated_local_ns_ = 0;
    SimTime last_update_ = 0;
};

}  // namespace arasim
