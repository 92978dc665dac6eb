// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "arasim/timebase.hpp"

namespace arasim {

/// The four timestamps of one end-to-end delay exchange. t1/t4 are read on
/// the master clock, t2/t3 on the slave clock. `correction_fwd_ns` is the
/// accumulated transparent-clock residence on the Sync path,
/// `correction_rev_ns` the residence accumulated by the DelayReq and echoed
/// back in the DelayResp.
struct SyncExchange {
    std::optional<std::int64_t> t1;  ///< master send (Sync)
    std::optional<std::int64_t> t2;  ///< slave receive
    std::optional<std::int64_t> t3;  ///< slave send (DelayReq)
    std::optional<std::int64_t> t4;  ///< master receive
    std::int64_t correction_fwd_ns = 0;
    std::int64_t correction_rev_ns = 0;

    bool complete() const { return t1 && t2 && t3 && t4; }
};

/// One derived measurement: offset (slave minus master) and mean path delay,
/// both integer ns, rounded toward zero.
struct SyncSample {
    std::int64_t offset_ns = 0;
    std::int64_t mean_path_delay_ns = 0;
    SimTime at = 0;
};

struct PeerDelaySample {
    std::int64_t link_delay_ns = 0;
    SimTime at = 0;
};

/// offset = ((t2-t1-c_fwd) - (t4-t3-c_rev)) / 2. Throws MissingTimestampError
/// on an incomplete exchange.
std::int64_t offset_from_exchange(const SyncExchange& x);

/// mpd = ((t2-t1-c_fwd) + (t4-t3-c_rev)) / 2. Negative values are returned
/// as-is; callers flag them for diagnostics.
std::int64_t mpd_from_exchange(const SyncExchange& x);

/// Peer link delay ((t2-t1)+(t4-t3))/2; t1/t4 on the initiator clock, t2/t3
/// on the responder clock, so any constant responder offset cancels.
std::int64_t peer_delay(std::int64_t t1, std::int64_t t2, std::int64_t t3, std::int64_t t4);

/// PI servo steering a slave clock from measured offsets. Gains are per
/// sample; calibrated for 16 pps sync with the preset link models.
struct ServoState {
    double kp = 0.7;
    double ki = 0.3;
    double integral_ns = 0.0;           // anti-windup clamp at +/-1e7
    bool locked = false;
    std::int64_t step_threshold_ns = 100'000;
    std::int64_t lock_threshold_ns = 1'000;
    int lock_run = 0;                   // consecutive in-threshold samples
};

struct ServoAction {
    std::optional<std::int64_t> phase_step_ns;  ///< step the clock by this, or
    double freq_adjust_ppb = 0.0;               ///< absolute frequency to set
};

/// Large offsets get a phase step (integral reset, lock lost); otherwise the
/// PI law produces an absolute frequency adjustment. Lock is declared after
/// 8 consecutive samples inside lock_threshold and is sticky.
ServoAction servo_step(ServoState& s, const SyncSample& sample);

}  // namespace arasim
