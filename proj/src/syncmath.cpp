// SPDX-License-Identifier: Apache-2.0
#include "arasim/syncmath.hpp"

#include <algorithm>
#include <cmath>

#include "arasim/errors.hpp"

namespace arasim {

namespace {

constexpr double kIntegralClampNs = 1e7;
constexpr int kLockRunLength = 8;

void require_complete(const SyncExchange& x) {
    if (!x.t1) throw MissingTimestampError("exchange missing t1");
    if (!x.t2) throw MissingTimestampError("exchange missing t2");
    if (!x.t3) throw MissingTimestampError("exchange missing t3");
    if (!x.t4) throw MissingTimestampError("exchange missing t4");
}

}  // namespace

std::int64_t offset_from_exchange(const SyncExchange& x) {
    require_complete(x);
    const std::int64_t fwd = *x.t2 - *x.t1 - x.correction_fwd_ns;
    const std::int64_t rev = *x.t4 - *x.t3 - x.correction_rev_ns;
    return (fwd - rev) / 2;  // truncation = round toward zero
}

std::int64_t mpd_from_exchange(const SyncExchange& x) {
    require_complete(x);
    const std::int64_t fwd = *x.t2 - *x.t1 - x.correction_fwd_ns;
    const std::int64_t rev = *x.t4 - *x.t3 - x.correction_rev_ns;
    return (fwd + rev) / 2;
}

std::int64_t peer_delay(std::int64_t t1, std::int64_t t2, std::int64_t t3, std::int64_t t4) {
    return ((t2 - t1) + (t4 - t3)) / 2;
}

ServoAction servo_step(ServoState& s, const SyncSample& sample) {
    const std::int64_t offset = sample.offset_ns;
    if (std::llabs(offset) > s.step_threshold_ns) {
        s.integral_ns = 0.0;
        s.locked = false;
        s.lock_run = 0;
        return ServoAction{.phase_step_ns = -offset, .freq_adjust_ppb = 0.0};
    }
    s.integral_ns = std::clamp(s.integral_ns + static_cast<double>(offset),
                               -kIntegralClampNs, kIntegralClampNs);
    const double freq = -(s.kp * static_cast<double>(offset) + s.ki * s.integral_ns);
    if (std::llabs(offset) < s.lock_threshold_ns) {
        if (++s.lock_run >= kLockRunLength) s.locked = true;
    } else {
        s.lock_run = 0;
    }
    return ServoAction{.phase_step_ns = std::nullopt, .freq_adjust_ppb = freq};
}

}  // namespace arasim
