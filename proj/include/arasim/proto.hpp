// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arasim/timebase.hpp"

namespace arasim {

using ClockIdentity = std::array<std::uint8_t, 8>;

struct PortIdentity {
    ClockIdentity clock_identity{};
    std::uint16_t port_number = 0;  // 1-based on real ports

    auto operator<=>(const PortIdentity&) const = default;
};

/// Wire message-type nibbles.
enum class MsgType : std::uint8_t {
    Sync = 0x0,
    DelayReq = 0x1,
    PdelayReq = 0x2,
    PdelayResp = 0x3,
    FollowUp = 0x8,
    DelayResp = 0x9,
    PdelayRespFollowUp = 0xA,
    Announce = 0xB,
    Signaling = 0xC,   // carried in the enum, no behavior
    Management = 0xD,  // carried in the enum, no behavior
};

/// Event messages are timestamped at the port; everything else is general.
bool is_event_message(MsgType t);

const char* msg_type_name(MsgType t);

/// flagField bit for two-step operation (byte 0, bit 1 on the wire).
constexpr std::uint16_t kFlagTwoStep = 0x0200;

/// Clock-quality record compared by the BMCA. `sender` is the transmitting
/// port's clock identity, used as the final tiebreak so two boundary clocks
/// relaying the same grandmaster at equal hop count still order strictly.
struct AnnounceDataset {
    std::uint8_t priority1 = 128;
    std::uint8_t clock_class = 248;
    std::uint8_t clock_accuracy = 0xFE;
    std::uint16_t variance = 0xFFFF;
    std::uint8_t priority2 = 128;
    ClockIdentity clock_identity{};  ///< grandmaster identity
    std::uint16_t steps_removed = 0; ///< hop count from the grandmaster
    ClockIdentity sender{};

    bool operator==(const AnnounceDataset&) const = default;
};

enum class Better { A, B };

/// Lexicographic comparison: priority1, clock_class, clock_accuracy,
/// variance, priority2, steps_removed, clock_identity, then sender.
/// Lower always wins; the identity keys make the order strict and total.
Better better_dataset(const AnnounceDataset& a, const AnnounceDataset& b);

/// <0 when a is better, >0 when b is better, 0 only for identical datasets.
int compare_datasets(const AnnounceDataset& a, const AnnounceDataset& b);

struct PtpMessage {
    MsgType msg_type = MsgType::Sync;
    std::uint8_t domain_number = 0;
    std::uint16_t flags = 0;
    std::int64_t correction_subns = 0;  ///< ns * 2^16 fixed point
    PortIdentity source{};
    std::uint16_t sequence_id = 0;
    std::int8_t log_message_interval = 0;
    std::int64_t origin_timestamp_ns = 0;   ///< Sync/FollowUp/DelayReq/PdelayReq/PdelayRespFollowUp
    std::int64_t receive_timestamp_ns = 0;  ///< DelayResp/PdelayResp
    PortIdentity requesting{};              ///< DelayResp/Pdelay responses
    AnnounceDataset announce{};             ///< Announce only

    bool operator==(const PtpMessage&) const = default;
};

std::int64_t correction_ns_to_subns(std::int64_t ns);
std::int64_t correction_subns_to_ns(std::int64_t subns);  // rounds toward zero

/// Encode to the wire layout: 34-byte common header, big-endian, timestamps
/// as 48-bit seconds + 32-bit nanoseconds. Throws EncodeError on fields that
/// do not fit.
std::vector<std::uint8_t> encode(const PtpMessage& msg);

/// Inverse of encode on valid inputs. Throws DecodeError naming the
/// offending byte offset on truncation, version mismatch or unknown type.
PtpMessage decode(std::span<const std::uint8_t> bytes);

enum class PortState {
    Initializing,
    Listening,
    Uncalibrated,
    Slave,
    Master,
    Passive,
};

const char* port_state_name(PortState s);

/// Per-port record of recently heard foreign masters. Entries expire after
/// `timeout` without a refresh (3 missed announce intervals by default).
class ForeignMasterTable {
public:
    /// Record or refresh a sender's dataset. Returns true when the table's
    /// dataset content changed (new sender or different dataset), i.e. when
    /// the BMCA needs to rerun; a pure refresh returns false.
    bool upsert(const AnnounceDataset& ds, SimTime now);

    /// Drop entries with last_seen + timeout <= now. Returns true if any
    /// entry was evicted.
    bool evict_expired(SimTime now, SimTime timeout);

    std::optional<SimTime> last_seen(const ClockIdentity& sender) const;

    /// Best dataset currently in the table (Erbest), if any.
    std::optional<AnnounceDataset> best() const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

private:
    struct Entry {
        AnnounceDataset dataset;
        SimTime last_seen;
    };
    std::map<ClockIdentity, Entry> entries_;  // keyed by sender
};

struct BmcaInput {
    AnnounceDataset own;  ///< the node's default dataset (its own quality)
    std::vector<std::optional<AnnounceDataset>> port_best;  ///< Erbest per port
};

struct BmcaResult {
    std::vector<PortState> states;  ///< Master/Slave/Passive per port
    int slave_port = -1;            ///< index, or -1 when the node is its own best
    std::optional<AnnounceDataset> parent;  ///< elected foreign dataset
    AnnounceDataset transmit;       ///< dataset this node announces downstream
};

/// Dataset election. The port with the globally best foreign dataset becomes
/// Slave; a port whose foreign dataset loses to the elected master but beats
/// what this node would itself transmit becomes Passive (second-path prune);
/// everything else is Master. With no winning foreign dataset all ports are
/// Master and the node announces its own quality.
BmcaResult run_bmca(const BmcaInput& input);

std::string format_clock_identity(const ClockIdentity& id);
ClockIdentity make_clock_identity(std::uint64_t value);

}  // namespace arasim
