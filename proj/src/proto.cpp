// SPDX-License-Identifier: Apache-2.0
#include "arasim/proto.hpp"

#include <algorithm>
#include <cstdio>

#include "arasim/errors.hpp"

namespace arasim {

namespace {

constexpr std::uint8_t kPtpVersion = 2;
constexpr std::size_t kHeaderLen = 34;
constexpr std::int64_t kMaxSeconds = (std::int64_t{1} << 48) - 1;

std::size_t body_length(MsgType t) {
    switch (t) {
        case MsgType::Sync:
        case MsgType::DelayReq:
        case MsgType::FollowUp:
            return 10;
        case MsgType::PdelayReq:
            return 20;  // timestamp + reserved
        case MsgType::DelayResp:
        case MsgType::PdelayResp:
        case MsgType::PdelayRespFollowUp:
        case MsgType::Signaling:
        case MsgType::Management:
            return 20;
        case MsgType::Announce:
            return 30;
    }
    return 0;
}

std::uint8_t control_field(MsgType t) {
    switch (t) {
        case MsgType::Sync: return 0x00;
        case MsgType::DelayReq: return 0x01;
        case MsgType::FollowUp: return 0x02;
        case MsgType::DelayResp: return 0x03;
        case MsgType::Management: return 0x04;
        default: return 0x05;
    }
}

bool known_type(std::uint8_t nibble) {
    switch (static_cast<MsgType>(nibble)) {
        case MsgType::Sync:
        case MsgType::DelayReq:
        case MsgType::PdelayReq:
        case MsgType::PdelayResp:
        case MsgType::FollowUp:
        case MsgType::DelayResp:
        case MsgType::PdelayRespFollowUp:
        case MsgType::Announce:
        case MsgType::Signaling:
        case MsgType::Management:
            return true;
    }
    return false;
}

class Writer {
public:
    explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

    void u8(std::uint8_t v) { out_.push_back(v); }

    void be16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v >> 8));
        u8(static_cast<std::uint8_t>(v));
    }

    void be32(std::uint32_t v) {
        be16(static_cast<std::uint16_t>(v >> 16));
        be16(static_cast<std::uint16_t>(v));
    }

    void be64(std::uint64_t v) {
        be32(static_cast<std::uint32_t>(v >> 32));
        be32(static_cast<std::uint32_t>(v));
    }

    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

    void timestamp(std::int64_t ns) {
        if (ns < 0) throw EncodeError("negative timestamp cannot be encoded");
        const std::int64_t sec = ns / kNsPerSec;
        const std::int64_t frac = ns % kNsPerSec;
        if (sec > kMaxSeconds) throw EncodeError("timestamp seconds exceed 48 bits");
        be16(static_cast<std::uint16_t>(sec >> 32));
        be32(static_cast<std::uint32_t>(sec));
        be32(static_cast<std::uint32_t>(frac));
    }

    void port_identity(const PortIdentity& p) {
        bytes(p.clock_identity);
        be16(p.port_number);
    }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : buf_(b) {}

    std::uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }

    std::uint16_t be16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(buf_[pos_] << 8 | buf_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t be32() {
        std::uint32_t hi = be16();
        return hi << 16 | be16();
    }

    std::uint64_t be64() {
        std::uint64_t hi = be32();
        return hi << 32 | be32();
    }

    std::int64_t timestamp() {
        std::uint64_t sec = static_cast<std::uint64_t>(be16()) << 32;
        sec |= be32();
        std::uint32_t frac = be32();
        return static_cast<std::int64_t>(sec) * kNsPerSec + frac;
    }

    PortIdentity port_identity() {
        PortIdentity p;
        need(8);
        std::copy_n(buf_.begin() + static_cast<std::ptrdiff_t>(pos_), 8, p.clock_identity.begin());
        pos_ += 8;
        p.port_number = be16();
        return p;
    }

    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }

    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > buf_.size())
            throw DecodeError(buf_.size(), "buffer truncated, needed " +
                                               std::to_string(pos_ + n) + " bytes");
    }

    std::span<const std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

}  // namespace

bool is_event_message(MsgType t) {
    switch (t) {
        case MsgType::Sync:
        case MsgType::DelayReq:
        case MsgType::PdelayReq:
        case MsgType::PdelayResp:
            return true;
        default:
            return false;
    }
}

const char* msg_type_name(MsgType t) {
    switch (t) {
        case MsgType::Sync: return "Sync";
        case MsgType::DelayReq: return "DelayReq";
        case MsgType::PdelayReq: return "PdelayReq";
        case MsgType::PdelayResp: return "PdelayResp";
        case MsgType::FollowUp: return "FollowUp";
        case MsgType::DelayResp: return "DelayResp";
        case MsgType::PdelayRespFollowUp: return "PdelayRespFollowUp";
        case MsgType::Announce: return "Announce";
        case MsgType::Signaling: return "Signaling";
        case MsgType::Management: return "Management";
    }
    return "?";
}

const char* port_state_name(PortState s) {
    switch (s) {
        case PortState::Initializing: return "initializing";
        case PortState::Listening: return "listening";
        case PortState::Uncalibrated: return "uncalibrated";
        case PortState::Slave: return "slave";
        case PortState::Master: return "master";
        case PortState::Passive: return "passive";
    }
    return "?";
}

int compare_datasets(const AnnounceDataset& a, const AnnounceDataset& b) {
    auto key = [](const AnnounceDataset& d) {
        return std::tie(d.priority1, d.clock_class, d.clock_accuracy, d.variance,
                        d.priority2, d.steps_removed, d.clock_identity, d.sender);
    };
    const auto ka = key(a);
    const auto kb = key(b);
    if (ka < kb) return -1;
    if (kb < ka) return 1;
    return 0;
}

Better better_dataset(const AnnounceDataset& a, const AnnounceDataset& b) {
    return compare_datasets(a, b) <= 0 ? Better::A : Better::B;
}

std::int64_t correction_ns_to_subns(std::int64_t ns) { return ns * 65536; }

std::int64_t correction_subns_to_ns(std::int64_t subns) { return subns / 65536; }

std::vector<std::uint8_t> encode(const PtpMessage& msg) {
    const std::size_t total = kHeaderLen + body_length(msg.msg_type);
    Writer w(total);
    w.u8(static_cast<std::uint8_t>(msg.msg_type));
    w.u8(kPtpVersion);
    w.be16(static_cast<std::uint16_t>(total));
    w.u8(msg.domain_number);
    w.u8(0);  // reserved
    w.be16(msg.flags);
    w.be64(static_cast<std::uint64_t>(msg.correction_subns));
    w.be32(0);  // reserved
    w.port_identity(msg.source);
    w.be16(msg.sequence_id);
    w.u8(control_field(msg.msg_type));
    w.u8(static_cast<std::uint8_t>(msg.log_message_interval));

    switch (msg.msg_type) {
        case MsgType::Sync:
        case MsgType::DelayReq:
        case MsgType::FollowUp:
            w.timestamp(msg.origin_timestamp_ns);
            break;
        case MsgType::PdelayReq:
            w.timestamp(msg.origin_timestamp_ns);
            for (int i = 0; i < 10; ++i) w.u8(0);
            break;
        case MsgType::DelayResp:
        case MsgType::PdelayResp:
            w.timestamp(msg.receive_timestamp_ns);
            w.port_identity(msg.requesting);
            break;
        case MsgType::PdelayRespFollowUp:
            w.timestamp(msg.origin_timestamp_ns);
            w.port_identity(msg.requesting);
            break;
        case MsgType::Signaling:
        case MsgType::Management:
            w.port_identity(msg.requesting);  // targetPortIdentity
            for (int i = 0; i < 10; ++i) w.u8(0);
            break;
        case MsgType::Announce: {
            const AnnounceDataset& d = msg.announce;
            w.timestamp(msg.origin_timestamp_ns);
            w.be16(0);  // currentUtcOffset
            w.u8(0);    // reserved
            w.u8(d.priority1);
            w.u8(d.clock_class);
            w.u8(d.clock_accuracy);
            w.be16(d.variance);
            w.u8(d.priority2);
            w.bytes(d.clock_identity);
            w.be16(d.steps_removed);
            w.u8(0);  // timeSource
            break;
        }
    }
    return w.take();
}

PtpMessage decode(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    PtpMessage msg;

    const std::uint8_t b0 = r.u8();
    const std::uint8_t type_nibble = b0 & 0x0F;
    if (!known_type(type_nibble))
        throw DecodeError(0, "unknown message type nibble " + std::to_string(type_nibble));
    msg.msg_type = static_cast<MsgType>(type_nibble);

    const std::uint8_t version = r.u8() & 0x0F;
    if (version != kPtpVersion)
        throw DecodeError(1, "unsupported PTP version " + std::to_string(version));

    const std::uint16_t length = r.be16();
    const std::size_t expected = kHeaderLen + body_length(msg.msg_type);
    if (length != expected)
        throw DecodeError(2, "message length " + std::to_string(length) + " does not match " +
                                 std::string(msg_type_name(msg.msg_type)) + " layout");
    if (bytes.size() < expected)
        throw DecodeError(bytes.size(), "buffer shorter than declared message");

    msg.domain_number = r.u8();
    r.skip(1);
    msg.flags = r.be16();
    msg.correction_subns = static_cast<std::int64_t>(r.be64());
    r.skip(4);
    msg.source = r.port_identity();
    msg.sequence_id = r.be16();
    r.skip(1);  // control, derived from type
    msg.log_message_interval = static_cast<std::int8_t>(r.u8());

    switch (msg.msg_type) {
        case MsgType::Sync:
        case MsgType::DelayReq:
        case MsgType::FollowUp:
            msg.origin_timestamp_ns = r.timestamp();
            break;
        case MsgType::PdelayReq:
            msg.origin_timestamp_ns = r.timestamp();
            r.skip(10);
            break;
        case MsgType::DelayResp:
        case MsgType::PdelayResp:
            msg.receive_timestamp_ns = r.timestamp();
            msg.requesting = r.port_identity();
            break;
        case MsgType::PdelayRespFollowUp:
            msg.origin_timestamp_ns = r.timestamp();
            msg.requesting = r.port_identity();
            break;
        case MsgType::Signaling:
        case MsgType::Management:
            msg.requesting = r.port_identity();
            r.skip(10);
            break;
        case MsgType::Announce: {
            AnnounceDataset& d = msg.announce;
            msg.origin_timestamp_ns = r.timestamp();
            r.skip(3);  // utcOffset + reserved
            d.priority1 = r.u8();
            d.clock_class = r.u8();
            d.clock_accuracy = r.u8();
            d.variance = r.be16();
            d.priority2 = r.u8();
            for (auto& byte : d.clock_identity) byte = r.u8();
            d.steps_removed = r.be16();
            r.skip(1);  // timeSource
            d.sender = msg.source.clock_identity;
            break;
        }
    }
    return msg;
}

bool ForeignMasterTable::upsert(const AnnounceDataset& ds, SimTime now) {
    auto [it, inserted] = entries_.try_emplace(ds.sender, Entry{ds, now});
    if (inserted) return true;
    const bool changed = !(it->second.dataset == ds);
    it->second.dataset = ds;
    it->second.last_seen = now;
    return changed;
}

bool ForeignMasterTable::evict_expired(SimTime now, SimTime timeout) {
    bool evicted = false;
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (it->second.last_seen + timeout <= now) {
            it = entries_.erase(it);
            evicted = true;
        } else {
            ++it;
        }
    }
    return evicted;
}

std::optional<SimTime> ForeignMasterTable::last_seen(const ClockIdentity& sender) const {
    auto it = entries_.find(sender);
    if (it == entries_.end()) return std::nullopt;
    return it->second.last_seen;
}

std::optional<AnnounceDataset> ForeignMasterTable::best() const {
    std::optional<AnnounceDataset> best;
    for (const auto& [sender, entry] : entries_) {
        if (!best || compare_datasets(entry.dataset, *best) < 0) best = entry.dataset;
    }
    return best;
}

BmcaResult run_bmca(const BmcaInput& input) {
    BmcaResult res;
    res.states.assign(input.port_best.size(), PortState::Master);

    // Ebest: best foreign dataset across all ports.
    int best_port = -1;
    std::optional<AnnounceDataset> ebest;
    for (std::size_t i = 0; i < input.port_best.size(); ++i) {
        const auto& erbest = input.port_best[i];
        if (!erbest) continue;
        if (!ebest || compare_datasets(*erbest, *ebest) < 0) {
            ebest = *erbest;
            best_port = static_cast<int>(i);
        }
    }

    if (!ebest || compare_datasets(input.own, *ebest) < 0) {
        // The node is its own best clock: all ports master, announce own data.
        res.transmit = input.own;
        return res;
    }

    res.slave_port = best_port;
    res.parent = *ebest;
    res.states[static_cast<std::size_t>(best_port)] = PortState::Slave;

    // What this node relays downstream: the elected grandmaster, one hop
    // further away, under this node's own sending identity.
    res.transmit = *ebest;
    res.transmit.steps_removed = static_cast<std::uint16_t>(ebest->steps_removed + 1);
    res.transmit.sender = input.own.sender;

    for (std::size_t i = 0; i < input.port_best.size(); ++i) {
        if (static_cast<int>(i) == best_port) continue;
        const auto& erbest = input.port_best[i];
        if (erbest && compare_datasets(*erbest, res.transmit) < 0)
            res.states[i] = PortState::Passive;  // second path toward the GMC
    }
    return res;
}

std::string format_clock_identity(const ClockIdentity& id) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%02x%02x%02x%02x%02x%02x%02x%02x",
                  id[0], id[1], id[2], id[3], id[4], id[5], id[6], id[7]);
    return buf;
}

ClockIdentity make_clock_identity(std::uint64_t value) {
    ClockIdentity id;
    for (int i = 7; i >= 0; --i) {
        id[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
        value >>= 8;
    }
    return id;
}

}  // namespace arasim
