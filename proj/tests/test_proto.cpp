// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "arasim/errors.hpp"
#include "arasim/proto.hpp"
#include "arasim/rng.hpp"

using namespace arasim;

namespace {

std::vector<std::uint8_t> read_binary(const std::string& name) {
    std::ifstream in(std::string(ARASIM_TEST_DATA_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ClockIdentity cid(std::initializer_list<std::uint8_t> bytes) {
    ClockIdentity id{};
    std::size_t i = 0;
    for (auto b : bytes) id[i++] = b;
    return id;
}

PtpMessage golden_base(MsgType type) {
    PtpMessage m;
    m.msg_type = type;
    m.domain_number = 24;
    m.correction_subns = correction_ns_to_subns(1);
    m.source.clock_identity = cid({1, 2, 3, 4, 5, 6, 7, 8});
    m.source.port_number = 2;
    m.sequence_id = 0x1234;
    m.log_message_interval = -3;
    return m;
}

PortIdentity golden_requesting() {
    return {cid({0x11, 0x12, 0x13, 0x14, 0x15, 0x16, 0x17, 0x18}), 9};
}

constexpr std::int64_t kGoldenTs = 5'000'000'123;  // 5 s + 123 ns

/// The golden messages matching tests/data/golden_*.bin (generated from the
/// wire layout by make_goldens.py, independently of this codec).
std::map<std::string, PtpMessage> golden_messages() {
    std::map<std::string, PtpMessage> out;

    PtpMessage sync = golden_base(MsgType::Sync);
    sync.flags = kFlagTwoStep;
    sync.origin_timestamp_ns = kGoldenTs;
    out["sync"] = sync;

    for (auto [name, type] : {std::pair{"delay_req", MsgType::DelayReq},
                              std::pair{"follow_up", MsgType::FollowUp},
                              std::pair{"pdelay_req", MsgType::PdelayReq}}) {
        PtpMessage m = golden_base(type);
        m.origin_timestamp_ns = kGoldenTs;
        out[name] = m;
    }
    for (auto [name, type] : {std::pair{"delay_resp", MsgType::DelayResp},
                              std::pair{"pdelay_resp", MsgType::PdelayResp}}) {
        PtpMessage m = golden_base(type);
        m.receive_timestamp_ns = kGoldenTs;
        m.requesting = golden_requesting();
        out[name] = m;
    }
    PtpMessage prfu = golden_base(MsgType::PdelayRespFollowUp);
    prfu.origin_timestamp_ns = kGoldenTs;
    prfu.requesting = golden_requesting();
    out["pdelay_resp_follow_up"] = prfu;

    for (auto [name, type] : {std::pair{"signaling", MsgType::Signaling},
                              std::pair{"management", MsgType::Management}}) {
        PtpMessage m = golden_base(type);
        m.requesting = golden_requesting();
        out[name] = m;
    }

    PtpMessage ann = golden_base(MsgType::Announce);
    ann.announce.priority1 = 128;
    ann.announce.clock_class = 6;
    ann.announce.clock_accuracy = 0x21;
    ann.announce.variance = 20061;
    ann.announce.priority2 = 128;
    ann.announce.clock_identity = cid({0xAA, 0xBB, 0xCC, 0xDD, 0xEE, 0xFF, 0x00, 0x11});
    ann.announce.steps_removed = 1;
    ann.announce.sender = ann.source.clock_identity;  // set by decode from the header
    out["announce"] = ann;
    return out;
}

AnnounceDataset random_dataset(RandomStream& rng) {
    AnnounceDataset d;
    d.priority1 = static_cast<std::uint8_t>(rng.next() % 4);
    d.clock_class = static_cast<std::uint8_t>(rng.next() % 4);
    d.clock_accuracy = static_cast<std::uint8_t>(rng.next() % 4);
    d.variance = static_cast<std::uint16_t>(rng.next() % 4);
    d.priority2 = static_cast<std::uint8_t>(rng.next() % 4);
    d.clock_identity = make_clock_identity(rng.next() % 4);
    d.steps_removed = static_cast<std::uint16_t>(rng.next() % 4);
    d.sender = make_clock_identity(rng.next() % 4);
    return d;
}

}  // namespace

TEST_CASE("event message classification") {
    CHECK(is_event_message(MsgType::Sync));
    CHECK(is_event_message(MsgType::DelayReq));
    CHECK(is_event_message(MsgType::PdelayReq));
    CHECK(is_event_message(MsgType::PdelayResp));
    CHECK_FALSE(is_event_message(MsgType::Announce));
    CHECK_FALSE(is_event_message(MsgType::FollowUp));
    CHECK_FALSE(is_event_message(MsgType::DelayResp));
    CHECK_FALSE(is_event_message(MsgType::PdelayRespFollowUp));
}

TEST_CASE("correction fixed-point conversion") {
    CHECK(correction_ns_to_subns(1) == 65536);
    CHECK(correction_ns_to_subns(5'000) == 5'000LL * 65536);
    CHECK(correction_subns_to_ns(65536) == 1);
    CHECK(correction_subns_to_ns(-65537) == -1);  // toward zero
    CHECK(correction_subns_to_ns(65535) == 0);
}

TEST_CASE("golden vectors encode and decode bit-exactly") {
    for (const auto& [name, msg] : golden_messages()) {
        CAPTURE(name);
        const auto bytes = read_binary("golden_" + name + ".bin");
        CHECK(encode(msg) == bytes);
        CHECK(decode(bytes) == msg);
    }
}

TEST_CASE("all-zero announce with domain 24 matches the hand-built vector") {
    PtpMessage m;
    m.msg_type = MsgType::Announce;
    m.domain_number = 24;
    m.announce = AnnounceDataset{0, 0, 0, 0, 0, ClockIdentity{}, 0, ClockIdentity{}};
    const auto bytes = encode(m);
    REQUIRE(bytes.size() == 64);
    // only type, version, length, domain and control are nonzero
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        CAPTURE(i);
        const std::uint8_t expect = i == 0 ? 0x0B : i == 1 ? 0x02 : i == 3 ? 0x40
                                  : i == 4 ? 0x18 : i == 32 ? 0x05 : 0x00;
        CHECK(bytes[i] == expect);
    }
    CHECK(bytes == read_binary("golden_announce_zero.bin"));
}

TEST_CASE("correction of one nanosecond encodes as 0x10000") {
    PtpMessage m = golden_base(MsgType::Sync);
    m.correction_subns = correction_ns_to_subns(1);
    const auto bytes = encode(m);
    // correction occupies header bytes 8..15, big-endian
    const std::uint8_t expect[8] = {0, 0, 0, 0, 0, 1, 0, 0};
    for (int i = 0; i < 8; ++i) CHECK(bytes[8 + i] == expect[i]);
}

TEST_CASE("decode round-trips randomized messages") {
    RandomStream rng = RandomStream::derive(5, "test.proto.fuzz");
    const MsgType types[] = {MsgType::Sync, MsgType::DelayReq, MsgType::PdelayReq,
                             MsgType::PdelayResp, MsgType::FollowUp, MsgType::DelayResp,
                             MsgType::PdelayRespFollowUp, MsgType::Announce,
                             MsgType::Signaling, MsgType::Management};
    for (int i = 0; i < 5'000; ++i) {
        PtpMessage m;
        m.msg_type = types[rng.next() % 10];
        m.domain_number = static_cast<std::uint8_t>(rng.next());
        m.flags = static_cast<std::uint16_t>(rng.next());
        m.correction_subns = static_cast<std::int64_t>(rng.next());
        m.source.clock_identity = make_clock_identity(rng.next());
        m.source.port_number = static_cast<std::uint16_t>(rng.next());
        m.sequence_id = static_cast<std::uint16_t>(rng.next());
        m.log_message_interval = static_cast<std::int8_t>(rng.next());
        const std::int64_t ts = static_cast<std::int64_t>(rng.next() % (kNsPerSec * 1000ULL));
        switch (m.msg_type) {
            case MsgType::Sync:
            case MsgType::DelayReq:
            case MsgType::FollowUp:
            case MsgType::PdelayReq:
            case MsgType::PdelayRespFollowUp:
                m.origin_timestamp_ns = ts;
                break;
            case MsgType::DelayResp:
            case MsgType::PdelayResp:
                m.receive_timestamp_ns = ts;
                break;
            default:
                break;
        }
        if (m.msg_type == MsgType::PdelayRespFollowUp || m.msg_type == MsgType::DelayResp ||
            m.msg_type == MsgType::PdelayResp || m.msg_type == MsgType::Signaling ||
            m.msg_type == MsgType::Management) {
            m.requesting.clock_identity = make_clock_identity(rng.next());
            m.requesting.port_number = static_cast<std::uint16_t>(rng.next());
        }
        if (m.msg_type == MsgType::Announce) {
            m.announce = random_dataset(rng);
            m.announce.sender = m.source.clock_identity;  // decode derives this
        }
        CAPTURE(msg_type_name(m.msg_type));
        CHECK(decode(encode(m)) == m);
    }
}

TEST_CASE("encode rejects unrepresentable timestamps") {
    PtpMessage m = golden_base(MsgType::Sync);
    m.origin_timestamp_ns = -1;
    CHECK_THROWS_AS(encode(m), EncodeError);
}

TEST_CASE("decode error paths name the offending offset") {
    SUBCASE("empty buffer") {
        try {
            decode({});
            FAIL("expected DecodeError");
        } catch (const DecodeError& e) {
            CHECK(e.offset() == 0);
        }
    }
    SUBCASE("unknown type nibble") {
        auto bytes = read_binary("golden_sync.bin");
        bytes[0] = 0x04;
        try {
            decode(bytes);
            FAIL("expected DecodeError");
        } catch (const DecodeError& e) {
            CHECK(e.offset() == 0);
        }
    }
    SUBCASE("flipped version") {
        auto bytes = read_binary("golden_sync.bin");
        bytes[1] = 0x03;
        try {
            decode(bytes);
            FAIL("expected DecodeError");
        } catch (const DecodeError& e) {
            CHECK(e.offset() == 1);
        }
    }
    SUBCASE("truncated body") {
        auto bytes = read_binary("golden_sync.bin");
        bytes.resize(40);
        CHECK_THROWS_AS(decode(bytes), DecodeError);
    }
    SUBCASE("length field inconsistent with layout") {
        auto bytes = read_binary("golden_sync.bin");
        bytes[3] = 0x50;
        try {
            decode(bytes);
            FAIL("expected DecodeError");
        } catch (const DecodeError& e) {
            CHECK(e.offset() == 2);
        }
    }
}

TEST_CASE("better_dataset worked examples") {
    AnnounceDataset a, b;
    a.clock_identity = b.clock_identity = make_clock_identity(9);
    a.sender = make_clock_identity(1);
    b.sender = make_clock_identity(2);

    SUBCASE("priority1 dominates") {
        a.priority1 = 10;
        b.priority1 = 20;
        b.clock_class = 0;  // would win on a later key
        CHECK(better_dataset(a, b) == Better::A);
    }
    SUBCASE("fewer hops wins when quality ties") {
        a.steps_removed = 1;
        b.steps_removed = 2;
        CHECK(better_dataset(a, b) == Better::A);
    }
    SUBCASE("grandmaster identity breaks quality ties") {
        a.clock_identity = make_clock_identity(1);
        b.clock_identity = make_clock_identity(2);
        CHECK(better_dataset(a, b) == Better::A);
    }
    SUBCASE("sender identity is the final tiebreak") {
        CHECK(better_dataset(a, b) == Better::A);
        CHECK(better_dataset(b, a) == Better::B);  // same winner either way round
        CHECK(compare_datasets(a, b) < 0);
    }
}

TEST_CASE("dataset comparison is a strict total order") {
    RandomStream rng = RandomStream::derive(3, "test.proto.order");
    std::vector<AnnounceDataset> pool;
    for (int i = 0; i < 60; ++i) pool.push_back(random_dataset(rng));
    for (const auto& a : pool) {
        CHECK(compare_datasets(a, a) == 0);
        for (const auto& b : pool) {
            const int ab = compare_datasets(a, b);
            CHECK(ab == -compare_datasets(b, a));  // antisymmetry
            if (ab == 0) CHECK(a == b);            // 0 only for identical records
            for (const auto& c : pool) {           // transitivity
                if (ab < 0 && compare_datasets(b, c) < 0) CHECK(compare_datasets(a, c) < 0);
            }
        }
    }
}

TEST_CASE("foreign master table upsert, refresh and expiry") {
    ForeignMasterTable table;
    AnnounceDataset d;
    d.sender = make_clock_identity(1);
    CHECK(table.upsert(d, 0));
    CHECK(table.size() == 1);
    CHECK_FALSE(table.upsert(d, 100));  // pure refresh
    CHECK(table.size() == 1);
    CHECK(table.last_seen(d.sender) == 100);
    d.steps_removed = 3;
    CHECK(table.upsert(d, 200));  // content change

    // 8 pps announce -> 125 ms interval; timeout after 3 missed = 375 ms
    const SimTime timeout = 375'000'000;
    CHECK_FALSE(table.evict_expired(200 + timeout - 1, timeout));
    CHECK(table.size() == 1);
    CHECK(table.evict_expired(200 + timeout, timeout));
    CHECK(table.empty());
}

TEST_CASE("bmca: node with no better foreign input masters all ports") {
    BmcaInput in;
    in.own.priority1 = 128;
    in.own.clock_class = 6;  // grandmaster-grade
    in.own.clock_identity = in.own.sender = make_clock_identity(1);
    AnnounceDataset worse;
    worse.clock_class = 248;
    worse.clock_identity = worse.sender = make_clock_identity(5);
    in.port_best = {worse, std::nullopt};
    const BmcaResult res = run_bmca(in);
    CHECK(res.slave_port == -1);
    CHECK(res.states == std::vector<PortState>{PortState::Master, PortState::Master});
    CHECK(res.transmit == in.own);
}

TEST_CASE("bmca: hop count selects slave and prunes the long way passive") {
    // The farm hears the same grandmaster at 1 hop (wireless) and 2 hops
    // (via the second-level wired relay); the 2-hop port goes passive.
    const ClockIdentity gm = make_clock_identity(1);
    BmcaInput in;
    in.own.clock_class = 248;
    in.own.clock_identity = in.own.sender = make_clock_identity(4);

    AnnounceDataset one_hop;
    one_hop.clock_class = 6;
    one_hop.clock_accuracy = 0x21;
    one_hop.variance = 20061;
    one_hop.clock_identity = gm;
    one_hop.steps_removed = 1;
    one_hop.sender = make_clock_identity(2);

    AnnounceDataset two_hop = one_hop;
    two_hop.steps_removed = 2;
    two_hop.sender = make_clock_identity(3);

    in.port_best = {two_hop, one_hop, std::nullopt};
    const BmcaResult res = run_bmca(in);
    CHECK(res.slave_port == 1);
    CHECK(res.states == std::vector<PortState>{PortState::Passive, PortState::Slave,
                                               PortState::Master});
    CHECK(res.transmit.steps_removed == 2);
    CHECK(res.transmit.clock_identity == gm);
    CHECK(res.transmit.sender == in.own.sender);
}

TEST_CASE("bmca: isolated node defaults to its own dataset") {
    BmcaInput in;
    in.own.clock_identity = in.own.sender = make_clock_identity(7);
    in.port_best = {std::nullopt};
    const BmcaResult res = run_bmca(in);
    CHECK(res.states == std::vector<PortState>{PortState::Master});
    CHECK_FALSE(res.parent.has_value());
}

TEST_CASE("clock identity formatting") {
    CHECK(format_clock_identity(make_clock_identity(0x0102030405060708ULL)) ==
          "0102030405060708");
    CHECK(format_clock_identity(ClockIdentity{}) == "0000000000000000");
}
