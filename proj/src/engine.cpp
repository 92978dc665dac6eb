// SPDX-License-Identifier: Apache-2.0
#include "arasim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arasim/errors.hpp"

namespace arasim {

namespace {

constexpr int kAnnounceTimeoutIntervals = 3;
constexpr double kServoFreqClampPpb = 9e5;  // keeps apply_freq_adjust in range
constexpr double kDrawFreqOffsetRangePpb = 5000.0;
constexpr double kDrawInitialPhaseRangeNs = 1e6;

enum class TimerKind {
    ListenTimeout,
    AnnounceTx,
    SyncTx,
    DelayReqTx,
    PdelayTx,
    ForeignExpiry,
};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

struct Simulation::Impl {
    struct Event {
        SimTime at = 0;
        std::uint64_t seq = 0;
        enum class Kind { Arrival, Timer, TcEgress } kind = Kind::Timer;
        int node = -1;
        int port = -1;
        TimerKind timer = TimerKind::ListenTimeout;
        std::uint64_t gen = 0;
        PtpMessage msg;
        ClockIdentity expiry_sender{};
        SimTime expiry_last_seen = 0;
        std::int64_t tc_ingress_local = 0;
    };

    struct EventLater {
        bool operator()(const Event& a, const Event& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };

    struct PendingSync {
        bool active = false;
        std::uint16_t seq = 0;
        std::int64_t t2 = 0;
        std::int64_t corr_fwd_ns = 0;
    };

    struct PortRt {
        int link = -1;
        Direction dir_out = Direction::Forward;
        PortIdentity identity;
        PortState state = PortState::Initializing;
        ForeignMasterTable foreign;
        std::uint64_t timer_gen = 0;
        // master side
        std::uint16_t announce_seq = 0;
        std::uint16_t sync_seq = 0;
        // slave side
        PendingSync pending_sync;
        std::map<std::uint16_t, std::pair<std::int64_t, std::int64_t>> early_followups;
        std::uint16_t delayreq_seq = 0;
        std::map<std::uint16_t, std::int64_t> outstanding_delayreq;
        bool have_delay = false;
        std::int64_t t3 = 0, t4 = 0, corr_rev_ns = 0;
        // p2p initiator side
        std::map<std::uint16_t, std::int64_t> outstanding_pdelay;
        std::uint16_t pdelay_seq = 0;
        std::optional<std::int64_t> pdelay_t2;
        std::int64_t pdelay_t4 = 0;
        std::int64_t peer_delay_est_ns = 0;
    };

    struct NodeRt {
        NodeSpec spec;
        int index = 0;
        ClockIdentity cid{};
        LocalClock clock;
        RandomStream clock_rng{0};
        ServoState servo;
        std::vector<PortRt> ports;
        AnnounceDataset own_dataset;
        BmcaResult bmca;
        std::optional<std::int64_t> last_offset;
    };

    struct LinkRt {
        std::string id;
        int node_a = -1, port_a = -1;
        int node_b = -1, port_b = -1;
        std::unique_ptr<LinkModel> model;
    };

    // --- state ---
    Scenario scn;
    MetricLog* log = nullptr;
    WeatherTrace weather{{{0, 0.0}}};
    std::vector<NodeRt> nodes;
    std::vector<LinkRt> links;
    std::priority_queue<Event, std::vector<Event>, EventLater> queue;
    SimTime now = 0;
    std::uint64_t next_seq = 0;
    std::uint64_t event_count = 0;
    SimTime last_state_change = 0;
    std::uint64_t discarded = 0;
    std::uint64_t ignored_announces = 0;
    std::uint64_t trace_hash = 0xcbf29ce484222325ULL;

    SimTime announce_interval = 0;
    SimTime sync_interval = 0;
    SimTime delayreq_interval = 0;
    SimTime announce_timeout = 0;

    // --- construction ---
    Impl(const Scenario& scenario, MetricLog& metric_log) : scn(scenario), log(&metric_log) {
        const auto violations = validate(scn);
        if (!violations.empty()) {
            std::ostringstream msg;
            msg << "invalid scenario:";
            for (const auto& v : violations) msg << "\n  - " << v;
            throw ScenarioError(0, msg.str());
        }
        weather = scn.weather_trace();

        announce_interval = static_cast<SimTime>(std::llround(1e9 / scn.announce_pps));
        sync_interval = static_cast<SimTime>(std::llround(1e9 / scn.sync_pps));
        delayreq_interval = static_cast<SimTime>(std::llround(1e9 / scn.delay_req_pps));
        announce_timeout = kAnnounceTimeoutIntervals * announce_interval;

        nodes.reserve(scn.nodes.size());
        for (std::size_t i = 0; i < scn.nodes.size(); ++i) {
            NodeRt n;
            n.spec = scn.nodes[i];
            n.index = static_cast<int>(i);
            n.cid = make_clock_identity(i + 1);

            OscillatorParams osc = n.spec.osc;
            if (n.spec.draw_freq_offset || n.spec.draw_initial_phase) {
                RandomStream draw = RandomStream::derive(scn.seed, "node.osc", i);
                const double u1 = draw.uniform01();
                const double u2 = draw.uniform01();
                if (n.spec.draw_freq_offset)
                    osc.freq_offset_ppb = (2.0 * u1 - 1.0) * kDrawFreqOffsetRangePpb;
                if (n.spec.draw_initial_phase)
                    osc.initial_phase_ns =
                        std::llround((2.0 * u2 - 1.0) * kDrawInitialPhaseRangeNs);
            }
            n.clock = LocalClock(osc);
            n.clock_rng = RandomStream::derive(scn.seed, "node.clock", i);

            n.servo.kp = n.spec.servo.kp;
            n.servo.ki = n.spec.servo.ki;
            n.servo.step_threshold_ns = n.spec.servo.step_threshold_ns;
            n.servo.lock_threshold_ns = n.spec.servo.lock_threshold_ns;

            n.own_dataset.priority1 = n.spec.priority1;
            n.own_dataset.clock_class = n.spec.clock_class;
            n.own_dataset.clock_accuracy = n.spec.clock_accuracy;
            n.own_dataset.variance = n.spec.variance;
            n.own_dataset.priority2 = n.spec.priority2;
            n.own_dataset.clock_identity = n.cid;
            n.own_dataset.steps_removed = 0;
            n.own_dataset.sender = n.cid;
            n.bmca.transmit = n.own_dataset;

            nodes.push_back(std::move(n));
        }

        links.reserve(scn.links.size());
        for (std::size_t i = 0; i < scn.links.size(); ++i) {
            const LinkDecl& decl = scn.links[i];
            LinkRt l;
            l.id = decl.id;
            l.node_a = node_index(decl.node_a);
            l.node_b = node_index(decl.node_b);
            l.model = std::make_unique<LinkModel>(decl.spec, decl.wireless, &weather, scn.seed, i);

            auto attach = [&](int node_idx, Direction dir_out) {
                PortRt p;
                p.link = static_cast<int>(i);
                p.dir_out = dir_out;
                p.identity.clock_identity = nodes[static_cast<std::size_t>(node_idx)].cid;
                p.identity.port_number =
                    static_cast<std::uint16_t>(nodes[static_cast<std::size_t>(node_idx)].ports.size() + 1);
                nodes[static_cast<std::size_t>(node_idx)].ports.push_back(std::move(p));
                return static_cast<int>(nodes[static_cast<std::size_t>(node_idx)].ports.size() - 1);
            };
            l.port_a = attach(l.node_a, Direction::Forward);
            l.port_b = attach(l.node_b, Direction::Reverse);
            links.push_back(std::move(l));
        }

        // All ports go Listening at t=0; the listen timeout falls back to a
        // BMCA pass so masterless nodes start announcing.
        for (auto& n : nodes) {
            for (std::size_t pi = 0; pi < n.ports.size(); ++pi)
                set_port_state(n, static_cast<int>(pi), PortState::Listening, /*record=*/false);
            if (is_tc(n)) {
                if (n.spec.role == Role::TcP2p) {
                    for (std::size_t pi = 0; pi < n.ports.size(); ++pi) {
                        Event e;
                        e.at = delayreq_interval;
                        e.kind = Event::Kind::Timer;
                        e.timer = TimerKind::PdelayTx;
                        e.node = n.index;
                        e.port = static_cast<int>(pi);
                        e.gen = n.ports[pi].timer_gen;
                        schedule(e);
                    }
                }
                continue;
            }
            Event e;
            e.at = announce_timeout;
            e.kind = Event::Kind::Timer;
            e.timer = TimerKind::ListenTimeout;
            e.node = n.index;
            schedule(e);
        }
    }

    static bool is_tc(const NodeRt& n) {
        return n.spec.role == Role::TcE2e || n.spec.role == Role::TcP2p;
    }

    int node_index(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.spec.id == id) return n.index;
        throw SimError("unknown node id '" + id + "'");
    }

    // --- event queue ---
    void schedule(Event e) {
        if (e.at < now) throw SimError("event scheduled in the past");
        e.seq = next_seq++;
        queue.push(std::move(e));
    }

    void mix_trace(std::uint64_t v) {
        trace_hash ^= v;
        trace_hash *= 0x100000001b3ULL;
    }

    RunResult run_until(SimTime t_end) {
        if (t_end < now) throw SimError("run_until into the past");
        while (!queue.empty() && queue.top().at <= t_end) {
            Event e = queue.top();
            queue.pop();
            now = e.at;
            ++event_count;
            mix_trace(static_cast<std::uint64_t>(e.at));
            mix_trace((static_cast<std::uint64_t>(e.kind) << 32) |
                      (static_cast<std::uint64_t>(e.node + 1) << 8) |
                      static_cast<std::uint64_t>(e.port + 1));
            dispatch(e);
        }
        now = t_end;
        return result();
    }

    RunResult result() const {
        RunResult r;
        r.event_count = event_count;
        r.convergence_time = last_state_change;
        r.discarded_exchanges = discarded;
        r.ignored_announces = ignored_announces;
        r.trace_hash = trace_hash;
        for (const auto& n : nodes) {
            for (const auto& p : n.ports) {
                const LinkRt& l = links[static_cast<std::size_t>(p.link)];
                const int peer_node = l.node_a == n.index ? l.node_b : l.node_a;
                r.ports.push_back({n.spec.id, p.identity.port_number, p.state, l.id,
                                   nodes[static_cast<std::size_t>(peer_node)].spec.id});
            }
        }
        return r;
    }

    // --- clocks ---
    std::int64_t stamp(NodeRt& n) {
        const std::int64_t v = n.clock.read(now, n.clock_rng);
        const std::int64_t g = scn.timestamp_granularity_ns;
        return g > 1 ? floor_div(v, g) * g : v;
    }

    // --- transport ---
    void send(NodeRt& n, int port_idx, PtpMessage msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        LinkRt& l = links[static_cast<std::size_t>(p.link)];
        const std::int64_t delay = l.model->one_way_delay(p.dir_out, now);
        Event e;
        e.at = now + delay;
        e.kind = Event::Kind::Arrival;
        if (l.node_a == n.index && l.port_a == port_idx) {
            e.node = l.node_b;
            e.port = l.port_b;
        } else {
            e.node = l.node_a;
            e.port = l.port_a;
        }
        e.msg = std::move(msg);
        schedule(e);
    }

    // --- dispatch ---
    void dispatch(const Event& e) {
        switch (e.kind) {
            case Event::Kind::Arrival: {
                NodeRt& n = nodes[static_cast<std::size_t>(e.node)];
                if (is_tc(n))
                    tc_ingress(n, e.port, e.msg);
                else
                    process_message(n, e.port, e.msg);
                break;
            }
            case Event::Kind::TcEgress:
                tc_egress(nodes[static_cast<std::size_t>(e.node)], e.port, e.msg,
                          e.tc_ingress_local);
                break;
            case Event::Kind::Timer:
                dispatch_timer(e);
                break;
        }
    }

    void dispatch_timer(const Event& e) {
        NodeRt& n = nodes[static_cast<std::size_t>(e.node)];
        switch (e.timer) {
            case TimerKind::ListenTimeout:
                apply_bmca(n);
                break;
            case TimerKind::AnnounceTx: {
                PortRt& p = n.ports[static_cast<std::size_t>(e.port)];
                if (e.gen != p.timer_gen || p.state != PortState::Master) break;
                send_announce(n, e.port);
                Event next = e;
                next.at = now + announce_interval;
                schedule(next);
                break;
            }
            case TimerKind::SyncTx: {
                PortRt& p = n.ports[static_cast<std::size_t>(e.port)];
                if (e.gen != p.timer_gen || p.state != PortState::Master) break;
                send_sync(n, e.port);
                Event next = e;
                next.at = now + sync_interval;
                schedule(next);
                break;
            }
            case TimerKind::DelayReqTx: {
                PortRt& p = n.ports[static_cast<std::size_t>(e.port)];
                if (e.gen != p.timer_gen ||
                    (p.state != PortState::Slave && p.state != PortState::Uncalibrated))
                    break;
                send_delay_req(n, e.port);
                Event next = e;
                next.at = now + delayreq_interval;
                schedule(next);
                break;
            }
            case TimerKind::PdelayTx: {
                PortRt& p = n.ports[static_cast<std::size_t>(e.port)];
                if (e.gen != p.timer_gen) break;
                send_pdelay_req(n, e.port);
                Event next = e;
                next.at = now + delayreq_interval;
                schedule(next);
                break;
            }
            case TimerKind::ForeignExpiry: {
                PortRt& p = n.ports[static_cast<std::size_t>(e.port)];
                const auto seen = p.foreign.last_seen(e.expiry_sender);
                if (seen && *seen == e.expiry_last_seen) {
                    if (p.foreign.evict_expired(now, announce_timeout)) apply_bmca(n);
                }
                break;
            }
        }
    }

    // --- master behavior ---
    void send_announce(NodeRt& n, int port_idx) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        PtpMessage m;
        m.msg_type = MsgType::Announce;
        m.domain_number = static_cast<std::uint8_t>(scn.domain_number);
        m.source = p.identity;
        m.sequence_id = p.announce_seq++;
        m.announce = n.bmca.transmit;
        m.announce.sender = n.cid;
        send(n, port_idx, std::move(m));
    }

    void send_sync(NodeRt& n, int port_idx) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        const std::int64_t t1 = stamp(n);
        const std::uint16_t seq = p.sync_seq++;

        PtpMessage sync;
        sync.msg_type = MsgType::Sync;
        sync.domain_number = static_cast<std::uint8_t>(scn.domain_number);
        sync.source = p.identity;
        sync.sequence_id = seq;
        if (n.spec.two_step) {
            sync.flags = kFlagTwoStep;
            send(n, port_idx, std::move(sync));
            PtpMessage fu;
            fu.msg_type = MsgType::FollowUp;
            fu.domain_number = static_cast<std::uint8_t>(scn.domain_number);
            fu.source = p.identity;
            fu.sequence_id = seq;
            fu.origin_timestamp_ns = t1;
            send(n, port_idx, std::move(fu));
        } else {
            sync.origin_timestamp_ns = t1;
            send(n, port_idx, std::move(sync));
        }
    }

    void send_delay_req(NodeRt& n, int port_idx) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        const std::int64_t t3 = stamp(n);
        PtpMessage m;
        m.msg_type = MsgType::DelayReq;
        m.domain_number = static_cast<std::uint8_t>(scn.domain_number);
        m.source = p.identity;
        m.sequence_id = p.delayreq_seq++;
        p.outstanding_delayreq[m.sequence_id] = t3;
        if (p.outstanding_delayreq.size() > 32) p.outstanding_delayreq.clear();
        send(n, port_idx, std::move(m));
    }

    void send_pdelay_req(NodeRt& n, int port_idx) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        const std::int64_t t1 = stamp(n);
        PtpMessage m;
        m.msg_type = MsgType::PdelayReq;
        m.domain_number = static_cast<std::uint8_t>(scn.domain_number);
        m.source = p.identity;
        m.sequence_id = p.pdelay_seq++;
        p.outstanding_pdelay[m.sequence_id] = t1;
        if (p.outstanding_pdelay.size() > 32) p.outstanding_pdelay.clear();
        send(n, port_idx, std::move(m));
    }

    // --- slave/general message handling ---
    void process_message(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        if (msg.domain_number != scn.domain_number &&
            msg.msg_type != MsgType::PdelayReq) {
            if (msg.msg_type == MsgType::Announce) ++ignored_announces;
            return;
        }

        switch (msg.msg_type) {
            case MsgType::Announce:
                handle_announce(n, port_idx, msg);
                break;
            case MsgType::Sync:
                if (p.state == PortState::Slave || p.state == PortState::Uncalibrated)
                    handle_sync(n, port_idx, msg);
                break;
            case MsgType::FollowUp:
                if (p.state == PortState::Slave || p.state == PortState::Uncalibrated)
                    handle_followup(n, port_idx, msg);
                break;
            case MsgType::DelayReq:
                if (p.state == PortState::Master) handle_delay_req(n, port_idx, msg);
                break;
            case MsgType::DelayResp:
                if (p.state == PortState::Slave || p.state == PortState::Uncalibrated)
                    handle_delay_resp(n, port_idx, msg);
                break;
            case MsgType::PdelayReq:
                handle_pdelay_req(n, port_idx, msg);
                break;
            case MsgType::PdelayResp:
                handle_pdelay_resp(n, port_idx, msg);
                break;
            case MsgType::PdelayRespFollowUp:
                handle_pdelay_resp_followup(n, port_idx, msg);
                break;
            case MsgType::Signaling:
            case MsgType::Management:
                break;  // documented no-ops
        }
    }

    void handle_announce(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        const bool changed = p.foreign.upsert(msg.announce, now);
        Event expiry;
        expiry.at = now + announce_timeout;
        expiry.kind = Event::Kind::Timer;
        expiry.timer = TimerKind::ForeignExpiry;
        expiry.node = n.index;
        expiry.port = port_idx;
        expiry.expiry_sender = msg.announce.sender;
        expiry.expiry_last_seen = now;
        schedule(expiry);
        if (changed) apply_bmca(n);
    }

    void handle_sync(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        const std::int64_t t2 = stamp(n);
        if (msg.flags & kFlagTwoStep) {
            if (p.pending_sync.active) ++discarded;  // FollowUp never arrived
            p.pending_sync = {true, msg.sequence_id, t2, correction_subns_to_ns(msg.correction_subns)};
            const auto it = p.early_followups.find(msg.sequence_id);
            if (it != p.early_followups.end()) {
                const auto [t1, fu_corr] = it->second;
                p.early_followups.erase(it);
                p.pending_sync.active = false;
                complete_sync(n, port_idx, t1, t2, p.pending_sync.corr_fwd_ns + fu_corr);
            }
        } else {
            complete_sync(n, port_idx, msg.origin_timestamp_ns, t2,
                          correction_subns_to_ns(msg.correction_subns));
        }
    }

    void handle_followup(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        if (p.pending_sync.active && p.pending_sync.seq == msg.sequence_id) {
            p.pending_sync.active = false;
            complete_sync(n, port_idx, msg.origin_timestamp_ns, p.pending_sync.t2,
                          p.pending_sync.corr_fwd_ns + correction_subns_to_ns(msg.correction_subns));
        } else {
            p.early_followups[msg.sequence_id] = {msg.origin_timestamp_ns,
                                                  correction_subns_to_ns(msg.correction_subns)};
            if (p.early_followups.size() > 16) p.early_followups.clear();
        }
    }

    void handle_delay_req(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        const std::int64_t t4 = stamp(n);
        PtpMessage resp;
        resp.msg_type = MsgType::DelayResp;
        resp.domain_number = static_cast<std::uint8_t>(scn.domain_number);
        resp.source = p.identity;
        resp.sequence_id = msg.sequence_id;
        resp.receive_timestamp_ns = t4;
        resp.requesting = msg.source;
        resp.correction_subns = msg.correction_subns;  // residence gathered by the request
        send(n, port_idx, std::move(resp));
    }

    void handle_delay_resp(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        if (!(msg.requesting == p.identity)) return;
        const auto it = p.outstanding_delayreq.find(msg.sequence_id);
        if (it == p.outstanding_delayreq.end()) return;
        p.t3 = it->second;
        p.t4 = msg.receive_timestamp_ns;
        p.corr_rev_ns = correction_subns_to_ns(msg.correction_subns);
        p.have_delay = true;
        p.outstanding_delayreq.erase(it);
    }

    void handle_pdelay_req(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        const std::int64_t t2 = stamp(n);
        PtpMessage resp;
        resp.msg_type = MsgType::PdelayResp;
        resp.domain_number = msg.domain_number;
        resp.source = p.identity;
        resp.sequence_id = msg.sequence_id;
        resp.receive_timestamp_ns = t2;
        resp.requesting = msg.source;
        send(n, port_idx, resp);
        const std::int64_t t3 = stamp(n);
        PtpMessage fu;
        fu.msg_type = MsgType::PdelayRespFollowUp;
        fu.domain_number = msg.domain_number;
        fu.source = p.identity;
        fu.sequence_id = msg.sequence_id;
        fu.origin_timestamp_ns = t3;
        fu.requesting = msg.source;
        send(n, port_idx, std::move(fu));
    }

    void handle_pdelay_resp(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        if (!(msg.requesting == p.identity)) return;
        if (!p.outstanding_pdelay.count(msg.sequence_id)) return;
        p.pdelay_t2 = msg.receive_timestamp_ns;
        p.pdelay_t4 = stamp(n);
    }

    void handle_pdelay_resp_followup(NodeRt& n, int port_idx, const PtpMessage& msg) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        if (!(msg.requesting == p.identity)) return;
        const auto it = p.outstanding_pdelay.find(msg.sequence_id);
        if (it == p.outstanding_pdelay.end() || !p.pdelay_t2) return;
        const std::int64_t t1 = it->second;
        p.peer_delay_est_ns = peer_delay(t1, *p.pdelay_t2, msg.origin_timestamp_ns, p.pdelay_t4);
        p.outstanding_pdelay.erase(it);
        p.pdelay_t2.reset();
    }

    void complete_sync(NodeRt& n, int port_idx, std::int64_t t1, std::int64_t t2,
                       std::int64_t corr_fwd_ns) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        if (!p.have_delay) return;  // first exchange needs a delay measurement

        SyncExchange x;
        x.t1 = t1;
        x.t2 = t2;
        x.t3 = p.t3;
        x.t4 = p.t4;
        x.correction_fwd_ns = corr_fwd_ns;
        x.correction_rev_ns = p.corr_rev_ns;

        SyncSample sample;
        sample.offset_ns = offset_from_exchange(x);
        sample.mean_path_delay_ns = mpd_from_exchange(x);
        sample.at = now;
        n.last_offset = sample.offset_ns;

        n.clock.advance(now, n.clock_rng);
        const ServoAction action = servo_step(n.servo, sample);
        if (action.phase_step_ns) {
            n.clock.apply_phase_step(*action.phase_step_ns);
        } else {
            const double limit =
                std::max(0.0, kServoFreqClampPpb - std::abs(n.clock.freq_offset_ppb()));
            n.clock.apply_freq_adjust(std::clamp(action.freq_adjust_ppb, -limit, limit));
        }

        log->add(now, n.spec.id, Metric::OffsetNs, static_cast<double>(sample.offset_ns));
        log->add(now, n.spec.id, Metric::MpdNs, static_cast<double>(sample.mean_path_delay_ns));
        log->add(now, n.spec.id, Metric::TrueOffsetNs,
                 static_cast<double>(n.clock.read_nominal(now) - now));

        LinkRt& l = links[static_cast<std::size_t>(p.link)];
        if (l.model->wireless()) {
            const ChannelSample cs = l.model->sample_channel(now);
            log->add(now, n.spec.id, Metric::SnrDb, cs.snr_db);
            log->add(now, n.spec.id, Metric::RslDbm, cs.rsl_dbm);
            log->add(now, n.spec.id, Metric::RainMmh, cs.rain_mmh);
        }

        if (p.state == PortState::Uncalibrated && n.servo.locked)
            set_port_state(n, port_idx, PortState::Slave, /*record=*/true,
                           /*calibration_only=*/true);
    }

    // --- transparent clocks ---
    void tc_ingress(NodeRt& n, int port_idx, const PtpMessage& msg) {
        Event e;
        e.at = now + n.spec.tc_residence_ns;
        e.kind = Event::Kind::TcEgress;
        e.node = n.index;
        e.port = port_idx;
        e.msg = msg;
        e.tc_ingress_local = is_event_message(msg.msg_type) ? stamp(n) : 0;
        schedule(e);
    }

    void tc_egress(NodeRt& n, int ingress_port, const PtpMessage& msg,
                   std::int64_t ingress_local) {
        const int egress_port = ingress_port == 0 ? 1 : 0;
        PtpMessage out = msg;
        if (is_event_message(msg.msg_type)) {
            const std::int64_t egress_local = stamp(n);
            out.correction_subns += correction_ns_to_subns(egress_local - ingress_local);
            // A peer-to-peer TC also absorbs the upstream hop into the Sync path.
            if (n.spec.role == Role::TcP2p && msg.msg_type == MsgType::Sync)
                out.correction_subns += correction_ns_to_subns(
                    n.ports[static_cast<std::size_t>(ingress_port)].peer_delay_est_ns);
        }
        send(n, egress_port, std::move(out));
    }

    // --- BMCA + state machine ---
    void apply_bmca(NodeRt& n) {
        if (is_tc(n)) return;  // TCs take no part in the election
        BmcaInput input;
        input.own = n.own_dataset;
        input.port_best.reserve(n.ports.size());
        for (const auto& p : n.ports) input.port_best.push_back(p.foreign.best());
        BmcaResult res = run_bmca(input);
        n.bmca = res;

        for (std::size_t i = 0; i < n.ports.size(); ++i) {
            PortRt& p = n.ports[i];
            PortState desired = res.states[i];
            if (desired == PortState::Slave &&
                (p.state == PortState::Slave || p.state == PortState::Uncalibrated))
                continue;  // calibration progress is not a BMCA decision
            if (desired == PortState::Slave) desired = PortState::Uncalibrated;
            if (desired != p.state) set_port_state(n, static_cast<int>(i), desired, true);
        }
    }

    void set_port_state(NodeRt& n, int port_idx, PortState target, bool record,
                        bool calibration_only = false) {
        PortRt& p = n.ports[static_cast<std::size_t>(port_idx)];
        p.state = target;
        if (!calibration_only) {
            ++p.timer_gen;
            if (target == PortState::Master) {
                send_announce(n, port_idx);  // cut convergence by one interval
                for (TimerKind k : {TimerKind::AnnounceTx, TimerKind::SyncTx}) {
                    Event e;
                    e.at = now + (k == TimerKind::AnnounceTx ? announce_interval : sync_interval);
                    e.kind = Event::Kind::Timer;
                    e.timer = k;
                    e.node = n.index;
                    e.port = port_idx;
                    e.gen = p.timer_gen;
                    schedule(e);
                }
            } else if (target == PortState::Uncalibrated) {
                p.pending_sync = {};
                p.early_followups.clear();
                p.outstanding_delayreq.clear();
                p.have_delay = false;
                Event e;
                e.at = now + delayreq_interval;
                e.kind = Event::Kind::Timer;
                e.timer = TimerKind::DelayReqTx;
                e.node = n.index;
                e.port = port_idx;
                e.gen = p.timer_gen;
                schedule(e);
            }
        }
        if (record) {
            last_state_change = now;
            log->add(now, n.spec.id + ":p" + std::to_string(p.identity.port_number),
                     Metric::PortState, static_cast<double>(static_cast<int>(target)));
        }
    }
};

Simulation::Simulation(const Scenario& scenario, MetricLog& log)
    : impl_(std::make_unique<Impl>(scenario, log)) {}

Simulation::~Simulation() = default;

RunResult Simulation::run() { return impl_->run_until(seconds(impl_->scn.duration_s)); }

RunResult Simulation::run_until(SimTime t_end) { return impl_->run_until(t_end); }

SimTime Simulation::now() const { return impl_->now; }

PortState Simulation::port_state(const std::string& node, int port_number) const {
    const auto& n = impl_->nodes[static_cast<std::size_t>(impl_->node_index(node))];
    for (const auto& p : n.ports)
        if (p.identity.port_number == port_number) return p.state;
    throw SimError("unknown port " + std::to_string(port_number) + " on '" + node + "'");
}

std::optional<std::int64_t> Simulation::last_offset(const std::string& node) const {
    return impl_->nodes[static_cast<std::size_t>(impl_->node_index(node))].last_offset;
}

}  // namespace arasim
