#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "hdsim/metrics.hpp"
#include "hdsim/node.hpp"
#include "hdsim/queue.hpp"
#include "hdsim/simnet.hpp"
#include "test_util.hpp"

using namespace hdsim;
using namespace hdsim_test;

namespace {

Packet sample_packet(NodeId origin, std::uint32_t seq, int ttl) {
    Packet p;
    p.origin = origin;
    p.seq = seq;
    p.ttl = ttl;
    return p;
}

struct MockHooks : NodeHooks {
    struct SentFrame {
        Frame frame;
        int attempt_id;
    };
    std::vector<SentFrame> sent;
    std::vector<std::pair<NodeId, Time>> wakeups;
    std::vector<std::tuple<NodeId, Time, int>> timeouts;
    std::vector<Packet> delivered;
    std::vector<std::pair<Packet, DropReason>> dropped;
    std::vector<std::pair<NoteKind, NodeId>> notes;

    void send_frame(const Frame& f, int attempt_id) override { sent.push_back({f, attempt_id}); }
    void arm_wakeup(NodeId node, Time at) override { wakeups.push_back({node, at}); }
    void arm_timeout(NodeId node, Time at, int attempt_id) override {
        timeouts.push_back({node, at, attempt_id});
    }
    void packet_delivered(NodeId, const Packet& p, Time) override { delivered.push_back(p); }
    void packet_dropped(NodeId, const Packet& p, DropReason why, Time) override {
        dropped.push_back({p, why});
    }
    void trace_note(NoteKind kind, NodeId at, Time, NodeId, const Packet*, int) override {
        notes.push_back({kind, at});
    }

    int count_note(NoteKind k) const {
        int n = 0;
        for (const auto& [kind, at] : notes) {
            if (kind == k) ++n;
        }
        return n;
    }
};

Frame beacon_from(NodeId sender, int backlog, double path_cost = 0.0) {
    Frame f;
    f.kind = FrameKind::Beacon;
    f.sender = sender;
    f.receiver = kBroadcast;
    f.sender_backlog = backlog;
    f.sender_path_cost = path_cost;
    return f;
}

Frame data_from(NodeId sender, NodeId receiver, const Packet& p, int backlog = 0) {
    Frame f;
    f.kind = FrameKind::Data;
    f.sender = sender;
    f.receiver = receiver;
    f.sender_backlog = backlog;
    f.payload = p;
    return f;
}

}  // namespace

TEST_SUITE("node_machine") {

TEST_CASE("floating lifo queue pops newest first and never loses count") {
    FloatingLifoQueue q(3);
    CHECK(q.push(sample_packet(1, 0, 5)) == std::nullopt);
    CHECK(q.push(sample_packet(1, 1, 5)) == std::nullopt);
    CHECK(q.push(sample_packet(1, 2, 5)) == std::nullopt);
    CHECK(q.size() == 3);
    CHECK(q.effective_backlog() == 3);

    // Overflow evicts the oldest (bottom) entry and leaves a floating marker.
    auto evicted = q.push(sample_packet(1, 3, 5));
    REQUIRE(evicted.has_value());
    CHECK(evicted->seq == 0);
    CHECK(q.size() == 3);
    CHECK(q.floating() == 1);
    CHECK(q.effective_backlog() == 4);

    // LIFO: newest out first.
    auto top = q.pop();
    REQUIRE(top.has_value());
    CHECK(top->seq == 3);
    CHECK(q.effective_backlog() == 3);  // floating remainder persists

    q.restore_top(*top);
    auto again = q.pop();
    REQUIRE(again.has_value());
    CHECK(again->seq == 3);

    // The floating count never decreases as the queue drains.
    (void)q.pop();
    (void)q.pop();
    CHECK(q.size() == 0);
    CHECK(q.floating() == 1);
    CHECK(q.effective_backlog() == 1);
}

TEST_CASE("duplicate filter remembers a bounded history in fifo order") {
    DuplicateFilter f(3);
    f.insert(7, 0);
    f.insert(7, 1);
    f.insert(7, 2);
    CHECK(f.contains(7, 0));
    CHECK(f.contains(7, 2));

    // Re-inserting a present key must not reorder or grow the history.
    f.insert(7, 0);
    CHECK(f.size() == 3);

    f.insert(8, 0);  // evicts the oldest entry (7,0)
    CHECK_FALSE(f.contains(7, 0));
    CHECK(f.contains(7, 1));
    CHECK(f.contains(8, 0));
    CHECK(f.size() == 3);
}

TEST_CASE("origination stamps ttl and queues locally") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    MockHooks hooks;
    NodeState node(5, Role::Source, cfg, 1);

    const Packet p = node.originate(sec(1), hooks);
    CHECK(p.origin == 5);
    CHECK(p.seq == 0);
    CHECK(p.ttl == cfg.initial_ttl);
    CHECK(p.created_at == sec(1));
    CHECK(node.effective_backlog() == 1);
    REQUIRE(hooks.wakeups.size() == 1);

    const Packet p2 = node.originate(sec(2), hooks);
    CHECK(p2.seq == 1);
    CHECK(node.effective_backlog() == 2);
}

TEST_CASE("local overflow drops the oldest packet") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    cfg.queue_capacity = 3;
    MockHooks hooks;
    NodeState node(5, Role::Source, cfg, 1);
    for (int i = 0; i < 4; ++i) (void)node.originate(sec(i + 1), hooks);

    REQUIRE(hooks.dropped.size() == 1);
    CHECK(hooks.dropped[0].second == DropReason::Overflow);
    CHECK(hooks.dropped[0].first.seq == 0);
    CHECK(node.queue().size() == 3);
    CHECK(node.effective_backlog() == 4);  // floating remainder still advertised
}

TEST_CASE("beacons advertise the effective backlog") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    cfg.queue_capacity = 2;
    MockHooks hooks;
    NodeState node(5, Role::Source, cfg, 1);
    for (int i = 0; i < 3; ++i) (void)node.originate(sec(i + 1), hooks);  // 2 queued + 1 floating

    node.on_beacon_timer(sec(4), hooks);
    REQUIRE(hooks.sent.size() == 1);
    CHECK(hooks.sent[0].frame.kind == FrameKind::Beacon);
    CHECK(hooks.sent[0].frame.receiver == kBroadcast);
    CHECK(hooks.sent[0].frame.sender_backlog == 3);
    CHECK(hooks.sent[0].frame.sender_backlog == node.effective_backlog());
    CHECK(hooks.sent[0].attempt_id == -1);

    // The sink never holds traffic, so it always advertises zero.
    NodeState sink(0, Role::Sink, cfg, 1);
    sink.on_beacon_timer(sec(4), hooks);
    CHECK(hooks.sent.back().frame.sender_backlog == 0);
}

TEST_CASE("scaled heat rule holds fire until the differential clears v*etx/2") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    MockHooks hooks;
    NodeState node(5, Role::Source, cfg, 1);
    node.on_overhear(beacon_from(9, 0), sec(1));  // neighbor with empty queue, fresh etx 1.0

    (void)node.originate(sec(2), hooks);
    node.on_wakeup(sec(3), hooks);
    // Differential 1 == v*etx/2: weight zero, not eligible.
    CHECK(hooks.sent.empty());
    CHECK(hooks.count_note(NoteKind::NoEligible) == 1);
    CHECK(node.queue().size() == 1);          // packet went back on top
    CHECK(hooks.wakeups.size() == 2);         // retry wakeup armed

    (void)node.originate(sec(4), hooks);
    node.on_wakeup(sec(5), hooks);
    // Differential 2 > 1: transmit to the only neighbor.
    REQUIRE(hooks.sent.size() == 1);
    CHECK(hooks.sent[0].frame.kind == FrameKind::Data);
    CHECK(hooks.sent[0].frame.receiver == 9);
    CHECK(hooks.sent[0].frame.payload.origin == 5);
    // Header backlog reflects the queue after the in-flight packet left it.
    CHECK(hooks.sent[0].frame.sender_backlog == node.effective_backlog());
    REQUIRE(hooks.timeouts.size() == 1);

    // Ack: packet departs with one hop and its sojourn accounted.
    auto departed = node.on_ack(hooks.sent[0].attempt_id, sec(6), hooks);
    REQUIRE(departed.has_value());
    CHECK(departed->hop_count == 1);
    CHECK(departed->accumulated_delay == sec(6) - sec(4));
}

TEST_CASE("plain backpressure holds fire until the differential clears v*etx") {
    RunConfig cfg;
    cfg.protocol = {Protocol::Bcp, 1.0, 2.0};
    MockHooks hooks;
    NodeState node(5, Role::Source, cfg, 1);
    node.on_overhear(beacon_from(9, 0), sec(1));

    (void)node.originate(sec(2), hooks);
    (void)node.originate(sec(3), hooks);
    node.on_wakeup(sec(4), hooks);
    // Differential 2 == v*etx: weight zero, not eligible.
    CHECK(hooks.sent.empty());
    CHECK(hooks.count_note(NoteKind::NoEligible) == 1);

    (void)node.originate(sec(5), hooks);
    node.on_wakeup(sec(6), hooks);
    REQUIRE(hooks.sent.size() == 1);
    CHECK(hooks.sent[0].frame.receiver == 9);
}

TEST_CASE("retransmissions stop at the software retry limit") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    MockHooks hooks;
    NodeState node(5, Role::Source, cfg, 1);
    node.on_overhear(beacon_from(9, 0), sec(1));
    (void)node.originate(sec(2), hooks);
    (void)node.originate(sec(3), hooks);
    node.on_wakeup(sec(4), hooks);
    REQUIRE(hooks.sent.size() == 1);

    // Burst fails, deadline passes, burst fails, ... until the cap.
    for (int round = 0; round < cfg.max_sw_retx; ++round) {
        REQUIRE(hooks.sent.size() == static_cast<std::size_t>(round + 1));
        const int attempt = hooks.sent.back().attempt_id;
        node.on_mac_failure(attempt, sec(5 + 2 * round), hooks);
        node.on_timeout(attempt, sec(6 + 2 * round), hooks);
    }
    CHECK(hooks.sent.size() == static_cast<std::size_t>(cfg.max_sw_retx));
    CHECK(hooks.count_note(NoteKind::ArqTimeout) == cfg.max_sw_retx);
    REQUIRE(hooks.dropped.size() == 1);
    CHECK(hooks.dropped[0].second == DropReason::RetxLimit);
    CHECK(hooks.dropped[0].first.attempt_count == cfg.max_sw_retx);
    CHECK_FALSE(node.arq().in_flight.has_value());
}

TEST_CASE("stale acks and mismatched attempt ids are ignored") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    MockHooks hooks;
    NodeState node(5, Role::Source, cfg, 1);
    node.on_overhear(beacon_from(9, 0), sec(1));
    (void)node.originate(sec(2), hooks);
    (void)node.originate(sec(3), hooks);
    node.on_wakeup(sec(4), hooks);
    REQUIRE(hooks.sent.size() == 1);
    const int attempt = hooks.sent[0].attempt_id;

    CHECK_FALSE(node.on_ack(attempt + 13, sec(5), hooks).has_value());
    CHECK(hooks.count_note(NoteKind::StaleAck) == 1);
    CHECK(node.arq().in_flight.has_value());  // still waiting for the real ack

    CHECK(node.on_ack(attempt, sec(6), hooks).has_value());
}

TEST_CASE("duplicate data is dropped by the history filter") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    MockHooks hooks;
    NodeState node(4, Role::Relay, cfg, 1);

    const Packet p = sample_packet(7, 3, 5);
    node.on_data_receive(data_from(9, 4, p), sec(1), hooks);
    CHECK(node.queue().size() == 1);

    node.on_data_receive(data_from(9, 4, p), sec(2), hooks);
    CHECK(node.queue().size() == 1);
    CHECK(hooks.count_note(NoteKind::DupDrop) == 1);
}

TEST_CASE("relays drop expiring packets and forward the rest") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    MockHooks hooks;
    NodeState node(4, Role::Relay, cfg, 1);

    node.on_data_receive(data_from(9, 4, sample_packet(7, 0, 1)), sec(1), hooks);
    REQUIRE(hooks.dropped.size() == 1);
    CHECK(hooks.dropped[0].second == DropReason::TtlExpired);
    CHECK(node.queue().size() == 0);

    node.on_data_receive(data_from(9, 4, sample_packet(7, 1, 2)), sec(2), hooks);
    CHECK(node.queue().size() == 1);
    CHECK(hooks.dropped.size() == 1);
}

TEST_CASE("the sink delivers immediately with zero local sojourn") {
    RunConfig cfg;
    cfg.protocol = {Protocol::HdcpModified, 1.0, 2.0};
    MockHooks hooks;
    NodeState sink(0, Role::Sink, cfg, 1);

    Packet p = sample_packet(7, 0, 4);
    p.accumulated_delay = msec(250);
    p.hop_count = 2;
    sink.on_data_receive(data_from(1, 0, p), sec(1), hooks);
    REQUIRE(hooks.delivered.size() == 1);
    CHECK(hooks.delivered[0].accumulated_delay == msec(250));
    CHECK(hooks.delivered[0].hop_count == 2);
    CHECK(sink.effective_backlog() == 0);

    // Even the sink refuses duplicates.
    sink.on_data_receive(data_from(1, 0, p), sec(2), hooks);
    CHECK(hooks.delivered.size() == 1);
    CHECK(hooks.count_note(NoteKind::DupDrop) == 1);
}

TEST_CASE("tree mode picks the parent minimizing advertised cost plus link etx") {
    RunConfig cfg;
    cfg.protocol.kind = Protocol::MinEtxTree;
    MockHooks hooks;
    NodeState node(5, Role::Source, cfg, 1);

    node.on_overhear(beacon_from(0, 0, 0.0), sec(1));   // sink: path cost 0, fresh etx 1
    node.on_overhear(beacon_from(7, 0, 0.5), sec(1));   // peer advertising cost 0.5
    node.on_tree_recompute(sec(2), hooks);
    REQUIRE(node.parent().has_value());
    CHECK(*node.parent() == 0);                          // 0 + 1.0 beats 0.5 + 1.0
    CHECK(node.path_cost() == 1.0);
    CHECK(hooks.count_note(NoteKind::ParentChange) == 1);

    // Re-running with the same view keeps the parent (no flapping).
    node.on_tree_recompute(sec(3), hooks);
    CHECK(hooks.count_note(NoteKind::ParentChange) == 1);
}

TEST_CASE("delivered packets carry their full trace-verifiable sojourn") {
    // Per-hop sojourns telescope: every handoff's ack lands at the instant
    // the next hop enqueues, so the accumulated delay of a delivered packet
    // must equal delivery time minus origination time, exactly, per packet.
    RunConfig cfg = quick_config(Protocol::HdcpModified, 0.2, 120, 0, 3);
    const EventTrace trace = run_scenario(require_valid(cfg), make_chain3());

    std::map<std::pair<NodeId, std::int64_t>, Time> origin_at;
    std::int64_t delivered = 0, delay_mismatches = 0, hop_errors = 0;
    for (const TraceRecord& r : trace.records) {
        if (r.kind == TraceKind::Originate) origin_at[{r.origin, r.seq}] = r.t;
        if (r.kind != TraceKind::Deliver) continue;
        ++delivered;
        REQUIRE(origin_at.count({r.origin, r.seq}) == 1);
        const Time born = origin_at[{r.origin, r.seq}];
        if (Time{r.a} != r.t - born) ++delay_mismatches;
        // On the two-hop chain, hop counts are fixed by the topology.
        const int expected_hops = r.origin == 1 ? 1 : 2;
        if (r.b != expected_hops) ++hop_errors;
    }
    CHECK(delivered > 0);
    CHECK(delay_mismatches == 0);
    CHECK(hop_errors == 0);

    const AuditResult audit = audit_trace(trace);
    CHECK(audit.ok);
    CHECK(audit.originated == audit.delivered + audit.dropped + audit.residual + audit.in_flight);
}

}  // TEST_SUITE
