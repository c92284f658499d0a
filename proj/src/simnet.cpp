#include "hdsim/simnet.hpp"

#include <algorithm>
#include <cassert>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hdsim/node.hpp"

namespace hdsim {

LinkModel link_model_from(const TopoLink& l) {
    LinkModel m;
    m.from = l.from;
    m.to = l.to;
    m.p_good_to_good = l.p_good_to_good;
    m.p_bad_to_good = l.p_bad_to_good;
    m.loss_in_good = l.loss_in_good;
    m.loss_in_bad = l.loss_in_bad;
    return m;
}

TrialOutcome attempt_transmission(LinkModel& link, int max_subtries, Rng& rng) {
    TrialOutcome out;
    for (int i = 0; i < max_subtries; ++i) {
        ++out.subtries;
        if (link.trial(rng)) {
            out.success = true;
            return out;
        }
    }
    return out;
}

namespace {

enum class EvKind : std::uint8_t {
    Originate,      // a = node
    Wakeup,         // a = node
    Timeout,        // a = node, b = attempt id
    Beacon,         // a = node
    TreeRecompute,  // a = node
    TxStart,        // a = node, b = pending id
    BurstEnd,       // a = burst id
    ItfFrame,
    QueueSample,
    RouteSample,
};

struct SimEvent {
    EvKind kind;
    std::int64_t a = 0;
    std::int64_t b = 0;
};

struct PendingFrame {
    int id = 0;
    Frame frame;
    int attempt_id = -1;   // -1 for beacons
};

struct OverlapInfo {
    NodeId sender = kNoNode;
    bool interference = false;
};

struct Burst {
    int id = 0;
    NodeId sender = kNoNode;
    Frame frame;
    int attempt_id = -1;
    Time start{0};
    Time end{0};
    bool interference = false;
    bool trial_success = false;
    int subtries = 0;
    std::vector<OverlapInfo> overlaps;
};

class Simulator final : public NodeHooks {
public:
    Simulator(const ValidatedConfig& vcfg, const Topology& topo)
        : cfg_(vcfg.cfg), topo_(topo) {
        build_world();
    }

    EventTrace run();

    // -- NodeHooks ----------------------------------------------------------

    void send_frame(const Frame& f, int attempt_id) override {
        PendingFrame p;
        p.id = next_pending_id_++;
        p.frame = f;
        p.attempt_id = attempt_id;
        pending_[static_cast<std::size_t>(f.sender)].push_back(p);
        const int backlog = nodes_[static_cast<std::size_t>(f.sender)].effective_backlog();
        if (f.kind == FrameKind::Beacon) {
            record(TraceKind::BeaconEmit, f.sender, f.receiver, kNoNode, -1, f.sender_backlog, backlog);
        } else {
            record(TraceKind::FrameEmit, f.sender, f.receiver, f.payload.origin,
                   f.payload.seq, f.sender_backlog, backlog);
        }
        queue_.push(now_, {EvKind::TxStart, f.sender, p.id});
    }

    void arm_wakeup(NodeId node, Time at) override {
        queue_.push(at, {EvKind::Wakeup, node, 0});
    }

    void arm_timeout(NodeId node, Time at, int attempt_id) override {
        queue_.push(at, {EvKind::Timeout, node, attempt_id});
    }

    void packet_delivered(NodeId at, const Packet& p, Time now) override {
        (void)now;
        // peer doubles as the total transmission-attempt count for the packet.
        record(TraceKind::Deliver, at, static_cast<NodeId>(p.attempt_count), p.origin, p.seq,
               p.accumulated_delay.ticks, p.hop_count);
    }

    void packet_dropped(NodeId at, const Packet& p, DropReason why, Time now) override {
        (void)now;
        TraceKind kind = TraceKind::DropOverflow;
        switch (why) {
            case DropReason::Overflow:   kind = TraceKind::DropOverflow; break;
            case DropReason::TtlExpired: kind = TraceKind::DropTtl; break;
            case DropReason::RetxLimit:  kind = TraceKind::DropRetx; break;
        }
        record(kind, at, kNoNode, p.origin, p.seq, p.attempt_count, p.hop_count);
    }

    void trace_note(NoteKind kind, NodeId at, Time now, NodeId aux,
                    const Packet* p, int value) override {
        (void)now;
        const NodeId origin = p ? p->origin : kNoNode;
        const std::int64_t seq = p ? static_cast<std::int64_t>(p->seq) : -1;
        switch (kind) {
            case NoteKind::DupDrop:
                record(TraceKind::DropDup, at, aux, origin, seq, 0, 0);
                break;
            case NoteKind::StaleAck:
                record(TraceKind::StaleAck, at, aux, origin, seq, 0, 0);
                break;
            case NoteKind::NoEligible:
                record(TraceKind::NoEligible, at, aux, origin, seq, 0, 0);
                break;
            case NoteKind::ParentChange:
                record(TraceKind::ParentChange, at, aux, origin, seq, 0, 0);
                break;
            case NoteKind::ArqTimeout:
                record(TraceKind::ArqTimeout, at, aux, origin, seq, value, 0);
                break;
        }
    }

private:
    void build_world();
    void dispatch(const SimEvent& ev);
    void handle_tx_start(NodeId node, int pending_id);
    void handle_burst_end(int burst_id);
    void handle_itf_frame();
    bool channel_busy_for(NodeId node) const;
    bool hears(NodeId listener, const OverlapInfo& o) const;
    bool collided_at(NodeId listener, const Burst& b) const;
    bool deaf_during(NodeId listener, const Burst& b) const;
    LinkModel* link(NodeId from, NodeId to);
    Rng* link_rng(NodeId from, NodeId to);

    void record(TraceKind kind, NodeId node, NodeId peer, NodeId origin,
                std::int64_t seq, std::int64_t a, std::int64_t b) {
        trace_.records.push_back({now_, kind, node, peer, origin, seq, a, b});
    }

    RunConfig cfg_;
    Topology topo_;
    int n_ = 0;

    std::vector<NodeState> nodes_;
    std::vector<LinkModel> links_;
    std::vector<Rng> link_rngs_;
    std::vector<int> link_index_;                 // n*n lookup, -1 when absent
    std::vector<std::vector<NodeId>> hearers_;    // hearers_[s]: nodes with link s->L, ascending
    std::vector<char> impacted_;                  // interference victim flags
    std::vector<Rng> mac_rngs_;

    EventQueue<SimEvent> queue_;
    Time now_{0};
    EventTrace trace_;

    std::vector<std::vector<PendingFrame>> pending_;
    int next_pending_id_ = 1;
    std::map<int, Burst> active_;                 // on-air bursts by id
    int next_burst_id_ = 1;

    std::vector<std::int64_t> tx_air_, rx_air_;
    Time orig_period_{0};
};

void Simulator::build_world() {
    n_ = topo_.node_count();
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    for (const TopoNode& tn : topo_.nodes) {
        if (tn.id < 0 || tn.id >= n_ || seen[static_cast<std::size_t>(tn.id)]) {
            throw std::runtime_error("simnet: node ids must be dense 0..N-1");
        }
        seen[static_cast<std::size_t>(tn.id)] = 1;
    }
    bool sink_ok = false;
    for (const TopoNode& tn : topo_.nodes) {
        if (tn.id == kSinkId && tn.role == Role::Sink) sink_ok = true;
    }
    if (!sink_ok) throw std::runtime_error("simnet: node 0 must be the sink");

    // Nodes ordered by id regardless of file order.
    std::vector<TopoNode> ordered(topo_.nodes);
    std::sort(ordered.begin(), ordered.end(),
              [](const TopoNode& a, const TopoNode& b) { return a.id < b.id; });
    nodes_.reserve(static_cast<std::size_t>(n_));
    for (const TopoNode& tn : ordered) {
        nodes_.emplace_back(tn.id, tn.role, cfg_, derive_seed(cfg_.seed, 0x6e6f, static_cast<std::uint64_t>(tn.id)));
    }

    link_index_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), -1);
    hearers_.assign(static_cast<std::size_t>(n_), {});
    for (const TopoLink& tl : topo_.links) {
        const std::size_t slot = static_cast<std::size_t>(tl.from) * static_cast<std::size_t>(n_) +
                                 static_cast<std::size_t>(tl.to);
        if (link_index_[slot] != -1) throw std::runtime_error("simnet: duplicate link");
        link_index_[slot] = static_cast<int>(links_.size());
        links_.push_back(link_model_from(tl));
        link_rngs_.emplace_back(derive_seed(cfg_.seed, 0x6c6b, links_.size() - 1));
        hearers_[static_cast<std::size_t>(tl.from)].push_back(tl.to);
    }
    for (auto& h : hearers_) std::sort(h.begin(), h.end());

    impacted_.assign(static_cast<std::size_t>(n_), 0);
    for (NodeId v : cfg_.interference.impacted) {
        if (v >= 0 && v < n_) impacted_[static_cast<std::size_t>(v)] = 1;
    }

    mac_rngs_.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        mac_rngs_.emplace_back(derive_seed(cfg_.seed, 0x6d61, static_cast<std::uint64_t>(i)));
    }

    pending_.assign(static_cast<std::size_t>(n_), {});
    tx_air_.assign(static_cast<std::size_t>(n_), 0);
    rx_air_.assign(static_cast<std::size_t>(n_), 0);

    orig_period_ = Time{static_cast<std::int64_t>(std::llround(1e6 / cfg_.source_rate_pps))};

    // Initial timers, phased uniformly so nodes do not act in lockstep.
    for (int i = 0; i < n_; ++i) {
        Rng setup(derive_seed(cfg_.seed, 0x7068, static_cast<std::uint64_t>(i)));
        const NodeState& node = nodes_[static_cast<std::size_t>(i)];
        if (node.role() == Role::Source) {
            queue_.push(Time{setup.uniform_int(0, orig_period_.ticks - 1)}, {EvKind::Originate, i, 0});
        }
        const Time bp = node.is_sink() ? cfg_.sink_beacon_period : cfg_.source_beacon_period;
        queue_.push(Time{setup.uniform_int(0, bp.ticks - 1)}, {EvKind::Beacon, i, 0});
        if (cfg_.protocol.kind == Protocol::MinEtxTree) {
            queue_.push(Time{setup.uniform_int(0, cfg_.tree_recompute_period.ticks - 1)},
                        {EvKind::TreeRecompute, i, 0});
        }
    }
    queue_.push(cfg_.queue_sample_period, {EvKind::QueueSample, 0, 0});
    queue_.push(cfg_.route_sample_period, {EvKind::RouteSample, 0, 0});
    if (cfg_.interference.enabled()) {
        queue_.push(cfg_.interference.window_start, {EvKind::ItfFrame, 0, 0});
    }
}

LinkModel* Simulator::link(NodeId from, NodeId to) {
    if (from < 0 || to < 0 || from >= n_ || to >= n_) return nullptr;
    const int idx = link_index_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
                                static_cast<std::size_t>(to)];
    return idx >= 0 ? &links_[static_cast<std::size_t>(idx)] : nullptr;
}

Rng* Simulator::link_rng(NodeId from, NodeId to) {
    const int idx = link_index_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
                                static_cast<std::size_t>(to)];
    return idx >= 0 ? &link_rngs_[static_cast<std::size_t>(idx)] : nullptr;
}

bool Simulator::hears(NodeId listener, const OverlapInfo& o) const {
    if (o.interference) return impacted_[static_cast<std::size_t>(listener)] != 0;
    const std::size_t slot = static_cast<std::size_t>(o.sender) * static_cast<std::size_t>(n_) +
                             static_cast<std::size_t>(listener);
    return link_index_[slot] >= 0;
}

bool Simulator::channel_busy_for(NodeId node) const {
    for (const auto& [id, b] : active_) {
        if (b.interference) continue;   // jammer frames are noise, not sensed preambles
        if (b.sender == node) return true;
        if (hears(node, {b.sender, false})) return true;
    }
    return false;
}

bool Simulator::collided_at(NodeId listener, const Burst& b) const {
    for (const OverlapInfo& o : b.overlaps) {
        if (o.sender == listener) continue;        // own transmission: deafness, not collision
        if (!o.interference && o.sender == b.sender) continue;
        if (hears(listener, o)) return true;
    }
    return false;
}

bool Simulator::deaf_during(NodeId listener, const Burst& b) const {
    for (const OverlapInfo& o : b.overlaps) {
        if (!o.interference && o.sender == listener) return true;
    }
    return false;
}

void Simulator::handle_tx_start(NodeId node, int pending_id) {
    auto& plist = pending_[static_cast<std::size_t>(node)];
    auto it = std::find_if(plist.begin(), plist.end(),
                           [&](const PendingFrame& p) { return p.id == pending_id; });
    if (it == plist.end()) return;

    if (channel_busy_for(node)) {
        record(TraceKind::CsmaDefer, node, kNoNode, kNoNode, -1, 0, 0);
        const Time backoff = mac_rngs_[static_cast<std::size_t>(node)].uniform_time(cfg_.csma_backoff);
        queue_.push(now_ + backoff, {EvKind::TxStart, node, pending_id});
        return;
    }

    Burst b;
    b.id = next_burst_id_++;
    b.sender = node;
    b.frame = it->frame;
    b.attempt_id = it->attempt_id;
    b.start = now_;
    plist.erase(it);

    if (b.frame.kind == FrameKind::Data) {
        LinkModel* lm = link(node, b.frame.receiver);
        if (lm) {
            TrialOutcome out = attempt_transmission(*lm, cfg_.mac_subtries,
                                                    *link_rng(node, b.frame.receiver));
            b.trial_success = out.success;
            b.subtries = out.subtries;
        } else {
            b.trial_success = false;
            b.subtries = cfg_.mac_subtries;
        }
    } else {
        b.trial_success = true;   // per-listener trials happen at resolution
        b.subtries = 1;
    }
    b.end = now_ + b.frame.airtime * b.subtries;

    for (auto& [id, other] : active_) {
        other.overlaps.push_back({b.sender, false});
        b.overlaps.push_back({other.sender, other.interference});
    }
    record(TraceKind::BurstStart, node, b.frame.receiver,
           b.frame.kind == FrameKind::Data ? b.frame.payload.origin : kNoNode,
           b.frame.kind == FrameKind::Data ? static_cast<std::int64_t>(b.frame.payload.seq) : -1,
           b.frame.sender_backlog, b.attempt_id);
    queue_.push(b.end, {EvKind::BurstEnd, b.id, 0});
    active_.emplace(b.id, std::move(b));
}

void Simulator::handle_burst_end(int burst_id) {
    auto it = active_.find(burst_id);
    assert(it != active_.end());
    Burst b = std::move(it->second);
    active_.erase(it);

    if (b.interference) return;

    const Time duration = b.end - b.start;
    tx_air_[static_cast<std::size_t>(b.sender)] += duration.ticks;

    NodeId receiver = kNoNode;
    int outcome = kOutcomeBroadcast;

    if (b.frame.kind == FrameKind::Data) {
        receiver = b.frame.receiver;
        const bool has_link = link(b.sender, receiver) != nullptr;
        const bool deaf = deaf_during(receiver, b);
        const bool collided = collided_at(receiver, b);
        if (!has_link) {
            outcome = kOutcomeNoLink;
        } else if (deaf) {
            outcome = kOutcomeReceiverDeaf;
        } else if (b.trial_success && collided) {
            outcome = kOutcomeCollided;
            record(TraceKind::Collision, receiver, b.sender, b.frame.payload.origin,
                   b.frame.payload.seq, duration.ticks, 0);
        } else if (b.trial_success) {
            outcome = kOutcomeDelivered;
        } else {
            outcome = kOutcomeTrialFail;
        }

        NodeState& sender = nodes_[static_cast<std::size_t>(b.sender)];
        if (outcome == kOutcomeDelivered) {
            std::optional<Packet> departed = sender.on_ack(b.attempt_id, now_, *this);
            assert(departed);
            if (departed) {
                record(TraceKind::AckRx, b.sender, receiver, departed->origin, departed->seq,
                       b.subtries, 0);
                Frame delivered = b.frame;
                delivered.payload = *departed;
                record(TraceKind::DataRx, receiver, b.sender, departed->origin, departed->seq,
                       duration.ticks, 0);
                rx_air_[static_cast<std::size_t>(receiver)] += duration.ticks;
                nodes_[static_cast<std::size_t>(receiver)].on_data_receive(delivered, now_, *this);
            }
        } else {
            sender.on_mac_failure(b.attempt_id, now_, *this);
        }
    }

    record(TraceKind::BurstEnd, b.sender, b.frame.receiver,
           b.frame.kind == FrameKind::Data ? b.frame.payload.origin : kNoNode,
           b.frame.kind == FrameKind::Data ? static_cast<std::int64_t>(b.frame.payload.seq) : -1,
           b.subtries, outcome);

    // Everyone else in range can decode the header if their own link trial
    // passes and nothing overlapped at their position.
    for (NodeId listener : hearers_[static_cast<std::size_t>(b.sender)]) {
        if (listener == receiver) continue;
        if (deaf_during(listener, b) || collided_at(listener, b)) continue;
        LinkModel* lm = link(b.sender, listener);
        if (!lm->trial(*link_rng(b.sender, listener))) continue;
        nodes_[static_cast<std::size_t>(listener)].on_overhear(b.frame, now_);
        record(TraceKind::Sniff, listener, b.sender, kNoNode, -1, duration.ticks, 0);
        rx_air_[static_cast<std::size_t>(listener)] += duration.ticks;
    }
}

void Simulator::handle_itf_frame() {
    const InterferenceSpec& itf = cfg_.interference;
    if (now_ >= itf.window_end) return;

    const Time cycle = itf.on_period + itf.off_period;
    const std::int64_t into_cycle = (now_ - itf.window_start).ticks % cycle.ticks;
    const Time gap{static_cast<std::int64_t>(std::llround(1e6 / itf.rate_pps))};

    if (into_cycle < itf.on_period.ticks) {
        Burst b;
        b.id = next_burst_id_++;
        b.sender = kNoNode;
        b.interference = true;
        b.start = now_;
        b.end = now_ + itf.frame_airtime;
        for (auto& [id, other] : active_) {
            other.overlaps.push_back({kNoNode, true});
            b.overlaps.push_back({other.sender, other.interference});
        }
        record(TraceKind::InterfererFrame, kNoNode, kNoNode, kNoNode, -1,
               itf.frame_airtime.ticks, 0);
        queue_.push(b.end, {EvKind::BurstEnd, b.id, 0});
        active_.emplace(b.id, std::move(b));
        queue_.push(now_ + gap, {EvKind::ItfFrame, 0, 0});
    } else {
        const std::int64_t cycles_done = (now_ - itf.window_start).ticks / cycle.ticks + 1;
        queue_.push(itf.window_start + cycle * cycles_done, {EvKind::ItfFrame, 0, 0});
    }
}

void Simulator::dispatch(const SimEvent& ev) {
    switch (ev.kind) {
        case EvKind::Originate: {
            const NodeId node = static_cast<NodeId>(ev.a);
            Packet p = nodes_[static_cast<std::size_t>(node)].originate(now_, *this);
            record(TraceKind::Originate, node, kNoNode, p.origin, p.seq, 0, 0);
            queue_.push(now_ + orig_period_, {EvKind::Originate, node, 0});
            break;
        }
        case EvKind::Wakeup:
            nodes_[static_cast<std::size_t>(ev.a)].on_wakeup(now_, *this);
            break;
        case EvKind::Timeout:
            nodes_[static_cast<std::size_t>(ev.a)].on_timeout(static_cast<int>(ev.b), now_, *this);
            break;
        case EvKind::Beacon: {
            const NodeId node = static_cast<NodeId>(ev.a);
            NodeState& ns = nodes_[static_cast<std::size_t>(node)];
            ns.on_beacon_timer(now_, *this);
            const Time bp = ns.is_sink() ? cfg_.sink_beacon_period : cfg_.source_beacon_period;
            queue_.push(now_ + bp, {EvKind::Beacon, node, 0});
            break;
        }
        case EvKind::TreeRecompute: {
            const NodeId node = static_cast<NodeId>(ev.a);
            nodes_[static_cast<std::size_t>(node)].on_tree_recompute(now_, *this);
            queue_.push(now_ + cfg_.tree_recompute_period, {EvKind::TreeRecompute, node, 0});
            break;
        }
        case EvKind::TxStart:
            handle_tx_start(static_cast<NodeId>(ev.a), static_cast<int>(ev.b));
            break;
        case EvKind::BurstEnd:
            handle_burst_end(static_cast<int>(ev.a));
            break;
        case EvKind::ItfFrame:
            handle_itf_frame();
            break;
        case EvKind::QueueSample: {
            for (int i = 0; i < n_; ++i) {
                const NodeState& ns = nodes_[static_cast<std::size_t>(i)];
                record(TraceKind::QueueSample, i, kNoNode, kNoNode, -1,
                       ns.effective_backlog(), ns.queue().size());
            }
            queue_.push(now_ + cfg_.queue_sample_period, {EvKind::QueueSample, 0, 0});
            break;
        }
        case EvKind::RouteSample: {
            for (int i = 0; i < n_; ++i) {
                const NodeState& ns = nodes_[static_cast<std::size_t>(i)];
                RankingSnapshot snap;
                snap.t = now_;
                snap.node = i;
                snap.self_backlog = ns.effective_backlog();
                snap.parent = ns.parent().value_or(kNoNode);
                for (const auto& [nbr, entry] : ns.neighbors()) {
                    snap.neighbors.push_back({nbr, entry.backlog, entry.estimator.current_etx()});
                }
                trace_.snapshots.push_back(std::move(snap));
            }
            queue_.push(now_ + cfg_.route_sample_period, {EvKind::RouteSample, 0, 0});
            break;
        }
    }
}

EventTrace Simulator::run() {
    trace_.cfg = cfg_;
    while (!queue_.empty()) {
        if (queue_.peek_time() > cfg_.duration) break;
        auto [t, ev] = queue_.pop();
        now_ = t;
        dispatch(ev);
    }
    for (int i = 0; i < n_; ++i) {
        const NodeState& ns = nodes_[static_cast<std::size_t>(i)];
        NodeFinal f;
        f.id = i;
        for (const Packet& p : ns.queue().contents()) f.residual.push_back({p.origin, p.seq});
        if (ns.arq().in_flight) {
            f.in_flight = {ns.arq().in_flight->origin,
                           static_cast<std::int64_t>(ns.arq().in_flight->seq)};
        }
        f.floating = ns.queue().floating();
        f.tx_airtime_ticks = tx_air_[static_cast<std::size_t>(i)];
        f.rx_airtime_ticks = rx_air_[static_cast<std::size_t>(i)];
        trace_.finals.push_back(std::move(f));
    }
    return std::move(trace_);
}

}  // namespace

EventTrace run_scenario(const ValidatedConfig& cfg, const Topology& topo) {
    Simulator sim(cfg, topo);
    return sim.run();
}

namespace {

const char* trace_kind_name(TraceKind k) {
    switch (k) {
        case TraceKind::Originate:       return "orig";
        case TraceKind::FrameEmit:       return "emit";
        case TraceKind::CsmaDefer:       return "defer";
        case TraceKind::BurstStart:      return "burst";
        case TraceKind::BurstEnd:        return "burst_end";
        case TraceKind::Collision:       return "collision";
        case TraceKind::DataRx:          return "rx";
        case TraceKind::Sniff:           return "sniff";
        case TraceKind::AckRx:           return "ack";
        case TraceKind::ArqTimeout:      return "timeout";
        case TraceKind::Deliver:         return "deliver";
        case TraceKind::DropOverflow:    return "drop_overflow";
        case TraceKind::DropTtl:         return "drop_ttl";
        case TraceKind::DropRetx:        return "drop_retx";
        case TraceKind::DropDup:         return "drop_dup";
        case TraceKind::NoEligible:      return "no_eligible";
        case TraceKind::StaleAck:        return "stale_ack";
        case TraceKind::ParentChange:    return "parent";
        case TraceKind::BeaconEmit:      return "beacon";
        case TraceKind::InterfererFrame: return "itf";
        case TraceKind::QueueSample:     return "qsample";
    }
    return "?";
}

}  // namespace

std::string trace_text(const EventTrace& trace) {
    std::ostringstream os;
    os << "# trace protocol=" << protocol_name(trace.cfg.protocol)
       << " seed=" << trace.cfg.seed << "\n";
    char buf[192];
    for (const TraceRecord& r : trace.records) {
        std::snprintf(buf, sizeof buf,
                      "%" PRId64 " %s n=%d p=%d o=%d s=%" PRId64 " a=%" PRId64 " b=%" PRId64 "\n",
                      r.t.ticks, trace_kind_name(r.kind), r.node, r.peer, r.origin, r.seq, r.a, r.b);
        os << buf;
    }
    for (const RankingSnapshot& s : trace.snapshots) {
        os << "snap " << s.t.ticks << " n=" << s.node << " q=" << s.self_backlog
           << " parent=" << s.parent;
        for (const SnapNeighbor& nb : s.neighbors) {
            std::snprintf(buf, sizeof buf, " | %d %d %.17g", nb.id, nb.backlog, nb.etx);
            os << buf;
        }
        os << "\n";
    }
    for (const NodeFinal& f : trace.finals) {
        os << "final n=" << f.id << " floating=" << f.floating
           << " tx=" << f.tx_airtime_ticks << " rx=" << f.rx_airtime_ticks
           << " inflight=" << f.in_flight.first << ":" << f.in_flight.second << " residual=";
        for (std::size_t i = 0; i < f.residual.size(); ++i) {
            if (i) os << ",";
            os << f.residual[i].first << ":" << f.residual[i].second;
        }
        os << "\n";
    }
    return os.str();
}

void write_trace(const EventTrace& trace, std::ostream& out) {
    out << trace_text(trace);
}

void write_snapshots(const std::vector<RankingSnapshot>& snaps, std::ostream& out) {
    char buf[96];
    for (const RankingSnapshot& s : snaps) {
        out << "snap " << s.t.ticks << " " << s.node << " " << s.self_backlog << " " << s.parent;
        for (const SnapNeighbor& nb : s.neighbors) {
            std::snprintf(buf, sizeof buf, " %d %d %.17g", nb.id, nb.backlog, nb.etx);
            out << buf;
        }
        out << "\n";
    }
}

std::vector<RankingSnapshot> read_snapshots(std::istream& in) {
    std::vector<RankingSnapshot> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag != "snap") throw std::runtime_error("snapshots: bad line '" + line + "'");
        RankingSnapshot s;
        if (!(ls >> s.t.ticks >> s.node >> s.self_backlog >> s.parent)) {
            throw std::runtime_error("snapshots: bad header in '" + line + "'");
        }
        SnapNeighbor nb;
        while (ls >> nb.id >> nb.backlog >> nb.etx) s.neighbors.push_back(nb);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace hdsim
