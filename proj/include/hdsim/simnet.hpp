#ifndef HDSIM_SIMNET_HPP
#define HDSIM_SIMNET_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "hdsim/rng.hpp"
#include "hdsim/topology.hpp"
#include "hdsim/types.hpp"

namespace hdsim {

enum class ChannelState { Good, Bad };

/// Two-state Markov channel for one directed link. Each trial first advances
/// the state, then succeeds with 1 - loss probability of the new state.
struct LinkModel {
    NodeId from = kNoNode;
    NodeId to = kNoNode;
    double p_good_to_good = 1.0;
    double p_bad_to_good = 1.0;
    double loss_in_good = 0.0;
    double loss_in_bad = 0.0;
    ChannelState state = ChannelState::Good;

    bool trial(Rng& rng) {
        const double stay = state == ChannelState::Good ? p_good_to_good : p_bad_to_good;
        state = rng.chance(stay) ? ChannelState::Good : ChannelState::Bad;
        const double loss = state == ChannelState::Good ? loss_in_good : loss_in_bad;
        return !rng.chance(loss);
    }
};

LinkModel link_model_from(const TopoLink& l);

struct TrialOutcome {
    bool success = false;
    int subtries = 0;   // channel trials consumed (stops at first success)
};

/// One software transmission attempt: up to max_subtries channel trials on
/// the link, stopping at the first success.
TrialOutcome attempt_transmission(LinkModel& link, int max_subtries, Rng& rng);

/// Deterministic event queue: events at equal times dequeue in insertion
/// order.
template <typename Ev>
class EventQueue {
public:
    void push(Time t, Ev ev) { heap_.push(Item{t, next_seq_++, std::move(ev)}); }

    bool empty() const { return heap_.empty(); }

    std::pair<Time, Ev> pop() {
        Item it = heap_.top();
        heap_.pop();
        return {it.t, std::move(it.ev)};
    }

    Time peek_time() const { return heap_.top().t; }

private:
    struct Item {
        Time t;
        std::uint64_t seq;
        Ev ev;
    };
    struct Later {
        bool operator()(const Item& a, const Item& b) const {
            if (a.t != b.t) return b.t < a.t;
            return b.seq < a.seq;
        }
    };
    std::priority_queue<Item, std::vector<Item>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

enum class TraceKind : std::uint8_t {
    Originate,       // origin/seq created at node
    FrameEmit,       // node handed a frame to the radio; a=header backlog, b=node backlog
    CsmaDefer,       // node deferred a pending frame; channel sensed busy
    BurstStart,      // node=sender, peer=receiver (-1 broadcast); a=header backlog, b=attempt id
    BurstEnd,        // a=subtries, b=outcome code (see TraceOutcome)
    Collision,       // frame lost to overlap at node, peer=sender
    DataRx,          // node received origin/seq from peer; a=burst duration ticks
    Sniff,           // node overheard a header from peer; a=burst duration ticks
    AckRx,           // node's attempt to peer was acked
    ArqTimeout,      // node timed out an attempt to peer; a=attempts so far
    Deliver,         // sink delivery; a=end-to-end delay ticks, b=hop count
    DropOverflow,    // origin/seq evicted from node's queue
    DropTtl,         // origin/seq expired at node
    DropRetx,        // origin/seq dropped at node after the attempt limit
    DropDup,         // duplicate copy of origin/seq discarded at node
    NoEligible,      // node found no usable next hop and re-queued the packet
    StaleAck,        // ack did not match the in-flight attempt
    ParentChange,    // tree parent switched to peer (-1 = none)
    BeaconEmit,      // node queued a beacon; a=advertised backlog
    InterfererFrame, // jammer occupied the channel; a=duration ticks
    QueueSample,     // a=effective backlog, b=physical stack size
};

enum TraceOutcome : int {
    kOutcomeTrialFail = 0,
    kOutcomeDelivered = 1,
    kOutcomeCollided = 2,
    kOutcomeReceiverDeaf = 3,
    kOutcomeNoLink = 4,
    kOutcomeBroadcast = 5,
};

struct TraceRecord {
    Time t{0};
    TraceKind kind{};
    NodeId node = kNoNode;
    NodeId peer = kNoNode;
    NodeId origin = kNoNode;
    std::int64_t seq = -1;
    std::int64_t a = 0;
    std::int64_t b = 0;
};

struct SnapNeighbor {
    NodeId id = kNoNode;
    int backlog = 0;
    double etx = 1.0;
};

/// Periodic dump of one node's routing view, the raw material for offline
/// ranking comparisons.
struct RankingSnapshot {
    Time t{0};
    NodeId node = kNoNode;
    int self_backlog = 0;
    NodeId parent = kNoNode;
    std::vector<SnapNeighbor> neighbors;
};

struct NodeFinal {
    NodeId id = kNoNode;
    std::vector<std::pair<NodeId, std::uint32_t>> residual;   // queue contents, bottom first
    std::pair<NodeId, std::int64_t> in_flight{kNoNode, -1};   // (-1,-1) when none
    std::int64_t floating = 0;
    std::int64_t tx_airtime_ticks = 0;
    std::int64_t rx_airtime_ticks = 0;
};

struct EventTrace {
    RunConfig cfg;
    std::vector<TraceRecord> records;
    std::vector<RankingSnapshot> snapshots;
    std::vector<NodeFinal> finals;
};

/// Runs one scenario to completion. Everything — protocol behavior, channel
/// evolution, timing — is a pure function of (cfg, topology).
EventTrace run_scenario(const ValidatedConfig& cfg, const Topology& topo);

std::string trace_text(const EventTrace& trace);
void write_trace(const EventTrace& trace, std::ostream& out);

void write_snapshots(const std::vector<RankingSnapshot>& snaps, std::ostream& out);
std::vector<RankingSnapshot> read_snapshots(std::istream& in);

}  // namespace hdsim

#endif
