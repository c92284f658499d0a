#ifndef HDSIM_NODE_HPP
#define HDSIM_NODE_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "hdsim/etx.hpp"
#include "hdsim/queue.hpp"
#include "hdsim/routing.hpp"
#include "hdsim/rng.hpp"
#include "hdsim/types.hpp"

namespace hdsim {

/// Holds both estimator flavors; the configured kind decides which one the
/// routing layer reads. Outcomes are per software attempt, attempt totals are
/// per completed packet.
class LinkEstimator {
public:
    LinkEstimator(EtxEstimatorKind kind, double smoothing) : kind_(kind), ewma_(smoothing) {}

    void record_outcome(bool acked) { ge_.record_outcome(acked); }
    void record_packet_attempts(int attempts_used) { ewma_.record_attempts(attempts_used); }

    double current_etx() const {
        return kind_ == EtxEstimatorKind::GilbertElliott ? ge_.current_etx() : ewma_.current_etx();
    }

    const GilbertElliottEstimator& gilbert_elliott() const { return ge_; }

private:
    EtxEstimatorKind kind_;
    GilbertElliottEstimator ge_;
    EwmaEstimator ewma_;
};

/// Everything a node knows about one neighbor, refreshed by overheard
/// headers and beacons.
struct NeighborEntry {
    int backlog = 0;
    LinkEstimator estimator;
    Time last_heard{0};
    double path_cost = std::numeric_limits<double>::infinity();   // tree advertisements

    NeighborEntry(EtxEstimatorKind kind, double smoothing) : estimator(kind, smoothing) {}
};

/// Stop-and-wait ARQ bookkeeping for the single in-flight packet.
struct ArqState {
    std::optional<Packet> in_flight;
    NodeId target = kNoNode;
    int sw_attempts = 0;           // timeouts burned on this packet so far
    SwitchList switch_list;
    Time timeout_deadline{0};
    int attempt_id = 0;            // tags radio attempts so stale results are ignored
    bool mac_resolved = false;     // current attempt's radio burst finished without an ack
    bool timeout_pending = false;  // deadline passed while the radio was still busy
};

enum class DropReason { Overflow, TtlExpired, RetxLimit };

enum class NoteKind { DupDrop, StaleAck, NoEligible, ParentChange, ArqTimeout };

/// The node's window on the rest of the world; the network engine implements
/// it. Nodes never touch each other directly.
class NodeHooks {
public:
    virtual ~NodeHooks() = default;
    /// Hand a frame to the radio. attempt_id tags data attempts (-1 for beacons).
    virtual void send_frame(const Frame& f, int attempt_id) = 0;
    /// Schedule a transmit/retry wakeup for this node.
    virtual void arm_wakeup(NodeId node, Time at) = 0;
    /// Schedule the ARQ deadline check for the given attempt.
    virtual void arm_timeout(NodeId node, Time at, int attempt_id) = 0;
    virtual void packet_delivered(NodeId at, const Packet& p, Time now) = 0;
    virtual void packet_dropped(NodeId at, const Packet& p, DropReason why, Time now) = 0;
    virtual void trace_note(NoteKind kind, NodeId at, Time now, NodeId aux,
                            const Packet* p = nullptr, int value = 0) = 0;
};

/// Per-node protocol machine: LIFO queue with floating remainder, duplicate
/// filter, neighbor table, stop-and-wait ARQ with link switching, and the
/// quasi-static tree fallback. Owned and driven by a single event loop.
class NodeState {
public:
    NodeState(NodeId id, Role role, const RunConfig& cfg, std::uint64_t rng_seed);

    // -- event entry points -------------------------------------------------

    /// Create one locally generated packet and queue it. Returns a copy of
    /// the new packet.
    Packet originate(Time now, NodeHooks& hooks);

    /// Transmit/retry timer fired: try to send the top of the queue.
    void on_wakeup(Time now, NodeHooks& hooks);

    /// Radio reports the current attempt was acked. Returns the departed
    /// packet (delay and hop count updated) for handoff to the receiver, or
    /// nullopt when the ack does not match the in-flight attempt.
    std::optional<Packet> on_ack(int attempt_id, Time now, NodeHooks& hooks);

    /// Radio reports the current attempt's burst ended without an ack.
    void on_mac_failure(int attempt_id, Time now, NodeHooks& hooks);

    /// ARQ deadline event. Acts only if the tagged attempt is still open.
    void on_timeout(int attempt_id, Time now, NodeHooks& hooks);

    /// A decoded data frame addressed to this node.
    void on_data_receive(const Frame& f, Time now, NodeHooks& hooks);

    /// A decoded frame this node was not the receiver of (data overheard or
    /// any beacon): refresh the neighbor table from the header.
    void on_overhear(const Frame& f, Time now);

    /// Beacon timer fired: broadcast current backlog (the engine re-arms).
    void on_beacon_timer(Time now, NodeHooks& hooks);

    /// Tree mode: recompute parent and advertised path cost.
    void on_tree_recompute(Time now, NodeHooks& hooks);

    // -- inspection ----------------------------------------------------------

    NodeId id() const { return id_; }
    Role role() const { return role_; }
    bool is_sink() const { return role_ == Role::Sink; }
    const FloatingLifoQueue& queue() const { return queue_; }
    const ArqState& arq() const { return arq_; }
    const std::map<NodeId, NeighborEntry>& neighbors() const { return neighbors_; }
    std::optional<NodeId> parent() const { return parent_; }
    double path_cost() const { return own_path_cost_; }
    int effective_backlog() const { return queue_.effective_backlog(); }

    /// Neighbor table flattened for ranking or snapshots.
    std::vector<RankInput> rank_inputs() const;

private:
    void select_and_transmit(Time now, NodeHooks& hooks);
    void transmit_current(Time now, NodeHooks& hooks);
    void do_timeout(Time now, NodeHooks& hooks);
    void finish_packet(Time now, NodeHooks& hooks);   // clear ARQ, chain next send
    NeighborEntry& table_entry(NodeId nbr);
    void update_table(const Frame& f, Time now);
    Frame data_frame(Time now) const;

    NodeId id_;
    Role role_;
    const RunConfig& cfg_;
    FloatingLifoQueue queue_;
    DuplicateFilter filter_;
    ArqState arq_;
    std::map<NodeId, NeighborEntry> neighbors_;
    std::optional<NodeId> parent_;
    double own_path_cost_;
    std::uint32_t next_seq_ = 0;
    bool wakeup_armed_ = false;
    Rng rng_;
};

}  // namespace hdsim

#endif
