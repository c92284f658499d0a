#include "hdsim/node.hpp"

#include <algorithm>
#include <cassert>

namespace hdsim {

NodeState::NodeState(NodeId id, Role role, const RunConfig& cfg, std::uint64_t rng_seed)
    : id_(id),
      role_(role),
      cfg_(cfg),
      queue_(cfg.queue_capacity),
      filter_(cfg.filter_history),
      own_path_cost_(role == Role::Sink ? 0.0 : std::numeric_limits<double>::infinity()),
      rng_(rng_seed) {}

NeighborEntry& NodeState::table_entry(NodeId nbr) {
    auto it = neighbors_.find(nbr);
    if (it == neighbors_.end()) {
        it = neighbors_.emplace(nbr, NeighborEntry(cfg_.etx_estimator, cfg_.ewma_smoothing)).first;
    }
    return it->second;
}

void NodeState::update_table(const Frame& f, Time now) {
    NeighborEntry& e = table_entry(f.sender);
    e.backlog = f.sender_backlog;
    e.last_heard = now;
    e.path_cost = f.sender_path_cost;
}

std::vector<RankInput> NodeState::rank_inputs() const {
    std::vector<RankInput> out;
    out.reserve(neighbors_.size());
    for (const auto& [nbr, entry] : neighbors_) {
        out.push_back({nbr, entry.backlog, entry.estimator.current_etx()});
    }
    return out;
}

Packet NodeState::originate(Time now, NodeHooks& hooks) {
    Packet p;
    p.origin = id_;
    p.seq = next_seq_++;
    p.ttl = cfg_.initial_ttl;
    p.created_at = now;
    p.arrived_at = now;
    if (auto evicted = queue_.push(p)) {
        hooks.packet_dropped(id_, *evicted, DropReason::Overflow, now);
    }
    if (!arq_.in_flight && !wakeup_armed_) {
        wakeup_armed_ = true;
        hooks.arm_wakeup(id_, now + rng_.uniform_time(cfg_.proc_delay));
    }
    return p;
}

void NodeState::on_wakeup(Time now, NodeHooks& hooks) {
    wakeup_armed_ = false;
    if (arq_.in_flight || queue_.empty()) return;
    select_and_transmit(now, hooks);
}

Frame NodeState::data_frame(Time now) const {
    (void)now;
    Frame f;
    f.kind = FrameKind::Data;
    f.sender = id_;
    f.receiver = arq_.target;
    // The in-flight packet is counted as already departed.
    f.sender_backlog = queue_.effective_backlog();
    f.sender_path_cost = own_path_cost_;
    f.payload = *arq_.in_flight;
    f.airtime = cfg_.frame_airtime;
    return f;
}

void NodeState::select_and_transmit(Time now, NodeHooks& hooks) {
    std::optional<Packet> popped = queue_.pop();
    assert(popped);

    NodeId target = kNoNode;
    SwitchList list;

    if (cfg_.protocol.kind == Protocol::MinEtxTree) {
        if (parent_) target = *parent_;
    } else {
        // The packet being routed still counts toward our own backlog here.
        const int self_backlog = queue_.effective_backlog() + 1;
        auto ranked = rank_neighbors(rank_inputs(), self_backlog, cfg_.protocol, rng_);
        if (cfg_.protocol.uses_link_switching()) {
            list = build_switch_list(ranked);
            if (!list.empty()) target = list.next().id;
        } else {
            for (const auto& rn : ranked) {
                if (rn.eligible) { target = rn.id; break; }
            }
        }
    }

    if (target == kNoNode) {
        queue_.restore_top(*popped);
        hooks.trace_note(NoteKind::NoEligible, id_, now, kNoNode);
        wakeup_armed_ = true;
        hooks.arm_wakeup(id_, now + rng_.uniform_time(cfg_.retry_wait));
        return;
    }

    arq_.in_flight = *popped;
    arq_.target = target;
    arq_.sw_attempts = 0;
    arq_.switch_list = list;
    transmit_current(now, hooks);
}

void NodeState::transmit_current(Time now, NodeHooks& hooks) {
    ++arq_.attempt_id;
    arq_.mac_resolved = false;
    arq_.timeout_pending = false;
    arq_.in_flight->attempt_count += 1;
    arq_.timeout_deadline = now + rng_.uniform_time(cfg_.retx_timeout);
    hooks.send_frame(data_frame(now), arq_.attempt_id);
    hooks.arm_timeout(id_, arq_.timeout_deadline, arq_.attempt_id);
}

void NodeState::finish_packet(Time now, NodeHooks& hooks) {
    arq_.in_flight.reset();
    arq_.target = kNoNode;
    arq_.sw_attempts = 0;
    arq_.switch_list = SwitchList{};
    arq_.mac_resolved = false;
    arq_.timeout_pending = false;
    if (!queue_.empty() && !wakeup_armed_) {
        wakeup_armed_ = true;
        hooks.arm_wakeup(id_, now + rng_.uniform_time(cfg_.proc_delay));
    }
}

std::optional<Packet> NodeState::on_ack(int attempt_id, Time now, NodeHooks& hooks) {
    if (!arq_.in_flight || attempt_id != arq_.attempt_id) {
        hooks.trace_note(NoteKind::StaleAck, id_, now, kNoNode);
        return std::nullopt;
    }
    LinkEstimator& est = table_entry(arq_.target).estimator;
    est.record_outcome(true);
    est.record_packet_attempts(arq_.sw_attempts + 1);

    Packet departed = *arq_.in_flight;
    departed.accumulated_delay += now - departed.arrived_at;
    departed.hop_count += 1;
    finish_packet(now, hooks);
    return departed;
}

void NodeState::on_mac_failure(int attempt_id, Time now, NodeHooks& hooks) {
    if (!arq_.in_flight || attempt_id != arq_.attempt_id) return;
    arq_.mac_resolved = true;
    if (arq_.timeout_pending) do_timeout(now, hooks);
}

void NodeState::on_timeout(int attempt_id, Time now, NodeHooks& hooks) {
    if (!arq_.in_flight || attempt_id != arq_.attempt_id) return;
    if (!arq_.mac_resolved) {
        // Radio still busy with this attempt; act when it resolves.
        arq_.timeout_pending = true;
        return;
    }
    do_timeout(now, hooks);
}

void NodeState::do_timeout(Time now, NodeHooks& hooks) {
    table_entry(arq_.target).estimator.record_outcome(false);
    arq_.sw_attempts += 1;
    hooks.trace_note(NoteKind::ArqTimeout, id_, now, arq_.target, &*arq_.in_flight, arq_.sw_attempts);

    if (arq_.sw_attempts >= cfg_.max_sw_retx) {
        table_entry(arq_.target).estimator.record_packet_attempts(arq_.sw_attempts);
        hooks.packet_dropped(id_, *arq_.in_flight, DropReason::RetxLimit, now);
        finish_packet(now, hooks);
        return;
    }

    if (cfg_.protocol.kind == Protocol::MinEtxTree) {
        if (parent_) arq_.target = *parent_;
    } else if (cfg_.protocol.uses_link_switching()) {
        arq_.target = arq_.switch_list.next().id;
    } else {
        // Backpressure recomputes the best neighbor before each retransmission.
        const int self_backlog = queue_.effective_backlog() + 1;
        auto ranked = rank_neighbors(rank_inputs(), self_backlog, cfg_.protocol, rng_);
        for (const auto& rn : ranked) {
            if (rn.eligible) { arq_.target = rn.id; break; }
        }
    }
    transmit_current(now, hooks);
}

void NodeState::on_data_receive(const Frame& f, Time now, NodeHooks& hooks) {
    update_table(f, now);

    Packet p = f.payload;
    if (filter_.contains(p.origin, p.seq)) {
        hooks.trace_note(NoteKind::DupDrop, id_, now, f.sender, &p);
        return;
    }
    filter_.insert(p.origin, p.seq);
    p.ttl -= 1;

    if (is_sink()) {
        // Sink sojourn is zero: the accumulated delay is final on arrival.
        hooks.packet_delivered(id_, p, now);
        return;
    }
    if (p.ttl <= 0) {
        hooks.packet_dropped(id_, p, DropReason::TtlExpired, now);
        return;
    }
    p.arrived_at = now;
    if (auto evicted = queue_.push(p)) {
        hooks.packet_dropped(id_, *evicted, DropReason::Overflow, now);
    }
    if (!arq_.in_flight && !wakeup_armed_) {
        wakeup_armed_ = true;
        hooks.arm_wakeup(id_, now + rng_.uniform_time(cfg_.proc_delay));
    }
}

void NodeState::on_overhear(const Frame& f, Time now) {
    update_table(f, now);
}

void NodeState::on_beacon_timer(Time now, NodeHooks& hooks) {
    (void)now;
    Frame f;
    f.kind = FrameKind::Beacon;
    f.sender = id_;
    f.receiver = kBroadcast;
    f.sender_backlog = is_sink() ? 0 : queue_.effective_backlog();
    f.sender_path_cost = own_path_cost_;
    f.airtime = cfg_.frame_airtime;
    hooks.send_frame(f, -1);
}

void NodeState::on_tree_recompute(Time now, NodeHooks& hooks) {
    if (is_sink()) return;
    std::optional<NodeId> best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& [nbr, entry] : neighbors_) {
        if (!std::isfinite(entry.path_cost)) continue;
        const double cost = entry.path_cost + entry.estimator.current_etx();
        if (cost < best_cost) {
            best_cost = cost;
            best = nbr;
        }
    }
    if (best != parent_) {
        hooks.trace_note(NoteKind::ParentChange, id_, now, best ? *best : kNoNode);
    }
    parent_ = best;
    own_path_cost_ = best_cost;
}

}  // namespace hdsim
