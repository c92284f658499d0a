#ifndef HDSIM_QUEUE_HPP
#define HDSIM_QUEUE_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "hdsim/types.hpp"

namespace hdsim {

/// LIFO packet stack with a virtual "floating" remainder. When a push
/// overflows, the oldest (bottom) packet is evicted but the backlog the node
/// advertises keeps counting it, so queue gradients survive the data loss.
/// The floating count never decreases.
class FloatingLifoQueue {
public:
    explicit FloatingLifoQueue(int capacity) : capacity_(capacity) {}

    /// Pushes on top. Returns the evicted bottom packet when full.
    std::optional<Packet> push(Packet p) {
        std::optional<Packet> evicted;
        if (static_cast<int>(stack_.size()) >= capacity_) {
            evicted = stack_.front();
            stack_.erase(stack_.begin());
            ++floating_;
        }
        stack_.push_back(std::move(p));
        return evicted;
    }

    /// Pops the most recently pushed packet.
    std::optional<Packet> pop() {
        if (stack_.empty()) return std::nullopt;
        Packet p = std::move(stack_.back());
        stack_.pop_back();
        return p;
    }

    /// Restores a packet just popped; by construction there is room.
    void restore_top(Packet p) { stack_.push_back(std::move(p)); }

    int size() const { return static_cast<int>(stack_.size()); }
    std::int64_t floating() const { return floating_; }
    int effective_backlog() const { return size() + static_cast<int>(floating_); }
    bool empty() const { return stack_.empty(); }
    int capacity() const { return capacity_; }

    const std::vector<Packet>& contents() const { return stack_; }

private:
    std::vector<Packet> stack_;   // back() is the top
    int capacity_;
    std::int64_t floating_ = 0;
};

/// Remembers the last `history` distinct (origin, seq) pairs seen, evicting
/// first-in-first-out. Insertion of an already-present pair is a no-op.
class DuplicateFilter {
public:
    explicit DuplicateFilter(int history) : history_(history) {}

    bool contains(NodeId origin, std::uint32_t seq) const {
        return set_.count({origin, seq}) != 0;
    }

    void insert(NodeId origin, std::uint32_t seq) {
        auto key = std::make_pair(origin, seq);
        if (set_.count(key)) return;
        if (static_cast<int>(order_.size()) >= history_) {
            set_.erase(order_.front());
            order_.pop_front();
        }
        set_.insert(key);
        order_.push_back(key);
    }

    int size() const { return static_cast<int>(order_.size()); }

private:
    int history_;
    std::deque<std::pair<NodeId, std::uint32_t>> order_;
    std::set<std::pair<NodeId, std::uint32_t>> set_;
};

}  // namespace hdsim

#endif
