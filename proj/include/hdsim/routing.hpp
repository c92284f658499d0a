#ifndef HDSIM_ROUTING_HPP
#define HDSIM_ROUTING_HPP

#include <vector>

#include "hdsim/rng.hpp"
#include "hdsim/types.hpp"

namespace hdsim {

/// Forwarding weight for one candidate link plus the transfer decision that
/// produced it. With unit link capacity f is 0 or 1 and f == ceil(f_hat).
struct WeightResult {
    double weight = 0.0;
    double f_hat = 0.0;
    int f = 0;
};

/// Heat-diffusion weight, fractional-flow form. phi blends queue differential
/// and inverse link cost: phi = (1-beta) + beta/etx.
WeightResult hd_weight_original(double q_diff, double etx, double beta);

/// Heat-diffusion weight with the penalty parameter folded into phi and the
/// rounded (integer) flow used inside the weight itself:
/// phiV = (1-beta) + beta/(V*etx), f = ceil(min(phiV*max(q_diff,0), 1)),
/// weight = 2*phiV*q_diff*f - f^2.
WeightResult hd_weight_modified(double q_diff, double etx, double beta, double v);

/// Backpressure weight with link-cost penalty: q_diff - V*etx.
WeightResult bp_weight(double q_diff, double etx, double v);

/// Dispatch on the protocol kind. Not defined for MinEtxTree.
WeightResult protocol_weight(const ProtocolKind& p, double q_diff, double etx);

/// One routing candidate as the ranking sees it.
struct RankInput {
    NodeId id = kNoNode;
    int backlog = 0;
    double etx = 1.0;
};

struct RankedNeighbor {
    NodeId id = kNoNode;
    WeightResult wr;
    double etx = 1.0;
    bool eligible = false;   // weight strictly positive
};

/// True when a should precede b in a ranking (higher weight wins).
bool rank_before(const RankedNeighbor& a, const RankedNeighbor& b);

/// Sorts candidates by descending weight. Exact weight ties are permuted
/// uniformly by rng. Non-positive-weight entries stay at the tail, flagged
/// ineligible.
std::vector<RankedNeighbor> rank_neighbors(const std::vector<RankInput>& table,
                                           int self_backlog,
                                           const ProtocolKind& protocol,
                                           Rng& rng);

/// Same ordering but with ties broken by ascending NodeId, for analyses that
/// must rank identically across protocols.
std::vector<RankedNeighbor> rank_neighbors_deterministic(const std::vector<RankInput>& table,
                                                         int self_backlog,
                                                         const ProtocolKind& protocol);

/// Ordered retransmission targets: best-first eligible entries whose ETX is
/// within +1 of the best entry's ETX, at most max_k of them.
struct SwitchList {
    struct Entry {
        NodeId id = kNoNode;
        double weight = 0.0;
        double etx = 1.0;
    };
    std::vector<Entry> entries;
    int cursor = 0;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }

    /// Returns the entry at the cursor and advances it (wrapping). Must not be
    /// called on an empty list.
    const Entry& next();
};

inline constexpr int kDefaultSwitchListLength = 3;

SwitchList build_switch_list(const std::vector<RankedNeighbor>& ranked,
                             int max_k = kDefaultSwitchListLength);

}  // namespace hdsim

#endif
