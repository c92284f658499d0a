#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "hdsim/routing.hpp"
#include "hdsim/simnet.hpp"
#include "hdsim/topology.hpp"
#include "hdsim/types.hpp"

namespace hdsim {

enum class AnalysisErrorKind {
    MismatchedSets,    // the two rankings do not contain the same elements
    TooFewElements,    // fewer than two elements to compare
    Disconnected,      // some node has no path to the sink
    DegenerateRatio,   // link cost ratio outside the model's validity range
};

class AnalysisError : public std::runtime_error {
public:
    AnalysisError(AnalysisErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    AnalysisErrorKind kind() const { return kind_; }

private:
    AnalysisErrorKind kind_;
};

// Normalized Kendall tau distance between two rankings of the same element
// set: the fraction of element pairs the two orders disagree on, in [0, 1].
// 0 means identical order, 1 means exactly reversed.
double kendall_tau_distance(const std::vector<NodeId>& a, const std::vector<NodeId>& b);

// A directed graph annotated with per-link expected transmission counts.
struct EtxGraph {
    int node_count = 0;
    std::vector<std::tuple<NodeId, NodeId, double>> links;   // from, to, etx
};

// Nominal per-trial link costs from the channel model's stationary loss rate:
// etx = 1 / P(one transmission decodes). Links that never decode are omitted.
EtxGraph etx_graph_from_topology(const Topology& topo);

// Predicted steady-state backlog per node once queue gradients have formed:
// the cheapest total path cost to the sink, scaled by the penalty weight for
// backpressure (which needs a gradient of V*etx per hop to keep links
// eligible) and unscaled for the heat rules (which only need the differential
// to stay positive against etx).
std::map<NodeId, double> steady_state_backlog(const EtxGraph& graph, const ProtocolKind& protocol);

// One forwarding node i with its primary neighbor m (cheaper link) and an
// alternative n. Predicts how many consecutive transmissions each rule sends
// toward m before the local gradient erodes enough that n wins.
struct SwitchScenario {
    double q_i = 0.0;
    double q_m = 0.0;
    double q_n = 0.0;
    double etx_im = 1.0;
    double etx_in = 1.0;
};

struct SwitchPrediction {
    double heat = 0.0;
    double backpressure = 0.0;
};

SwitchPrediction switch_count_prediction(const SwitchScenario& s, double v = 2.0);

// Two-candidate toy choice: a relay sees one neighbor through a unit-cost
// link with backlog differential q_unit and another through a link of cost e
// with differential q_costly. The heat rule and the backpressure rule pick
// different winners exactly when e lies strictly inside the returned range.
struct ToyRegion {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(lo < hi); }
    bool contains(double e) const { return lo < e && e < hi; }
};

ToyRegion toy_disagreement_region(double q_unit, double q_costly);

// Replays recorded neighbor-table snapshots under the heat rule at each beta
// and under the backpressure rule, and measures how similar the two induced
// neighbor orderings are. Neighbors enter a comparison when either rule gives
// them positive weight; snapshots with fewer than two such neighbors are
// skipped and counted. Ties inside either ordering break by ascending id.
struct BetaSweepPoint {
    double beta = 0.0;
    double mean_distance = 0.0;
    std::int64_t compared = 0;
    std::int64_t skipped = 0;
};

struct BetaSweepResult {
    std::vector<BetaSweepPoint> points;
};

BetaSweepResult beta_sweep_similarity(const std::vector<RankingSnapshot>& snapshots,
                                      const std::vector<double>& betas, double v);

// beta,mean_distance,snapshot_count
std::string kendall_csv(const BetaSweepResult& result);

}  // namespace hdsim
