#include "hdsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>

namespace hdsim {

namespace {

// Counts inversions of `seq` in place via merge sort.
std::int64_t count_inversions(std::vector<int>& seq, std::vector<int>& scratch,
                              std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t inv = count_inversions(seq, scratch, lo, mid) +
                       count_inversions(seq, scratch, mid, hi);
    std::merge(seq.begin() + static_cast<std::ptrdiff_t>(lo),
               seq.begin() + static_cast<std::ptrdiff_t>(mid),
               seq.begin() + static_cast<std::ptrdiff_t>(mid),
               seq.begin() + static_cast<std::ptrdiff_t>(hi),
               scratch.begin() + static_cast<std::ptrdiff_t>(lo));
    // Re-walk the merge to count crossings: element from the right half
    // placed before k elements remaining on the left contributes k.
    std::size_t i = lo, j = mid;
    std::int64_t crossings = 0;
    while (i < mid && j < hi) {
        if (seq[j] < seq[i]) {
            crossings += static_cast<std::int64_t>(mid - i);
            ++j;
        } else {
            ++i;
        }
    }
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              seq.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv + crossings;
}

}  // namespace

double kendall_tau_distance(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    if (a.size() != b.size()) {
        throw AnalysisError(AnalysisErrorKind::MismatchedSets,
                            "rankings have different lengths");
    }
    const std::size_t n = a.size();
    if (n < 2) {
        throw AnalysisError(AnalysisErrorKind::TooFewElements,
                            "need at least two elements to compare orderings");
    }
    std::map<NodeId, int> pos_in_b;
    for (std::size_t i = 0; i < n; ++i) {
        if (!pos_in_b.emplace(b[i], static_cast<int>(i)).second) {
            throw AnalysisError(AnalysisErrorKind::MismatchedSets,
                                "second ranking repeats an element");
        }
    }
    std::vector<int> seq;
    seq.reserve(n);
    std::set<NodeId> seen_a;
    for (NodeId id : a) {
        if (!seen_a.insert(id).second) {
            throw AnalysisError(AnalysisErrorKind::MismatchedSets,
                                "first ranking repeats an element");
        }
        auto it = pos_in_b.find(id);
        if (it == pos_in_b.end()) {
            throw AnalysisError(AnalysisErrorKind::MismatchedSets,
                                "rankings contain different elements");
        }
        seq.push_back(it->second);
    }
    std::vector<int> scratch(seq.size());
    const std::int64_t inv = count_inversions(seq, scratch, 0, seq.size());
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return static_cast<double>(inv) / pairs;
}

EtxGraph etx_graph_from_topology(const Topology& topo) {
    EtxGraph g;
    g.node_count = topo.node_count();
    for (const TopoLink& l : topo.links) {
        const double leave_good = 1.0 - l.p_good_to_good;
        const double enter_good = l.p_bad_to_good;
        // Stationary share of time the channel spends in its good state.
        const double pi_good = (leave_good + enter_good) > 0.0
            ? enter_good / (leave_good + enter_good)
            : 1.0;
        const double success =
            pi_good * (1.0 - l.loss_in_good) + (1.0 - pi_good) * (1.0 - l.loss_in_bad);
        if (success <= 0.0) continue;
        g.links.push_back({l.from, l.to, 1.0 / success});
    }
    return g;
}

std::map<NodeId, double> steady_state_backlog(const EtxGraph& graph,
                                              const ProtocolKind& protocol) {
    double scale = 1.0;
    switch (protocol.kind) {
        case Protocol::Bcp:
            scale = protocol.v;
            break;
        case Protocol::HdcpOriginal:
        case Protocol::HdcpModified:
            scale = 1.0;
            break;
        case Protocol::MinEtxTree:
            throw std::logic_error("steady_state_backlog: tree routing has no gradient model");
    }

    const int n = graph.node_count;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(n), kInf);
    // Relax along reversed links so dist[i] is the cheapest i -> sink cost.
    std::vector<std::vector<std::pair<NodeId, double>>> rev(static_cast<std::size_t>(n));
    for (const auto& [from, to, etx] : graph.links) {
        if (from < 0 || from >= n || to < 0 || to >= n) {
            throw std::invalid_argument("steady_state_backlog: link endpoint out of range");
        }
        if (!(etx >= 1.0)) {
            throw std::invalid_argument("steady_state_backlog: link etx must be >= 1");
        }
        rev[static_cast<std::size_t>(to)].push_back({from, etx});
    }

    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[kSinkId] = 0.0;
    heap.push({0.0, kSinkId});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& [v, etx] : rev[static_cast<std::size_t>(u)]) {
            const double nd = d + etx;
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                heap.push({nd, v});
            }
        }
    }

    std::map<NodeId, double> out;
    for (int i = 0; i < n; ++i) {
        if (!(dist[static_cast<std::size_t>(i)] < kInf)) {
            throw AnalysisError(AnalysisErrorKind::Disconnected,
                                "node " + std::to_string(i) + " cannot reach the sink");
        }
        out[i] = scale * dist[static_cast<std::size_t>(i)];
    }
    return out;
}

SwitchPrediction switch_count_prediction(const SwitchScenario& s, double v) {
    if (!(s.etx_im > 0.0) || !(s.etx_in > 0.0)) {
        throw std::invalid_argument("switch_count_prediction: link costs must be positive");
    }
    const double r = s.etx_im / s.etx_in;
    if (r >= 2.0) {
        throw AnalysisError(AnalysisErrorKind::DegenerateRatio,
                            "primary link must cost less than twice the alternative");
    }
    const double z = r / (2.0 - r);
    SwitchPrediction out;
    out.heat = 0.5 * (1.0 - z) * (s.q_i - s.q_m) + z * (s.q_n - s.q_m);
    out.backpressure = (s.q_n - s.q_m) + v * (s.etx_in - s.etx_im);
    return out;
}

ToyRegion toy_disagreement_region(double q_unit, double q_costly) {
    ToyRegion out;
    if (!(q_unit > 0.0)) {
        throw std::invalid_argument("toy_disagreement_region: unit-link differential must be positive");
    }
    out.lo = q_costly / q_unit;
    out.hi = (q_costly - q_unit) / 2.0 + 1.0;
    return out;
}

BetaSweepResult beta_sweep_similarity(const std::vector<RankingSnapshot>& snapshots,
                                      const std::vector<double>& betas, double v) {
    BetaSweepResult res;
    for (double beta : betas) {
        BetaSweepPoint point;
        point.beta = beta;
        double total = 0.0;
        for (const RankingSnapshot& snap : snapshots) {
            struct Cand {
                NodeId id;
                double heat_w;
                double bp_w;
            };
            std::vector<Cand> cands;
            for (const SnapNeighbor& nb : snap.neighbors) {
                const double diff = static_cast<double>(snap.self_backlog - nb.backlog);
                const double hw = hd_weight_modified(diff, nb.etx, beta, v).weight;
                const double bw = bp_weight(diff, nb.etx, v).weight;
                if (hw > 0.0 || bw > 0.0) cands.push_back({nb.id, hw, bw});
            }
            if (cands.size() < 2) {
                point.skipped += 1;
                continue;
            }
            auto order_by = [&](auto weight_of) {
                std::vector<Cand> sorted = cands;
                std::sort(sorted.begin(), sorted.end(), [&](const Cand& a, const Cand& b) {
                    const double wa = weight_of(a), wb = weight_of(b);
                    if (wa != wb) return wa > wb;
                    return a.id < b.id;
                });
                std::vector<NodeId> ids;
                ids.reserve(sorted.size());
                for (const Cand& c : sorted) ids.push_back(c.id);
                return ids;
            };
            const std::vector<NodeId> heat_rank =
                order_by([](const Cand& c) { return c.heat_w; });
            const std::vector<NodeId> bp_rank =
                order_by([](const Cand& c) { return c.bp_w; });
            total += kendall_tau_distance(heat_rank, bp_rank);
            point.compared += 1;
        }
        point.mean_distance = point.compared ? total / static_cast<double>(point.compared) : 0.0;
        res.points.push_back(point);
    }
    return res;
}

std::string kendall_csv(const BetaSweepResult& result) {
    std::string out = "beta,mean_distance,snapshot_count\n";
    char buf[128];
    for (const BetaSweepPoint& p : result.points) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%lld\n", p.beta, p.mean_distance,
                      static_cast<long long>(p.compared));
        out += buf;
    }
    return out;
}

}  // namespace hdsim
