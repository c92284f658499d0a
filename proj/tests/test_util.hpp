#ifndef HDSIM_TEST_UTIL_HPP
#define HDSIM_TEST_UTIL_HPP

#include <string>
#include <vector>

#include "hdsim/topology.hpp"
#include "hdsim/types.hpp"

namespace hdsim_test {

inline hdsim::TopoLink perfect_link(hdsim::NodeId from, hdsim::NodeId to) {
    return {from, to, 1.0, 1.0, 0.0, 0.0};
}

inline hdsim::TopoLink lossy_link(hdsim::NodeId from, hdsim::NodeId to, double loss) {
    return {from, to, 1.0, 1.0, loss, loss};
}

/// Sense-only link: always heard (for carrier sensing) but never decodable.
inline hdsim::TopoLink sense_only_link(hdsim::NodeId from, hdsim::NodeId to) {
    return {from, to, 1.0, 1.0, 1.0, 1.0};
}

/// sink 0 <-> source 1 <-> source 2, perfect symmetric links.
inline hdsim::Topology make_chain3() {
    hdsim::Topology topo;
    topo.nodes = {{0, hdsim::Role::Sink, 0.0, 0.0},
                  {1, hdsim::Role::Source, 1.0, 0.0},
                  {2, hdsim::Role::Source, 2.0, 0.0}};
    topo.links = {perfect_link(0, 1), perfect_link(1, 0),
                  perfect_link(1, 2), perfect_link(2, 1)};
    return topo;
}

/// Complete directed graph on n nodes with perfect links; node 0 is the sink.
inline hdsim::Topology make_clique(int n) {
    hdsim::Topology topo;
    for (int i = 0; i < n; ++i) {
        topo.nodes.push_back({i, i == 0 ? hdsim::Role::Sink : hdsim::Role::Source,
                              static_cast<double>(i), 0.0});
    }
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a != b) topo.links.push_back(perfect_link(a, b));
        }
    }
    return topo;
}

/// Short-duration config for in-test simulations.
inline hdsim::RunConfig quick_config(hdsim::Protocol proto, double rate_pps,
                                     std::int64_t duration_s, std::int64_t warmup_s,
                                     std::uint64_t seed) {
    hdsim::RunConfig cfg;
    cfg.protocol.kind = proto;
    cfg.protocol.beta = 1.0;
    cfg.protocol.v = 2.0;
    cfg.source_rate_pps = rate_pps;
    cfg.duration = hdsim::sec(duration_s);
    cfg.warmup = hdsim::sec(warmup_s);
    cfg.seed = seed;
    return cfg;
}

}  // namespace hdsim_test

#endif
