#ifndef HDSIM_TOPOLOGY_HPP
#define HDSIM_TOPOLOGY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hdsim/types.hpp"

namespace hdsim {

struct TopoNode {
    NodeId id = kNoNode;
    Role role = Role::Source;
    double x = 0.0;
    double y = 0.0;
};

/// Directed link with its two-state channel parameters.
struct TopoLink {
    NodeId from = kNoNode;
    NodeId to = kNoNode;
    double p_good_to_good = 1.0;
    double p_bad_to_good = 1.0;
    double loss_in_good = 0.0;
    double loss_in_bad = 0.0;
};

struct Topology {
    std::vector<TopoNode> nodes;
    std::vector<TopoLink> links;

    int node_count() const { return static_cast<int>(nodes.size()); }
    bool has_link(NodeId from, NodeId to) const;
    const TopoLink* find_link(NodeId from, NodeId to) const;
};

/// Text format: `node <id> <sink|source|relay> <x> <y>` lines and
/// `<from> <to> <p_gg> <p_bg> <loss_good> <loss_bad>` link lines.
/// '#' starts a comment. Throws std::runtime_error on malformed input.
Topology parse_topology(std::istream& in);
Topology parse_topology_text(const std::string& text);
Topology load_topology_file(const std::string& path);

std::string topology_text(const Topology& topo);
void write_topology_file(const Topology& topo, const std::string& path);

/// Minimum hop count from each node to the sink following directed links
/// (node -> sink direction). Unreachable nodes get -1.
std::vector<int> hop_distances_to_sink(const Topology& topo, NodeId sink = kSinkId);

/// Link quality tiers used by the generator, ordered best to worst.
enum class LinkClass { Perfect, Good, Mid, Poor };

TopoLink make_link(NodeId from, NodeId to, LinkClass c);

struct TopologyGenParams {
    std::vector<int> ring_sizes{5, 8, 6};   // nodes per ring around the sink
    double frac_perfect = 0.40;
    double frac_good = 0.30;
    double frac_mid = 0.20;                 // remainder is Poor
    int uplinks_per_node = 3;               // links to nearest previous-ring nodes
    bool intra_ring_links = true;
};

/// Ring topology around a central sink with link classes drawn from the
/// configured fractions. Every node keeps at least one Good-or-better uplink
/// so the network is usable at low load. Deterministic in (params, seed).
Topology generate_topology(const TopologyGenParams& params, std::uint64_t seed);

}  // namespace hdsim

#endif
