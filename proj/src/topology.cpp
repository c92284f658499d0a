#include "hdsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hdsim/rng.hpp"

namespace hdsim {

bool Topology::has_link(NodeId from, NodeId to) const {
    return find_link(from, to) != nullptr;
}

const TopoLink* Topology::find_link(NodeId from, NodeId to) const {
    for (const TopoLink& l : links) {
        if (l.from == from && l.to == to) return &l;
    }
    return nullptr;
}

namespace {

Role parse_role(const std::string& s) {
    if (s == "sink") return Role::Sink;
    if (s == "source") return Role::Source;
    if (s == "relay") return Role::Relay;
    throw std::runtime_error("topology: unknown role '" + s + "'");
}

const char* role_name(Role r) {
    switch (r) {
        case Role::Sink:   return "sink";
        case Role::Source: return "source";
        case Role::Relay:  return "relay";
    }
    return "?";
}

}  // namespace

Topology parse_topology(std::istream& in) {
    Topology topo;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "node") {
            TopoNode n;
            std::string role;
            if (!(ls >> n.id >> role >> n.x >> n.y)) {
                throw std::runtime_error("topology line " + std::to_string(lineno) + ": bad node line");
            }
            n.role = parse_role(role);
            topo.nodes.push_back(n);
        } else {
            TopoLink l;
            std::istringstream ls2(line);
            if (!(ls2 >> l.from >> l.to >> l.p_good_to_good >> l.p_bad_to_good
                      >> l.loss_in_good >> l.loss_in_bad)) {
                throw std::runtime_error("topology line " + std::to_string(lineno) + ": bad link line");
            }
            topo.links.push_back(l);
        }
    }
    if (topo.nodes.empty()) throw std::runtime_error("topology: no nodes");
    for (const TopoLink& l : topo.links) {
        auto known = [&](NodeId id) {
            return std::any_of(topo.nodes.begin(), topo.nodes.end(),
                               [&](const TopoNode& n) { return n.id == id; });
        };
        if (!known(l.from) || !known(l.to)) {
            throw std::runtime_error("topology: link references unknown node");
        }
    }
    return topo;
}

Topology parse_topology_text(const std::string& text) {
    std::istringstream in(text);
    return parse_topology(in);
}

Topology load_topology_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("topology: cannot open " + path);
    return parse_topology(in);
}

std::string topology_text(const Topology& topo) {
    std::ostringstream os;
    for (const TopoNode& n : topo.nodes) {
        os << "node " << n.id << " " << role_name(n.role) << " " << n.x << " " << n.y << "\n";
    }
    for (const TopoLink& l : topo.links) {
        os << l.from << " " << l.to << " " << l.p_good_to_good << " " << l.p_bad_to_good
           << " " << l.loss_in_good << " " << l.loss_in_bad << "\n";
    }
    return os.str();
}

void write_topology_file(const Topology& topo, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("topology: cannot write " + path);
    out << topology_text(topo);
}

std::vector<int> hop_distances_to_sink(const Topology& topo, NodeId sink) {
    NodeId max_id = 0;
    for (const TopoNode& n : topo.nodes) max_id = std::max(max_id, n.id);
    std::vector<int> dist(static_cast<std::size_t>(max_id) + 1, -1);
    // BFS from the sink along reversed links.
    std::deque<NodeId> frontier{sink};
    dist[static_cast<std::size_t>(sink)] = 0;
    while (!frontier.empty()) {
        NodeId cur = frontier.front();
        frontier.pop_front();
        for (const TopoLink& l : topo.links) {
            if (l.to != cur) continue;
            auto& d = dist[static_cast<std::size_t>(l.from)];
            if (d < 0) {
                d = dist[static_cast<std::size_t>(cur)] + 1;
                frontier.push_back(l.from);
            }
        }
    }
    return dist;
}

TopoLink make_link(NodeId from, NodeId to, LinkClass c) {
    TopoLink l;
    l.from = from;
    l.to = to;
    switch (c) {
        case LinkClass::Perfect:
            l.p_good_to_good = 1.0; l.p_bad_to_good = 1.0;
            l.loss_in_good = 0.0;   l.loss_in_bad = 0.0;
            break;
        case LinkClass::Good:
            l.p_good_to_good = 0.97; l.p_bad_to_good = 0.40;
            l.loss_in_good = 0.02;   l.loss_in_bad = 0.80;
            break;
        case LinkClass::Mid:
            l.p_good_to_good = 0.90; l.p_bad_to_good = 0.12;
            l.loss_in_good = 0.05;   l.loss_in_bad = 0.92;
            break;
        case LinkClass::Poor:
            l.p_good_to_good = 0.85; l.p_bad_to_good = 0.08;
            l.loss_in_good = 0.12;   l.loss_in_bad = 0.96;
            break;
    }
    return l;
}

namespace {

struct PendingPair {
    NodeId a, b;
    LinkClass cls;
};

LinkClass draw_class(const TopologyGenParams& p, Rng& rng) {
    const double u = rng.uniform();
    if (u < p.frac_perfect) return LinkClass::Perfect;
    if (u < p.frac_perfect + p.frac_good) return LinkClass::Good;
    if (u < p.frac_perfect + p.frac_good + p.frac_mid) return LinkClass::Mid;
    return LinkClass::Poor;
}

}  // namespace

Topology generate_topology(const TopologyGenParams& params, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0xdeadf00d));
    Topology topo;
    topo.nodes.push_back({kSinkId, Role::Sink, 0.0, 0.0});

    std::vector<std::vector<NodeId>> rings;   // rings[0] = {sink}
    rings.push_back({kSinkId});

    NodeId next_id = 1;
    for (std::size_t r = 0; r < params.ring_sizes.size(); ++r) {
        std::vector<NodeId> ring;
        const int count = params.ring_sizes[r];
        const double radius = static_cast<double>(r + 1);
        for (int i = 0; i < count; ++i) {
            const double jitter = (rng.uniform() - 0.5) * 0.4 / count;
            const double angle = 2.0 * std::numbers::pi * (static_cast<double>(i) / count + jitter);
            topo.nodes.push_back({next_id, Role::Source,
                                  radius * std::cos(angle), radius * std::sin(angle)});
            ring.push_back(next_id);
            ++next_id;
        }
        rings.push_back(ring);
    }

    auto& nodes = topo.nodes;
    auto dist2 = [&](NodeId a, NodeId b) {
        const auto& na = nodes[static_cast<std::size_t>(a)];
        const auto& nb = nodes[static_cast<std::size_t>(b)];
        const double dx = na.x - nb.x, dy = na.y - nb.y;
        return dx * dx + dy * dy;
    };

    std::vector<PendingPair> pairs;
    auto add_pair = [&](NodeId a, NodeId b, LinkClass cls) {
        for (const auto& p : pairs) {
            if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) return;
        }
        pairs.push_back({a, b, cls});
    };

    // Uplinks: each node connects to its nearest previous-ring nodes.
    for (std::size_t r = 1; r < rings.size(); ++r) {
        for (NodeId n : rings[r]) {
            std::vector<NodeId> prev = rings[r - 1];
            std::sort(prev.begin(), prev.end(), [&](NodeId a, NodeId b) {
                const double da = dist2(n, a), db = dist2(n, b);
                if (da != db) return da < db;
                return a < b;
            });
            const int want = std::min<int>(params.uplinks_per_node, static_cast<int>(prev.size()));
            bool have_decent = false;
            std::vector<LinkClass> drawn;
            for (int i = 0; i < want; ++i) {
                LinkClass cls = draw_class(params, rng);
                drawn.push_back(cls);
                if (cls == LinkClass::Perfect || cls == LinkClass::Good) have_decent = true;
            }
            // Keep every node connected through at least one decent uplink.
            if (!have_decent && !drawn.empty()) drawn[0] = LinkClass::Good;
            for (int i = 0; i < want; ++i) add_pair(n, prev[static_cast<std::size_t>(i)], drawn[static_cast<std::size_t>(i)]);
        }
    }

    // Lateral links between angular neighbors inside each ring.
    if (params.intra_ring_links) {
        for (std::size_t r = 1; r < rings.size(); ++r) {
            const auto& ring = rings[r];
            if (ring.size() < 2) continue;
            for (std::size_t i = 0; i < ring.size(); ++i) {
                add_pair(ring[i], ring[(i + 1) % ring.size()], draw_class(params, rng));
            }
        }
    }

    for (const auto& p : pairs) {
        topo.links.push_back(make_link(p.a, p.b, p.cls));
        topo.links.push_back(make_link(p.b, p.a, p.cls));
    }
    return topo;
}

}  // namespace hdsim
