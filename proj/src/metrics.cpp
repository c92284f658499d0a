#include "hdsim/metrics.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hdsim {

namespace {

using PacketKey = std::pair<NodeId, std::int64_t>;

struct Tally {
    double sum = 0.0;
    std::int64_t n = 0;
    void add(double v) { sum += v; ++n; }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
};

std::string format_row(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

}  // namespace

MetricsReport compute_metrics(const EventTrace& trace, Time window_len) {
    const RunConfig& cfg = trace.cfg;
    const Time warmup = cfg.warmup;
    const double span_s = (cfg.duration - warmup).as_seconds();
    if (window_len.ticks <= 0) throw std::invalid_argument("metrics: window length must be positive");

    MetricsReport rep;

    std::map<PacketKey, Time> origin_time;
    std::map<NodeId, PerSourceStats> sources;
    std::map<NodeId, PerNodeStats> nodes;
    std::map<NodeId, Tally> backlog;
    std::map<NodeId, std::int64_t> tx_ticks, rx_ticks;
    std::map<NodeId, Tally> delay, hops, attempts;
    // Directed link -> (bursts started, packets handed over).
    std::map<std::pair<NodeId, NodeId>, std::pair<std::int64_t, std::int64_t>> link_use;

    const std::int64_t window_count =
        (cfg.duration.ticks + window_len.ticks - 1) / window_len.ticks;
    std::vector<WindowStats> windows(static_cast<std::size_t>(window_count));
    for (std::int64_t w = 0; w < window_count; ++w) {
        windows[static_cast<std::size_t>(w)].start = window_len * w;
        windows[static_cast<std::size_t>(w)].end = std::min(window_len * (w + 1), cfg.duration);
    }
    auto window_of = [&](Time t) -> WindowStats& {
        const std::int64_t idx = std::clamp<std::int64_t>(t.ticks / window_len.ticks, 0, window_count - 1);
        return windows[static_cast<std::size_t>(idx)];
    };

    for (const TraceRecord& r : trace.records) {
        const bool counted = r.t >= warmup;
        switch (r.kind) {
            case TraceKind::Originate: {
                origin_time[{r.origin, r.seq}] = r.t;
                window_of(r.t).originated += 1;
                if (counted) sources[r.origin].originated += 1;
                break;
            }
            case TraceKind::Deliver: {
                auto it = origin_time.find({r.origin, r.seq});
                if (it == origin_time.end()) break;
                window_of(it->second).delivered += 1;
                if (it->second >= warmup) {
                    sources[r.origin].delivered += 1;
                    delay[r.origin].add(Time{r.a}.as_seconds());
                    hops[r.origin].add(static_cast<double>(r.b));
                    attempts[r.origin].add(static_cast<double>(r.peer));
                }
                break;
            }
            case TraceKind::QueueSample:
                if (counted) {
                    backlog[r.node].add(static_cast<double>(r.a));
                    nodes[r.node].max_backlog = std::max(nodes[r.node].max_backlog, r.a);
                }
                break;
            case TraceKind::BurstEnd:
                if (counted) {
                    tx_ticks[r.node] += r.a * cfg.frame_airtime.ticks;
                    if (r.origin != kNoNode) {
                        auto& use = link_use[{r.node, r.peer}];
                        use.first += 1;
                        if (r.b == kOutcomeDelivered) use.second += 1;
                    }
                }
                break;
            case TraceKind::DataRx:
            case TraceKind::Sniff:
                if (counted) rx_ticks[r.node] += r.a;
                break;
            case TraceKind::DropOverflow:
                if (counted) nodes[r.node].drops_overflow += 1;
                break;
            case TraceKind::DropTtl:
                if (counted) nodes[r.node].drops_ttl += 1;
                break;
            case TraceKind::DropRetx:
                if (counted) nodes[r.node].drops_retx += 1;
                break;
            case TraceKind::DropDup:
                if (counted) nodes[r.node].drops_dup += 1;
                break;
            default:
                break;
        }
    }

    for (auto& [id, ps] : sources) {
        ps.node = id;
        ps.delivery_ratio = ps.originated
            ? static_cast<double>(ps.delivered) / static_cast<double>(ps.originated) : 0.0;
        ps.goodput_pps = span_s > 0.0 ? static_cast<double>(ps.delivered) / span_s : 0.0;
        ps.mean_delay_s = delay[id].mean();
        ps.mean_hops = hops[id].mean();
        ps.mean_attempts = attempts[id].mean();
        rep.per_source.push_back(ps);
        rep.network.originated += ps.originated;
        rep.network.delivered += ps.delivered;
    }
    rep.network.delivery_ratio = rep.network.originated
        ? static_cast<double>(rep.network.delivered) / static_cast<double>(rep.network.originated)
        : 0.0;
    rep.network.goodput_pps = span_s > 0.0
        ? static_cast<double>(rep.network.delivered) / span_s : 0.0;
    Tally all_delay;
    for (auto& [id, t] : delay) { all_delay.sum += t.sum; all_delay.n += t.n; }
    rep.network.mean_delay_s = all_delay.mean();

    std::set<NodeId> node_ids;
    for (const NodeFinal& f : trace.finals) node_ids.insert(f.id);
    for (auto& [id, st] : nodes) node_ids.insert(id);
    const double run_span_ticks = static_cast<double>((cfg.duration - warmup).ticks);
    for (NodeId id : node_ids) {
        PerNodeStats st = nodes[id];
        st.node = id;
        st.mean_backlog = backlog[id].mean();
        if (run_span_ticks > 0.0) {
            st.tx_airtime_frac = static_cast<double>(tx_ticks[id]) / run_span_ticks;
            st.rx_airtime_frac = static_cast<double>(rx_ticks[id]) / run_span_ticks;
        }
        rep.network.avg_queue_total += st.mean_backlog;
        rep.per_node.push_back(st);
    }

    for (const auto& [lk, use] : link_use) {
        if (use.second <= 0 || span_s <= 0.0) continue;
        const double etx = static_cast<double>(use.first) / static_cast<double>(use.second);
        const double flow = static_cast<double>(use.second) / span_s;
        rep.network.dirichlet_cost += etx * flow * flow;
    }

    for (const WindowStats& w : windows) {
        if (w.originated == 0) continue;   // nothing started here, nothing to report
        WindowStats out = w;
        out.delivery_ratio = static_cast<double>(out.delivered) / static_cast<double>(out.originated);
        rep.windows.push_back(out);
    }
    return rep;
}

std::string per_source_csv(const MetricsReport& report) {
    std::string out =
        "node,originated,delivered,delivery_ratio,goodput_pps,mean_delay_s,mean_hops,mean_attempts\n";
    for (const PerSourceStats& s : report.per_source) {
        out += format_row("%d,%lld,%lld,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                          s.node, static_cast<long long>(s.originated),
                          static_cast<long long>(s.delivered), s.delivery_ratio, s.goodput_pps,
                          s.mean_delay_s, s.mean_hops, s.mean_attempts);
    }
    return out;
}

std::string per_node_csv(const MetricsReport& report) {
    std::string out =
        "node,mean_backlog,max_backlog,tx_airtime_frac,rx_airtime_frac,"
        "drops_overflow,drops_ttl,drops_retx,drops_dup\n";
    for (const PerNodeStats& s : report.per_node) {
        out += format_row("%d,%.6g,%lld,%.6g,%.6g,%lld,%lld,%lld,%lld\n",
                          s.node, s.mean_backlog, static_cast<long long>(s.max_backlog),
                          s.tx_airtime_frac, s.rx_airtime_frac,
                          static_cast<long long>(s.drops_overflow),
                          static_cast<long long>(s.drops_ttl),
                          static_cast<long long>(s.drops_retx),
                          static_cast<long long>(s.drops_dup));
    }
    return out;
}

std::string network_csv(const MetricsReport& report) {
    std::string out =
        "originated,delivered,delivery_ratio,goodput_pps,mean_delay_s,avg_queue_total,dirichlet_cost\n";
    const NetworkStats& n = report.network;
    out += format_row("%lld,%lld,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                      static_cast<long long>(n.originated), static_cast<long long>(n.delivered),
                      n.delivery_ratio, n.goodput_pps, n.mean_delay_s, n.avg_queue_total,
                      n.dirichlet_cost);
    return out;
}

std::string windowed_csv(const MetricsReport& report) {
    std::string out = "window_start_s,window_end_s,originated,delivered,delivery_ratio\n";
    for (const WindowStats& w : report.windows) {
        out += format_row("%.6g,%.6g,%lld,%lld,%.6g\n",
                          w.start.as_seconds(), w.end.as_seconds(),
                          static_cast<long long>(w.originated),
                          static_cast<long long>(w.delivered), w.delivery_ratio);
    }
    return out;
}

void write_metrics_csvs(const MetricsReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::pair<const char*, std::string> files[] = {
        {"per_source.csv", per_source_csv(report)},
        {"per_node.csv", per_node_csv(report)},
        {"network.csv", network_csv(report)},
        {"windowed.csv", windowed_csv(report)},
    };
    for (const auto& [name, text] : files) {
        std::ofstream out(dir / name, std::ios::trunc);
        if (!out) throw std::runtime_error("metrics: cannot write " + (dir / name).string());
        out << text;
    }
}

AuditResult audit_trace(const EventTrace& trace) {
    AuditResult res;
    auto complain = [&](std::string msg) {
        res.ok = false;
        if (res.problems.size() < 32) res.problems.push_back(std::move(msg));
    };

    std::set<PacketKey> originated;
    std::map<PacketKey, int> fates;
    std::set<PacketKey> delivered_keys;
    std::map<NodeId, int> open_bursts;

    for (const TraceRecord& r : trace.records) {
        switch (r.kind) {
            case TraceKind::Originate: {
                if (!originated.insert({r.origin, r.seq}).second) {
                    complain("duplicate origination " + std::to_string(r.origin) + ":" +
                             std::to_string(r.seq));
                }
                res.originated += 1;
                break;
            }
            case TraceKind::Deliver: {
                res.delivered += 1;
                fates[{r.origin, r.seq}] += 1;
                if (!delivered_keys.insert({r.origin, r.seq}).second) {
                    complain("sink accepted " + std::to_string(r.origin) + ":" +
                             std::to_string(r.seq) + " twice");
                }
                break;
            }
            case TraceKind::DropOverflow:
            case TraceKind::DropTtl:
            case TraceKind::DropRetx:
            case TraceKind::DropDup:
                res.dropped += 1;
                fates[{r.origin, r.seq}] += 1;
                break;
            case TraceKind::BurstStart: {
                if (open_bursts[r.node] != 0) {
                    complain("node " + std::to_string(r.node) + " started overlapping bursts");
                }
                open_bursts[r.node] += 1;
                break;
            }
            case TraceKind::BurstEnd: {
                if (open_bursts[r.node] != 1) {
                    complain("node " + std::to_string(r.node) + " ended a burst it never started");
                }
                open_bursts[r.node] -= 1;
                break;
            }
            default:
                break;
        }
    }

    for (const NodeFinal& f : trace.finals) {
        for (const auto& [origin, seq] : f.residual) {
            res.residual += 1;
            fates[{origin, static_cast<std::int64_t>(seq)}] += 1;
        }
        if (f.in_flight.first != kNoNode) {
            res.in_flight += 1;
            fates[f.in_flight] += 1;
        }
    }

    for (const PacketKey& key : originated) {
        const auto it = fates.find(key);
        const int n = it == fates.end() ? 0 : it->second;
        if (n != 1) {
            complain("packet " + std::to_string(key.first) + ":" + std::to_string(key.second) +
                     " has " + std::to_string(n) + " terminal fates");
        }
    }
    for (const auto& [key, n] : fates) {
        if (!originated.count(key)) {
            complain("packet " + std::to_string(key.first) + ":" + std::to_string(key.second) +
                     " ended without being originated");
        }
    }
    return res;
}

}  // namespace hdsim
