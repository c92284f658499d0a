#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hdsim/simnet.hpp"

namespace hdsim {

// All rate/mean statistics exclude the warmup interval: a packet counts when
// its origination time is at or past the warmup mark, and time-averaged
// samples count when sampled past it.

struct PerSourceStats {
    NodeId node = kNoNode;
    std::int64_t originated = 0;
    std::int64_t delivered = 0;
    double delivery_ratio = 0.0;
    double goodput_pps = 0.0;
    double mean_delay_s = 0.0;     // origination to sink arrival, delivered only
    double mean_hops = 0.0;
    double mean_attempts = 0.0;    // transmission bursts spent per delivered packet
};

struct PerNodeStats {
    NodeId node = kNoNode;
    double mean_backlog = 0.0;     // time-averaged effective backlog (stack + floating)
    std::int64_t max_backlog = 0;
    double tx_airtime_frac = 0.0;
    double rx_airtime_frac = 0.0;
    std::int64_t drops_overflow = 0;
    std::int64_t drops_ttl = 0;
    std::int64_t drops_retx = 0;
    std::int64_t drops_dup = 0;
};

struct WindowStats {
    Time start{0};
    Time end{0};
    std::int64_t originated = 0;
    std::int64_t delivered = 0;    // of the packets originated in this window
    double delivery_ratio = 0.0;
};

struct NetworkStats {
    std::int64_t originated = 0;
    std::int64_t delivered = 0;
    double delivery_ratio = 0.0;
    double goodput_pps = 0.0;
    double mean_delay_s = 0.0;
    double avg_queue_total = 0.0;  // sum over nodes of mean effective backlog
    double dirichlet_cost = 0.0;   // sum over links of measured etx * flow^2
};

struct MetricsReport {
    std::vector<PerSourceStats> per_source;
    std::vector<PerNodeStats> per_node;
    std::vector<WindowStats> windows;
    NetworkStats network;
};

inline constexpr Time kDefaultWindowLength = sec(30);

MetricsReport compute_metrics(const EventTrace& trace, Time window_len = kDefaultWindowLength);

std::string per_source_csv(const MetricsReport& report);
std::string per_node_csv(const MetricsReport& report);
std::string network_csv(const MetricsReport& report);
std::string windowed_csv(const MetricsReport& report);

// Writes per_source.csv, per_node.csv, network.csv, windowed.csv into dir.
void write_metrics_csvs(const MetricsReport& report, const std::filesystem::path& dir);

// Structural checks over a whole trace:
//  - every originated packet reaches exactly one terminal fate (delivered,
//    dropped, left in a queue, or left in flight),
//  - the sink accepts each (origin, seq) at most once,
//  - no node has two of its own bursts on the air at the same time.
struct AuditResult {
    bool ok = true;
    std::vector<std::string> problems;
    std::int64_t originated = 0;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
    std::int64_t residual = 0;
    std::int64_t in_flight = 0;
};

AuditResult audit_trace(const EventTrace& trace);

}  // namespace hdsim
