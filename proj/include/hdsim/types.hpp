#ifndef HDSIM_TYPES_HPP
#define HDSIM_TYPES_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hdsim/time.hpp"

namespace hdsim {

/// Dense node identifier: 0..N-1, with 0 the sink by convention.
using NodeId = std::int32_t;

inline constexpr NodeId kSinkId = 0;
inline constexpr NodeId kBroadcast = -1;
inline constexpr NodeId kNoNode = -1;

enum class Role { Sink, Source, Relay };

/// One collected data unit, identified by (origin, seq) for its whole life.
struct Packet {
    NodeId origin = kNoNode;
    std::uint32_t seq = 0;
    int ttl = 0;                 // decremented at each receiving hop; never forwarded at 0
    Time accumulated_delay{0};   // sum of per-node sojourn times so far
    int hop_count = 0;
    int attempt_count = 0;       // software ARQ attempts spent on this packet so far
    Time created_at{0};
    Time arrived_at{0};          // when the packet entered the node holding it now
};

enum class FrameKind { Data, Beacon, Ack };

/// What a radio actually carries. sender_backlog rides in every header so
/// listeners can refresh their queue-differential view for free.
struct Frame {
    FrameKind kind = FrameKind::Data;
    NodeId sender = kNoNode;
    NodeId receiver = kBroadcast;   // kBroadcast for beacons
    int sender_backlog = 0;
    double sender_path_cost = std::numeric_limits<double>::infinity();  // tree mode only
    Packet payload;                 // valid for Data frames
    Time airtime{0};
};

enum class Protocol { HdcpOriginal, HdcpModified, Bcp, MinEtxTree };

/// Protocol selector plus its tuning knobs. beta applies to the HDCP kinds,
/// v to HdcpModified and Bcp.
struct ProtocolKind {
    Protocol kind = Protocol::HdcpModified;
    double beta = 1.0;   // in [0, 1]
    double v = 2.0;      // >= 0

    bool uses_beta() const { return kind == Protocol::HdcpOriginal || kind == Protocol::HdcpModified; }
    bool uses_v() const { return kind == Protocol::HdcpModified || kind == Protocol::Bcp; }
    bool uses_link_switching() const { return kind == Protocol::HdcpOriginal || kind == Protocol::HdcpModified; }

    bool operator==(const ProtocolKind&) const = default;
};

std::string protocol_name(const ProtocolKind& p);

enum class EtxEstimatorKind { GilbertElliott, Ewma };

/// Periodic on/off jammer occupying the channel at a set of victim receivers.
struct InterferenceSpec {
    std::vector<NodeId> impacted;   // receivers at which overlapping frames are lost
    Time window_start{0};
    Time window_end{0};             // end <= start means "no interference"
    Time on_period{0};
    Time off_period{0};
    double rate_pps = 0.0;          // frames per second while on
    Time frame_airtime{0};

    bool enabled() const { return window_end > window_start && rate_pps > 0.0; }

    bool operator==(const InterferenceSpec&) const = default;
};

/// Everything a single run needs besides the topology itself.
struct RunConfig {
    std::string topology_file;

    ProtocolKind protocol;
    EtxEstimatorKind etx_estimator = EtxEstimatorKind::GilbertElliott;
    double ewma_smoothing = 0.1;

    double source_rate_pps = 0.25;
    Time duration = sec(2100);
    Time warmup = sec(300);

    int queue_capacity = 25;
    int filter_history = 25;
    int initial_ttl = 10;
    int max_sw_retx = 5;
    int mac_subtries = 3;

    TimeRange retx_timeout{msec(10), msec(200)};
    TimeRange retry_wait{msec(50), msec(100)};
    TimeRange proc_delay{msec(4), msec(5)};
    TimeRange csma_backoff{usec(500), msec(2)};

    Time source_beacon_period = sec(5);
    Time sink_beacon_period = sec(2);
    Time tree_recompute_period = sec(10);

    Time frame_airtime = msec(4);

    Time queue_sample_period = sec(1);
    Time route_sample_period = sec(10);

    std::uint64_t seed = 1;

    InterferenceSpec interference;

    bool operator==(const RunConfig&) const = default;
};

/// A RunConfig that passed validate_config unchanged.
struct ValidatedConfig {
    RunConfig cfg;
};

struct ConfigViolation {
    enum class Kind { InvalidRange, NonPositiveDuration, UnknownProtocol };
    Kind kind;
    std::string field;
    std::string message;
};

std::string violation_kind_name(ConfigViolation::Kind k);

struct ValidationResult {
    std::vector<ConfigViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks ranges and durations. Returns the full list of violations; the
/// config is usable only when the list is empty.
ValidationResult validate_config(const RunConfig& cfg);

/// Throws std::runtime_error listing all violations if the config is invalid.
ValidatedConfig require_valid(const RunConfig& cfg);

}  // namespace hdsim

#endif
