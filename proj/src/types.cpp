#include "hdsim/types.hpp"

#include <sstream>
#include <stdexcept>

namespace hdsim {

std::string protocol_name(const ProtocolKind& p) {
    std::ostringstream os;
    switch (p.kind) {
        case Protocol::HdcpOriginal: os << "hdcp-original(beta=" << p.beta << ")"; break;
        case Protocol::HdcpModified: os << "hdcp(beta=" << p.beta << ",V=" << p.v << ")"; break;
        case Protocol::Bcp:          os << "bcp(V=" << p.v << ")"; break;
        case Protocol::MinEtxTree:   os << "min-etx-tree"; break;
    }
    return os.str();
}

std::string violation_kind_name(ConfigViolation::Kind k) {
    switch (k) {
        case ConfigViolation::Kind::InvalidRange:        return "InvalidRange";
        case ConfigViolation::Kind::NonPositiveDuration: return "NonPositiveDuration";
        case ConfigViolation::Kind::UnknownProtocol:     return "UnknownProtocol";
    }
    return "?";
}

namespace {

void check_positive(std::vector<ConfigViolation>& out, Time t, const std::string& field) {
    if (t.ticks <= 0) {
        out.push_back({ConfigViolation::Kind::NonPositiveDuration, field, field + " must be > 0"});
    }
}

void check_range(std::vector<ConfigViolation>& out, TimeRange r, const std::string& field) {
    if (r.min.ticks <= 0) {
        out.push_back({ConfigViolation::Kind::NonPositiveDuration, field, field + ".min must be > 0"});
    }
    if (r.max < r.min) {
        out.push_back({ConfigViolation::Kind::InvalidRange, field, field + ".max must be >= min"});
    }
}

}  // namespace

ValidationResult validate_config(const RunConfig& cfg) {
    ValidationResult res;
    auto& v = res.violations;

    switch (cfg.protocol.kind) {
        case Protocol::HdcpOriginal:
        case Protocol::HdcpModified:
        case Protocol::Bcp:
        case Protocol::MinEtxTree:
            break;
        default:
            v.push_back({ConfigViolation::Kind::UnknownProtocol, "protocol", "unknown protocol kind"});
    }
    if (cfg.protocol.uses_beta() && (cfg.protocol.beta < 0.0 || cfg.protocol.beta > 1.0)) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "protocol.beta", "beta must be in [0, 1]"});
    }
    if (cfg.protocol.uses_v() && cfg.protocol.v < 0.0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "protocol.v", "V must be >= 0"});
    }
    // The modified weight divides by V*etx, so V=0 is only meaningful for Bcp.
    if (cfg.protocol.kind == Protocol::HdcpModified && cfg.protocol.v < 1.0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "protocol.v", "V must be >= 1 for hdcp"});
    }

    if (cfg.source_rate_pps <= 0.0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "source_rate_pps", "rate must be > 0"});
    }
    check_positive(v, cfg.duration, "duration");
    if (cfg.warmup.ticks < 0 || cfg.warmup >= cfg.duration) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "warmup", "warmup must be in [0, duration)"});
    }

    if (cfg.queue_capacity <= 0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "queue_capacity", "capacity must be > 0"});
    }
    if (cfg.filter_history <= 0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "filter_history", "history must be > 0"});
    }
    if (cfg.initial_ttl <= 0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "initial_ttl", "ttl must be > 0"});
    }
    if (cfg.max_sw_retx <= 0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "max_sw_retx", "retx limit must be > 0"});
    }
    if (cfg.mac_subtries <= 0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "mac_subtries", "subtries must be > 0"});
    }

    check_range(v, cfg.retx_timeout, "retx_timeout");
    check_range(v, cfg.retry_wait, "retry_wait");
    check_range(v, cfg.proc_delay, "proc_delay");
    check_range(v, cfg.csma_backoff, "csma_backoff");

    check_positive(v, cfg.source_beacon_period, "source_beacon_period");
    check_positive(v, cfg.sink_beacon_period, "sink_beacon_period");
    check_positive(v, cfg.tree_recompute_period, "tree_recompute_period");
    check_positive(v, cfg.frame_airtime, "frame_airtime");
    check_positive(v, cfg.queue_sample_period, "queue_sample_period");
    check_positive(v, cfg.route_sample_period, "route_sample_period");

    if (cfg.ewma_smoothing <= 0.0 || cfg.ewma_smoothing > 1.0) {
        v.push_back({ConfigViolation::Kind::InvalidRange, "ewma_smoothing", "smoothing must be in (0, 1]"});
    }

    if (cfg.interference.enabled()) {
        const auto& itf = cfg.interference;
        check_positive(v, itf.on_period, "interference.on_period");
        if (itf.off_period.ticks < 0) {
            v.push_back({ConfigViolation::Kind::InvalidRange, "interference.off_period", "off period must be >= 0"});
        }
        check_positive(v, itf.frame_airtime, "interference.frame_airtime");
        if (itf.window_start.ticks < 0) {
            v.push_back({ConfigViolation::Kind::InvalidRange, "interference.window", "window start must be >= 0"});
        }
    }

    return res;
}

ValidatedConfig require_valid(const RunConfig& cfg) {
    ValidationResult res = validate_config(cfg);
    if (!res.ok()) {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto& viol : res.violations) {
            os << " [" << violation_kind_name(viol.kind) << " " << viol.field << ": " << viol.message << "]";
        }
        throw std::runtime_error(os.str());
    }
    return ValidatedConfig{cfg};
}

}  // namespace hdsim
