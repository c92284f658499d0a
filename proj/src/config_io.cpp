#include "hdsim/config_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hdsim {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct IniEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct IniFile {
    // section -> key -> entry; insertion order does not matter for lookup.
    std::map<std::string, std::map<std::string, IniEntry>> sections;

    static IniFile parse(const std::string& text) {
        IniFile ini;
        std::istringstream is(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find_first_of("#;");
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw std::runtime_error("config line " + std::to_string(lineno) +
                                             ": unterminated section header");
                }
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) {
                    throw std::runtime_error("config line " + std::to_string(lineno) +
                                             ": empty section name");
                }
                ini.sections[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": expected key = value");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
            }
            if (section.empty()) {
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": key outside any [section]");
            }
            auto [it, fresh] = ini.sections[section].emplace(key, IniEntry{value, lineno, false});
            if (!fresh) {
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": duplicate key '" + key + "'");
            }
        }
        return ini;
    }

    bool has_section(const std::string& name) const { return sections.count(name) != 0; }

    // Throws on unparsed keys so typos never silently fall back to defaults.
    void require_all_used() const {
        for (const auto& [sec, keys] : sections) {
            for (const auto& [key, entry] : keys) {
                if (!entry.used) {
                    throw std::runtime_error("config line " + std::to_string(entry.line) +
                                             ": unknown key '" + sec + "." + key + "'");
                }
            }
        }
    }
};

class SectionReader {
public:
    SectionReader(IniFile& ini, std::string section) : ini_(ini), section_(std::move(section)) {}

    bool fetch(const std::string& key, std::string& out) {
        auto sec = ini_.sections.find(section_);
        if (sec == ini_.sections.end()) return false;
        auto it = sec->second.find(key);
        if (it == sec->second.end()) return false;
        it->second.used = true;
        out = it->second.value;
        return true;
    }

    void get(const std::string& key, std::string& target) { fetch(key, target); }

    void get(const std::string& key, double& target) {
        std::string raw;
        if (fetch(key, raw)) target = parse_double(key, raw);
    }

    void get(const std::string& key, int& target) {
        std::string raw;
        if (fetch(key, raw)) target = static_cast<int>(parse_int(key, raw));
    }

    void get(const std::string& key, std::uint64_t& target) {
        std::string raw;
        if (!fetch(key, raw)) return;
        try {
            std::size_t pos = 0;
            target = std::stoull(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
        } catch (const std::exception&) {
            fail(key, raw, "an unsigned integer");
        }
    }

    void get(const std::string& key, Time& target) {
        std::string raw;
        if (fetch(key, raw)) target = Time{parse_int(key, raw)};
    }

    void get(const std::string& key, TimeRange& target) {
        std::string raw;
        if (!fetch(key, raw)) return;
        const std::vector<std::string> parts = split(raw);
        if (parts.size() != 2) fail(key, raw, "two integers (min max)");
        target.min = Time{parse_int(key, parts[0])};
        target.max = Time{parse_int(key, parts[1])};
    }

    void get_list(const std::string& key, std::vector<double>& target) {
        std::string raw;
        if (!fetch(key, raw)) return;
        target.clear();
        for (const std::string& p : split(raw)) target.push_back(parse_double(key, p));
    }

    void get_list(const std::string& key, std::vector<std::uint64_t>& target) {
        std::string raw;
        if (!fetch(key, raw)) return;
        target.clear();
        for (const std::string& p : split(raw)) {
            try {
                std::size_t pos = 0;
                target.push_back(std::stoull(p, &pos));
                if (pos != p.size()) throw std::invalid_argument(p);
            } catch (const std::exception&) {
                fail(key, raw, "unsigned integers");
            }
        }
    }

    void get_list(const std::string& key, std::vector<NodeId>& target) {
        std::string raw;
        if (!fetch(key, raw)) return;
        target.clear();
        for (const std::string& p : split(raw)) {
            target.push_back(static_cast<NodeId>(parse_int(key, p)));
        }
    }

private:
    static std::vector<std::string> split(const std::string& raw) {
        std::vector<std::string> out;
        std::istringstream is(raw);
        std::string tok;
        while (is >> tok) out.push_back(tok);
        return out;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& raw, const char* wanted) {
        throw std::runtime_error("config key '" + section_ + "." + key + "': expected " + wanted +
                                 ", got '" + raw + "'");
    }

    double parse_double(const std::string& key, const std::string& raw) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            fail(key, raw, "a number");
        }
    }

    std::int64_t parse_int(const std::string& key, const std::string& raw) {
        try {
            std::size_t pos = 0;
            const std::int64_t v = std::stoll(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            fail(key, raw, "an integer");
        }
    }

    IniFile& ini_;
    std::string section_;
};

void read_run_sections(IniFile& ini, RunConfig& cfg) {
    SectionReader run(ini, "run");
    run.get("topology", cfg.topology_file);
    std::string proto;
    if (run.fetch("protocol", proto)) cfg.protocol.kind = parse_protocol_token(proto);
    run.get("beta", cfg.protocol.beta);
    run.get("v", cfg.protocol.v);
    std::string est;
    if (run.fetch("etx_estimator", est)) cfg.etx_estimator = parse_estimator_token(est);
    run.get("ewma_smoothing", cfg.ewma_smoothing);
    run.get("source_rate_pps", cfg.source_rate_pps);
    run.get("duration_us", cfg.duration);
    run.get("warmup_us", cfg.warmup);
    run.get("queue_capacity", cfg.queue_capacity);
    run.get("filter_history", cfg.filter_history);
    run.get("initial_ttl", cfg.initial_ttl);
    run.get("max_sw_retx", cfg.max_sw_retx);
    run.get("mac_subtries", cfg.mac_subtries);
    run.get("retx_timeout_us", cfg.retx_timeout);
    run.get("retry_wait_us", cfg.retry_wait);
    run.get("proc_delay_us", cfg.proc_delay);
    run.get("csma_backoff_us", cfg.csma_backoff);
    run.get("source_beacon_period_us", cfg.source_beacon_period);
    run.get("sink_beacon_period_us", cfg.sink_beacon_period);
    run.get("tree_recompute_period_us", cfg.tree_recompute_period);
    run.get("frame_airtime_us", cfg.frame_airtime);
    run.get("queue_sample_period_us", cfg.queue_sample_period);
    run.get("route_sample_period_us", cfg.route_sample_period);
    run.get("seed", cfg.seed);

    SectionReader itf(ini, "interference");
    itf.get_list("impacted", cfg.interference.impacted);
    itf.get("window_start_us", cfg.interference.window_start);
    itf.get("window_end_us", cfg.interference.window_end);
    itf.get("on_us", cfg.interference.on_period);
    itf.get("off_us", cfg.interference.off_period);
    itf.get("rate_pps", cfg.interference.rate_pps);
    itf.get("frame_airtime_us", cfg.interference.frame_airtime);
}

}  // namespace

const char* protocol_token(Protocol p) {
    switch (p) {
        case Protocol::HdcpOriginal: return "hdcp_original";
        case Protocol::HdcpModified: return "hdcp";
        case Protocol::Bcp:          return "bcp";
        case Protocol::MinEtxTree:   return "tree";
    }
    return "?";
}

Protocol parse_protocol_token(const std::string& token) {
    // "hdcp" is the deployable V-scaled rule; the unscaled greedy variant is
    // kept as a reference under its own name.
    if (token == "hdcp" || token == "hdcp_modified") return Protocol::HdcpModified;
    if (token == "hdcp_original") return Protocol::HdcpOriginal;
    if (token == "bcp") return Protocol::Bcp;
    if (token == "tree") return Protocol::MinEtxTree;
    throw std::runtime_error("unknown protocol '" + token +
                             "' (expected hdcp, hdcp_original, bcp, or tree)");
}

const char* estimator_token(EtxEstimatorKind k) {
    return k == EtxEstimatorKind::GilbertElliott ? "gilbert_elliott" : "ewma";
}

EtxEstimatorKind parse_estimator_token(const std::string& token) {
    if (token == "gilbert_elliott") return EtxEstimatorKind::GilbertElliott;
    if (token == "ewma") return EtxEstimatorKind::Ewma;
    throw std::runtime_error("unknown estimator '" + token +
                             "' (expected gilbert_elliott or ewma)");
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[run]\n";
    os << "topology = " << cfg.topology_file << "\n";
    os << "protocol = " << protocol_token(cfg.protocol.kind) << "\n";
    os << "beta = " << fmt_double(cfg.protocol.beta) << "\n";
    os << "v = " << fmt_double(cfg.protocol.v) << "\n";
    os << "etx_estimator = " << estimator_token(cfg.etx_estimator) << "\n";
    os << "ewma_smoothing = " << fmt_double(cfg.ewma_smoothing) << "\n";
    os << "source_rate_pps = " << fmt_double(cfg.source_rate_pps) << "\n";
    os << "duration_us = " << cfg.duration.ticks << "\n";
    os << "warmup_us = " << cfg.warmup.ticks << "\n";
    os << "queue_capacity = " << cfg.queue_capacity << "\n";
    os << "filter_history = " << cfg.filter_history << "\n";
    os << "initial_ttl = " << cfg.initial_ttl << "\n";
    os << "max_sw_retx = " << cfg.max_sw_retx << "\n";
    os << "mac_subtries = " << cfg.mac_subtries << "\n";
    os << "retx_timeout_us = " << cfg.retx_timeout.min.ticks << " " << cfg.retx_timeout.max.ticks << "\n";
    os << "retry_wait_us = " << cfg.retry_wait.min.ticks << " " << cfg.retry_wait.max.ticks << "\n";
    os << "proc_delay_us = " << cfg.proc_delay.min.ticks << " " << cfg.proc_delay.max.ticks << "\n";
    os << "csma_backoff_us = " << cfg.csma_backoff.min.ticks << " " << cfg.csma_backoff.max.ticks << "\n";
    os << "source_beacon_period_us = " << cfg.source_beacon_period.ticks << "\n";
    os << "sink_beacon_period_us = " << cfg.sink_beacon_period.ticks << "\n";
    os << "tree_recompute_period_us = " << cfg.tree_recompute_period.ticks << "\n";
    os << "frame_airtime_us = " << cfg.frame_airtime.ticks << "\n";
    os << "queue_sample_period_us = " << cfg.queue_sample_period.ticks << "\n";
    os << "route_sample_period_us = " << cfg.route_sample_period.ticks << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "\n[interference]\n";
    os << "impacted =";
    for (NodeId id : cfg.interference.impacted) os << " " << id;
    os << "\n";
    os << "window_start_us = " << cfg.interference.window_start.ticks << "\n";
    os << "window_end_us = " << cfg.interference.window_end.ticks << "\n";
    os << "on_us = " << cfg.interference.on_period.ticks << "\n";
    os << "off_us = " << cfg.interference.off_period.ticks << "\n";
    os << "rate_pps = " << fmt_double(cfg.interference.rate_pps) << "\n";
    os << "frame_airtime_us = " << cfg.interference.frame_airtime.ticks << "\n";
    return os.str();
}

RunConfig parse_config_text(const std::string& text) {
    IniFile ini = IniFile::parse(text);
    RunConfig cfg;
    read_run_sections(ini, cfg);
    ini.require_all_used();
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void write_config_file(const RunConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write config file " + path.string());
    out << serialize_config(cfg);
}

std::string serialize_experiment(const ExperimentSpec& spec) {
    std::string out = serialize_config(spec.base);
    std::ostringstream os;
    os << "\n[sweep]\n";
    os << "protocols =";
    for (Protocol p : spec.protocols) os << " " << protocol_token(p);
    os << "\nbetas =";
    for (double b : spec.betas) os << " " << fmt_double(b);
    os << "\nrates_pps =";
    for (double r : spec.rates_pps) os << " " << fmt_double(r);
    os << "\nseeds =";
    for (std::uint64_t s : spec.seeds) os << " " << s;
    os << "\nworkers = " << spec.workers << "\n";
    os << "out_dir = " << spec.out_dir << "\n";
    return out + os.str();
}

ExperimentSpec parse_experiment_text(const std::string& text) {
    IniFile ini = IniFile::parse(text);
    ExperimentSpec spec;
    read_run_sections(ini, spec.base);
    SectionReader sweep(ini, "sweep");
    std::string protos;
    if (sweep.fetch("protocols", protos)) {
        spec.protocols.clear();
        std::istringstream is(protos);
        std::string tok;
        while (is >> tok) spec.protocols.push_back(parse_protocol_token(tok));
    }
    sweep.get_list("betas", spec.betas);
    sweep.get_list("rates_pps", spec.rates_pps);
    sweep.get_list("seeds", spec.seeds);
    sweep.get("workers", spec.workers);
    sweep.get("out_dir", spec.out_dir);
    ini.require_all_used();
    return spec;
}

ExperimentSpec load_experiment_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open experiment file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_text(buf.str());
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace hdsim
