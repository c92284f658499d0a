#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hdsim/types.hpp"

namespace hdsim {

inline constexpr char kSoftwareVersion[] = "1.0.0";

// Scenario files are UTF-8 text with [section] headers and `key = value`
// lines; '#' or ';' start a comment. Times are exact integer microseconds.
// Sections: [run] for a single scenario, optional [interference], and
// optional [sweep] describing parameter axes. Serialization writes every key
// explicitly, and parse(serialize(cfg)) == cfg holds bit-exactly.

std::string serialize_config(const RunConfig& cfg);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::filesystem::path& path);
void write_config_file(const RunConfig& cfg, const std::filesystem::path& path);

const char* protocol_token(Protocol p);             // "hdcp", "hdcp_modified", "bcp", "tree"
Protocol parse_protocol_token(const std::string& token);
const char* estimator_token(EtxEstimatorKind k);    // "gilbert_elliott", "ewma"
EtxEstimatorKind parse_estimator_token(const std::string& token);

struct ExperimentSpec {
    RunConfig base;
    std::vector<Protocol> protocols;     // empty axis: keep the base value
    std::vector<double> betas;
    std::vector<double> rates_pps;
    std::vector<std::uint64_t> seeds;
    int workers = 1;
    std::string out_dir = "sweep_out";

    bool operator==(const ExperimentSpec&) const = default;
};

std::string serialize_experiment(const ExperimentSpec& spec);
ExperimentSpec parse_experiment_text(const std::string& text);
ExperimentSpec load_experiment_file(const std::filesystem::path& path);

// Stable 64-bit FNV-1a hash of the serialized config, for manifests.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace hdsim
