#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hdsim/config_io.hpp"
#include "hdsim/metrics.hpp"
#include "hdsim/topology.hpp"

namespace hdsim {

// One cell of the sweep's cartesian product. When every axis of the spec is
// empty the plan is a single run with the base config untouched; otherwise
// each cell gets its own deterministic seed derived from the base seed, the
// repetition entry, and the cell's position along the other axes.
struct PlannedRun {
    int index = 0;
    RunConfig cfg;
    std::string name;
};

std::vector<PlannedRun> plan_runs(const ExperimentSpec& spec);

struct SweepRow {
    int index = 0;
    std::string name;
    Protocol protocol = Protocol::HdcpModified;
    double beta = 0.0;
    double v = 0.0;
    double rate_pps = 0.0;
    std::uint64_t seed = 0;
    NetworkStats network;
};

struct SweepResult {
    std::vector<SweepRow> rows;   // ordered by run index
};

// run,name,protocol,beta,v,rate_pps,seed,originated,delivered,delivery_ratio,
// goodput_pps,mean_delay_s,avg_queue_total,dirichlet_cost
std::string sweep_csv(const SweepResult& result);

// One line per run: run,name,protocol,beta,v,rate_pps,seed,config_hash,version,timestamp.
// The timestamp is the only field that differs between reproductions.
std::string manifest_text(const std::vector<PlannedRun>& runs, const std::string& timestamp);

std::string current_timestamp();

// Executes every planned run against the topology, writing one directory per
// run (metric CSVs, the resolved config, and a neighbor-snapshot dump) under
// spec.out_dir plus sweep.csv and manifest.csv at the top. Runs execute
// concurrently up to the worker limit; each directory has a single writer.
// Returns the aggregate. `log`, when set, receives one progress line per run.
SweepResult execute_sweep(const ExperimentSpec& spec, const Topology& topo,
                          std::ostream* log = nullptr);

// In-memory variant used by tests: no files are written.
SweepResult execute_sweep_in_memory(const ExperimentSpec& spec, const Topology& topo);

}  // namespace hdsim
