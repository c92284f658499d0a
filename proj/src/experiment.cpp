#include "hdsim/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hdsim/rng.hpp"
#include "hdsim/simnet.hpp"

namespace hdsim {

namespace {

std::string short_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::vector<PlannedRun> plan_runs(const ExperimentSpec& spec) {
    std::vector<PlannedRun> runs;
    const bool all_empty = spec.protocols.empty() && spec.betas.empty() &&
                           spec.rates_pps.empty() && spec.seeds.empty();
    if (all_empty) {
        PlannedRun r;
        r.index = 0;
        r.cfg = spec.base;
        r.name = "run_000_" + std::string(protocol_token(r.cfg.protocol.kind)) +
                 "_b" + short_double(r.cfg.protocol.beta) +
                 "_r" + short_double(r.cfg.source_rate_pps) + "_s0";
        runs.push_back(std::move(r));
        return runs;
    }

    const std::vector<Protocol> protocols =
        spec.protocols.empty() ? std::vector<Protocol>{spec.base.protocol.kind} : spec.protocols;
    const std::vector<double> betas =
        spec.betas.empty() ? std::vector<double>{spec.base.protocol.beta} : spec.betas;
    const std::vector<double> rates =
        spec.rates_pps.empty() ? std::vector<double>{spec.base.source_rate_pps} : spec.rates_pps;
    const std::vector<std::uint64_t> seeds =
        spec.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : spec.seeds;

    int index = 0;
    for (std::size_t pi = 0; pi < protocols.size(); ++pi) {
        for (std::size_t bi = 0; bi < betas.size(); ++bi) {
            for (std::size_t ri = 0; ri < rates.size(); ++ri) {
                for (std::size_t si = 0; si < seeds.size(); ++si) {
                    PlannedRun r;
                    r.index = index;
                    r.cfg = spec.base;
                    r.cfg.protocol.kind = protocols[pi];
                    r.cfg.protocol.beta = betas[bi];
                    r.cfg.source_rate_pps = rates[ri];
                    const std::uint64_t cell =
                        (static_cast<std::uint64_t>(pi) << 40) |
                        (static_cast<std::uint64_t>(bi) << 20) |
                        static_cast<std::uint64_t>(ri);
                    r.cfg.seed = derive_seed(spec.base.seed, cell, seeds[si]);
                    char name[160];
                    std::snprintf(name, sizeof name, "run_%03d_%s_b%s_r%s_s%llu", index,
                                  protocol_token(protocols[pi]), short_double(betas[bi]).c_str(),
                                  short_double(rates[ri]).c_str(),
                                  static_cast<unsigned long long>(seeds[si]));
                    r.name = name;
                    runs.push_back(std::move(r));
                    ++index;
                }
            }
        }
    }
    return runs;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out =
        "run,name,protocol,beta,v,rate_pps,seed,originated,delivered,delivery_ratio,"
        "goodput_pps,mean_delay_s,avg_queue_total,dirichlet_cost\n";
    char buf[320];
    for (const SweepRow& r : result.rows) {
        std::snprintf(buf, sizeof buf, "%d,%s,%s,%.6g,%.6g,%.6g,%llu,%lld,%lld,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                      r.index, r.name.c_str(), protocol_token(r.protocol), r.beta, r.v, r.rate_pps,
                      static_cast<unsigned long long>(r.seed),
                      static_cast<long long>(r.network.originated),
                      static_cast<long long>(r.network.delivered), r.network.delivery_ratio,
                      r.network.goodput_pps, r.network.mean_delay_s, r.network.avg_queue_total,
                      r.network.dirichlet_cost);
        out += buf;
    }
    return out;
}

std::string manifest_text(const std::vector<PlannedRun>& runs, const std::string& timestamp) {
    std::string out = "run,name,protocol,beta,v,rate_pps,seed,config_hash,version,timestamp\n";
    char buf[320];
    for (const PlannedRun& r : runs) {
        std::snprintf(buf, sizeof buf, "%d,%s,%s,%.6g,%.6g,%.6g,%llu,%016llx,%s,%s\n", r.index,
                      r.name.c_str(), protocol_token(r.cfg.protocol.kind), r.cfg.protocol.beta,
                      r.cfg.protocol.v, r.cfg.source_rate_pps,
                      static_cast<unsigned long long>(r.cfg.seed),
                      static_cast<unsigned long long>(config_hash(r.cfg)), kSoftwareVersion,
                      timestamp.c_str());
        out += buf;
    }
    return out;
}

std::string current_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

SweepResult execute_runs(const ExperimentSpec& spec, const Topology& topo,
                         const std::vector<PlannedRun>& runs, bool write_files,
                         std::ostream* log) {
    SweepResult result;
    result.rows.resize(runs.size());

    const std::filesystem::path out_root(spec.out_dir);
    if (write_files) std::filesystem::create_directories(out_root);

    std::atomic<std::size_t> cursor{0};
    std::mutex log_mutex;
    std::vector<std::string> errors(runs.size());

    auto work = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= runs.size()) return;
            const PlannedRun& run = runs[i];
            try {
                const ValidatedConfig vcfg = require_valid(run.cfg);
                EventTrace trace = run_scenario(vcfg, topo);
                MetricsReport report = compute_metrics(trace);

                SweepRow row;
                row.index = run.index;
                row.name = run.name;
                row.protocol = run.cfg.protocol.kind;
                row.beta = run.cfg.protocol.beta;
                row.v = run.cfg.protocol.v;
                row.rate_pps = run.cfg.source_rate_pps;
                row.seed = run.cfg.seed;
                row.network = report.network;
                result.rows[i] = std::move(row);

                if (write_files) {
                    const std::filesystem::path dir = out_root / run.name;
                    write_metrics_csvs(report, dir);
                    write_config_file(run.cfg, dir / "config.ini");
                    std::ofstream snaps(dir / "snapshots.txt", std::ios::trunc);
                    write_snapshots(trace.snapshots, snaps);
                }
                if (log) {
                    std::lock_guard<std::mutex> lock(log_mutex);
                    *log << "run " << run.index << " (" << run.name << "): delivered "
                         << report.network.delivered << "/" << report.network.originated << "\n";
                }
            } catch (const std::exception& ex) {
                errors[i] = ex.what();
            }
        }
    };

    const int workers = std::max(1, spec.workers);
    if (workers == 1 || runs.size() <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        const int n = std::min<int>(workers, static_cast<int>(runs.size()));
        pool.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }

    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!errors[i].empty()) {
            throw std::runtime_error("run " + runs[i].name + " failed: " + errors[i]);
        }
    }

    if (write_files) {
        std::ofstream agg(out_root / "sweep.csv", std::ios::trunc);
        if (!agg) throw std::runtime_error("cannot write " + (out_root / "sweep.csv").string());
        agg << sweep_csv(result);
        std::ofstream man(out_root / "manifest.csv", std::ios::trunc);
        if (!man) throw std::runtime_error("cannot write " + (out_root / "manifest.csv").string());
        man << manifest_text(runs, current_timestamp());
    }
    return result;
}

}  // namespace

SweepResult execute_sweep(const ExperimentSpec& spec, const Topology& topo, std::ostream* log) {
    return execute_runs(spec, topo, plan_runs(spec), true, log);
}

SweepResult execute_sweep_in_memory(const ExperimentSpec& spec, const Topology& topo) {
    return execute_runs(spec, topo, plan_runs(spec), false, nullptr);
}

}  // namespace hdsim
