#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdsim/analysis.hpp"
#include "hdsim/config_io.hpp"
#include "hdsim/experiment.hpp"
#include "hdsim/metrics.hpp"
#include "hdsim/simnet.hpp"
#include "hdsim/topology.hpp"

namespace {

using namespace hdsim;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> protocol;
    std::optional<double> beta;
    std::optional<double> rate_pps;
    std::optional<double> duration_s;
    std::optional<double> warmup_s;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "Override the base RNG seed");
    cmd->add_option("--protocol", ov.protocol, "Override protocol: hdcp|hdcp_modified|bcp|tree");
    cmd->add_option("--beta", ov.beta, "Override the heat-rule beta in [0,1]");
    cmd->add_option("--rate-pps", ov.rate_pps, "Override per-source packet rate");
    cmd->add_option("--duration-s", ov.duration_s, "Override run duration in seconds");
    cmd->add_option("--warmup-s", ov.warmup_s, "Override warmup length in seconds");
}

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.protocol) cfg.protocol.kind = parse_protocol_token(*ov.protocol);
    if (ov.beta) cfg.protocol.beta = *ov.beta;
    if (ov.rate_pps) cfg.source_rate_pps = *ov.rate_pps;
    if (ov.duration_s) cfg.duration = Time{static_cast<std::int64_t>(std::llround(*ov.duration_s * 1e6))};
    if (ov.warmup_s) cfg.warmup = Time{static_cast<std::int64_t>(std::llround(*ov.warmup_s * 1e6))};
}

// A topology path in a config file is resolved against the config's own
// directory first so scenarios stay relocatable.
std::filesystem::path resolve_topology(const std::string& topo_path,
                                       const std::filesystem::path& config_path) {
    const std::filesystem::path p(topo_path);
    if (p.is_relative()) {
        const std::filesystem::path beside = config_path.parent_path() / p;
        if (std::filesystem::exists(beside)) return beside;
    }
    return p;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& ov,
            bool dump_trace) {
    RunConfig cfg = load_config_file(config_path);
    apply_overrides(cfg, ov);
    const ValidatedConfig vcfg = require_valid(cfg);
    const Topology topo = load_topology_file(resolve_topology(cfg.topology_file, config_path));

    EventTrace trace = run_scenario(vcfg, topo);
    const MetricsReport report = compute_metrics(trace);
    const AuditResult audit = audit_trace(trace);

    const std::filesystem::path dir(out_dir);
    write_metrics_csvs(report, dir);
    write_config_file(cfg, dir / "config.ini");
    {
        std::ofstream snaps(dir / "snapshots.txt", std::ios::trunc);
        write_snapshots(trace.snapshots, snaps);
    }
    if (dump_trace) {
        std::ofstream tf(dir / "trace.txt", std::ios::trunc);
        write_trace(trace, tf);
    }

    std::printf("delivered %lld/%lld (ratio %.4f) mean_delay_s %.4f avg_queue_total %.3f\n",
                static_cast<long long>(report.network.delivered),
                static_cast<long long>(report.network.originated),
                report.network.delivery_ratio, report.network.mean_delay_s,
                report.network.avg_queue_total);
    if (!audit.ok) {
        for (const std::string& p : audit.problems) {
            std::fprintf(stderr, "audit: %s\n", p.c_str());
        }
        return 2;
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_dir,
              std::optional<int> workers, const Overrides& ov) {
    ExperimentSpec spec = load_experiment_file(config_path);
    apply_overrides(spec.base, ov);
    if (out_dir) spec.out_dir = *out_dir;
    if (workers) spec.workers = *workers;
    const Topology topo =
        load_topology_file(resolve_topology(spec.base.topology_file, config_path));

    const SweepResult result = execute_sweep(spec, topo, &std::cout);
    std::printf("sweep complete: %zu runs, outputs in %s\n", result.rows.size(),
                spec.out_dir.c_str());
    return 0;
}

std::vector<double> parse_double_list(const std::string& raw) {
    std::string cleaned = raw;
    for (char& c : cleaned) {
        if (c == ',') c = ' ';
    }
    std::istringstream is(cleaned);
    std::vector<double> out;
    double v = 0.0;
    while (is >> v) out.push_back(v);
    if (!is.eof()) throw std::runtime_error("bad number list '" + raw + "'");
    return out;
}

int cmd_analyze_kendall(const std::string& snapshot_path, const std::string& betas_raw, double v,
                        const std::string& out_path) {
    std::ifstream in(snapshot_path);
    if (!in) throw std::runtime_error("cannot open snapshot dump " + snapshot_path);
    const std::vector<RankingSnapshot> snaps = read_snapshots(in);
    const BetaSweepResult result = beta_sweep_similarity(snaps, parse_double_list(betas_raw), v);
    const std::string csv = kendall_csv(result);
    if (out_path == "-") {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << csv;
        std::printf("wrote %s (%zu snapshots)\n", out_path.c_str(), snaps.size());
    }
    return 0;
}

int cmd_analyze_steady_state(const std::string& topo_path, const std::string& protocol_token_str,
                             double v) {
    const Topology topo = load_topology_file(topo_path);
    ProtocolKind protocol;
    protocol.kind = parse_protocol_token(protocol_token_str);
    protocol.v = v;
    const auto prediction = steady_state_backlog(etx_graph_from_topology(topo), protocol);
    std::printf("node,predicted_backlog\n");
    for (const auto& [node, backlog] : prediction) {
        std::printf("%d,%.6g\n", node, backlog);
    }
    return 0;
}

int cmd_analyze_switch_count(const SwitchScenario& s, double v) {
    const SwitchPrediction p = switch_count_prediction(s, v);
    std::printf("rule,consecutive_sends\n");
    std::printf("heat,%.6g\n", p.heat);
    std::printf("backpressure,%.6g\n", p.backpressure);
    return 0;
}

int cmd_analyze_toy_region(double q_unit, double q_costly) {
    const ToyRegion r = toy_disagreement_region(q_unit, q_costly);
    std::printf("lo,hi,empty\n");
    std::printf("%.6g,%.6g,%d\n", r.lo, r.hi, r.empty() ? 1 : 0);
    return 0;
}

int cmd_gen_topology(const std::string& out_path, std::uint64_t seed,
                     const std::vector<int>& rings, double frac_perfect, double frac_good,
                     double frac_mid, int uplinks) {
    TopologyGenParams params;
    if (!rings.empty()) params.ring_sizes = rings;
    params.frac_perfect = frac_perfect;
    params.frac_good = frac_good;
    params.frac_mid = frac_mid;
    params.uplinks_per_node = uplinks;
    const Topology topo = generate_topology(params, seed);
    write_topology_file(topo, out_path);
    std::printf("wrote %s: %d nodes, %zu directed links\n", out_path.c_str(), topo.node_count(),
                topo.links.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Queue-aware multi-hop collection protocol simulator"};
    app.set_version_flag("--version", std::string(kSoftwareVersion));
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Execute one scenario and write metric CSVs");
    std::string run_config, run_out = "out";
    bool run_trace = false;
    Overrides run_ov;
    run->add_option("--config", run_config, "Scenario config file")->required();
    run->add_option("--out", run_out, "Output directory");
    run->add_flag("--trace", run_trace, "Also dump the full event trace");
    add_override_flags(run, run_ov);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Execute a parameter sweep");
    std::string sweep_config;
    std::optional<std::string> sweep_out;
    std::optional<int> sweep_workers;
    Overrides sweep_ov;
    sweep->add_option("--config", sweep_config, "Experiment spec file")->required();
    sweep->add_option("--out", sweep_out, "Output directory (overrides spec)");
    sweep->add_option("--workers", sweep_workers, "Concurrent runs (overrides spec)");
    add_override_flags(sweep, sweep_ov);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Closed-form prediction and similarity tools");
    analyze->require_subcommand(1);

    auto* kendall = analyze->add_subcommand("kendall", "Rank-similarity sweep over a snapshot dump");
    std::string kendall_snaps, kendall_betas = "0,0.2,0.4,0.6,0.8,1";
    std::string kendall_out = "kendall.csv";
    double kendall_v = 2.0;
    kendall->add_option("--snapshots", kendall_snaps, "snapshots.txt from a run")->required();
    kendall->add_option("--betas", kendall_betas, "Comma-separated beta values");
    kendall->add_option("--v", kendall_v, "Backpressure penalty weight");
    kendall->add_option("--out", kendall_out, "Output CSV path, or - for stdout");

    auto* steady = analyze->add_subcommand("steady-state", "Predicted steady-state backlogs");
    std::string steady_topo, steady_protocol = "hdcp";
    double steady_v = 2.0;
    steady->add_option("--topology", steady_topo, "Topology file")->required();
    steady->add_option("--protocol", steady_protocol, "hdcp|hdcp_modified|bcp");
    steady->add_option("--v", steady_v, "Backpressure penalty weight");

    auto* switch_count = analyze->add_subcommand("switch-count", "Predicted consecutive sends");
    SwitchScenario scenario;
    double switch_v = 2.0;
    switch_count->add_option("--qi", scenario.q_i, "Own backlog")->required();
    switch_count->add_option("--qm", scenario.q_m, "Primary neighbor backlog")->required();
    switch_count->add_option("--qn", scenario.q_n, "Alternative neighbor backlog")->required();
    switch_count->add_option("--etx-im", scenario.etx_im, "Primary link cost")->required();
    switch_count->add_option("--etx-in", scenario.etx_in, "Alternative link cost")->required();
    switch_count->add_option("--v", switch_v, "Backpressure penalty weight");

    auto* toy = analyze->add_subcommand("toy-region", "Two-candidate disagreement interval");
    double toy_q_unit = 0.0, toy_q_costly = 0.0;
    toy->add_option("--q-unit", toy_q_unit, "Differential toward the unit-cost neighbor")->required();
    toy->add_option("--q-costly", toy_q_costly, "Differential toward the costly neighbor")->required();

    // gen-topology
    auto* gen = app.add_subcommand("gen-topology", "Emit a ring topology with a target link-quality mix");
    std::string gen_out = "topology.txt";
    std::uint64_t gen_seed = 1;
    std::vector<int> gen_rings;
    double gen_fp = 0.40, gen_fg = 0.30, gen_fm = 0.20;
    int gen_uplinks = 3;
    gen->add_option("--out", gen_out, "Output topology file");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--rings", gen_rings, "Nodes per ring, e.g. --rings 5 8 6");
    gen->add_option("--frac-perfect", gen_fp, "Fraction of loss-free links");
    gen->add_option("--frac-good", gen_fg, "Fraction of good links");
    gen->add_option("--frac-mid", gen_fm, "Fraction of fair links");
    gen->add_option("--uplinks", gen_uplinks, "Uplinks per node toward the sink");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config, run_out, run_ov, run_trace);
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, sweep_workers, sweep_ov);
        if (analyze->parsed()) {
            if (kendall->parsed()) {
                return cmd_analyze_kendall(kendall_snaps, kendall_betas, kendall_v, kendall_out);
            }
            if (steady->parsed()) {
                return cmd_analyze_steady_state(steady_topo, steady_protocol, steady_v);
            }
            if (switch_count->parsed()) return cmd_analyze_switch_count(scenario, switch_v);
            if (toy->parsed()) return cmd_analyze_toy_region(toy_q_unit, toy_q_costly);
        }
        if (gen->parsed()) {
            return cmd_gen_topology(gen_out, gen_seed, gen_rings, gen_fp, gen_fg, gen_fm,
                                    gen_uplinks);
        }
        std::fprintf(stderr, "error: no subcommand selected\n");
        return 1;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
