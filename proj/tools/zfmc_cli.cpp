// zfmc command line: zero-forcing analysis of graphs and identification of
// partially observed Markov chains from the dynamics of the observed states.
//
// Exit codes: 0 success, 1 flag misuse, 2 file/parse error, 3 precondition
// refusal (not forcing, not combinatorially symmetric, insufficient horizon,
// search bound), 4 numerical failure (division guard, validation, simulation
// guard).

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zfmc/forcing.hpp"
#include "zfmc/graph.hpp"
#include "zfmc/io.hpp"
#include "zfmc/reconstruct.hpp"
#include "zfmc/simulate.hpp"

namespace {

int exit_code_for(zfmc::errc c) {
    switch (c) {
        case zfmc::errc::parse:
            return 2;
        case zfmc::errc::bad_argument:
        case zfmc::errc::not_stochastic:
        case zfmc::errc::not_rate:
        case zfmc::errc::not_symmetric:
        case zfmc::errc::not_connected:
        case zfmc::errc::not_forcing:
        case zfmc::errc::horizon:
        case zfmc::errc::search_bound:
            return 3;
        case zfmc::errc::division:
        case zfmc::errc::validation:
        case zfmc::errc::sim_guard:
            return 4;
    }
    return 1;
}

std::string set_to_string(const std::vector<int>& vs) {
    std::string out = "{";
    for (size_t i = 0; i < vs.size(); ++i) out += (i ? "," : "") + std::to_string(vs[i]);
    return out + "}";
}

std::string forces_to_string(const zfmc::ForcingSequence& fs) {
    std::string out;
    for (size_t i = 0; i < fs.forces.size(); ++i)
        out += (i ? ", " : "") + std::to_string(fs.forces[i].forcer) + "->" +
               std::to_string(fs.forces[i].forced);
    return out.empty() ? "(none)" : out;
}

std::uint64_t ensure_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::printf("seed: %" PRIu64 " (generated)\n", s);
    return s;
}

zfmc::ChainKind parse_kind(const std::string& kind) {
    if (kind == "dtmc") return zfmc::ChainKind::discrete;
    if (kind == "ctmc") return zfmc::ChainKind::continuous;
    throw zfmc::Error(zfmc::errc::bad_argument, "kind must be dtmc or ctmc");
}

// ---- zf -------------------------------------------------------------------

struct ZfArgs {
    std::string graph_file;
    std::vector<int> observe;
    int bound = 20;
};

int cmd_zf(const ZfArgs& a) {
    const zfmc::SimpleGraph g = zfmc::io::load_graph(a.graph_file);
    std::printf("graph: %d vertices, %d edges\n", g.order(), g.edge_count());
    if (!a.observe.empty()) {
        const zfmc::ForcingSequence fs = zfmc::forcing_closure(g, a.observe);
        std::printf("observed set: %s\n", set_to_string(fs.initial_set).c_str());
        std::printf("forcing order: %s\n", forces_to_string(fs).c_str());
        std::printf("closure: %s\n", set_to_string(fs.closure).c_str());
        if (fs.covers(g.order())) {
            std::printf("zero forcing: yes\n");
        } else {
            std::printf("zero forcing: no (closure stalls at %zu of %d vertices)\n",
                        fs.closure.size(), g.order());
        }
    } else {
        const std::vector<int> z = zfmc::min_zero_forcing_set(g, a.bound);
        std::printf("zero forcing number: %zu\n", z.size());
        std::printf("minimum zero forcing set: %s\n", set_to_string(z).c_str());
    }
    return 0;
}

// ---- reconstruct ------------------------------------------------------------

struct ReconstructArgs {
    std::string graph_file;
    std::string moments_file;
    std::string matrix_file;
    std::vector<int> observe;
    std::string kind = "";
    int powers = 0;  // 0: exact horizon (matrix mode)
    std::string out_file;
    double tol = -1.0;
};

int cmd_reconstruct(const ReconstructArgs& a) {
    using namespace zfmc;
    std::optional<MomentTable> table;
    std::optional<SimpleGraph> pattern;
    ChainKind kind = ChainKind::discrete;

    if (a.matrix_file.empty() && a.moments_file.empty())
        throw Error(errc::bad_argument, "one of --moments or --matrix is required");

    if (!a.matrix_file.empty()) {
        // exact-moment mode: derive the moments (and, if absent, the
        // pattern) from a full matrix; refuses non-symmetric matrices.
        kind = a.kind.empty() ? ChainKind::discrete : parse_kind(a.kind);
        const Matrix m = io::load_matrix(a.matrix_file);
        pattern = a.graph_file.empty() ? pattern_of_chain(m, 1e-12)
                                       : io::load_graph(a.graph_file);
        if (!a.graph_file.empty() && !is_combinatorially_symmetric(m, 1e-12))
            throw Error(errc::not_symmetric, "matrix is not combinatorially symmetric");
        const int n = a.powers > 0 ? a.powers : exact_power_horizon(*pattern, a.observe);
        if (kind == ChainKind::discrete)
            table = power_moments(StochasticMatrix(m), a.observe, n);
        else
            table = rate_moments(RateMatrix(m), a.observe, n);
    } else {
        if (a.graph_file.empty())
            throw Error(errc::bad_argument, "--graph is required with --moments");
        pattern = io::load_graph(a.graph_file);
        table = io::load_moments(a.moments_file);
        kind = a.kind.empty() ? table->kind() : parse_kind(a.kind);
    }

    ReconstructOptions opt;
    opt.div_tol = a.tol;
    const ReconstructionResult res =
        kind == ChainKind::discrete ? reconstruct_dtmc(*pattern, a.observe, *table, opt)
                                    : reconstruct_ctmc(*pattern, a.observe, *table, opt);

    std::printf("kind: %s\n", to_string(res.kind));
    std::printf("forcing order: %s\n", forces_to_string(res.forcing).c_str());
    std::printf("residual: max %.3e, mean %.3e\n", res.residual_max, res.residual_mean);
    std::printf("diagonal cross-check mismatch: %.3e\n", res.diag_mismatch_max);
    for (const std::string& w : res.warnings) std::printf("warning: %s\n", w.c_str());
    std::printf("matrix:\n");
    for (int i = 0; i < res.matrix.size(); ++i) {
        for (int j = 0; j < res.matrix.size(); ++j)
            std::printf("%s%.12g", j ? " " : "  ", res.matrix(i, j));
        std::printf("\n");
    }
    if (!a.out_file.empty()) {
        io::save_result(res, a.out_file);
        std::printf("result written to %s\n", a.out_file.c_str());
    }
    return 0;
}

// ---- simulate ----------------------------------------------------------------

struct SimulateArgs {
    std::string matrix_file;
    std::vector<int> observe;
    int powers = 0;
    std::int64_t windows = 100000;
    std::optional<std::uint64_t> seed;
    std::string out_file;
    int start = 1;
    std::int64_t max_wait = 10'000'000;
};

int cmd_simulate(const SimulateArgs& a) {
    using namespace zfmc;
    const StochasticMatrix p(io::load_matrix(a.matrix_file));
    const std::uint64_t seed = ensure_seed(a.seed);
    EstimateOptions opt;
    opt.start_state = a.start;
    opt.max_wait = a.max_wait;
    const MomentTable table = estimate_moments(p, a.observe, a.powers, a.windows, seed, opt);
    io::save_moments(table, a.out_file);
    std::printf("estimated powers 1..%d on %s from %" PRId64 " windows per state\n",
                table.max_power(), set_to_string(table.states()).c_str(), a.windows);
    std::printf("largest standard error: %.3e\n", table.max_se());
    std::printf("moments written to %s\n", a.out_file.c_str());
    return 0;
}

// ---- roundtrip ----------------------------------------------------------------

struct RoundtripArgs {
    std::string graph_file;
    std::vector<int> observe;
    int trials = 1000;
    std::string kind = "dtmc";
    std::optional<std::uint64_t> seed;
    int powers = 0;
    double min_weight = 0.05;
    double tol = 1e-8;
};

int cmd_roundtrip(const RoundtripArgs& a) {
    using namespace zfmc;
    if (a.trials < 1) throw Error(errc::bad_argument, "trials must be at least 1");
    const SimpleGraph g = zfmc::io::load_graph(a.graph_file);
    const ChainKind kind = parse_kind(a.kind);

    // refuse upfront if the observed set cannot force
    const ForcingSequence fs = forcing_closure(g, a.observe);
    if (!fs.covers(g.order()))
        throw NotForcingError("observed set is not zero forcing; closure stalls at " +
                                  set_to_string(fs.closure),
                              fs.closure);

    const int horizon = a.powers > 0 ? a.powers : exact_power_horizon(g, a.observe);
    const std::uint64_t seed = ensure_seed(a.seed);
    std::printf("pattern: %d vertices; observing %s; kind %s; horizon %d; %d trials\n",
                g.order(), set_to_string(fs.initial_set).c_str(), to_string(kind), horizon,
                a.trials);

    int successes = 0, failures = 0;
    double max_err = 0.0, sum_err = 0.0;
    std::string first_failure;
    for (int t = 0; t < a.trials; ++t) {
        const std::uint64_t trial_seed = mix_seed(seed, static_cast<std::uint64_t>(t));
        try {
            double err = 0.0;
            if (kind == ChainKind::discrete) {
                const StochasticMatrix m = random_stochastic_with_graph(g, trial_seed, a.min_weight);
                const MomentTable tab = power_moments(m, a.observe, horizon);
                const ReconstructionResult r = reconstruct_dtmc(g, a.observe, tab);
                err = max_abs_diff(r.matrix, m.entries());
            } else {
                const RateMatrix m = random_rate_with_graph(g, trial_seed, a.min_weight);
                const MomentTable tab = rate_moments(m, a.observe, horizon);
                const ReconstructionResult r = reconstruct_ctmc(g, a.observe, tab);
                err = max_abs_diff(r.matrix, m.entries());
            }
            max_err = std::max(max_err, err);
            sum_err += err;
            if (err <= a.tol)
                ++successes;
            else {
                ++failures;
                if (first_failure.empty())
                    first_failure = "trial " + std::to_string(t) + ": error " +
                                    std::to_string(err) + " above " + std::to_string(a.tol);
            }
        } catch (const Error& e) {
            ++failures;
            if (first_failure.empty())
                first_failure = "trial " + std::to_string(t) + ": " + e.what();
        }
    }
    std::printf("trials: %d\n", a.trials);
    std::printf("successes: %d\n", successes);
    std::printf("failures: %d\n", failures);
    if (!first_failure.empty()) std::printf("first failure: %s\n", first_failure.c_str());
    if (successes > 0) {
        std::printf("max entry error: %.3e\n", max_err);
        std::printf("mean entry error: %.3e\n", sum_err / a.trials);
    }
    return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-forcing identification of partially observed Markov chains"};
    app.require_subcommand(1);

    ZfArgs zf;
    CLI::App* zf_cmd = app.add_subcommand(
        "zf", "zero-forcing analysis: closure of a given set, or a minimum forcing set");
    zf_cmd->add_option("--graph", zf.graph_file, "graph JSON file")->required();
    zf_cmd->add_option("--observe", zf.observe, "comma-separated vertex list")->delimiter(',');
    zf_cmd->add_option("--bound", zf.bound, "order bound for the minimum-set search");

    ReconstructArgs rc;
    CLI::App* rc_cmd = app.add_subcommand(
        "reconstruct", "recover the full matrix from moments on a zero forcing set");
    rc_cmd->add_option("--graph", rc.graph_file, "pattern graph JSON file");
    rc_cmd->add_option("--observe", rc.observe, "observed states")->delimiter(',')->required();
    auto* mopt = rc_cmd->add_option("--moments", rc.moments_file, "moment table JSON file");
    auto* xopt = rc_cmd->add_option("--matrix", rc.matrix_file,
                                    "full matrix file; exact moments are computed from it");
    mopt->excludes(xopt);
    xopt->excludes(mopt);
    rc_cmd->add_option("--kind", rc.kind, "dtmc or ctmc")->check(CLI::IsMember({"dtmc", "ctmc"}));
    rc_cmd->add_option("--powers", rc.powers, "horizon for --matrix mode (default: exact)");
    rc_cmd->add_option("--out", rc.out_file, "write the result JSON here");
    rc_cmd->add_option("--tol", rc.tol, "division guard tolerance");

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "estimate moments on observed states from sampled trajectories");
    sim_cmd->add_option("--matrix", sim.matrix_file, "transition matrix file")->required();
    sim_cmd->add_option("--observe", sim.observe, "observed states")->delimiter(',')->required();
    sim_cmd->add_option("--powers", sim.powers, "largest power to estimate")->required();
    sim_cmd->add_option("--windows", sim.windows, "sample windows per observed state");
    sim_cmd->add_option("--seed", sim.seed, "RNG seed (default: generated and printed)");
    sim_cmd->add_option("--out", sim.out_file, "output moment table JSON")->required();
    sim_cmd->add_option("--start", sim.start, "trajectory start state");
    sim_cmd->add_option("--max-wait", sim.max_wait, "hit-search guard in steps");

    RoundtripArgs rt;
    CLI::App* rt_cmd = app.add_subcommand(
        "roundtrip", "random chains on a pattern, exact moments, reconstruction, error summary");
    rt_cmd->add_option("--graph", rt.graph_file, "pattern graph JSON file")->required();
    rt_cmd->add_option("--observe", rt.observe, "observed states")->delimiter(',')->required();
    rt_cmd->add_option("--trials", rt.trials, "number of trials");
    rt_cmd->add_option("--kind", rt.kind, "dtmc or ctmc")->check(CLI::IsMember({"dtmc", "ctmc"}));
    rt_cmd->add_option("--seed", rt.seed, "base RNG seed (default: generated and printed)");
    rt_cmd->add_option("--powers", rt.powers, "moment horizon (default: exact)");
    rt_cmd->add_option("--min-weight", rt.min_weight, "smallest sampled weight");
    rt_cmd->add_option("--tol", rt.tol, "per-trial success threshold on the max entry error");

    try {
        app.parse(argc, argv);
        if (zf_cmd->parsed()) return cmd_zf(zf);
        if (rc_cmd->parsed()) return cmd_reconstruct(rc);
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (rt_cmd->parsed()) return cmd_roundtrip(rt);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const zfmc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
