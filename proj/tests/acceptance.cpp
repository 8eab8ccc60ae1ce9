// Acceptance suite. Runs the numbered criteria (or one of them, or the
// supplementary exact-horizon block) and prints one pass/fail line each.
//
//   acceptance           run everything
//   acceptance 3         run criterion 3 only
//   acceptance extra     run the exact-horizon block only
//
// Exit code: number of failed blocks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "zfmc/io.hpp"
#include "zfmc/reconstruct.hpp"

using namespace zfmc;

namespace {

struct RoundtripCase {
    const char* name;
    SimpleGraph graph;
    std::vector<int> observe;
};

std::vector<RoundtripCase> dtmc_cases() {
    std::vector<RoundtripCase> cases;
    cases.push_back({"path-3 {1}", path_graph(3), {1}});
    cases.push_back({"path-6 {1}", path_graph(6), {1}});
    cases.push_back({"3x3 grid {1,2,3}", grid_graph(3, 3), {1, 2, 3}});
    cases.push_back({"penta-sun {1,3,5}", pentasun(), {1, 3, 5}});
    return cases;
}

Matrix example_path3() {
    Matrix m(3);
    m(0, 0) = 0.5;
    m(0, 1) = 0.5;
    m(1, 0) = 0.25;
    m(1, 1) = 0.5;
    m(1, 2) = 0.25;
    m(2, 1) = 0.5;
    m(2, 2) = 0.5;
    return m;
}

// ---- criterion 1: zero-forcing numbers of the named families --------------

bool criterion1() {
    bool ok = true;
    const auto t0 = std::chrono::steady_clock::now();

    auto expect = [&](const char* what, size_t got, size_t want) {
        if (got != want) {
            std::printf("       %s: forcing number %zu, expected %zu\n", what, got, want);
            ok = false;
        }
    };
    expect("path-5", min_zero_forcing_set(path_graph(5)).size(), 1);
    expect("path-9", min_zero_forcing_set(path_graph(9)).size(), 1);
    expect("2x3 grid", min_zero_forcing_set(grid_graph(2, 3)).size(), 2);
    expect("3x4 grid", min_zero_forcing_set(grid_graph(3, 4)).size(), 3);
    expect("penta-sun", min_zero_forcing_set(pentasun()).size(), 3);
    if (!is_zero_forcing_set(pentasun(), std::vector<int>{9, 10, 1})) {
        std::printf("       {9,10,1} should force the penta-sun\n");
        ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 1.0) {
        std::printf("       took %.2fs, budget is 1s\n", secs);
        ok = false;
    }
    return ok;
}

// ---- criterion 2: the stalled closure of the penta-sun --------------------

bool criterion2() {
    const ForcingSequence fs = forcing_closure(pentasun(), std::vector<int>{9, 10});
    const std::vector<int> want{2, 4, 7, 8, 9, 10};
    if (fs.closure != want) {
        std::printf("       closure of {9,10} came out %zu vertices\n", fs.closure.size());
        return false;
    }
    return true;
}

// ---- criteria 3-5: round trips at the budget S - |Z| + 1 -------------------

struct TrialStats {
    int trials = 0;
    int failures = 0;
    int refusals = 0;
    double max_err = 0.0;
    std::string first_problem;
};

TrialStats run_roundtrips(const RoundtripCase& c, int horizon, ChainKind kind, int trials,
                          std::uint64_t base_seed) {
    TrialStats st;
    st.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t seed = mix_seed(base_seed, t);
        try {
            double err = 0.0;
            if (kind == ChainKind::discrete) {
                const StochasticMatrix m = random_stochastic_with_graph(c.graph, seed);
                const ReconstructionResult r =
                    reconstruct_dtmc(c.graph, c.observe, power_moments(m, c.observe, horizon));
                err = max_abs_diff(r.matrix, m.entries());
            } else {
                const RateMatrix m = random_rate_with_graph(c.graph, seed);
                const ReconstructionResult r =
                    reconstruct_ctmc(c.graph, c.observe, rate_moments(m, c.observe, horizon));
                err = max_abs_diff(r.matrix, m.entries());
            }
            st.max_err = std::max(st.max_err, err);
            if (err > 1e-8) {
                ++st.failures;
                if (st.first_problem.empty())
                    st.first_problem = "error " + std::to_string(err);
            }
        } catch (const HorizonError& e) {
            ++st.refusals;
            ++st.failures;
            if (st.first_problem.empty()) st.first_problem = e.what();
        } catch (const Error& e) {
            ++st.failures;
            if (st.first_problem.empty()) st.first_problem = e.what();
        }
    }
    return st;
}

bool criterion3() {
    bool ok = true;
    const auto t0 = std::chrono::steady_clock::now();
    for (const RoundtripCase& c : dtmc_cases()) {
        const int budget =
            required_power_horizon(c.graph.order(), static_cast<int>(c.observe.size()));
        const TrialStats st =
            run_roundtrips(c, budget, ChainKind::discrete, 1000, 0xC3000 + c.graph.order());
        if (st.failures == 0) {
            std::printf("       %-18s budget %d: 1000 round trips, max error %.2e\n", c.name,
                        budget, st.max_err);
        } else {
            std::printf("       %-18s budget %d: %d of %d trials failed (%s)\n", c.name, budget,
                        st.failures, st.trials, st.first_problem.c_str());
            ok = false;
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("       elapsed %.1fs (budget 60s)\n", secs);
    if (secs >= 60.0) ok = false;
    return ok;
}

bool criterion4() {
    bool ok = true;
    for (const RoundtripCase& c : dtmc_cases()) {
        const int short_budget =
            required_power_horizon(c.graph.order(), static_cast<int>(c.observe.size())) - 1;
        const TrialStats st =
            run_roundtrips(c, short_budget, ChainKind::discrete, 1000, 0xC4000 + c.graph.order());
        if (st.refusals == st.trials) {
            std::printf("       %-18s budget %d: refused in all %d trials\n", c.name, short_budget,
                        st.trials);
        } else {
            std::printf("       %-18s budget %d: only %d of %d trials refused"
                        " (the schedule needs %d powers here)\n",
                        c.name, short_budget, st.refusals, st.trials,
                        exact_power_horizon(c.graph, c.observe));
            ok = false;
        }
    }
    return ok;
}

bool criterion5() {
    bool ok = true;
    std::vector<RoundtripCase> cases;
    cases.push_back({"path-4 {1}", path_graph(4), {1}});
    cases.push_back({"penta-sun {1,3,5}", pentasun(), {1, 3, 5}});
    for (const RoundtripCase& c : cases) {
        const int budget =
            required_power_horizon(c.graph.order(), static_cast<int>(c.observe.size()));
        const TrialStats st =
            run_roundtrips(c, budget, ChainKind::continuous, 1000, 0xC5000 + c.graph.order());
        if (st.failures == 0) {
            std::printf("       %-18s budget %d: 1000 rate round trips, max error %.2e\n", c.name,
                        budget, st.max_err);
        } else {
            std::printf("       %-18s budget %d: %d of %d trials failed (%s)\n", c.name, budget,
                        st.failures, st.trials, st.first_problem.c_str());
            ok = false;
        }
    }
    return ok;
}

// ---- criterion 6: the statistical pipeline ---------------------------------

bool criterion6() {
    const StochasticMatrix p(example_path3());
    const SimpleGraph g = path_graph(3);
    const std::vector<int> z{1};
    const int horizon = exact_power_horizon(g, z);

    int good_reps = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        const MomentTable est =
            estimate_moments(p, z, horizon, 100000, mix_seed(0xC6000, rep));
        bool good = true;
        try {
            const ReconstructionResult r = reconstruct_dtmc(g, z, est);
            const Matrix sd = bootstrap_uncertainty(g, z, est, 64, mix_seed(0xC6B00, rep));
            for (int i = 0; i < 3 && good; ++i)
                for (int j = 0; j < 3 && good; ++j)
                    if (std::fabs(r.matrix(i, j) - p(i, j)) > 4.0 * sd(i, j) + 1e-15) good = false;
        } catch (const Error&) {
            good = false;
        }
        if (good) ++good_reps;
    }
    std::printf("       %d of %d repetitions had every entry within 4x its propagated"
                " uncertainty (need 95)\n",
                good_reps, reps);
    return good_reps >= 95;
}

// ---- criterion 7: directed cycles are refused ------------------------------

bool criterion7() {
    Matrix cycle(4);
    for (int i = 0; i < 4; ++i) cycle(i, (i + 1) % 4) = 1.0;
    if (is_combinatorially_symmetric(cycle)) {
        std::printf("       the directed cycle passed the symmetry test\n");
        return false;
    }
    try {
        pattern_of_chain(cycle);
        std::printf("       the pipeline accepted a directed cycle\n");
        return false;
    } catch (const Error& e) {
        if (e.code() != errc::not_symmetric) {
            std::printf("       wrong refusal code: %s\n", e.what());
            return false;
        }
    }
    return true;
}

// ---- criterion 8: symbolic spot-check of low powers -------------------------

bool criterion8() {
    for (int draw = 0; draw < 100; ++draw) {
        const StochasticMatrix p =
            random_stochastic_with_graph(path_graph(3), mix_seed(0xC8000, draw));
        const MomentTable t = power_moments(p, std::vector<int>{1}, 3);
        const double p11 = p(0, 0), p12 = p(0, 1), p21 = p(1, 0), p22 = p(1, 1);
        const double want2 = p11 * p11 + p12 * p21;
        const double want3 = p11 * p11 * p11 + 2.0 * p11 * p12 * p21 + p12 * p21 * p22;
        if (std::fabs(t.value(2, 0, 0) - want2) > 1e-12 ||
            std::fabs(t.value(3, 0, 0) - want3) > 1e-12) {
            std::printf("       draw %d deviates from the closed forms\n", draw);
            return false;
        }
    }
    return true;
}

// ---- supplementary: round trips at the exact horizon ------------------------

bool extra_exact_horizon() {
    bool ok = true;
    struct ExtraCase {
        RoundtripCase rc;
        ChainKind kind;
    };
    std::vector<ExtraCase> cases;
    for (RoundtripCase& c : dtmc_cases()) cases.push_back({c, ChainKind::discrete});
    cases.push_back({{"penta-sun {9,10,1}", pentasun(), {1, 9, 10}}, ChainKind::discrete});
    cases.push_back({{"path-4 {1}", path_graph(4), {1}}, ChainKind::continuous});
    cases.push_back({{"penta-sun {1,3,5}", pentasun(), {1, 3, 5}}, ChainKind::continuous});

    for (const ExtraCase& e : cases) {
        const int horizon = exact_power_horizon(e.rc.graph, e.rc.observe);
        const TrialStats st =
            run_roundtrips(e.rc, horizon, e.kind, 1000, 0xE0000 + e.rc.graph.order());
        const TrialStats below =
            run_roundtrips(e.rc, horizon - 1, e.kind, 1, 0xE1000);
        const bool necessity = horizon == 1 || below.refusals == below.trials;
        if (st.failures == 0 && necessity) {
            std::printf("       %-19s %s: horizon %d, 1000 round trips, max error %.2e;"
                        " one power fewer refuses\n",
                        e.rc.name, e.kind == ChainKind::discrete ? "dtmc" : "ctmc", horizon,
                        st.max_err);
        } else {
            std::printf("       %-19s %s: horizon %d, %d failures, necessity %s (%s)\n", e.rc.name,
                        e.kind == ChainKind::discrete ? "dtmc" : "ctmc", horizon, st.failures,
                        necessity ? "yes" : "NO", st.first_problem.c_str());
            ok = false;
        }
    }
    return ok;
}

struct Block {
    const char* key;
    const char* label;
    std::function<bool()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Block> blocks = {
        {"1", "criterion 1: forcing numbers of paths, grids, and the penta-sun", criterion1},
        {"2", "criterion 2: closure of {9,10} on the penta-sun stalls at {2,4,7,8,9,10}",
         criterion2},
        {"3", "criterion 3: 1000 exact round trips per pattern at power budget S-|Z|+1",
         criterion3},
        {"4", "criterion 4: budget S-|Z| is refused in every trial", criterion4},
        {"5", "criterion 5: 1000 rate-matrix round trips at power budget S-|Z|+1", criterion5},
        {"6", "criterion 6: estimated moments reconstruct within 4x propagated uncertainty",
         criterion6},
        {"7", "criterion 7: directed cycles fail the symmetry gate", criterion7},
        {"8", "criterion 8: low powers match their closed forms on the 3-path", criterion8},
        {"extra", "exact-horizon block: round trips succeed at the schedule's true requirement"
                  " and refuse below it",
         extra_exact_horizon},
    };

    int failures = 0;
    bool ran_any = false;
    for (const Block& b : blocks) {
        if (argc > 1 && std::strcmp(argv[1], b.key) != 0) continue;
        ran_any = true;
        const bool ok = b.run();
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", b.label);
        if (!ok) ++failures;
    }
    if (!ran_any) {
        std::fprintf(stderr, "unknown selector '%s' (use 1..8 or extra)\n", argv[1]);
        return 99;
    }
    return failures;
}
