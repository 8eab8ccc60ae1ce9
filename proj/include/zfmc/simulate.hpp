#ifndef ZFMC_SIMULATE_HPP
#define ZFMC_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "zfmc/chain.hpp"
#include "zfmc/error.hpp"
#include "zfmc/graph.hpp"
#include "zfmc/rng.hpp"

namespace zfmc {

struct Trajectory {
    std::vector<int> states;  // X_0 .. X_T, 1-based labels
    std::uint64_t seed;
};

namespace detail {

// Inverse-CDF draw from row (state-1) of P; returns a 1-based state.
inline int step_from(const StochasticMatrix& p, int state, Rng& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    const int s = p.size();
    for (int j = 0; j < s; ++j) {
        cum += p(state - 1, j);
        if (u < cum) return j + 1;
    }
    // u landed in the roundoff sliver past the accumulated row sum.
    for (int j = s - 1; j >= 0; --j)
        if (p(state - 1, j) > 0.0) return j + 1;
    return state;
}

}  // namespace detail

inline Trajectory simulate_trajectory(const StochasticMatrix& p, int x0, std::int64_t steps,
                                      std::uint64_t seed) {
    if (x0 < 1 || x0 > p.size())
        throw Error(errc::bad_argument, "start state " + std::to_string(x0) + " out of range");
    if (steps < 0) throw Error(errc::bad_argument, "step count must be nonnegative");
    Trajectory tr;
    tr.seed = seed;
    tr.states.reserve(static_cast<size_t>(steps) + 1);
    tr.states.push_back(x0);
    Rng rng(seed);
    int x = x0;
    for (std::int64_t t = 0; t < steps; ++t) {
        x = detail::step_from(p, x, rng);
        tr.states.push_back(x);
    }
    return tr;
}

struct EstimateOptions {
    std::int64_t max_wait = 10'000'000;  // guard on the hit-search per window
    int start_state = 1;
};

/**
 * Estimate (P^n)_{ij} for i,j in A and n = 1..n_max by simulation, treating
 * the chain as a black box. For each anchor i the chain is run until it
 * hits i; the next n_max states form one window, which contributes one
 * indicator sample of (P^n)_{ij} for every j in A and every n. The next
 * hit-search resumes from the window's end, so windows never overlap.
 * Returns empirical means with binomial standard errors.
 *
 * A hit-search exceeding max_wait steps aborts with a simulation-guard
 * error; that usually means the chain cannot reach the anchor from where
 * it is (reducible support or a wrong known-state set).
 */
inline MomentTable estimate_moments(const StochasticMatrix& p, std::span<const int> a, int n_max,
                                    std::int64_t windows, std::uint64_t seed,
                                    const EstimateOptions& opt = {}) {
    const std::vector<int> states = detail::checked_state_list(p.size(), a);
    if (n_max < 1) throw Error(errc::bad_argument, "power horizon must be at least 1");
    if (windows < 1) throw Error(errc::bad_argument, "window count must be positive");
    if (opt.start_state < 1 || opt.start_state > p.size())
        throw Error(errc::bad_argument, "start state out of range");

    MomentTable table(ChainKind::discrete, states, n_max);
    table.enable_se();

    for (size_t ai = 0; ai < states.size(); ++ai) {
        const int anchor = states[ai];
        Rng rng(mix_seed(seed, ai));
        // counts[n-1][bi]: windows in which the state n steps after the
        // anchor hit was states[bi]
        std::vector<std::vector<std::int64_t>> counts(
            static_cast<size_t>(n_max), std::vector<std::int64_t>(states.size(), 0));

        int x = opt.start_state;
        for (std::int64_t w = 0; w < windows; ++w) {
            std::int64_t waited = 0;
            while (x != anchor) {
                x = detail::step_from(p, x, rng);
                if (++waited > opt.max_wait)
                    throw Error(errc::sim_guard,
                                "gave up waiting to hit state " + std::to_string(anchor) +
                                    " after " + std::to_string(opt.max_wait) +
                                    " steps; chain may be reducible on this support");
            }
            for (int n = 1; n <= n_max; ++n) {
                x = detail::step_from(p, x, rng);
                const int bi = table.index_of(x);
                if (bi >= 0) ++counts[n - 1][bi];
            }
        }

        const double w = static_cast<double>(windows);
        for (int n = 1; n <= n_max; ++n)
            for (size_t bi = 0; bi < states.size(); ++bi) {
                const double est = counts[n - 1][bi] / w;
                table.set(n, static_cast<int>(ai), static_cast<int>(bi), est);
                table.set_se(n, static_cast<int>(ai), static_cast<int>(bi),
                             std::sqrt(est * (1.0 - est) / w));
            }
    }
    return table;
}

namespace detail {

inline void check_min_weight(const SimpleGraph& g, double min_weight) {
    int max_deg = 0;
    for (int v = 1; v <= g.order(); ++v) max_deg = std::max(max_deg, g.degree(v));
    if (!(min_weight > 0.0) || min_weight * (max_deg + 1) >= 1.0)
        throw Error(errc::bad_argument,
                    "min_weight " + std::to_string(min_weight) +
                        " infeasible for maximum degree " + std::to_string(max_deg));
}

}  // namespace detail

/**
 * Random transition matrix whose graph is exactly g: each edge weight and
 * each diagonal weight is drawn uniformly from [min_weight, 1], then rows
 * are normalized. Combinatorially symmetric by construction.
 */
inline StochasticMatrix random_stochastic_with_graph(const SimpleGraph& g, std::uint64_t seed,
                                                     double min_weight = 0.05) {
    detail::check_min_weight(g, min_weight);
    Rng rng(seed);
    Matrix m(g.order());
    for (int v = 1; v <= g.order(); ++v) {
        m(v - 1, v - 1) = rng.uniform(min_weight, 1.0);
        for (int w : g.neighbors(v)) m(v - 1, w - 1) = rng.uniform(min_weight, 1.0);
        const double s = m.row_sum(v - 1);
        for (int j = 0; j < g.order(); ++j) m(v - 1, j) /= s;
    }
    return StochasticMatrix(std::move(m));
}

/**
 * Random rate matrix whose graph is exactly g: edge rates uniform on
 * [min_weight, 1], diagonal set to minus the off-diagonal row sum.
 */
inline RateMatrix random_rate_with_graph(const SimpleGraph& g, std::uint64_t seed,
                                         double min_weight = 0.05) {
    detail::check_min_weight(g, min_weight);
    Rng rng(seed);
    Matrix m(g.order());
    for (int v = 1; v <= g.order(); ++v) {
        for (int w : g.neighbors(v)) m(v - 1, w - 1) = rng.uniform(min_weight, 1.0);
        m(v - 1, v - 1) = -m.row_sum(v - 1);
    }
    return RateMatrix(std::move(m));
}

}  // namespace zfmc

#endif  // ZFMC_SIMULATE_HPP
