#ifndef ZFMC_RECONSTRUCT_HPP
#define ZFMC_RECONSTRUCT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zfmc/chain.hpp"
#include "zfmc/error.hpp"
#include "zfmc/forcing.hpp"
#include "zfmc/graph.hpp"
#include "zfmc/rng.hpp"
#include "zfmc/simulate.hpp"

namespace zfmc {

enum class Provenance : std::uint8_t { observed, structural_zero, forced, normalized };

struct EntryProvenance {
    Provenance kind = Provenance::observed;
    int force_step = 0;  // 1-based index into the forcing sequence; 0 if n/a
    bool operator==(const EntryProvenance&) const = default;
};

inline std::string to_string(const EntryProvenance& p) {
    switch (p.kind) {
        case Provenance::observed: return "observed";
        case Provenance::structural_zero: return "zero";
        case Provenance::forced: return "forced:" + std::to_string(p.force_step);
        case Provenance::normalized: return "normalized";
    }
    return "?";
}

struct ReconstructionResult {
    ChainKind kind = ChainKind::discrete;
    Matrix matrix;
    std::vector<EntryProvenance> provenance;  // row-major, size S*S
    ForcingSequence forcing;
    double residual_max = 0.0;
    double residual_mean = 0.0;
    double diag_mismatch_max = 0.0;  // step-4 diagonal vs row normalization
    std::vector<std::string> warnings;

    const EntryProvenance& provenance_at(int state_i, int state_j) const {
        return provenance[static_cast<size_t>(state_i - 1) * matrix.size() + (state_j - 1)];
    }
};

struct ReconstructOptions {
    // Negative values select the defaults: for exact tables div_tol=1e-12
    // and validation_tol=1e-6 (the recursion's roundoff can push row sums
    // a few 1e-9 off; violations past 1e-6 signal inconsistent input); for
    // estimated tables (with standard errors) both guards scale with the
    // largest standard error, since divisions amplify input noise.
    double div_tol = -1.0;
    double validation_tol = -1.0;
};

struct ResidualReport {
    double max_abs = 0.0;
    double mean_abs = 0.0;
};

/**
 * A-priori power budget: with z observed states, S - z forces remain and
 * each force consumes one power of the table, leaving the power-1 matrix
 * at the end. The schedule can need more than this when forced vertices
 * become forcers themselves (their top-power diagonal lags behind), and
 * can need less when moments on a wide observed set go unused; use
 * exact_power_horizon for the operative requirement.
 */
inline int required_power_horizon(int order, int observed_count) {
    if (observed_count < 1 || observed_count > order)
        throw Error(errc::bad_argument, "observed count must be between 1 and the order");
    return order - observed_count + 1;
}

/**
 * One induction step: extend a table of moments on A to A + {l}, where l
 * is the only neighbor of the known state k outside A. In order:
 *
 *   (1) row normalization of the power-1 row of k determines (M)_{kl}
 *       (unit row sums for discrete kind, zero row sums for continuous);
 *   (2) (M^n)_{li} = [(M^{n+1})_{ki} - sum_{j in A} (M)_{kj} (M^n)_{ji}] / (M)_{kl};
 *   (3) (M^n)_{il} = [(M^{n+1})_{ik} - sum_{j in A} (M^n)_{ij} (M)_{jk}] / (M)_{lk};
 *   (4) (M^n)_{ll} = [(M^{n+1})_{lk} - sum_{j in A} (M^n)_{lj} (M)_{jk}] / (M)_{lk}.
 *
 * The sums skip states j with no edge {j,k}: those factors are structural
 * zeros. The output keeps every entry of the input; entries of the new row
 * and column whose dependencies are absent come out absent. From a complete
 * input the new row and column reach one power below the input horizon and
 * the new diagonal two below, so each extension costs one usable power.
 * Discarding the input's top power instead would starve later extensions
 * whose forcer is an already-extended state.
 */
inline MomentTable infer_neighbor(const MomentTable& t, int k, int l, const SimpleGraph& g,
                                  double div_tol = 1e-12) {
    const int kpos = t.index_of(k);
    if (kpos < 0)
        throw Error(errc::bad_argument, "forcer " + std::to_string(k) + " is not a known state");
    if (t.index_of(l) >= 0)
        throw Error(errc::bad_argument, "state " + std::to_string(l) + " is already known");
    if (!g.has_edge(k, l))
        throw Error(errc::bad_argument,
                    "no edge {" + std::to_string(k) + "," + std::to_string(l) + "} in the pattern");
    for (int w : g.neighbors(k))
        if (w != l && t.index_of(w) < 0)
            throw Error(errc::bad_argument,
                        "state " + std::to_string(l) + " is not the unique unknown neighbor of " +
                            std::to_string(k) + " (also missing " + std::to_string(w) + ")");
    if (t.max_power() < 2)
        throw Error(errc::horizon, "extension needs max_power >= 2, got " +
                                       std::to_string(t.max_power()));

    const bool discrete = t.kind() == ChainKind::discrete;
    const int n_max = t.max_power();
    const int aw = t.width();

    std::vector<int> states = t.states();
    states.push_back(l);
    MomentTable out(t.kind(), states, n_max);
    const int lpos = aw;

    // Presence and read with the structural-zero rule: a power-1 entry for
    // a non-adjacent pair of distinct states is a known zero.
    auto in_has = [&](int n, int a, int b) {
        if (t.has(n, a, b)) return true;
        const int sa = t.states()[a], sb = t.states()[b];
        return n == 1 && sa != sb && !g.has_edge(sa, sb);
    };
    auto in_get = [&](int n, int a, int b) { return t.has(n, a, b) ? t.value(n, a, b) : 0.0; };

    for (int n = 1; n <= n_max; ++n)
        for (int a = 0; a < aw; ++a)
            for (int b = 0; b < aw; ++b)
                if (t.has(n, a, b)) out.set(n, a, b, t.value(n, a, b));

    // positions whose power-1 factors against k can be nonzero
    std::vector<int> need;
    for (int a = 0; a < aw; ++a)
        if (a == kpos || g.has_edge(t.states()[a], k)) need.push_back(a);

    // (1)
    double row = 0.0;
    for (int j : need) {
        if (!in_has(1, kpos, j))
            throw Error(errc::horizon, "power-1 entry (" + std::to_string(k) + "," +
                                           std::to_string(t.states()[j]) +
                                           ") needed for normalization is absent");
        row += in_get(1, kpos, j);
    }
    const double mkl = discrete ? 1.0 - row : -row;
    if (std::fabs(mkl) <= div_tol)
        throw Error(errc::division, "(" + std::to_string(k) + "," + std::to_string(l) +
                                        ") entry " + std::to_string(mkl) +
                                        " is within the division guard; pattern violation or "
                                        "degenerate chain");
    out.set(1, kpos, lpos, mkl);

    // (2)
    for (int i = 0; i < aw; ++i)
        for (int n = 1; n <= n_max - 1; ++n) {
            if (!t.has(n + 1, kpos, i)) continue;
            double sum = 0.0;
            bool ok = true;
            for (int j : need) {
                if (!in_has(n, j, i)) {
                    ok = false;
                    break;
                }
                sum += in_get(1, kpos, j) * in_get(n, j, i);
            }
            if (ok) out.set(n, lpos, i, (t.value(n + 1, kpos, i) - sum) / mkl);
        }

    if (out.has(1, lpos, kpos)) {
        const double mlk = out.value(1, lpos, kpos);
        if (std::fabs(mlk) <= div_tol)
            throw Error(errc::division, "(" + std::to_string(l) + "," + std::to_string(k) +
                                            ") entry " + std::to_string(mlk) +
                                            " is within the division guard; pattern violation or "
                                            "degenerate chain");
        // (3)
        for (int i = 0; i < aw; ++i)
            for (int n = 1; n <= n_max - 1; ++n) {
                if (!t.has(n + 1, i, kpos)) continue;
                double sum = 0.0;
                bool ok = true;
                for (int j : need) {
                    if (!in_has(n, i, j) || !in_has(1, j, kpos)) {
                        ok = false;
                        break;
                    }
                    sum += in_get(n, i, j) * in_get(1, j, kpos);
                }
                if (ok) out.set(n, i, lpos, (t.value(n + 1, i, kpos) - sum) / mlk);
            }
        // (4)
        auto newrow_has = [&](int n, int j) {
            if (out.has(n, lpos, j)) return true;
            return n == 1 && !g.has_edge(l, t.states()[j]);
        };
        auto newrow_get = [&](int n, int j) { return out.has(n, lpos, j) ? out.value(n, lpos, j) : 0.0; };
        for (int n = 1; n <= n_max - 2; ++n) {
            if (!out.has(n + 1, lpos, kpos)) continue;
            double sum = 0.0;
            bool ok = true;
            for (int j : need) {
                if (!newrow_has(n, j) || !in_has(1, j, kpos)) {
                    ok = false;
                    break;
                }
                sum += newrow_get(n, j) * in_get(1, j, kpos);
            }
            if (ok) out.set(n, lpos, lpos, (out.value(n + 1, lpos, kpos) - sum) / mlk);
        }
    }
    return out;
}

/**
 * Residuals of a recovered matrix against the moments it was built from:
 * recompute the restricted powers of the matrix and compare with every
 * present entry of the table.
 */
inline ResidualReport verify_reconstruction(const ReconstructionResult& r, const MomentTable& t) {
    if (r.kind != t.kind()) throw Error(errc::bad_argument, "result and table kind differ");
    for (int s : t.states())
        if (s < 1 || s > r.matrix.size())
            throw Error(errc::bad_argument, "table state " + std::to_string(s) + " out of range");
    ResidualReport rep;
    double sum = 0.0;
    long count = 0;
    Matrix pow = Matrix::identity(r.matrix.size());
    for (int n = 1; n <= t.max_power(); ++n) {
        pow = pow * r.matrix;
        for (int a = 0; a < t.width(); ++a)
            for (int b = 0; b < t.width(); ++b)
                if (t.has(n, a, b)) {
                    const double d =
                        std::fabs(pow(t.states()[a] - 1, t.states()[b] - 1) - t.value(n, a, b));
                    rep.max_abs = std::max(rep.max_abs, d);
                    sum += d;
                    ++count;
                }
    }
    rep.mean_abs = count > 0 ? sum / count : 0.0;
    return rep;
}

namespace detail {

// Runs the forcing pass and assembles the full matrix. Assumes the caller
// has checked kind, connectivity, forcing, and completeness; availability
// shortfalls surface as horizon errors.
inline ReconstructionResult attempt_reconstruct(const SimpleGraph& g, const MomentTable& input,
                                                ChainKind kind, double div_tol,
                                                double validation_tol) {
    const int s = g.order();
    const bool discrete = kind == ChainKind::discrete;

    ForcingSequence fs = forcing_closure(g, input.states());
    std::vector<int> step_of(static_cast<size_t>(s) + 1, 0);
    for (size_t f = 0; f < fs.forces.size(); ++f)
        step_of[fs.forces[f].forced] = static_cast<int>(f) + 1;

    MomentTable cur = input;
    for (const Force& fc : fs.forces) cur = infer_neighbor(cur, fc.forcer, fc.forced, g, div_tol);

    std::vector<char> in_z(static_cast<size_t>(s) + 1, 0);
    for (int v : input.states()) in_z[v] = 1;

    ReconstructionResult res;
    res.kind = kind;
    res.matrix = Matrix(s);
    res.provenance.assign(static_cast<size_t>(s) * s, EntryProvenance{});
    res.forcing = std::move(fs);
    auto prov = [&](int i, int j) -> EntryProvenance& {
        return res.provenance[static_cast<size_t>(i - 1) * s + (j - 1)];
    };

    const double zero_slack = std::max(validation_tol, 1e-9);
    for (int i = 1; i <= s; ++i)
        for (int j = 1; j <= s; ++j) {
            if (i == j) continue;
            if (!g.has_edge(i, j)) {
                res.matrix(i - 1, j - 1) = 0.0;
                if (in_z[i] && in_z[j]) {
                    prov(i, j) = {Provenance::observed, 0};
                    const double v = cur.value(1, cur.index_of(i), cur.index_of(j));
                    if (std::fabs(v) > zero_slack)
                        res.warnings.push_back("observed moment (" + std::to_string(i) + "," +
                                               std::to_string(j) + ") = " + std::to_string(v) +
                                               " but the pattern has no such edge; entry forced to 0");
                } else {
                    prov(i, j) = {Provenance::structural_zero, 0};
                }
                continue;
            }
            const int pi = cur.index_of(i), pj = cur.index_of(j);
            if (!cur.has(1, pi, pj))
                throw Error(errc::horizon, "power-1 entry (" + std::to_string(i) + "," +
                                               std::to_string(j) +
                                               ") is unavailable after the forcing pass; "
                                               "max_power too small");
            res.matrix(i - 1, j - 1) = cur.value(1, pi, pj);
            if (in_z[i] && in_z[j])
                prov(i, j) = {Provenance::observed, 0};
            else
                prov(i, j) = {Provenance::forced, std::max(step_of[i], step_of[j])};
        }

    for (int i = 1; i <= s; ++i) {
        const double target = (discrete ? 1.0 : 0.0) - (res.matrix.row_sum(i - 1));
        const int pi = cur.index_of(i);
        if (cur.has(1, pi, pi)) {
            res.matrix(i - 1, i - 1) = cur.value(1, pi, pi);
            prov(i, i) = in_z[i] ? EntryProvenance{Provenance::observed, 0}
                                 : EntryProvenance{Provenance::forced, step_of[i]};
            const double mismatch = std::fabs(res.matrix(i - 1, i - 1) - target);
            res.diag_mismatch_max = std::max(res.diag_mismatch_max, mismatch);
            if (mismatch > 1e-6)
                res.warnings.push_back("diagonal (" + std::to_string(i) + "," + std::to_string(i) +
                                       ") from the recursion differs from row normalization by " +
                                       std::to_string(mismatch));
        } else {
            res.matrix(i - 1, i - 1) = target;
            prov(i, i) = {Provenance::normalized, 0};
        }
    }

    try {
        if (discrete)
            res.matrix = StochasticMatrix(res.matrix, validation_tol).entries();
        else
            res.matrix = RateMatrix(res.matrix, validation_tol).entries();
    } catch (const Error& e) {
        throw Error(errc::validation,
                    std::string("recovered matrix fails validation, input moments are "
                                "inconsistent: ") +
                        e.what());
    }

    const ResidualReport rep = verify_reconstruction(res, input);
    res.residual_max = rep.max_abs;
    res.residual_mean = rep.mean_abs;
    return res;
}

inline constexpr std::uint64_t kHorizonProbeSeed = 0x7a03c9d1f25e86b4ULL;

}  // namespace detail

/**
 * Smallest max_power from which the forcing schedule recovers the whole
 * matrix for this pattern, observed set, and the canonical force order.
 * Determined by driving the schedule itself: which entries it can derive
 * depends only on the pattern, so a generic probe chain stands in for any
 * chain with this graph.
 */
inline int exact_power_horizon(const SimpleGraph& g, std::span<const int> z) {
    const std::vector<int> zs = detail::sorted_vertex_set(g, z);
    const ForcingSequence fs = forcing_closure(g, zs);
    if (!fs.covers(g.order())) {
        std::string msg = "observed set is not zero forcing; closure stalls at {";
        for (size_t i = 0; i < fs.closure.size(); ++i)
            msg += (i ? "," : "") + std::to_string(fs.closure[i]);
        throw NotForcingError(msg + "}", fs.closure);
    }
    const StochasticMatrix probe =
        random_stochastic_with_graph(g, detail::kHorizonProbeSeed, 0.05);
    const int cap = std::max<int>(1, 2 * static_cast<int>(fs.forces.size()) + 2);
    for (int n = 1; n <= cap; ++n) {
        try {
            detail::attempt_reconstruct(g, power_moments(probe, zs, n), ChainKind::discrete,
                                        1e-12, 1e-6);
            return n;
        } catch (const Error& e) {
            if (e.code() != errc::horizon) throw;
        }
    }
    throw Error(errc::horizon,
                "no feasible horizon up to " + std::to_string(cap) + "; this should not happen");
}

namespace detail {

inline ReconstructionResult reconstruct_checked(const SimpleGraph& g, std::span<const int> z,
                                                const MomentTable& table, ChainKind kind,
                                                const ReconstructOptions& opt) {
    if (table.kind() != kind)
        throw Error(errc::bad_argument, std::string("table kind is ") + to_string(table.kind()) +
                                            ", expected " + to_string(kind));
    const std::vector<int> zs = sorted_vertex_set(g, z);
    std::vector<int> ts = table.states();
    std::sort(ts.begin(), ts.end());
    if (ts != zs)
        throw Error(errc::bad_argument, "table known states differ from the observed set");
    if (!is_connected(g)) throw Error(errc::not_connected, "pattern graph must be connected");
    const ForcingSequence fs = forcing_closure(g, zs);
    if (!fs.covers(g.order())) {
        std::string msg = "observed set is not zero forcing; closure stalls at {";
        for (size_t i = 0; i < fs.closure.size(); ++i)
            msg += (i ? "," : "") + std::to_string(fs.closure[i]);
        throw NotForcingError(msg + "}", fs.closure);
    }
    if (!table.complete())
        throw Error(errc::bad_argument, "input table has absent entries");
    const int need = exact_power_horizon(g, zs);
    if (table.max_power() < need) throw HorizonError(need, table.max_power());

    const bool est = table.has_se();
    const double div_tol =
        opt.div_tol >= 0.0 ? opt.div_tol
                           : (est ? std::max(1e-9, 10.0 * table.max_se()) : 1e-12);
    const double vtol =
        opt.validation_tol >= 0.0
            ? opt.validation_tol
            : (est ? std::max(1e-6, 10.0 * table.max_se()) : 1e-6);
    return attempt_reconstruct(g, table, kind, div_tol, vtol);
}

}  // namespace detail

/**
 * Recover the full transition matrix of a discrete-time chain from the
 * moments of a zero forcing set of its pattern. Entries are tagged with
 * their provenance and the result carries residuals of the input moments
 * recomputed from the recovered matrix.
 */
inline ReconstructionResult reconstruct_dtmc(const SimpleGraph& pattern, std::span<const int> z,
                                             const MomentTable& table,
                                             const ReconstructOptions& opt = {}) {
    return detail::reconstruct_checked(pattern, z, table, ChainKind::discrete, opt);
}

// Continuous-time analogue: the table holds restricted powers of the rate
// matrix and row normalization uses zero row sums.
inline ReconstructionResult reconstruct_ctmc(const SimpleGraph& pattern, std::span<const int> z,
                                             const MomentTable& table,
                                             const ReconstructOptions& opt = {}) {
    return detail::reconstruct_checked(pattern, z, table, ChainKind::continuous, opt);
}

/**
 * Per-entry uncertainty of a reconstruction from an estimated table,
 * propagated by a parametric bootstrap: the table is re-noised at its
 * standard errors, reconstructed, and the entrywise standard deviation
 * across replicas is returned.
 */
inline Matrix bootstrap_uncertainty(const SimpleGraph& pattern, std::span<const int> z,
                                    const MomentTable& table, int replicas, std::uint64_t seed,
                                    const ReconstructOptions& opt = {}) {
    if (!table.has_se())
        throw Error(errc::bad_argument, "table carries no standard errors to propagate");
    if (replicas < 2) throw Error(errc::bad_argument, "need at least 2 replicas");

    const int s = pattern.order();
    Rng rng(seed);
    Matrix mean(s), m2(s);
    int ok = 0;
    for (int rep = 0; rep < replicas; ++rep) {
        MomentTable pert = table;
        for (int n = 1; n <= table.max_power(); ++n)
            for (int a = 0; a < table.width(); ++a)
                for (int b = 0; b < table.width(); ++b) {
                    if (!table.has(n, a, b)) continue;
                    double v = table.value(n, a, b) + rng.normal(0.0, table.se(n, a, b));
                    if (table.kind() == ChainKind::discrete) v = std::clamp(v, 0.0, 1.0);
                    pert.set(n, a, b, v);
                }
        try {
            const ReconstructionResult r =
                detail::reconstruct_checked(pattern, z, pert, table.kind(), opt);
            ++ok;
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j) {
                    const double d = r.matrix(i, j) - mean(i, j);
                    mean(i, j) += d / ok;
                    m2(i, j) += d * (r.matrix(i, j) - mean(i, j));
                }
        } catch (const Error&) {
            // a failed replica just shrinks the sample
        }
    }
    if (ok < std::max(2, replicas / 2))
        throw Error(errc::validation, "bootstrap reconstruction failed in " +
                                          std::to_string(replicas - ok) + " of " +
                                          std::to_string(replicas) + " replicas");
    Matrix sd(s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) sd(i, j) = std::sqrt(m2(i, j) / (ok - 1));
    return sd;
}

}  // namespace zfmc

#endif  // ZFMC_RECONSTRUCT_HPP
