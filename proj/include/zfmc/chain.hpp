#ifndef ZFMC_CHAIN_HPP
#define ZFMC_CHAIN_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "zfmc/error.hpp"
#include "zfmc/matrix.hpp"

namespace zfmc {

inline constexpr double kDefaultRowTol = 1e-9;

enum class ChainKind { discrete, continuous };

inline const char* to_string(ChainKind k) {
    return k == ChainKind::discrete ? "discrete" : "continuous";
}

namespace detail {

// Entries in [-tol, 0) are treated as roundoff and snapped to zero.
inline void snap_tiny(Matrix& m, double tol) {
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j)
            if (m(i, j) < 0.0 && m(i, j) >= -tol) m(i, j) = 0.0;
}

}  // namespace detail

/**
 * Validated right-stochastic matrix: entries nonnegative, every row
 * summing to 1 within row_tol. Validation never renormalizes.
 */
class StochasticMatrix {
public:
    explicit StochasticMatrix(Matrix m, double row_tol = kDefaultRowTol) : p_(std::move(m)) {
        detail::snap_tiny(p_, row_tol);
        for (int i = 0; i < p_.size(); ++i) {
            for (int j = 0; j < p_.size(); ++j)
                if (p_(i, j) < 0.0)
                    throw Error(errc::not_stochastic,
                                "negative entry at (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + "): " + std::to_string(p_(i, j)));
            const double s = p_.row_sum(i);
            if (std::fabs(s - 1.0) > row_tol)
                throw Error(errc::not_stochastic,
                            "row " + std::to_string(i + 1) + " sums to " + std::to_string(s));
        }
    }

    int size() const { return p_.size(); }
    const Matrix& entries() const { return p_; }
    double operator()(int i, int j) const { return p_(i, j); }

private:
    Matrix p_;
};

/**
 * Validated rate (generator) matrix: off-diagonal entries nonnegative,
 * every row summing to 0 within row_tol.
 */
class RateMatrix {
public:
    explicit RateMatrix(Matrix m, double row_tol = kDefaultRowTol) : q_(std::move(m)) {
        for (int i = 0; i < q_.size(); ++i)
            for (int j = 0; j < q_.size(); ++j)
                if (i != j && q_(i, j) < 0.0 && q_(i, j) >= -row_tol) q_(i, j) = 0.0;
        for (int i = 0; i < q_.size(); ++i) {
            for (int j = 0; j < q_.size(); ++j)
                if (i != j && q_(i, j) < 0.0)
                    throw Error(errc::not_rate,
                                "negative off-diagonal at (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + "): " + std::to_string(q_(i, j)));
            const double s = q_.row_sum(i);
            if (std::fabs(s) > row_tol)
                throw Error(errc::not_rate,
                            "row " + std::to_string(i + 1) + " sums to " + std::to_string(s));
        }
    }

    int size() const { return q_.size(); }
    const Matrix& entries() const { return q_; }
    double operator()(int i, int j) const { return q_(i, j); }

private:
    Matrix q_;
};

inline StochasticMatrix validate_stochastic(Matrix m, double row_tol = kDefaultRowTol) {
    return StochasticMatrix(std::move(m), row_tol);
}

inline RateMatrix validate_rate(Matrix m, double row_tol = kDefaultRowTol) {
    return RateMatrix(std::move(m), row_tol);
}

/**
 * Observed dynamics of a chain on a set A of known states: the matrix
 * powers (M^n) restricted to A x A for n = 1..max_power, where M is the
 * transition matrix (discrete kind) or the rate matrix (continuous kind).
 *
 * Entries may be absent (moment extension trims the top power of a newly
 * inferred state's diagonal); absent entries are stored as NaN and must be
 * tested with has() before reading. Estimated tables carry a matching
 * table of standard errors.
 */
class MomentTable {
public:
    MomentTable(ChainKind kind, std::vector<int> states, int max_power)
        : kind_(kind), states_(std::move(states)), max_power_(max_power) {
        if (states_.empty()) throw Error(errc::bad_argument, "known-state set must be nonempty");
        if (max_power_ < 1) throw Error(errc::bad_argument, "max_power must be at least 1");
        for (size_t a = 0; a < states_.size(); ++a) {
            if (states_[a] < 1) throw Error(errc::bad_argument, "state labels must be positive");
            for (size_t b = a + 1; b < states_.size(); ++b)
                if (states_[a] == states_[b])
                    throw Error(errc::bad_argument, "duplicate state in known-state set");
        }
        values_.assign(static_cast<size_t>(max_power_),
                       Matrix(width(), std::numeric_limits<double>::quiet_NaN()));
    }

    ChainKind kind() const { return kind_; }
    const std::vector<int>& states() const { return states_; }
    int width() const { return static_cast<int>(states_.size()); }
    int max_power() const { return max_power_; }

    // Position of a state label in states(), or -1.
    int index_of(int state) const {
        for (size_t a = 0; a < states_.size(); ++a)
            if (states_[a] == state) return static_cast<int>(a);
        return -1;
    }

    // a, b are positions into states().
    bool has(int n, int a, int b) const { return !std::isnan(values_[check(n, a, b)](a, b)); }

    double value(int n, int a, int b) const {
        const double v = values_[check(n, a, b)](a, b);
        if (std::isnan(v))
            throw Error(errc::bad_argument,
                        "moment (" + std::to_string(n) + "," + std::to_string(states_[a]) + "," +
                            std::to_string(states_[b]) + ") is absent");
        return v;
    }

    void set(int n, int a, int b, double v) { values_[check(n, a, b)](a, b) = v; }

    bool complete() const {
        for (int n = 1; n <= max_power_; ++n)
            for (int a = 0; a < width(); ++a)
                for (int b = 0; b < width(); ++b)
                    if (!has(n, a, b)) return false;
        return true;
    }

    bool has_se() const { return !se_.empty(); }

    void enable_se() {
        se_.assign(static_cast<size_t>(max_power_),
                   Matrix(width(), std::numeric_limits<double>::quiet_NaN()));
    }

    double se(int n, int a, int b) const {
        if (!has_se()) throw Error(errc::bad_argument, "table carries no standard errors");
        return se_[check(n, a, b)](a, b);
    }

    void set_se(int n, int a, int b, double v) {
        if (!has_se()) throw Error(errc::bad_argument, "table carries no standard errors");
        se_[check(n, a, b)](a, b) = v;
    }

    double max_se() const {
        double m = 0.0;
        for (int n = 1; n <= max_power_; ++n)
            for (int a = 0; a < width(); ++a)
                for (int b = 0; b < width(); ++b)
                    if (has(n, a, b) && !std::isnan(se_[n - 1](a, b)))
                        m = std::max(m, se_[n - 1](a, b));
        return m;
    }

private:
    size_t check(int n, int a, int b) const {
        if (n < 1 || n > max_power_)
            throw Error(errc::bad_argument, "power " + std::to_string(n) + " out of range");
        if (a < 0 || a >= width() || b < 0 || b >= width())
            throw Error(errc::bad_argument, "state position out of range");
        return static_cast<size_t>(n - 1);
    }

    ChainKind kind_;
    std::vector<int> states_;
    int max_power_;
    std::vector<Matrix> values_;
    std::vector<Matrix> se_;
};

namespace detail {

inline std::vector<int> checked_state_list(int order, std::span<const int> a) {
    if (a.empty()) throw Error(errc::bad_argument, "state list must be nonempty");
    std::vector<int> out(a.begin(), a.end());
    for (int v : out)
        if (v < 1 || v > order)
            throw Error(errc::bad_argument,
                        "state " + std::to_string(v) + " out of range 1.." + std::to_string(order));
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = i + 1; j < out.size(); ++j)
            if (out[i] == out[j]) throw Error(errc::bad_argument, "duplicate state in list");
    return out;
}

inline MomentTable restricted_powers(const Matrix& m, ChainKind kind, std::span<const int> a, int n_max) {
    const std::vector<int> states = checked_state_list(m.size(), a);
    if (n_max < 1) throw Error(errc::bad_argument, "power horizon must be at least 1");
    MomentTable table(kind, states, n_max);
    // Full-matrix powers first, restriction after; restricting first would
    // drop probability flow through hidden states.
    Matrix pow = Matrix::identity(m.size());
    for (int n = 1; n <= n_max; ++n) {
        pow = pow * m;
        for (size_t ai = 0; ai < states.size(); ++ai)
            for (size_t bi = 0; bi < states.size(); ++bi)
                table.set(n, static_cast<int>(ai), static_cast<int>(bi),
                          pow(states[ai] - 1, states[bi] - 1));
    }
    return table;
}

}  // namespace detail

// Exact (P^n)|_{A x A} for n = 1..n_max.
inline MomentTable power_moments(const StochasticMatrix& p, std::span<const int> a, int n_max) {
    return detail::restricted_powers(p.entries(), ChainKind::discrete, a, n_max);
}

// Exact (Q^n)|_{A x A} for n = 1..n_max; these are the t=0 derivatives of
// the transition matrix t -> exp(Qt).
inline MomentTable rate_moments(const RateMatrix& q, std::span<const int> a, int n_max) {
    return detail::restricted_powers(q.entries(), ChainKind::continuous, a, n_max);
}

/**
 * Transition matrix exp(Qt) evaluated by uniformization: a Poisson-weighted
 * sum of powers of the stochastic matrix I + Q/lambda, truncated once the
 * accumulated Poisson mass reaches 1 - tol. Every partial sum is entrywise
 * nonnegative, so the result validates as stochastic by construction. For
 * large lambda*t the interval is halved and the result squared.
 */
inline StochasticMatrix ctmc_transition(const RateMatrix& q, double t, double tol = 1e-12) {
    if (t < 0.0) throw Error(errc::bad_argument, "time must be nonnegative");
    if (!(tol > 0.0)) throw Error(errc::bad_argument, "tol must be positive");
    const int s = q.size();

    double lambda = 0.0;
    for (int i = 0; i < s; ++i) lambda = std::max(lambda, std::fabs(q(i, i)));
    if (lambda * t == 0.0) return StochasticMatrix(Matrix::identity(s));

    struct Impl {
        static Matrix eval(const RateMatrix& q, double lambda, double t, double tol) {
            if (lambda * t > 32.0) {
                Matrix half = eval(q, lambda, t / 2.0, tol / 2.0);
                return half * half;
            }
            const int s = q.size();
            Matrix u = Matrix::identity(s);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j) u(i, j) += q(i, j) / lambda;

            double weight = std::exp(-lambda * t);
            double mass = weight;
            Matrix term = Matrix::identity(s);
            Matrix out = term;
            out *= weight;
            for (int m = 1; mass < 1.0 - tol; ++m) {
                term = term * u;
                weight *= lambda * t / m;
                mass += weight;
                Matrix scaled = term;
                scaled *= weight;
                out += scaled;
                if (m > 100000)
                    throw Error(errc::validation, "uniformization failed to converge");
            }
            return out;
        }
    };

    Matrix result = Impl::eval(q, lambda, t, tol);
    return StochasticMatrix(std::move(result), std::max(kDefaultRowTol, 10.0 * tol));
}

}  // namespace zfmc

#endif  // ZFMC_CHAIN_HPP
