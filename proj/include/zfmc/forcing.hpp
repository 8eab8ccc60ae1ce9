#ifndef ZFMC_FORCING_HPP
#define ZFMC_FORCING_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "zfmc/error.hpp"
#include "zfmc/graph.hpp"

namespace zfmc {

struct Force {
    int forcer;
    int forced;
    bool operator==(const Force&) const = default;
};

/**
 * Record of one run of the color-change rule: a blue vertex with exactly
 * one non-blue neighbor forces that neighbor blue. The closure (final blue
 * set) is unique; the force order is the canonical one produced by
 * forcing_closure.
 */
struct ForcingSequence {
    std::vector<int> initial_set;  // sorted, deduplicated
    std::vector<Force> forces;     // in application order
    std::vector<int> closure;      // sorted final blue set

    bool covers(int order) const { return static_cast<int>(closure.size()) == order; }
};

namespace detail {

inline std::vector<int> sorted_vertex_set(const SimpleGraph& g, std::span<const int> vs) {
    std::vector<int> out(vs.begin(), vs.end());
    for (int v : out)
        if (v < 1 || v > g.order())
            throw Error(errc::bad_argument,
                        "vertex " + std::to_string(v) + " out of range 1.." + std::to_string(g.order()));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

/**
 * Maximal closure of Z under the color-change rule, with one canonical
 * force order: blue vertices are scanned in ascending label order, the
 * first available force is applied, and the scan restarts. Any admissible
 * schedule reaches the same closure; this one fixes the ForcingSequence.
 */
inline ForcingSequence forcing_closure(const SimpleGraph& g, std::span<const int> initial) {
    ForcingSequence seq;
    seq.initial_set = detail::sorted_vertex_set(g, initial);

    std::vector<char> blue(static_cast<size_t>(g.order()) + 1, 0);
    for (int v : seq.initial_set) blue[v] = 1;

    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (int k = 1; k <= g.order() && !progressed; ++k) {
            if (!blue[k]) continue;
            int white_nbr = 0, white_count = 0;
            for (int w : g.neighbors(k)) {
                if (!blue[w]) {
                    white_nbr = w;
                    if (++white_count > 1) break;
                }
            }
            if (white_count == 1) {
                blue[white_nbr] = 1;
                seq.forces.push_back({k, white_nbr});
                progressed = true;
            }
        }
    }
    for (int v = 1; v <= g.order(); ++v)
        if (blue[v]) seq.closure.push_back(v);
    return seq;
}

inline bool is_zero_forcing_set(const SimpleGraph& g, std::span<const int> z) {
    return forcing_closure(g, z).covers(g.order());
}

namespace detail {

// Bitmask closure used by the minimum-set search; vertex v is bit v-1.
inline std::uint64_t closure_mask(const std::vector<std::uint64_t>& adj, std::uint64_t blue) {
    bool progressed = true;
    while (progressed) {
        progressed = false;
        std::uint64_t scan = blue;
        while (scan) {
            const int v = std::countr_zero(scan);
            scan &= scan - 1;
            const std::uint64_t white = adj[v] & ~blue;
            if (white != 0 && (white & (white - 1)) == 0) {
                blue |= white;
                progressed = true;
            }
        }
    }
    return blue;
}

}  // namespace detail

/**
 * A zero forcing set of minimum cardinality, found by size-ascending
 * lexicographic subset enumeration; ties are broken by lexicographic
 * vertex order. Candidates contained in a previously seen stalled closure
 * are skipped (their closure is contained in that stalled set, so they
 * cannot force).
 */
inline std::vector<int> min_zero_forcing_set(const SimpleGraph& g, int search_bound = 20) {
    const int s = g.order();
    if (s > search_bound || s > 63)
        throw Error(errc::search_bound,
                    "order " + std::to_string(s) + " exceeds search bound " +
                        std::to_string(std::min(search_bound, 63)) +
                        "; raise the bound or use a heuristic");

    std::vector<std::uint64_t> adj(static_cast<size_t>(s), 0);
    for (auto [u, v] : g.edges()) {
        adj[u - 1] |= std::uint64_t{1} << (v - 1);
        adj[v - 1] |= std::uint64_t{1} << (u - 1);
    }
    const std::uint64_t full = (std::uint64_t{1} << s) - 1;

    constexpr size_t kFailedCacheSize = 128;
    std::vector<std::uint64_t> failed;
    failed.reserve(kFailedCacheSize);
    size_t next_slot = 0;

    std::vector<int> comb;
    for (int size = 1; size <= s; ++size) {
        comb.resize(size);
        for (int i = 0; i < size; ++i) comb[i] = i;
        while (true) {
            std::uint64_t mask = 0;
            for (int i : comb) mask |= std::uint64_t{1} << i;

            bool skip = false;
            for (std::uint64_t f : failed)
                if ((mask & ~f) == 0) {
                    skip = true;
                    break;
                }
            if (!skip) {
                const std::uint64_t cl = detail::closure_mask(adj, mask);
                if (cl == full) {
                    std::vector<int> out;
                    for (int i : comb) out.push_back(i + 1);
                    return out;
                }
                if (failed.size() < kFailedCacheSize) {
                    failed.push_back(cl);
                } else {
                    failed[next_slot] = cl;
                    next_slot = (next_slot + 1) % kFailedCacheSize;
                }
            }

            // next combination in lexicographic order
            int i = size - 1;
            while (i >= 0 && comb[i] == s - size + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < size; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    // Z = V always forces, so this is unreachable.
    throw Error(errc::search_bound, "no forcing set found");
}

}  // namespace zfmc

#endif  // ZFMC_FORCING_HPP
