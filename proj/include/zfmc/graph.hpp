#ifndef ZFMC_GRAPH_HPP
#define ZFMC_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "zfmc/error.hpp"
#include "zfmc/matrix.hpp"

namespace zfmc {

/**
 * Undirected simple graph on vertices 1..order. No self-loops, each edge
 * stored once. This is the non-zero pattern of a combinatorially symmetric
 * matrix with the diagonal ignored.
 */
class SimpleGraph {
public:
    explicit SimpleGraph(int order) : order_(order), adj_(static_cast<size_t>(order) + 1) {
        if (order < 1) throw Error(errc::bad_argument, "graph order must be positive");
    }

    int order() const { return order_; }

    void add_edge(int u, int v) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) throw Error(errc::bad_argument, "self-loops are not allowed");
        if (has_edge(u, v)) return;
        adj_[u].insert(std::upper_bound(adj_[u].begin(), adj_[u].end(), v), v);
        adj_[v].insert(std::upper_bound(adj_[v].begin(), adj_[v].end(), u), u);
    }

    bool has_edge(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
    }

    std::span<const int> neighbors(int v) const {
        check_vertex(v);
        return adj_[v];
    }

    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

    int edge_count() const {
        size_t twice = 0;
        for (int v = 1; v <= order_; ++v) twice += adj_[v].size();
        return static_cast<int>(twice / 2);
    }

    // Edges as (u, v) pairs with u < v, sorted.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> e;
        for (int u = 1; u <= order_; ++u)
            for (int v : adj_[u])
                if (u < v) e.emplace_back(u, v);
        return e;
    }

    bool operator==(const SimpleGraph& o) const = default;

private:
    void check_vertex(int v) const {
        if (v < 1 || v > order_)
            throw Error(errc::bad_argument,
                        "vertex " + std::to_string(v) + " out of range 1.." + std::to_string(order_));
    }

    int order_;
    std::vector<std::vector<int>> adj_;  // adj_[0] unused; lists kept sorted
};

/**
 * Graph of a matrix: edge {i,j} iff |M_ij| > zero_tol or |M_ji| > zero_tol
 * for i != j. The diagonal never contributes.
 */
inline SimpleGraph graph_of_matrix(const Matrix& m, double zero_tol = 0.0) {
    if (zero_tol < 0.0) throw Error(errc::bad_argument, "zero_tol must be nonnegative");
    SimpleGraph g(m.size());
    for (int i = 0; i < m.size(); ++i)
        for (int j = i + 1; j < m.size(); ++j)
            if (std::fabs(m(i, j)) > zero_tol || std::fabs(m(j, i)) > zero_tol)
                g.add_edge(i + 1, j + 1);
    return g;
}

// True iff |M_ij| > zero_tol implies |M_ji| > zero_tol for all i != j.
inline bool is_combinatorially_symmetric(const Matrix& m, double zero_tol = 0.0) {
    if (zero_tol < 0.0) throw Error(errc::bad_argument, "zero_tol must be nonnegative");
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j)
            if (i != j && std::fabs(m(i, j)) > zero_tol && std::fabs(m(j, i)) <= zero_tol)
                return false;
    return true;
}

/**
 * Graph of a matrix, refusing matrices that are not combinatorially
 * symmetric. Entry point for pipelines that derive a pattern from a chain;
 * directed patterns never reach the reconstruction machinery.
 */
inline SimpleGraph pattern_of_chain(const Matrix& m, double zero_tol = 0.0) {
    if (!is_combinatorially_symmetric(m, zero_tol))
        throw Error(errc::not_symmetric,
                    "matrix is not combinatorially symmetric; its non-zero pattern is not an "
                    "undirected graph");
    return graph_of_matrix(m, zero_tol);
}

inline bool is_connected(const SimpleGraph& g) {
    std::vector<char> seen(static_cast<size_t>(g.order()) + 1, 0);
    std::vector<int> stack{1};
    seen[1] = 1;
    int count = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++count;
        for (int w : g.neighbors(v))
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    return count == g.order();
}

// ---- standard families -------------------------------------------------

inline SimpleGraph path_graph(int n) {
    SimpleGraph g(n);
    for (int v = 1; v < n; ++v) g.add_edge(v, v + 1);
    return g;
}

inline SimpleGraph cycle_graph(int n) {
    if (n < 3) throw Error(errc::bad_argument, "cycle needs at least 3 vertices");
    SimpleGraph g = path_graph(n);
    g.add_edge(1, n);
    return g;
}

// rows x cols grid, vertices numbered row-major starting at 1.
inline SimpleGraph grid_graph(int rows, int cols) {
    SimpleGraph g(rows * cols);
    auto lab = [cols](int r, int c) { return r * cols + c + 1; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) g.add_edge(lab(r, c), lab(r, c + 1));
            if (r + 1 < rows) g.add_edge(lab(r, c), lab(r + 1, c));
        }
    return g;
}

/**
 * The penta-sun: a 5-cycle with a pendant vertex attached to each cycle
 * vertex. Labeling convention: cycle 2-3-4-8-7, pendants 1 on 2, 6 on 3,
 * 5 on 4, 10 on 8, 9 on 7. Zero forcing number 3.
 */
inline SimpleGraph pentasun() {
    SimpleGraph g(10);
    for (auto [u, v] : {std::pair{2, 3}, {3, 4}, {4, 8}, {7, 8}, {2, 7},
                        {1, 2}, {3, 6}, {4, 5}, {8, 10}, {7, 9}})
        g.add_edge(u, v);
    return g;
}

}  // namespace zfmc

#endif  // ZFMC_GRAPH_HPP
