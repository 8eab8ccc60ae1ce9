#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "zfmc/forcing.hpp"
#include "zfmc/graph.hpp"
#include "zfmc/rng.hpp"

using namespace zfmc;

namespace {

// Random admissible schedule, for checking that the closure does not
// depend on the force order.
std::vector<int> randomized_closure(const SimpleGraph& g, const std::vector<int>& z, Rng& rng) {
    std::vector<char> blue(static_cast<size_t>(g.order()) + 1, 0);
    for (int v : z) blue[v] = 1;
    while (true) {
        std::vector<std::pair<int, int>> available;
        for (int k = 1; k <= g.order(); ++k) {
            if (!blue[k]) continue;
            int white = 0, count = 0;
            for (int w : g.neighbors(k))
                if (!blue[w]) {
                    white = w;
                    ++count;
                }
            if (count == 1) available.emplace_back(k, white);
        }
        if (available.empty()) break;
        const size_t pick = static_cast<size_t>(rng.uniform01() * available.size());
        blue[available[std::min(pick, available.size() - 1)].second] = 1;
    }
    std::vector<int> out;
    for (int v = 1; v <= g.order(); ++v)
        if (blue[v]) out.push_back(v);
    return out;
}

SimpleGraph random_graph(int order, double edge_prob, Rng& rng) {
    SimpleGraph g(order);
    for (int u = 1; u <= order; ++u)
        for (int v = u + 1; v <= order; ++v)
            if (rng.uniform01() < edge_prob) g.add_edge(u, v);
    return g;
}

}  // namespace

TEST_CASE("forcing closure on a path") {
    const SimpleGraph p4 = path_graph(4);
    const ForcingSequence fs = forcing_closure(p4, std::vector<int>{1});
    REQUIRE(fs.forces == std::vector<Force>{{1, 2}, {2, 3}, {3, 4}});
    REQUIRE(fs.closure == std::vector<int>{1, 2, 3, 4});
    REQUIRE(fs.covers(4));
}

TEST_CASE("penta-sun closures") {
    const SimpleGraph h5 = pentasun();
    SECTION("{9,10} stalls at six vertices") {
        const ForcingSequence fs = forcing_closure(h5, std::vector<int>{9, 10});
        REQUIRE(fs.closure == std::vector<int>{2, 4, 7, 8, 9, 10});
        REQUIRE_FALSE(fs.covers(10));
        REQUIRE_FALSE(is_zero_forcing_set(h5, std::vector<int>{9, 10}));
    }
    SECTION("{9,10,1} forces everything") {
        REQUIRE(is_zero_forcing_set(h5, std::vector<int>{9, 10, 1}));
    }
}

TEST_CASE("whole vertex set closes with no forces") {
    const SimpleGraph g = grid_graph(2, 3);
    std::vector<int> all{1, 2, 3, 4, 5, 6};
    const ForcingSequence fs = forcing_closure(g, all);
    REQUIRE(fs.forces.empty());
    REQUIRE(fs.closure == all);
    REQUIRE(is_zero_forcing_set(g, all));
}

TEST_CASE("closure input validation") {
    const SimpleGraph g = path_graph(3);
    REQUIRE_THROWS_AS(forcing_closure(g, std::vector<int>{0}), Error);
    REQUIRE_THROWS_AS(forcing_closure(g, std::vector<int>{4}), Error);
    // duplicates collapse
    REQUIRE(forcing_closure(g, std::vector<int>{1, 1}).initial_set == std::vector<int>{1});
}

TEST_CASE("closure is monotone and idempotent") {
    Rng rng(99);
    for (int trial = 0; trial < 120; ++trial) {
        const int order = 2 + static_cast<int>(rng.uniform01() * 7);
        const SimpleGraph g = random_graph(order, rng.uniform(0.15, 0.6), rng);
        std::vector<int> z, z_bigger;
        for (int v = 1; v <= order; ++v) {
            const double u = rng.uniform01();
            if (u < 0.25) z.push_back(v);
            if (u < 0.45) z_bigger.push_back(v);
        }
        if (z.empty()) z.push_back(1);
        if (z_bigger.empty()) z_bigger = z;

        const ForcingSequence small = forcing_closure(g, z);
        const ForcingSequence big = forcing_closure(g, z_bigger);
        if (std::includes(z_bigger.begin(), z_bigger.end(), z.begin(), z.end()))
            REQUIRE(std::includes(big.closure.begin(), big.closure.end(), small.closure.begin(),
                                  small.closure.end()));

        const ForcingSequence again = forcing_closure(g, small.closure);
        REQUIRE(again.forces.empty());
        REQUIRE(again.closure == small.closure);

        // forced vertices are distinct and disjoint from the initial set
        std::vector<int> forced;
        for (const Force& f : small.forces) forced.push_back(f.forced);
        std::sort(forced.begin(), forced.end());
        REQUIRE(std::adjacent_find(forced.begin(), forced.end()) == forced.end());
        for (int v : forced)
            REQUIRE_FALSE(std::binary_search(small.initial_set.begin(), small.initial_set.end(), v));
    }
}

TEST_CASE("closure does not depend on the schedule") {
    Rng rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const int order = 2 + static_cast<int>(rng.uniform01() * 6);
        const SimpleGraph g = random_graph(order, rng.uniform(0.2, 0.7), rng);
        std::vector<int> z;
        for (int v = 1; v <= order; ++v)
            if (rng.uniform01() < 0.35) z.push_back(v);
        if (z.empty()) z.push_back(order);
        const std::vector<int> canonical = forcing_closure(g, z).closure;
        for (int run = 0; run < 4; ++run) REQUIRE(randomized_closure(g, z, rng) == canonical);
    }
}

TEST_CASE("minimum zero forcing sets") {
    SECTION("paths have forcing number 1") {
        for (int n : {2, 5, 9}) {
            const std::vector<int> z = min_zero_forcing_set(path_graph(n));
            REQUIRE(z == std::vector<int>{1});
        }
    }
    SECTION("grids have forcing number min(rows, cols)") {
        REQUIRE(min_zero_forcing_set(grid_graph(2, 3)).size() == 2);
        REQUIRE(min_zero_forcing_set(grid_graph(3, 4)).size() == 3);
        REQUIRE(min_zero_forcing_set(grid_graph(3, 3)) == std::vector<int>{1, 2, 3});
    }
    SECTION("penta-sun has forcing number 3") {
        const std::vector<int> z = min_zero_forcing_set(pentasun());
        REQUIRE(z.size() == 3);
        REQUIRE(z == std::vector<int>{1, 3, 5});  // lexicographic tie-break
        REQUIRE(is_zero_forcing_set(pentasun(), z));
    }
    SECTION("order above the search bound is refused") {
        REQUIRE_THROWS_AS(min_zero_forcing_set(path_graph(21)), Error);
        try {
            min_zero_forcing_set(path_graph(21));
        } catch (const Error& e) {
            REQUIRE(e.code() == errc::search_bound);
        }
        REQUIRE(min_zero_forcing_set(path_graph(21), 25) == std::vector<int>{1});
    }
}

TEST_CASE("minimum set is minimal: exhaustive cross-check at small order") {
    Rng rng(777);
    for (int trial = 0; trial < 40; ++trial) {
        const int order = 2 + static_cast<int>(rng.uniform01() * 5);
        const SimpleGraph g = random_graph(order, rng.uniform(0.2, 0.8), rng);
        const std::vector<int> z = min_zero_forcing_set(g);
        REQUIRE(is_zero_forcing_set(g, z));
        // brute force: no subset of size |z| - 1 forces
        const int k = static_cast<int>(z.size()) - 1;
        if (k == 0) continue;
        for (int mask = 0; mask < (1 << order); ++mask) {
            if (std::popcount(static_cast<unsigned>(mask)) != k) continue;
            std::vector<int> cand;
            for (int v = 1; v <= order; ++v)
                if (mask & (1 << (v - 1))) cand.push_back(v);
            REQUIRE_FALSE(is_zero_forcing_set(g, cand));
        }
    }
}
