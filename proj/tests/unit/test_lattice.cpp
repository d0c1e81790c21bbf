#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "thermalab/errors.hpp"
#include "thermalab/lattice.hpp"

using namespace thermalab;

TEST_CASE("cubic lattice construction") {
    auto chain = build_cubic(5, 1);
    CHECK(chain.num_vertices() == 5);
    CHECK(chain.edges().size() == 4);

    // 3x3 grid: 9 vertices, hand count gives 12 edges
    auto grid = build_cubic(3, 2);
    CHECK(grid.num_vertices() == 9);
    CHECK(grid.edges().size() == 12);

    auto point = build_cubic(1, 3);
    CHECK(point.num_vertices() == 1);
    CHECK(point.edges().empty());

    // D n^{D-1} (n-1) edges in general
    for (int n : {2, 3, 4}) {
        for (int dim : {1, 2, 3}) {
            auto g = build_cubic(n, dim);
            long long expect = 1;
            for (int k = 0; k < dim - 1; ++k) expect *= n;
            expect *= dim * (n - 1);
            CHECK(static_cast<long long>(g.edges().size()) == expect);
        }
    }
}

TEST_CASE("cubic lattice rejects oversized requests") {
    CHECK_THROWS_AS(build_cubic(100, 3), ResourceError);
    try {
        build_cubic(100, 3);
    } catch (const ResourceError& e) {
        CHECK(std::string(e.what()).find("4096") != std::string::npos);
    }
}

TEST_CASE("graph distance between regions") {
    auto chain = build_chain(7);
    // supports of the bond terms {1,2} and {6,7} in 1-based labels
    CHECK(chain.distance(Region{0, 1}, Region{5, 6}) == 4);
    CHECK(chain.distance(Region{2, 3}, Region{2, 3}) == 0);
    CHECK_THROWS_AS(chain.distance(Region{}, Region{0}), std::domain_error);

    // disconnected pieces
    InteractionGraph two(4, {{0, 1}, {2, 3}});
    CHECK(two.distance(Region{0}, Region{3}) == kInfiniteDistance);
}

TEST_CASE("chain distance equals label difference") {
    auto chain = build_chain(9);
    for (int u = 0; u < 9; ++u)
        for (int v = 0; v < 9; ++v) CHECK(chain.distance(u, v) == std::abs(u - v));
}

TEST_CASE("boundaries") {
    auto chain = build_chain(6);
    CHECK(chain.boundary(Region{1, 2, 3}) == Region{1, 3});
    CHECK(chain.boundary(chain.all_sites()).empty());
    CHECK(chain.boundary(Region{}).empty());

    auto grid = build_cubic(3, 2);
    const int center = 4;
    CHECK(grid.boundary(Region{center}) == Region{center});
}

TEST_CASE("boundary pairs separate the cut") {
    std::mt19937 rng(7);
    auto grid = build_cubic(4, 2);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> sites;
        for (int v = 0; v < grid.num_vertices(); ++v)
            if (rng() % 2) sites.push_back(v);
        Region s(sites);
        Region comp = grid.all_sites().minus(s);
        Region bs = grid.boundary(s);
        Region bc = grid.boundary(comp);
        for (const auto& [u, v] : grid.edges()) {
            const bool crossing = s.contains(u) != s.contains(v);
            if (!crossing) continue;
            CHECK((bs.contains(u) || bs.contains(v) || bc.contains(u) || bc.contains(v)));
        }
    }
}

TEST_CASE("triangle inequality on random graphs") {
    std::mt19937 rng(123);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 10 + static_cast<int>(rng() % 41);
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng() % 100 < 8) edges.emplace_back(u, v);
        InteractionGraph g(n, std::move(edges));
        for (int k = 0; k < 200; ++k) {
            int a = rng() % n, b = rng() % n, c = rng() % n;
            int ab = g.distance(a, b), bc = g.distance(b, c), ac = g.distance(a, c);
            if (ab == kInfiniteDistance || bc == kInfiniteDistance) continue;
            CHECK(ac <= ab + bc);
            CHECK(g.distance(a, b) == g.distance(b, a));
            CHECK((g.distance(a, b) == 0) == (a == b));
        }
    }
}

TEST_CASE("ball and sphere") {
    auto chain = build_chain(9);
    Region s{4};
    CHECK(chain.ball(s, 1) == Region{4});
    CHECK(chain.ball(s, 3) == Region{2, 3, 4, 5, 6});
    CHECK(chain.sphere(s, 3) == Region{1, 7});
    CHECK(chain.sphere(s, 0) == Region{4});
}

TEST_CASE("growth constant bound") {
    CHECK(growth_constant_bound(1) == doctest::Approx(5.43656365691809).epsilon(1e-12));
    CHECK(growth_constant_bound(2) == doctest::Approx(10.87312731383618).epsilon(1e-12));
    CHECK(growth_constant_bound(3) == doctest::Approx(16.30969097075427).epsilon(1e-12));
    CHECK_THROWS_AS(growth_constant_bound(0), std::invalid_argument);
}

TEST_CASE("json round trip") {
    auto grid = build_cubic(3, 2);
    auto j = grid.to_json();
    CHECK(j["spatial_dim"] == 2);
    CHECK(j["vertices"].size() == 9);
    CHECK(j["edges"].size() == 12);
    auto back = InteractionGraph::from_json(j);
    CHECK(back.same_structure(grid));
}

TEST_CASE("periodic chains close the loop") {
    auto ring = build_chain(6, true);
    CHECK(ring.edges().size() == 6);
    CHECK(ring.distance(0, 5) == 1);
    CHECK(ring.distance(0, 3) == 3);
}
