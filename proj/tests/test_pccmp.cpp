#include "doctest.h"
#include <algorithm>

#include "polarlab/pccmp.hpp"
#include "polarlab/polar.hpp"

using namespace polarlab;

TEST_CASE("edge counts from the generator") {
    SUBCASE("N=2") {
        PccmpGraph g = build_pccmp(2, SnrDb{1.0});
        CHECK(g.structure().bipartite_edge_pairs() == 3);
        CHECK(g.structure().c2c_edge_count() == 1);
    }
    SUBCASE("N=4") {
        PccmpGraph g = build_pccmp(4, SnrDb{1.0});
        CHECK(g.structure().bipartite_edge_pairs() == 9);
        CHECK(g.structure().c2c_edge_count() == 6);
        CHECK(g.x_check(3) == doctest::Approx(0.75));
    }
    CHECK_THROWS_AS(build_pccmp(12, SnrDb{0.0}), std::invalid_argument);
}

TEST_CASE("in-neighborhood sizes match generator row/column weights") {
    for (int N : {4, 8, 16}) {
        PccmpGraph g = build_pccmp(N, SnrDb{0.0});
        BitMatrix gen = kronecker_generator(g.structure().n);
        for (int j = 0; j < N; ++j) {
            int col_weight = 0;
            for (int i = 0; i < N; ++i)
                col_weight += gen.at(i, j);
            CHECK(static_cast<int>(g.structure().c_in_vars[static_cast<std::size_t>(j)].size()) ==
                  col_weight);
        }
        for (int i = 0; i < N; ++i) {
            int row_weight = 0;
            for (int j = 0; j < N; ++j)
                row_weight += gen.at(i, j);
            CHECK(static_cast<int>(g.structure().v_in_checks[static_cast<std::size_t>(i)].size()) ==
                  row_weight);
        }
    }
}

TEST_CASE("adjacency lists are sorted ascending") {
    PccmpGraph g = build_pccmp(16, SnrDb{0.0});
    for (const auto& lst : g.structure().v_in_checks)
        CHECK(std::is_sorted(lst.begin(), lst.end()));
    for (const auto& lst : g.structure().c_in_vars)
        CHECK(std::is_sorted(lst.begin(), lst.end()));
}

TEST_CASE("initial node messages and types") {
    PccmpGraph g = build_pccmp(8, SnrDb{2.5});
    CHECK(g.gamma().db == 2.5);
    for (int j = 0; j < 8; ++j) {
        CHECK(g.check_type(j) == NodeType::I);
        CHECK(g.x_variable(j) == 2.5);
        CHECK(g.x_check(j) == doctest::Approx(j / 8.0));
    }
}

TEST_CASE("freezing changes only the node type") {
    PccmpGraph g = build_pccmp(8, SnrDb{1.0});
    const auto* structure_before = &g.structure();
    const std::size_t edges = g.structure().bipartite_edge_pairs();
    g.freeze(0);
    CHECK(g.check_type(0) == NodeType::F);
    CHECK(g.frozen_count() == 1);
    CHECK(&g.structure() == structure_before);
    CHECK(g.structure().bipartite_edge_pairs() == edges);
    CHECK_THROWS_AS(g.freeze(0), std::logic_error);
    CHECK_THROWS_AS(g.freeze(99), std::invalid_argument);
}

TEST_CASE("structure depends on N only") {
    PccmpGraph a = build_pccmp(16, SnrDb{0.0});
    PccmpGraph b = build_pccmp(16, SnrDb{5.0});
    CHECK(&a.structure() == &b.structure()); // shared cache, identical object
    b.freeze(3);
    CHECK(a.check_type(3) == NodeType::I); // freezing one graph leaves others alone
}

TEST_CASE("types replayed from a frozen mask") {
    PccmpGraph g = build_pccmp(8, SnrDb{0.0});
    std::vector<std::uint8_t> mask = {1, 0, 0, 1, 0, 0, 0, 1};
    g.set_types_from_frozen_mask(mask);
    for (int j = 0; j < 8; ++j)
        CHECK(g.is_frozen(j) == (mask[static_cast<std::size_t>(j)] == 1));
    CHECK_THROWS_AS(g.set_types_from_frozen_mask(std::vector<std::uint8_t>(4, 0)),
                    std::invalid_argument);
}
