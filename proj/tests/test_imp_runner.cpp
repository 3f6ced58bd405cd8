#include "doctest.h"

#include <set>

#include "polarlab/imp_runner.hpp"

using namespace polarlab;

namespace {
ImpHyper tiny_hyper() {
    ImpHyper h;
    h.M = 2;
    h.d_emb = 4;
    h.d_init = 2;
    h.d_hidden = {8, 8};
    h.d_pool = 1;
    h.post_hidden = {8};
    return h;
}
} // namespace

TEST_CASE("construct_imp basics") {
    ImpParams p = imp_init_params(tiny_hyper(), 17);
    CodeSpec spec = make_code_spec(16, 8, 4, "0x3");
    ConstructTrace trace;
    Construction c = construct_imp(spec, SnrDb{2.0}, p, &trace);
    CHECK(static_cast<int>(c.frozen_set.size()) == 8);
    CHECK(static_cast<int>(c.info_set.size()) == 8);
    CHECK(c.spec.m == 4);

    SUBCASE("freeze order never revisits an index (monotone freezing)") {
        std::set<int> seen(trace.freeze_order.begin(), trace.freeze_order.end());
        CHECK(seen.size() == trace.freeze_order.size());
    }
    SUBCASE("deterministic") {
        Construction c2 = construct_imp(spec, SnrDb{2.0}, p);
        CHECK(c2.info_set == c.info_set);
    }
}

TEST_CASE("theta schedule starts at one and steps by 1/(N-K)") {
    ImpParams p = imp_init_params(tiny_hyper(), 18);
    CodeSpec spec = make_code_spec(4, 2, 0);
    ConstructTrace trace;
    construct_imp(spec, SnrDb{1.0}, p, &trace);
    REQUIRE(trace.theta_used.size() == 2);
    CHECK(trace.theta_used[0] == doctest::Approx(1.0));
    CHECK(trace.theta_used[1] == doctest::Approx(0.5));
}

TEST_CASE("construct_imp argument errors") {
    ImpParams p = imp_init_params(tiny_hyper(), 19);
    // K = N leaves no freezing step; K <= m is already rejected when the
    // code spec is formed
    CHECK_THROWS_AS(construct_imp(make_code_spec(8, 8, 0), SnrDb{1.0}, p), std::invalid_argument);
    CHECK_THROWS_AS(make_code_spec(8, 1, 1, "0x1"), std::invalid_argument);
}

TEST_CASE("neighborhood search") {
    ImpParams p = imp_init_params(tiny_hyper(), 20);
    CodeSpec spec = make_code_spec(16, 8, 0);
    StopRule rule = StopRule::training(20, 2'000);

    SUBCASE("single zero offset reduces to construct_imp plus one estimate") {
        NsResult r = neighborhood_search(spec, SnrDb{1.5}, p, {0.0}, 2, rule, 42, 1);
        Construction direct = construct_imp(spec, SnrDb{1.5}, p);
        CHECK(r.best.info_set == direct.info_set);
        CHECK(r.best_offset_db == 0.0);
        REQUIRE(r.candidates.size() == 1);
        CHECK(r.candidates[0].has_fer);
        FerEstimate solo = estimate_fer(direct, 2, SnrDb{1.5}, rule, derive_stream(42, 0), 1);
        CHECK(r.best_fer.frames == solo.frames);
        CHECK(r.best_fer.errors == solo.errors);
    }

    SUBCASE("identical constructions are simulated once") {
        // a zero model scores every node equally, so every offset produces
        // the same (tie-broken) construction
        ImpParams zero = imp_zeros_like(tiny_hyper());
        NsResult r = neighborhood_search(spec, SnrDb{1.5}, zero, {0.0, 0.2, -0.2, 0.4, -0.4}, 2,
                                         rule, 42, 1);
        REQUIRE(r.candidates.size() == 5);
        int evaluated = 0;
        for (const auto& cand : r.candidates) {
            evaluated += cand.has_fer;
            if (&cand != &r.candidates[0])
                CHECK(cand.duplicate);
        }
        CHECK(evaluated == 1);
    }

    SUBCASE("at most one evaluation per offset") {
        NsResult r =
            neighborhood_search(spec, SnrDb{1.5}, p, {0.0, 0.2, -0.2, 0.4, -0.4}, 2, rule, 7, 1);
        int evaluated = 0;
        for (const auto& cand : r.candidates)
            evaluated += cand.has_fer;
        CHECK(evaluated <= 5);
        CHECK(evaluated >= 1);
    }

    CHECK_THROWS_AS(neighborhood_search(spec, SnrDb{1.0}, p, {}, 2, rule, 1, 1),
                    std::invalid_argument);
}
