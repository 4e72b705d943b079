#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "subcon/analysis.hpp"

using namespace subcon;

namespace {

AdversarySpec static_spec(const CommGraph& g) {
    AdversarySpec spec;
    spec.n = g.size();
    spec.graphs = {g};
    return spec;
}

AdversarySpec broadcastable(int n, int k, std::uint64_t seed) {
    AdversarySpec spec;
    spec.n = n;
    spec.kind = AdversaryKind::RandomKBroadcastable;
    spec.k = k;
    spec.seed = seed;
    return spec;
}

StateVector random_state(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    StateVector x(n, d);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) x(i, c) = u(rng);
    return x;
}

StateVector column(std::initializer_list<double> v) {
    StateVector x(v.size(), 1);
    int i = 0;
    for (double e : v) x(i++, 0) = e;
    return x;
}

}  // namespace

TEST_CASE("averaging invariants and the corrupted-row negative control") {
    const auto trace = run(broadcastable(4, 2, 1), WeightRule::equal_neighbor(), random_state(4, 2, 1), 30);
    CHECK(verify_averaging(trace).passed());

    Matrix bad(3, 3);
    bad << 0.9, 0, 0, 0.45, 0.45, 0, 0.45, 0, 0.45;
    const auto corrupted = run(static_spec(CommGraph::star(3, 0)), WeightRule::custom({bad}), column({1, 2, 3}), 5);
    const auto report = verify_averaging(corrupted);
    CHECK_FALSE(report.passed());
    // Every violating round is reported, not just the first.
    int row_sum_failures = 0;
    for (const auto& r : report.records) row_sum_failures += (!r.pass && r.note == "row sums");
    CHECK(row_sum_failures == 5);
}

TEST_CASE("volume contraction") {
    const auto consensus = run(static_spec(CommGraph::complete(2)), WeightRule::equal_neighbor(), column({0, 1}), 1);
    const auto c = verify_volume_contraction(consensus);
    REQUIRE(c.rounds.size() == 1);
    CHECK(c.rounds[0].ratio == 0.0);
    CHECK(c.rounds[0].cap == doctest::Approx(0.5));
    CHECK(c.report.passed());

    SUBCASE("1-broadcastable star in R^1 against interval lengths") {
        const auto trace = run(static_spec(CommGraph::star(3, 0)), WeightRule::equal_neighbor(), column({0, 5, -3}), 25);
        const auto r = verify_volume_contraction(trace);
        CHECK(r.report.passed());
        for (const auto& round : r.rounds) {
            const double direct = oracle::interval_length(trace.after(round.t)) / oracle::interval_length(trace.before(round.t));
            CHECK(round.ratio == doctest::Approx(direct).epsilon(1e-12));
            CHECK(round.ratio <= 1.0 - 1.0 / 3.0 + 1e-12);
            CHECK(round.alpha == min_broadcast_weight(trace.record(round.t).weights, trace.record(round.t).round.m_set));
        }
    }

    SUBCASE("rounds with |M| > d are skipped") {
        const auto trace = run(broadcastable(4, 2, 3), WeightRule::equal_neighbor(), random_state(4, 1, 3), 10);
        const auto r = verify_volume_contraction(trace);
        std::size_t large = 0;
        for (int t = 1; t <= trace.length(); ++t) large += trace.record(t).round.m_set.size() > 1;
        CHECK(large > 0);
        CHECK(r.report.skipped.size() >= large);
        CHECK(r.report.passed());
    }
}

TEST_CASE("convergence bound") {
    CHECK(convergence_bound_round(0.5, 1, 1.0, 0.1) == 5);
    CHECK(convergence_bound_round(0.5, 1, 0.05, 0.1) == 0);

    // alpha = 1/2 for the 2-process complete graph; vol(P(0)) = 1.
    const auto trace = run(static_spec(CommGraph::complete(2)), WeightRule::equal_neighbor(), column({0, 1}), 6);
    const auto r = verify_convergence_bound(trace, 0.1);
    CHECK(r.bound_round == 5);
    CHECK(r.report.passed());
    CHECK(verify_convergence_bound(trace, 2.0).bound_round == 0);
    CHECK_THROWS_AS(verify_convergence_bound(trace, 1e-300), std::out_of_range);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto spec = broadcastable(4, 2, seed);
        const auto x0 = random_state(4, 2, seed);
        const double alpha = 0.25;  // equal-neighbour on n = 4
        const int rounds = convergence_bound_round(alpha, 2, hull_volume(x0), 1e-2) + 1;
        const auto tr = run(spec, WeightRule::equal_neighbor(), x0, rounds);
        const auto rep = verify_convergence_bound(tr, 1e-2);
        CHECK(rep.report.passed());
        CHECK(rep.bound_round <= rounds);
    }
}

TEST_CASE("thickness contraction") {
    SUBCASE("singleton M in R^1 is range contraction") {
        const auto trace = run(static_spec(CommGraph::star(3, 1)), WeightRule::equal_neighbor(), column({4, 0, -2}), 15);
        CHECK(verify_thickness_contraction(trace).passed());
        for (int t = 1; t <= trace.length(); ++t) {
            const double alpha = measured_alpha(trace, t);
            CHECK(oracle::interval_length(trace.after(t)) <= (1.0 - alpha) * oracle::interval_length(trace.before(t)) + 1e-12);
        }
    }
    SUBCASE("everyone broadcasts") {
        const auto trace = run(static_spec(CommGraph::identity(3)), WeightRule::equal_neighbor(), random_state(3, 3, 2), 5);
        CHECK(verify_thickness_contraction(trace).passed());
    }
    SUBCASE("2-broadcastable n = 5, d = 3") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto trace = run(broadcastable(5, 2, seed), WeightRule::equal_neighbor(), random_state(5, 3, seed), 40);
            CHECK(verify_thickness_contraction(trace).passed());
        }
    }
}

TEST_CASE("decomposition over traces") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto trace = run(broadcastable(5, 3, seed), WeightRule::random_alpha_safe(0.1), random_state(5, 3, seed), 30);
        CHECK(verify_decomposition(trace).passed());
    }
}

TEST_CASE("half-space zone") {
    SUBCASE("far half-space") {
        const auto trace = run(static_spec(CommGraph::star(3, 0)), WeightRule::equal_neighbor(), column({0, 1, 2}), 1);
        const HalfSpace far(Vector::Constant(1, 100.0), Vector::Constant(1, -1.0));  // {x > 100}
        const double lhs = measured_alpha(trace, 1) * dist_to_halfspace(Vector(trace.before(1).row(0)), far);
        CHECK(dist_to_halfspace(trace.after(1), far) >= lhs);
        CHECK(lhs > 0.0);
    }
    SUBCASE("supporting half-space at a broadcaster") {
        // x_1 = 2 is the broadcaster and the maximum: the bound is vacuous.
        const auto trace = run(static_spec(CommGraph::star(3, 0)), WeightRule::equal_neighbor(), column({2, 1, 0}), 1);
        const HalfSpace touch(Vector::Constant(1, 2.0), Vector::Constant(1, -1.0));
        CHECK(dist_to_halfspace(PointSet(trace.before(1).topRows(1)), touch) == 0.0);
        CHECK(verify_halfspace_zone(trace, 5, 0).passed());
    }
    SUBCASE("20 seeds x 50 half-spaces, n = 4, d = 2") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto trace = run(broadcastable(4, 2, seed), WeightRule::equal_neighbor(), random_state(4, 2, seed), 20);
            const auto r = verify_halfspace_zone(trace, 50, seed);
            CHECK(r.passed());
            CHECK(r.records.size() == 20 * 50);
        }
    }
}

TEST_CASE("limit subspace") {
    const auto one = run(broadcastable(4, 1, 5), WeightRule::equal_neighbor(), random_state(4, 3, 5), 250);
    CHECK(estimate_limit_subspace(one, 10, 1e-6).dim == 0);
    CHECK(verify_limit_subspace(one, 10, 1e-6, 0).passed());

    const auto two = run(broadcastable(5, 2, 6), WeightRule::equal_neighbor(), random_state(5, 3, 6), 250);
    CHECK(estimate_limit_subspace(two, 10, 1e-6).dim <= 1);

    const auto x0 = random_state(4, 3, 7);
    const auto frozen = run(static_spec(CommGraph::identity(4)), WeightRule::equal_neighbor(), x0, 50);
    const auto est = estimate_limit_subspace(frozen, 10, 1e-6);
    CHECK(est.dim == affine_dim(x0));
    CHECK_FALSE(verify_limit_subspace(frozen, 10, 1e-6, 2).passed());
    CHECK_THROWS_AS(estimate_limit_subspace(frozen, 0, 1e-6), std::invalid_argument);
}

TEST_CASE("impossibility witness") {
    const auto s0 = verify_impossibility(3, 0, 30);
    CHECK(s0.report.passed());
    REQUIRE(s0.sources.size() == 2);
    const auto& last = s0.trace.states.back();
    CHECK(last.row(s0.sources[0]) != last.row(s0.sources[1]));
    CHECK(affine_dim(s0.trace.states.back()) >= 1);

    const auto s1 = verify_impossibility(4, 1, 30);
    CHECK(s1.report.passed());
    PointSet constants(3, 2);
    for (int r = 0; r < 3; ++r) constants.row(r) = s1.trace.states.back().row(s1.sources[r]);
    CHECK(oracle::exact_affine_rank(constants) == 2);

    for (int s = 0; s <= 2; ++s) {
        const auto rep = verify_impossibility(s + 3, s, 40);
        CHECK(rep.report.passed());
        CHECK(estimate_limit_subspace(rep.trace, 10, 1e-6).dim >= s + 1);
        for (const auto& x : rep.trace.states)
            for (int src : rep.sources) CHECK(x.row(src) == rep.trace.states.front().row(src));
    }
}

TEST_CASE("rooted products are broadcastable") {
    CHECK(verify_rooted_products(3, 1, default_relay_rounds(3), 300, 1).passed());
    CHECK(verify_rooted_products(4, 2, default_relay_rounds(4), 300, 2).passed());
    // A single 1-rooted graph is not always 1-broadcastable: the check can fail.
    CHECK_FALSE(verify_rooted_products(5, 1, 1, 300, 3).passed());
}

TEST_CASE("segment bound suite") {
    const auto r = verify_segment_bounds(20, 4);
    CHECK(r.passed());
    CHECK(r.records.size() > 20 * 9 * 2);
}
