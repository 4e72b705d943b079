// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "subcon/analysis.hpp"

using namespace subcon;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

AdversarySpec adversary(AdversaryKind kind, int n, int k, std::uint64_t seed) {
    AdversarySpec spec;
    spec.n = n;
    spec.kind = kind;
    spec.k = k;
    spec.seed = seed;
    return spec;
}

StateVector unit_cube_state(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    StateVector x(n, d);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) x(i, c) = u(rng);
    return x;
}

// d-broadcastable family with n <= 5, d <= 3, equal-neighbour weights.
struct FamilyMember {
    int n;
    int d;
    AdversarySpec spec;
    StateVector x0;
};

FamilyMember family(std::uint64_t seed) {
    const int d = 1 + static_cast<int>(seed % 3);
    const int n = d + 1 + static_cast<int>((seed / 3) % static_cast<std::uint64_t>(5 - d));
    return {n, d, adversary(AdversaryKind::RandomKBroadcastable, n, d, seed), unit_cube_state(n, d, seed)};
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

// Executions of criteria 1-4, re-checked by criterion 10.
std::vector<ExecutionTrace> decomposition_pool;

Outcome criterion1() {
    Outcome out;
    std::size_t checked = 0, violations = 0, runs = 0;
    double worst = 1.0;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        auto m = family(seed);
        auto trace = run(m.spec, WeightRule::equal_neighbor(), m.x0, 60);
        const auto r = verify_volume_contraction(trace, 1e-9);
        checked += r.report.records.size();
        violations += r.report.violations();
        for (const auto& rec : r.rounds) {
            worst = std::min(worst, rec.cap - rec.ratio);
            // Cross-check against the dynamics module on the same round.
            const auto& round = trace.record(rec.t);
            if (rec.alpha != min_broadcast_weight(round.weights, round.round.m_set)) ++violations;
        }
        ++runs;
        decomposition_pool.push_back(std::move(trace));
    }
    out.pass = violations == 0 && checked > 0;
    out.detail = std::to_string(runs) + " executions, " + std::to_string(checked) + " rounds checked, " +
                 std::to_string(violations) + " violations, min slack " + fmt("%.3g", worst);
    return out;
}

Outcome criterion2() {
    Outcome out;
    std::size_t failures = 0, runs = 0;
    int longest = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto m = family(seed);
        const double alpha_floor = 1.0 / m.n;  // equal-neighbour weight on M is at least 1/n
        const int rounds = std::max(1, convergence_bound_round(alpha_floor, m.d, hull_volume(m.x0), 1e-4));
        auto trace = run(m.spec, WeightRule::equal_neighbor(), m.x0, rounds);
        for (double eps : {1e-2, 1e-4}) {
            try {
                const auto r = verify_convergence_bound(trace, eps);
                failures += r.report.passed() ? 0 : 1;
                longest = std::max(longest, r.bound_round);
            } catch (const std::exception& e) {
                ++failures;
                std::printf("  criterion 2 seed %llu: %s\n", static_cast<unsigned long long>(seed), e.what());
            }
            ++runs;
        }
        if (seed < 20) decomposition_pool.push_back(std::move(trace));
    }
    out.pass = failures == 0;
    out.detail = std::to_string(runs) + " (seed, eps) pairs, " + std::to_string(failures) +
                 " failures, largest bound round " + std::to_string(longest);
    return out;
}

Outcome criterion3() {
    Outcome out;
    std::size_t checked = 0, violations = 0, runs = 0;
    for (int k = 1; k <= 3; ++k) {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const int n = k + 1 + static_cast<int>(seed % static_cast<std::uint64_t>(5 - k));
            const auto rule = seed % 2 == 0 ? WeightRule::equal_neighbor() : WeightRule::random_alpha_safe(0.15);
            auto trace = run(adversary(AdversaryKind::RandomKBroadcastable, n, k, 1000 * k + seed), rule,
                             unit_cube_state(n, 3, seed + 77), 80);
            const auto r = verify_thickness_contraction(trace, 1e-9);
            checked += r.records.size();
            violations += r.violations();
            ++runs;
            decomposition_pool.push_back(std::move(trace));
        }
    }
    out.pass = violations == 0;
    out.detail = std::to_string(runs) + " executions in R^3 (k = 1..3), " + std::to_string(checked) + " checks, " +
                 std::to_string(violations) + " violations";
    return out;
}

Outcome criterion4() {
    Outcome out;
    std::string dims;
    std::size_t failures = 0;
    double worst_residual = 0.0;
    for (int k = 1; k <= 3; ++k) {
        int max_dim = -1;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto trace = run(adversary(AdversaryKind::RandomKBroadcastable, 5, k, 500 * k + seed),
                             WeightRule::equal_neighbor(), unit_cube_state(5, 3, 900 + seed), 250);
            const auto est = estimate_limit_subspace(trace, 10, 1e-6);
            max_dim = std::max(max_dim, est.dim);
            worst_residual = std::max(worst_residual, est.residual);
            if (est.dim > k - 1 || est.residual > 1e-6) ++failures;
            decomposition_pool.push_back(std::move(trace));
        }
        dims += " k=" + std::to_string(k) + ":dim<=" + std::to_string(max_dim);
    }
    // Rooted adversaries with relaying reach dimension <= k - 1 as well.
    for (int k = 1; k <= 3; ++k) {
        int max_dim = -1;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto spec = adversary(AdversaryKind::RandomKRooted, 5, k, 700 * k + seed);
            auto trace = run(spec, WeightRule::equal_neighbor(), unit_cube_state(5, 3, 300 + seed), 250,
                             default_relay_rounds(5));
            const auto est = estimate_limit_subspace(trace, 10, 1e-6);
            max_dim = std::max(max_dim, est.dim);
            worst_residual = std::max(worst_residual, est.residual);
            if (est.dim > k - 1 || est.residual > 1e-6) ++failures;
        }
        dims += " rooted+relay k=" + std::to_string(k) + ":dim<=" + std::to_string(max_dim);
    }
    out.pass = failures == 0;
    out.detail = "250 rounds in R^3," + dims + ", worst residual " + fmt("%.2g", worst_residual) + ", " +
                 std::to_string(failures) + " failures";
    return out;
}

Outcome criterion5() {
    Outcome out;
    std::size_t failures = 0;
    std::string dims;
    for (int s = 0; s <= 2; ++s) {
        for (int n = s + 2; n <= s + 4; ++n) {
            const auto r = verify_impossibility(n, s, 200);
            failures += r.report.violations();
            // Exact constancy on the source processes, compared bit for bit.
            for (const auto& x : r.trace.states)
                for (int src : r.sources)
                    if (x.row(src) != r.trace.states.front().row(src)) ++failures;
            // Converse direction: the limit set is not s-dimensional.
            const auto est = estimate_limit_subspace(r.trace, 10, 1e-6);
            if (est.dim < s + 1) ++failures;
            if (n == s + 3) dims += " s=" + std::to_string(s) + ":dim " + std::to_string(est.dim);
        }
    }
    out.pass = failures == 0;
    out.detail = "s in {0,1,2}, n = s+2..s+4, 200 rounds;" + dims + "; " + std::to_string(failures) + " failures";
    return out;
}

Outcome criterion6() {
    Outcome out;
    std::size_t violations = 0, trials = 0;
    for (int n = 3; n <= 5; ++n) {
        for (int k = 1; k <= 2; ++k) {
            const auto r = verify_rooted_products(n, k, default_relay_rounds(n), 1000, 10 * n + k);
            violations += r.violations();
            trials += r.records.size();
        }
    }
    out.pass = violations == 0 && trials == 6000;
    out.detail = std::to_string(trials) + " products of ceil((pi^2+6)/6 n + 1) graphs, " + std::to_string(violations) +
                 " not k-broadcastable";
    return out;
}

Outcome criterion7() {
    Outcome out;
    std::mt19937 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Vector z(3), q(3), v(3);
        for (int c = 0; c < 3; ++c) {
            z(c) = g(rng);
            q(c) = g(rng);
            v(c) = g(rng);
        }
        if ((z - q).dot(v) < 0.0) v = -v;
        const double formula = dist_to_halfspace(z, HalfSpace(q, v));
        const double sampled = oracle::sampled_halfspace_distance(z, q, v, 100000, 1000 + trial);
        worst = std::max(worst, std::abs(formula - sampled));
        failures += std::abs(formula - sampled) > 1e-3;
    }
    out.pass = failures == 0;
    out.detail = "100 instances in R^3, max |formula - sampled infimum| = " + fmt("%.2g", worst);
    return out;
}

Outcome criterion8() {
    Outcome out;
    std::size_t checks = 0, violations = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto trace = run(adversary(AdversaryKind::RandomKBroadcastable, 4, 2, 40 + seed), WeightRule::equal_neighbor(),
                               unit_cube_state(4, 2, 40 + seed), 30);
        const auto r = verify_halfspace_zone(trace, 50, seed);
        checks += r.records.size();
        violations += r.violations();
    }
    out.pass = violations == 0 && checks == 20 * 30 * 50;
    out.detail = "20 seeds x 30 rounds x 50 half-spaces = " + std::to_string(checks) + " checks, " +
                 std::to_string(violations) + " violations";
    return out;
}

Outcome criterion9() {
    Outcome out;
    const auto r = verify_segment_bounds(50, 9);
    out.pass = r.passed();
    out.detail = "50 concave radius functions x d in {1,2,3} x alpha in {.25,.5,.75} + extremal r = h - xi: " +
                 std::to_string(r.records.size()) + " checks, " + std::to_string(r.violations()) + " violations";
    return out;
}

Outcome criterion10() {
    Outcome out;
    std::size_t violations = 0, rounds = 0;
    double worst = 0.0;
    for (const auto& trace : decomposition_pool) {
        const auto r = verify_decomposition(trace, 1e-12);
        violations += r.violations();
        for (const auto& rec : r.records) {
            if (rec.note != "reconstruction") continue;
            worst = std::max(worst, rec.lhs);
            if (rec.lhs > 1e-12) ++violations;  // absolute, independent of the trace's scale
            ++rounds;
        }
    }
    out.pass = violations == 0 && rounds > 0;
    out.detail = std::to_string(decomposition_pool.size()) + " executions, " + std::to_string(rounds) +
                 " rounds, max reconstruction error " + fmt("%.2g", worst) + ", " + std::to_string(violations) +
                 " violations";
    return out;
}

Outcome criterion11() {
    Outcome out;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int mc_failures = 0;
    double worst_sigma = 0.0;
    for (int cloud = 0; cloud < 20; ++cloud) {
        PointSet p(8 + cloud % 5, 3);
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (int c = 0; c < 3; ++c) p(i, c) = u(rng);
        const auto mc = oracle::tetrahedra_volume(p, 1000000, 500 + cloud);
        const double z = std::abs(hull_volume(p) - mc.value) / mc.sigma;
        worst_sigma = std::max(worst_sigma, z);
        mc_failures += z > 3.0;
    }

    // Degenerate and simplex clouds from integer coordinates.
    int rank_errors = 0, cases = 0;
    std::uniform_int_distribution<int> small(-5, 5);
    for (int trial = 0; trial < 60; ++trial) {
        const int d = 3;
        const int target = trial % 4;  // 0 identical, 1 collinear, 2 coplanar, 3 simplex
        Eigen::MatrixXd basis(target, d);
        Eigen::MatrixXd with_zero = Eigen::MatrixXd::Zero(target + 1, d);
        do {
            for (int r = 0; r < target; ++r)
                for (int c = 0; c < d; ++c) basis(r, c) = small(rng);
            with_zero.bottomRows(target) = basis;
        } while (oracle::exact_affine_rank(with_zero) != target);
        Eigen::RowVectorXd origin(d);
        for (int c = 0; c < d; ++c) origin(c) = small(rng);
        const int points = target == 3 ? 4 : 6;
        PointSet cloud(points, d);
        for (int i = 0; i < points; ++i) {
            Eigen::RowVectorXd pt = origin;
            for (int r = 0; r < target; ++r) pt += (target == 3 ? (i == r + 1 ? 1.0 : 0.0) : small(rng)) * basis.row(r);
            cloud.row(i) = pt;
        }
        const int exact = oracle::exact_affine_rank(cloud);
        ++cases;
        if (affine_dim(cloud) != exact) ++rank_errors;
        if ((exact < d) != (hull_volume(cloud) == 0.0)) ++rank_errors;
    }
    out.pass = mc_failures == 0 && rank_errors == 0;
    out.detail = "20 clouds vs 1e6-sample tetrahedra oracle, max deviation " + fmt("%.2f", worst_sigma) +
                 " sigma; " + std::to_string(cases) + " integer clouds, " + std::to_string(rank_errors) +
                 " rank/volume errors";
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1  lemma7 volume contraction", criterion1},
        {"2  theorem3 convergence bound", criterion2},
        {"3  lemma13 thickness contraction", criterion3},
        {"4  theorem4 limit subspace", criterion4},
        {"5  theorem2 impossibility witness", criterion5},
        {"6  theorem1 rooted products", criterion6},
        {"7  half-space distance formula", criterion7},
        {"8  lemma2 half-space zone", criterion8},
        {"9  lemma6 segment bounds", criterion9},
        {"10 lemma9 decomposition", criterion10},
        {"11 geometry oracles", criterion11},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %-36s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
