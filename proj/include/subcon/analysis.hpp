#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subcon/dynamics.hpp"

namespace subcon {

/// One evaluated inequality lhs <= rhs (+ tolerance).
struct CheckRecord {
    std::string claim;
    int round = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    /// rhs - lhs; negative beyond the tolerance means a violation.
    double margin = 0.0;
    bool pass = true;
    std::string note;
};

struct SkippedRound {
    int round = 0;
    std::string reason;
};

/// All checks a verifier performed for one claim. Verifiers never stop at the
/// first violation.
struct ClaimReport {
    std::string claim;
    std::vector<CheckRecord> records;
    std::vector<SkippedRound> skipped;

    /// Records lhs <= rhs + tol.
    void check(int round, double lhs, double rhs, double tol, std::string note = {});
    void skip(int round, std::string reason) { skipped.push_back({round, std::move(reason)}); }

    std::size_t violations() const;
    bool passed() const { return violations() == 0; }
    /// Smallest margin over all records (+inf when there are none).
    double worst_margin() const;
};

// ---------------------------------------------------------------------------
// Per-round measurements

struct RoundMetrics {
    int t = 0;
    double volume = 0.0;
    /// Thickness of X(t) under the projection of round t (or t + 1 for t = 0).
    double thickness = 0.0;
    int affine_dim = 0;
    /// NaN when the round has no designated broadcasting set.
    double min_broadcast_weight = 0.0;
};

/// Volume of P(t) for every state of the trace.
std::vector<double> hull_volumes(const ExecutionTrace& trace);

/// Metrics for t = 0..length.
std::vector<RoundMetrics> round_metrics(const ExecutionTrace& trace);

/// Measured minimum broadcasting weight of round t (NaN without M(t)).
double measured_alpha(const ExecutionTrace& trace, int t);

// ---------------------------------------------------------------------------
// Verifiers

/// Row-stochastic weights supported on in-edges, non-expansion
/// (x_i(t) in P(t-1)) and validity (x_i(T) in P(0)).
ClaimReport verify_averaging(const ExecutionTrace& trace, double tol = 1e-12);

struct ContractionRound {
    int t = 0;
    double ratio = 0.0;
    double cap = 0.0;
    double alpha = 0.0;
};

struct ContractionReport {
    ClaimReport report;
    std::vector<ContractionRound> rounds;
};

/// vol(P(t)) / vol(P(t-1)) <= 1 - alpha_t^d on rounds with 1 <= |M(t)| <= d.
/// Rounds whose previous hull is degenerate at `degenerate_tol` are skipped.
/// Each round's tolerance is `tol` plus a round-off budget that grows as the
/// hull becomes thin relative to its coordinates.
ContractionReport verify_volume_contraction(const ExecutionTrace& trace, double tol = 1e-9,
                                            double degenerate_tol = 1e-8);

struct ConvergenceReport {
    ClaimReport report;
    double alpha = 0.0;
    double initial_volume = 0.0;
    /// ceil(alpha^-d ln(vol(P(0)) / eps)), or 0 when vol(P(0)) <= eps.
    int bound_round = 0;
    /// First round with vol(P(t)) <= eps, -1 if never.
    int first_round_below = -1;
};

/// vol(P(t)) <= eps for every t >= the bound round. Throws std::out_of_range
/// when the trace ends before the bound round and std::invalid_argument when
/// a round lacks a broadcasting set of size <= d.
ConvergenceReport verify_convergence_bound(const ExecutionTrace& trace, double eps);

/// The bound round for given alpha, d and volumes.
int convergence_bound_round(double alpha, int d, double initial_volume, double eps);

/// One-step thickness contraction under Pi_t, thickness monotonicity under
/// fixed projections, and validity of each Pi_t as an orthogonal projection.
/// Throws std::invalid_argument on a round without a broadcasting set.
ClaimReport verify_thickness_contraction(const ExecutionTrace& trace, double tol = 1e-9);

/// x_i(t) = alpha xi + (1 - alpha) xi' reconstruction, convexity certificates,
/// and Pi_t (xi_i - xi_j) = 0 for the parallel part of every difference.
ClaimReport verify_decomposition(const ExecutionTrace& trace, double tol = 1e-12);

/// dist(X(t), H) >= alpha_t dist(P_M(t-1), H) for random open half-spaces H
/// disjoint from X(t-1).
ClaimReport verify_halfspace_zone(const ExecutionTrace& trace, int trials, std::uint64_t seed, double tol = 1e-9);

struct SubspaceEstimate {
    int window = 0;
    /// Orthonormal basis (columns) of the estimated direction space.
    Matrix basis;
    Vector offset;
    int dim = 0;
    /// Max distance of the pooled points to offset + span(basis).
    double residual = 0.0;
    Vector singular_values;
};

/// Pools the last `window` states, centres them, and returns the smallest
/// dimension whose principal affine subspace is within `tol` of every pooled
/// point.
SubspaceEstimate estimate_limit_subspace(const ExecutionTrace& trace, int window, double tol);

/// estimate_limit_subspace dim <= max_dim.
ClaimReport verify_limit_subspace(const ExecutionTrace& trace, int window, double tol, int max_dim);

struct ImpossibilityReport {
    ClaimReport report;
    ExecutionTrace trace;
    /// Processes of the distinct source components whose values stay fixed.
    ProcessSet sources;
};

/// Runs `rule` on imposs_graph(n, s + 1) in R^(s+1) from the lower-bound
/// initial vectors and checks that the s + 2 source values stay constant and
/// span an (s + 1)-dimensional affine subspace in every round.
ImpossibilityReport verify_impossibility(int n, int s, int rounds,
                                         const WeightRule& rule = WeightRule::equal_neighbor());

/// Initial vectors of the lower-bound execution on g in R^k: e_i on processes
/// reaching the i-th source (i <= k), 0 on those reaching source k + 1, and
/// the barycentre elsewhere.
StateVector impossibility_initial_state(const CommGraph& g, int k, ProcessSet& sources);

/// Products of `length` random k-rooted graphs are k-broadcastable.
ClaimReport verify_rooted_products(int n, int k, int length, int trials, std::uint64_t seed,
                                   double extra_edge_prob = 0.15);

/// Random concave radius function on [0, h] sampled at `samples` + 1 points.
RadiusFunction random_concave_radius(double h, int samples, Rng& rng);

/// Segment volume bounds over random concave radius functions for d in
/// {1, 2, 3} and alpha in {0.25, 0.5, 0.75}, equality for r = h - xi, and the
/// chord bounds on random splits.
ClaimReport verify_segment_bounds(int trials, std::uint64_t seed);

}  // namespace subcon
