#pragma once

#include <string>
#include <vector>

#include "subcon/adversary.hpp"
#include "subcon/geometry.hpp"

namespace subcon {

/// Process outputs x_1..x_n in R^d, one per row.
using StateVector = PointSet;

/// Row-stochastic averaging weights; entry (i, j) is the weight process i
/// puts on the value received from j.
using WeightMatrix = Matrix;

enum class WeightRuleKind { EqualNeighbor, RandomAlphaSafe, Custom };

std::string to_string(WeightRuleKind kind);
WeightRuleKind parse_weight_rule_kind(const std::string& tag);

struct WeightRule {
    WeightRuleKind kind = WeightRuleKind::EqualNeighbor;
    /// Guaranteed weight per received value for RandomAlphaSafe.
    double alpha = 0.0;
    /// Tables for Custom, used cyclically by round. Rows are not normalised.
    std::vector<Matrix> tables;

    static WeightRule equal_neighbor() { return {}; }
    static WeightRule random_alpha_safe(double alpha) { return {WeightRuleKind::RandomAlphaSafe, alpha, {}}; }
    static WeightRule custom(std::vector<Matrix> tables) { return {WeightRuleKind::Custom, 0.0, std::move(tables)}; }
};

/// Weights of one round. Throws std::invalid_argument when alpha exceeds
/// 1 / max_i |In_i(t)| or a custom table puts weight outside the in-edges.
WeightMatrix weights_for(const WeightRule& rule, const ScheduledRound& round, Rng& rng);

/// max_i |sum_j w_ij - 1|
double row_sum_error(const WeightMatrix& w);
/// True when w_ij > 0 only for edges (j, i) of g and all entries are >= 0.
bool support_within(const WeightMatrix& w, const CommGraph& g);

/// x'_i = sum_j w_ij x_j
StateVector step(const StateVector& x, const WeightMatrix& w);

/// min_i sum_{j in m_set} w_ij. Throws std::invalid_argument for an empty set.
double min_broadcast_weight(const WeightMatrix& w, const ProcessSet& m_set);

/// x_i(t) = alpha * xi + (1 - alpha) * xi_prime with xi in the hull of the
/// broadcasting set's values and xi_prime in the hull of all values.
struct Decomposition {
    Vector xi;
    Vector xi_prime;
    /// Convex coefficients over processes, supported on m_set.
    Vector xi_coeffs;
    Vector xi_prime_coeffs;
    double broadcast_mass = 0.0;
    double alpha = 0.0;

    Vector reconstruction() const { return alpha * xi + (1.0 - alpha) * xi_prime; }
};

/// Throws std::invalid_argument if alpha <= 0, alpha exceeds the row's mass on
/// m_set, or m_set is empty.
Decomposition decompose_update(const Vector& w_row, const StateVector& x, const ProcessSet& m_set, double alpha);

struct RoundRecord {
    ScheduledRound round;
    WeightMatrix weights;
};

struct ExecutionTrace {
    int n = 0;
    int d = 0;
    int relay_rounds = 1;
    /// states[t] is X(t); states.size() == rounds.size() + 1.
    std::vector<StateVector> states;
    /// rounds[t - 1] produced states[t] from states[t - 1].
    std::vector<RoundRecord> rounds;
    double initial_volume = 0.0;

    int length() const { return static_cast<int>(rounds.size()); }
    const StateVector& before(int t) const { return states.at(t - 1); }
    const StateVector& after(int t) const { return states.at(t); }
    const RoundRecord& record(int t) const { return rounds.at(t - 1); }
};

/// Executes `rounds` averaging rounds. With relay_rounds > 1 every round uses
/// the product of relay_rounds consecutive adversary graphs.
ExecutionTrace run(const AdversarySpec& adversary, const WeightRule& rule, const StateVector& x0, int rounds,
                   int relay_rounds = 1);

/// Throws std::invalid_argument unless x has n rows, d >= 1 and finite entries.
void check_state(const StateVector& x, int n);

}  // namespace subcon
