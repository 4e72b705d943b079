#include "subcon/dynamics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace subcon {

namespace {

constexpr std::uint64_t kRuleStream = 0x72756c65;  // "rule"

void normalise_rows(WeightMatrix& w) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) w.row(i) /= w.row(i).sum();
}

}  // namespace

std::string to_string(WeightRuleKind kind) {
    switch (kind) {
        case WeightRuleKind::EqualNeighbor: return "equal-neighbor";
        case WeightRuleKind::RandomAlphaSafe: return "random-alpha-safe";
        case WeightRuleKind::Custom: return "custom";
    }
    return "unknown";
}

WeightRuleKind parse_weight_rule_kind(const std::string& tag) {
    for (auto kind : {WeightRuleKind::EqualNeighbor, WeightRuleKind::RandomAlphaSafe, WeightRuleKind::Custom})
        if (to_string(kind) == tag) return kind;
    throw std::invalid_argument("unknown weight rule '" + tag + "'");
}

WeightMatrix weights_for(const WeightRule& rule, const ScheduledRound& round, Rng& rng) {
    const CommGraph& g = round.graph;
    const int n = g.size();
    WeightMatrix w = WeightMatrix::Zero(n, n);

    switch (rule.kind) {
        case WeightRuleKind::EqualNeighbor:
            for (Process i = 0; i < n; ++i) {
                const auto in = g.in_neighbors(i);
                for (Process j : in) w(i, j) = 1.0 / static_cast<double>(in.size());
            }
            normalise_rows(w);
            return w;

        case WeightRuleKind::RandomAlphaSafe: {
            if (!(rule.alpha > 0.0 && rule.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
            std::exponential_distribution<double> expo(1.0);
            for (Process i = 0; i < n; ++i) {
                const auto in = g.in_neighbors(i);
                const double residual = 1.0 - rule.alpha * static_cast<double>(in.size());
                if (residual < -1e-12) {
                    throw std::invalid_argument("alpha = " + std::to_string(rule.alpha) + " is infeasible: process " +
                                                std::to_string(i + 1) + " has " + std::to_string(in.size()) +
                                                " in-neighbours");
                }
                // Residual mass uniform on the simplex (normalised exponentials).
                std::vector<double> share(in.size());
                double total = 0.0;
                for (auto& s : share) total += (s = expo(rng));
                for (std::size_t a = 0; a < in.size(); ++a)
                    w(i, in[a]) = rule.alpha + std::max(residual, 0.0) * share[a] / total;
            }
            normalise_rows(w);
            return w;
        }

        case WeightRuleKind::Custom: {
            if (rule.tables.empty()) throw std::invalid_argument("custom weight rule without tables");
            const Matrix& table = rule.tables[static_cast<std::size_t>(round.t - 1) % rule.tables.size()];
            if (table.rows() != n || table.cols() != n) throw std::invalid_argument("custom weight table has wrong shape");
            if (!support_within(table, g)) {
                throw std::invalid_argument("custom weight table puts weight outside the round's in-edges in round " +
                                            std::to_string(round.t));
            }
            return table;
        }
    }
    throw std::logic_error("unhandled weight rule");
}

double row_sum_error(const WeightMatrix& w) {
    return (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

bool support_within(const WeightMatrix& w, const CommGraph& g) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (w(i, j) < 0.0) return false;
            if (w(i, j) > 0.0 && !g.has_edge(static_cast<Process>(j), static_cast<Process>(i))) return false;
        }
    }
    return true;
}

StateVector step(const StateVector& x, const WeightMatrix& w) {
    if (w.cols() != x.rows() || w.rows() != x.rows()) throw std::invalid_argument("step: weight/state shape mismatch");
    return w * x;
}

double min_broadcast_weight(const WeightMatrix& w, const ProcessSet& m_set) {
    if (m_set.empty()) throw std::invalid_argument("min_broadcast_weight: empty broadcasting set");
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        double mass = 0.0;
        for (Process j : m_set) mass += w(i, j);
        best = std::min(best, mass);
    }
    return best;
}

Decomposition decompose_update(const Vector& w_row, const StateVector& x, const ProcessSet& m_set, double alpha) {
    if (m_set.empty()) throw std::invalid_argument("decompose_update: empty broadcasting set");
    if (!(alpha > 0.0)) throw std::invalid_argument("decompose_update: alpha must be positive");
    const auto n = x.rows();
    if (w_row.size() != n) throw std::invalid_argument("decompose_update: weight row has wrong length");

    Vector in_m = Vector::Zero(n);
    for (Process j : m_set) in_m(j) = w_row(j);
    const double w_m = in_m.sum();
    if (alpha > w_m * (1.0 + 1e-12)) {
        throw std::invalid_argument("decompose_update: alpha exceeds the weight on the broadcasting set");
    }

    Decomposition out;
    out.alpha = alpha;
    out.broadcast_mass = w_m;
    out.xi_coeffs = in_m / w_m;

    // Non-broadcast average; coincides with xi when all weight is on M.
    Vector hat_coeffs = out.xi_coeffs;
    const double rest = 1.0 - w_m;
    if (rest > 0.0) {
        hat_coeffs = w_row - in_m;
        hat_coeffs /= hat_coeffs.sum();
    }

    if (alpha >= 1.0) {
        out.xi_prime_coeffs = out.xi_coeffs;
    } else {
        const double on_xi = std::max(w_m - alpha, 0.0) / (1.0 - alpha);
        const double on_hat = std::max(rest, 0.0) / (1.0 - alpha);
        out.xi_prime_coeffs = on_xi * out.xi_coeffs + on_hat * hat_coeffs;
        out.xi_prime_coeffs /= out.xi_prime_coeffs.sum();
    }
    out.xi = x.transpose() * out.xi_coeffs;
    out.xi_prime = x.transpose() * out.xi_prime_coeffs;
    return out;
}

void check_state(const StateVector& x, int n) {
    if (x.rows() != n) {
        throw std::invalid_argument("state has " + std::to_string(x.rows()) + " rows, expected " + std::to_string(n));
    }
    if (x.cols() < 1) throw std::invalid_argument("state dimension must be >= 1");
    if (!x.allFinite()) throw std::invalid_argument("state contains non-finite values");
}

ExecutionTrace run(const AdversarySpec& adversary, const WeightRule& rule, const StateVector& x0, int rounds,
                   int relay_rounds) {
    if (rounds < 1) throw std::invalid_argument("run: rounds must be >= 1");
    validate(adversary);
    check_state(x0, adversary.n);
    const RelaySchedule schedule(adversary, relay_rounds);

    ExecutionTrace trace;
    trace.n = adversary.n;
    trace.d = static_cast<int>(x0.cols());
    trace.relay_rounds = relay_rounds;
    trace.states.reserve(rounds + 1);
    trace.rounds.reserve(rounds);
    trace.states.push_back(x0);
    trace.initial_volume = hull_volume(x0);

    for (int t = 1; t <= rounds; ++t) {
        ScheduledRound round = schedule.macro_round(t);
        Rng rng = make_rng(adversary.seed, kRuleStream, static_cast<std::uint64_t>(t));
        WeightMatrix w = weights_for(rule, round, rng);
        trace.states.push_back(step(trace.states.back(), w));
        trace.rounds.push_back(RoundRecord{std::move(round), std::move(w)});
    }
    return trace;
}

}  // namespace subcon
