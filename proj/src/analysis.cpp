#include "subcon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace subcon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kZoneStream = 0x7a6f6e65;     // "zone"
constexpr std::uint64_t kProductStream = 0x70726f64;  // "prod"
constexpr std::uint64_t kRadiusStream = 0x72616469;   // "radi"

PointSet rows_of(const PointSet& x, const ProcessSet& set) {
    PointSet out(static_cast<Eigen::Index>(set.size()), x.cols());
    for (std::size_t r = 0; r < set.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(set[r]);
    return out;
}

double scale_of(const PointSet& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }

// Lower bound on the minimum width of the hull: the smallest singular value of
// the centred rows divided by sqrt(n).
double width_lower_bound(const PointSet& x) {
    const Matrix centred = x.rowwise() - x.colwise().mean();
    const Eigen::JacobiSVD<Matrix> svd(centred);
    return svd.singularValues().minCoeff() / std::sqrt(static_cast<double>(x.rows()));
}

// Round-off budget for vol(X(t)) / vol(X(t-1)). One averaging step perturbs
// each coordinate by about n * eps * scale; moving the vertices by delta moves
// a d-dimensional hull's volume by at most d (d + 1) delta / width relative.
double volume_ratio_rounding(const PointSet& prev, const PointSet& next, double ratio) {
    const int d = static_cast<int>(prev.cols());
    const double delta = static_cast<double>(prev.rows()) * std::numeric_limits<double>::epsilon() * scale_of(prev);
    const double w_prev = width_lower_bound(prev);
    const double w_next = width_lower_bound(next);
    if (!(w_prev > 0.0) || !(w_next > 0.0)) return 0.0;
    return ratio * d * (d + 1) * delta * (1.0 / w_prev + 1.0 / w_next);
}

}  // namespace

void ClaimReport::check(int round, double lhs, double rhs, double tol, std::string note) {
    const double margin = rhs - lhs;
    const bool pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + tol;
    records.push_back(CheckRecord{claim, round, lhs, rhs, margin, pass, std::move(note)});
}

std::size_t ClaimReport::violations() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.pass; }));
}

double ClaimReport::worst_margin() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : records) worst = std::min(worst, r.margin);
    return worst;
}

// ---------------------------------------------------------------------------

std::vector<double> hull_volumes(const ExecutionTrace& trace) {
    std::vector<double> volumes;
    volumes.reserve(trace.states.size());
    for (const auto& x : trace.states) volumes.push_back(hull_volume(x));
    return volumes;
}

double measured_alpha(const ExecutionTrace& trace, int t) {
    const auto& rec = trace.record(t);
    if (rec.round.m_set.empty()) return kNaN;
    return min_broadcast_weight(rec.weights, rec.round.m_set);
}

std::vector<RoundMetrics> round_metrics(const ExecutionTrace& trace) {
    std::vector<RoundMetrics> metrics;
    const auto volumes = hull_volumes(trace);
    for (int t = 0; t <= trace.length(); ++t) {
        RoundMetrics m;
        m.t = t;
        m.volume = volumes[t];
        m.affine_dim = affine_dim(trace.states[t]);
        m.min_broadcast_weight = t >= 1 ? measured_alpha(trace, t) : kNaN;
        // Pi_t is defined from X_M(t)(t-1); state 0 is measured against round 1.
        const int proj_round = std::max(t, 1);
        if (proj_round <= trace.length() && !trace.record(proj_round).round.m_set.empty()) {
            const auto p = direction_projection(rows_of(trace.before(proj_round), trace.record(proj_round).round.m_set));
            m.thickness = thickness(trace.states[t], p);
        } else {
            m.thickness = kNaN;
        }
        metrics.push_back(m);
    }
    return metrics;
}

// ---------------------------------------------------------------------------

ClaimReport verify_averaging(const ExecutionTrace& trace, double tol) {
    ClaimReport report{"averaging", {}, {}};
    for (int t = 1; t <= trace.length(); ++t) {
        const auto& rec = trace.record(t);
        report.check(t, row_sum_error(rec.weights), 0.0, tol, "row sums");
        report.check(t, support_within(rec.weights, rec.round.graph) ? 0.0 : 1.0, 0.0, 0.0, "support in in-edges");

        const auto& prev = trace.before(t);
        const double slack = 1e-9 * scale_of(prev);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < prev.rows(); ++i)
            worst = std::max(worst, project_onto_hull(trace.after(t).row(i).transpose(), prev).distance);
        report.check(t, worst, 0.0, slack, "non-expansion");
    }
    const auto& first = trace.states.front();
    const auto& last = trace.states.back();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < last.rows(); ++i)
        worst = std::max(worst, project_onto_hull(last.row(i).transpose(), first).distance);
    report.check(trace.length(), worst, 0.0, 1e-9 * scale_of(first), "validity");
    return report;
}

ContractionReport verify_volume_contraction(const ExecutionTrace& trace, double tol, double degenerate_tol) {
    ContractionReport out{{"lemma7", {}, {}}, {}};
    const int d = trace.d;
    if (d > kExactVolumeMaxDim) {
        out.report.skip(0, "volumes above dimension " + std::to_string(kExactVolumeMaxDim) + " are estimates");
        return out;
    }
    const auto volumes = hull_volumes(trace);
    for (int t = 1; t <= trace.length(); ++t) {
        const auto& m_set = trace.record(t).round.m_set;
        if (m_set.empty()) {
            out.report.skip(t, "no broadcasting set");
            continue;
        }
        if (static_cast<int>(m_set.size()) > d) {
            out.report.skip(t, "|M(t)| > d");
            continue;
        }
        if (volumes[t - 1] <= 0.0 || affine_dim(trace.before(t), degenerate_tol) < d) {
            out.report.skip(t, "already degenerate");
            continue;
        }
        const double alpha = measured_alpha(trace, t);
        const double ratio = volumes[t] / volumes[t - 1];
        const double cap = 1.0 - std::pow(alpha, d);
        const double rounding = volume_ratio_rounding(trace.before(t), trace.after(t), ratio);
        out.report.check(t, ratio, cap, tol + rounding, "volume ratio");
        out.rounds.push_back({t, ratio, cap, alpha});
    }
    return out;
}

int convergence_bound_round(double alpha, int d, double initial_volume, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (initial_volume <= eps) return 0;
    return static_cast<int>(std::ceil(std::pow(alpha, -d) * std::log(initial_volume / eps)));
}

ConvergenceReport verify_convergence_bound(const ExecutionTrace& trace, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    ConvergenceReport out;
    out.report.claim = "theorem3";
    double alpha = 1.0;
    for (int t = 1; t <= trace.length(); ++t) {
        const auto& m_set = trace.record(t).round.m_set;
        if (m_set.empty() || static_cast<int>(m_set.size()) > trace.d) {
            throw std::invalid_argument("round " + std::to_string(t) + " has no broadcasting set of size <= d");
        }
        alpha = std::min(alpha, measured_alpha(trace, t));
    }
    out.alpha = alpha;
    const auto volumes = hull_volumes(trace);
    out.initial_volume = volumes.front();
    out.bound_round = convergence_bound_round(alpha, trace.d, out.initial_volume, eps);
    if (out.bound_round > trace.length()) {
        throw std::out_of_range("trace has " + std::to_string(trace.length()) + " rounds, bound round is " +
                                std::to_string(out.bound_round));
    }
    for (int t = 0; t <= trace.length(); ++t) {
        if (out.first_round_below < 0 && volumes[t] <= eps) out.first_round_below = t;
        if (t >= out.bound_round) out.report.check(t, volumes[t], eps, 0.0, "volume after bound round");
    }
    return out;
}

ClaimReport verify_thickness_contraction(const ExecutionTrace& trace, double tol) {
    ClaimReport report{"lemma13", {}, {}};
    if (trace.length() == 0) return report;

    std::vector<OrthoProjection> fixed{OrthoProjection::identity(trace.d)};
    {
        const auto& m0 = trace.record(1).round.m_set;
        if (!m0.empty()) fixed.push_back(direction_projection(rows_of(trace.before(1), m0)));
        Matrix axis = Matrix::Zero(trace.d, trace.d);
        axis(0, 0) = 1.0;
        fixed.emplace_back(axis);
    }

    for (int t = 1; t <= trace.length(); ++t) {
        const auto& rec = trace.record(t);
        if (rec.round.m_set.empty()) {
            throw std::invalid_argument("round " + std::to_string(t) + " has no broadcasting set");
        }
        const auto& prev = trace.before(t);
        const auto& next = trace.after(t);
        const double alpha = measured_alpha(trace, t);
        const auto proj = direction_projection(rows_of(prev, rec.round.m_set));
        report.check(t, thickness(next, proj), (1.0 - alpha) * thickness(prev, proj), tol, "one-step contraction");
        report.check(t, std::max(proj.idempotence_error(), proj.symmetry_error()), 0.0, 1e-10, "projection validity");
        for (const auto& p : fixed) report.check(t, thickness(next, p), thickness(prev, p), tol, "monotone thickness");
    }
    return report;
}

ClaimReport verify_decomposition(const ExecutionTrace& trace, double tol) {
    ClaimReport report{"lemma9", {}, {}};
    for (int t = 1; t <= trace.length(); ++t) {
        const auto& rec = trace.record(t);
        if (rec.round.m_set.empty()) {
            report.skip(t, "no broadcasting set");
            continue;
        }
        const auto& prev = trace.before(t);
        const auto& next = trace.after(t);
        const double alpha = measured_alpha(trace, t);
        const double scale = scale_of(prev);
        const auto m_mask = to_mask(rec.round.m_set);

        std::vector<Vector> xis;
        double recon = 0.0, cert = 0.0;
        for (Eigen::Index i = 0; i < prev.rows(); ++i) {
            const auto dec = decompose_update(rec.weights.row(i).transpose(), prev, rec.round.m_set, alpha);
            recon = std::max(recon, (dec.reconstruction() - next.row(i).transpose()).cwiseAbs().maxCoeff());
            for (const Vector* c : {&dec.xi_coeffs, &dec.xi_prime_coeffs}) {
                cert = std::max(cert, std::abs(c->sum() - 1.0));
                cert = std::max(cert, std::max(0.0, -c->minCoeff()));
            }
            for (Eigen::Index j = 0; j < dec.xi_coeffs.size(); ++j)
                if (dec.xi_coeffs(j) != 0.0 && !(m_mask & (ProcessMask{1} << j))) cert = std::max(cert, 1.0);
            xis.push_back(dec.xi);
        }
        report.check(t, recon, 0.0, tol * scale, "reconstruction");
        report.check(t, cert, 0.0, tol, "convexity certificates");

        const auto proj = direction_projection(rows_of(prev, rec.round.m_set));
        double parallel = 0.0;
        for (std::size_t i = 0; i < xis.size(); ++i)
            for (std::size_t j = i + 1; j < xis.size(); ++j)
                parallel = std::max(parallel, proj.apply(xis[i] - xis[j]).norm());
        report.check(t, parallel, 0.0, 1e-10 * scale, "parallel part in dir(X_M)");
    }
    return report;
}

ClaimReport verify_halfspace_zone(const ExecutionTrace& trace, int trials, std::uint64_t seed, double tol) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    ClaimReport report{"lemma2", {}, {}};
    const int d = trace.d;
    for (int t = 1; t <= trace.length(); ++t) {
        const auto& rec = trace.record(t);
        if (rec.round.m_set.empty()) {
            report.skip(t, "no broadcasting set");
            continue;
        }
        const auto& prev = trace.before(t);
        const auto& next = trace.after(t);
        const PointSet broadcast = rows_of(prev, rec.round.m_set);
        const double alpha = measured_alpha(trace, t);
        const double sigma = 0.1 * std::max(diameter(prev), 1e-12);

        Rng rng = make_rng(seed, kZoneStream, static_cast<std::uint64_t>(t));
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int trial = 0; trial < trials; ++trial) {
            Vector u(d);
            do {
                for (int c = 0; c < d; ++c) u(c) = gauss(rng);
            } while (u.norm() < 1e-12);
            u.normalize();
            // Supporting hyperplane in direction u, pushed outward; the first
            // trial keeps it supporting.
            const double offset = (prev * u).maxCoeff() + (trial == 0 ? 0.0 : std::abs(sigma * gauss(rng)));
            const HalfSpace h(offset * u, -u);

            double to_next = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < next.rows(); ++i)
                to_next = std::min(to_next, h.signed_distance(next.row(i).transpose()));
            // The supporting trial touches X(t-1); rounding may put that vertex
            // a hair inside H.
            double to_broadcast = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < broadcast.rows(); ++i)
                to_broadcast = std::min(to_broadcast, h.signed_distance(broadcast.row(i).transpose()));
            to_broadcast = std::max(to_broadcast, 0.0);
            report.check(t, alpha * to_broadcast, to_next, tol * scale_of(prev), "half-space zone");
        }
    }
    return report;
}

SubspaceEstimate estimate_limit_subspace(const ExecutionTrace& trace, int window, double tol) {
    const int states = static_cast<int>(trace.states.size());
    if (window < 1 || window > states) {
        throw std::invalid_argument("window must lie in [1, " + std::to_string(states) + "]");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const int n = trace.n;
    PointSet pooled(static_cast<Eigen::Index>(window) * n, trace.d);
    for (int w = 0; w < window; ++w) pooled.middleRows(static_cast<Eigen::Index>(w) * n, n) = trace.states[states - window + w];

    SubspaceEstimate est;
    est.window = window;
    est.offset = pooled.colwise().mean().transpose();
    const Matrix centred = pooled.rowwise() - est.offset.transpose();
    Eigen::JacobiSVD<Matrix> svd(centred, Eigen::ComputeThinV);
    est.singular_values = svd.singularValues();
    const Matrix& v = svd.matrixV();

    for (int dim = 0; dim <= trace.d; ++dim) {
        const Matrix basis = v.leftCols(std::min<Eigen::Index>(dim, v.cols()));
        const Matrix residuals = centred - (centred * basis) * basis.transpose();
        const double residual = residuals.rows() ? residuals.rowwise().norm().maxCoeff() : 0.0;
        if (residual <= tol || dim == trace.d) {
            est.dim = dim;
            est.basis = basis;
            est.residual = residual;
            break;
        }
    }
    return est;
}

ClaimReport verify_limit_subspace(const ExecutionTrace& trace, int window, double tol, int max_dim) {
    ClaimReport report{"theorem4", {}, {}};
    const auto est = estimate_limit_subspace(trace, window, tol);
    report.check(trace.length(), est.dim, max_dim, 0.0, "limit subspace dimension");
    report.check(trace.length(), est.residual, tol, 0.0, "limit subspace residual");
    return report;
}

StateVector impossibility_initial_state(const CommGraph& g, int k, ProcessSet& sources) {
    const RootReport roots = root_report(g);
    if (roots.source_scc_count < k + 1) {
        throw std::invalid_argument("graph has fewer than k + 1 source components");
    }
    const int n = g.size();
    sources.assign(roots.root_witness.begin(), roots.root_witness.begin() + (k + 1));

    StateVector x = StateVector::Constant(n, k, 1.0 / (k + 1));
    for (int c = 0; c <= k; ++c) {
        Vector value = Vector::Zero(k);
        if (c < k) value(c) = 1.0;
        // A_c: processes that reach source c.
        for (Process j = 0; j < n; ++j)
            if (reachable_from(g, ProcessMask{1} << j) & (ProcessMask{1} << sources[c])) x.row(j) = value.transpose();
    }
    return x;
}

ImpossibilityReport verify_impossibility(int n, int s, int rounds, const WeightRule& rule) {
    if (s < 0 || n < s + 2) throw std::invalid_argument("verify_impossibility needs n >= s + 2");
    const int k = s + 1;
    AdversarySpec spec;
    spec.n = n;
    spec.kind = AdversaryKind::Static;
    spec.graphs = {imposs_graph(n, k)};

    ImpossibilityReport out;
    out.report.claim = "theorem2";
    const StateVector x0 = impossibility_initial_state(spec.graphs.front(), k, out.sources);
    out.trace = run(spec, rule, x0, rounds);

    const PointSet initial = rows_of(x0, out.sources);
    out.report.check(0, k + 1, root_report(spec.graphs.front()).source_scc_count, 0.0, "source components");
    for (int t = 0; t <= out.trace.length(); ++t) {
        const PointSet values = rows_of(out.trace.states[t], out.sources);
        const double drift = (values - initial).cwiseAbs().maxCoeff();
        out.report.check(t, drift, 0.0, 0.0, "source values constant");
        out.report.check(t, k, affine_dim(values), 0.0, "source values span dimension s + 1");
    }
    return out;
}

ClaimReport verify_rooted_products(int n, int k, int length, int trials, std::uint64_t seed, double extra_edge_prob) {
    if (length < 1 || trials < 1) throw std::invalid_argument("length and trials must be >= 1");
    ClaimReport report{"theorem1", {}, {}};
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = make_rng(seed, kProductStream, static_cast<std::uint64_t>(trial));
        CommGraph product = sample_k_rooted(n, k, rng, extra_edge_prob);
        for (int r = 1; r < length; ++r) product = compose(product, sample_k_rooted(n, k, rng, extra_edge_prob));
        const auto found = find_broadcasting_set(product, k);
        const double size = found.empty() ? broadcast_report(product).min_size : static_cast<double>(found.size());
        report.check(trial, size, k, 0.0, "product of " + std::to_string(length) + " rooted graphs");
    }
    return report;
}

RadiusFunction random_concave_radius(double h, int samples, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int shape = std::uniform_int_distribution<int>(0, 2)(rng);
    if (shape == 0) {
        // Minimum of lines that are positive at both ends.
        const int lines = std::uniform_int_distribution<int>(1, 4)(rng);
        std::vector<std::pair<double, double>> ends(lines);
        for (auto& e : ends) e = {0.05 + 2.0 * unit(rng), 0.05 + 2.0 * unit(rng)};
        return RadiusFunction::sample(
            [&](double xi) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& [a, b] : ends) best = std::min(best, a + (b - a) * xi / h);
                return best;
            },
            h, samples);
    }
    if (shape == 1) {
        // Power p <= 1 of the concave parabola xi (h - xi), plus a constant.
        const double p = 0.2 + 0.8 * unit(rng);
        const double amp = 0.1 + 2.0 * unit(rng);
        const double base = unit(rng);
        return RadiusFunction::sample(
            [&](double xi) { return base + amp * std::pow(std::max(xi * (h - xi), 0.0) / (h * h), p); }, h, samples);
    }
    const double c = 0.1 + 2.0 * unit(rng);
    return RadiusFunction::sample([&](double) { return c; }, h, samples);
}

ClaimReport verify_segment_bounds(int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    ClaimReport report{"lemma6", {}, {}};
    const double alphas[] = {0.25, 0.5, 0.75};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = make_rng(seed, kRadiusStream, static_cast<std::uint64_t>(trial));
        const double h = 0.5 + 3.0 * unit(rng);
        const RadiusFunction r = random_concave_radius(h, 400, rng);
        for (int d = 1; d <= 3; ++d) {
            for (double alpha : alphas) {
                const auto b = segment_volume_bounds(r, alpha, d);
                report.check(trial, b.left_integral, b.left_bound, b.slack, "left segment upper bound");
                report.check(trial, b.right_bound, b.right_integral, b.slack, "right segment lower bound");
            }
        }
        const double split_b = h * (0.1 + 0.8 * unit(rng));
        const double split_c = split_b + (h - split_b) * (0.1 + 0.9 * unit(rng));
        for (bool zero : {false, true}) {
            const auto chord = check_concave_chord(r, 0.0, split_b, split_c, zero);
            report.check(trial, chord.dominates_left ? 0.0 : 1.0, 0.0, 0.0, zero ? "zero chord above on [a,b]" : "chord above on [a,b]");
            report.check(trial, chord.below_right ? 0.0 : 1.0, 0.0, 0.0, zero ? "zero chord below on [b,c]" : "chord below on [b,c]");
        }
    }
    // r(xi) = h - xi meets both bounds with equality.
    for (int d = 1; d <= 3; ++d) {
        for (double alpha : alphas) {
            const double h = 2.0;
            const auto r = RadiusFunction::sample([&](double xi) { return h - xi; }, h, 400);
            const auto b = segment_volume_bounds(r, alpha, d);
            report.check(-1, std::abs(b.left_integral - b.left_bound), 0.0, b.slack, "extremal left equality");
            report.check(-1, std::abs(b.right_integral - b.right_bound), 0.0, b.slack, "extremal right equality");
        }
    }
    return report;
}

}  // namespace subcon
