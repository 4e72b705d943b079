#include "subcon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace subcon {

namespace {

bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    return true;
}

double point_scale(const PointSet& points) {
    const Eigen::RowVectorXd centroid = points.colwise().mean();
    return (points.rowwise() - centroid).rowwise().norm().maxCoeff();
}

// Relative tolerances of the facet enumeration.
constexpr double kFacetTol = 1e-11;
constexpr double kRankTol = 1e-12;

struct FacetFrame {
    Facet facet;
    /// Orthonormal basis of the facet hyperplane directions (d x (d-1)).
    Matrix tangent;
    Vector origin;
};

std::vector<FacetFrame> enumerate_facets(const PointSet& raw) {
    const int n = static_cast<int>(raw.rows());
    const int d = static_cast<int>(raw.cols());
    // Side tests on centred coordinates; offsets far from the origin would
    // otherwise swamp the tolerance on small hulls.
    const Vector centroid = raw.colwise().mean().transpose();
    const PointSet points = raw.rowwise() - centroid.transpose();
    const double scale = point_scale(points);
    const double tol = kFacetTol * std::max(scale, 1e-300);
    std::vector<FacetFrame> frames;
    if (n < d) return frames;

    std::vector<std::vector<bool>> seen;
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    do {
        const Vector origin = points.row(idx[0]).transpose();
        Matrix diffs(d - 1, d);
        for (int r = 1; r < d; ++r) diffs.row(r - 1) = points.row(idx[r]) - points.row(idx[0]);
        Eigen::JacobiSVD<Matrix> svd(diffs, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv.size() > 0 && sv(sv.size() - 1) <= kRankTol * std::max(sv(0), 1e-300)) continue;
        if (sv.size() > 0 && sv(0) <= kRankTol * scale) continue;

        Vector normal = svd.matrixV().col(d - 1);
        const Vector side = points * normal - Vector::Constant(n, normal.dot(origin));
        const double hi = side.maxCoeff();
        const double lo = side.minCoeff();
        if (hi > tol && lo < -tol) continue;
        if (hi > tol) normal = -normal;

        std::vector<bool> on(n, false);
        std::vector<int> members;
        for (int j = 0; j < n; ++j) {
            if (std::abs(side(j)) <= tol) {
                on[j] = true;
                members.push_back(j);
            }
        }
        if (std::find(seen.begin(), seen.end(), on) != seen.end()) continue;
        seen.push_back(on);

        FacetFrame frame;
        frame.facet.normal = normal;
        frame.facet.offset = normal.dot(origin) + normal.dot(centroid);
        frame.facet.members = std::move(members);
        frame.tangent = svd.matrixV().leftCols(d - 1);
        frame.origin = origin + centroid;
        frames.push_back(std::move(frame));
    } while (next_combination(idx, n));
    return frames;
}

double exact_volume(const PointSet& raw) {
    const int d = static_cast<int>(raw.cols());
    if (raw.rows() == 0) return 0.0;
    if (d == 1) return raw.maxCoeff() - raw.minCoeff();
    if (raw.rows() <= d || affine_dim(raw, kRankTol) < d) return 0.0;

    const PointSet points = raw.rowwise() - raw.colwise().mean();
    double volume = 0.0;
    for (const auto& frame : enumerate_facets(points)) {
        const double height = frame.facet.offset;
        PointSet sub(frame.facet.members.size(), d - 1);
        for (std::size_t m = 0; m < frame.facet.members.size(); ++m) {
            const Vector local = points.row(frame.facet.members[m]).transpose() - frame.origin;
            sub.row(m) = (frame.tangent.transpose() * local).transpose();
        }
        volume += height * exact_volume(sub) / d;
    }
    return volume;
}

}  // namespace

std::vector<Facet> hull_facets(const PointSet& points) {
    std::vector<Facet> facets;
    for (auto& frame : enumerate_facets(points)) facets.push_back(std::move(frame.facet));
    return facets;
}

double hull_volume_exact(const PointSet& points) { return exact_volume(points); }

HullVolume hull_volume_monte_carlo(const PointSet& points, int samples, std::uint64_t seed) {
    const int d = static_cast<int>(points.cols());
    if (samples < 1) throw std::invalid_argument("Monte Carlo volume needs at least one sample");
    if (points.rows() <= d || affine_dim(points, kRankTol) < d) return HullVolume{0.0, 0.0, false};

    const auto facets = hull_facets(points);
    const double tol = kFacetTol * point_scale(points);
    const Vector lo = points.colwise().minCoeff().transpose();
    const Vector hi = points.colwise().maxCoeff().transpose();
    const double box = (hi - lo).prod();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector z(d);
    long inside = 0;
    for (int s = 0; s < samples; ++s) {
        for (int c = 0; c < d; ++c) z(c) = lo(c) + (hi(c) - lo(c)) * unit(rng);
        const bool in = std::all_of(facets.begin(), facets.end(),
                                    [&](const Facet& f) { return f.normal.dot(z) <= f.offset + tol; });
        inside += in ? 1 : 0;
    }
    const double p = static_cast<double>(inside) / samples;
    return HullVolume{box * p, box * std::sqrt(p * (1.0 - p) / samples), false};
}

HullVolume hull_volume_estimate(const PointSet& points, int mc_samples, std::uint64_t seed) {
    if (points.cols() <= kExactVolumeMaxDim) return HullVolume{exact_volume(points), 0.0, true};
    return hull_volume_monte_carlo(points, mc_samples, seed);
}

double hull_volume(const PointSet& points) { return hull_volume_estimate(points).value; }

// ---------------------------------------------------------------------------

HalfSpace::HalfSpace(Vector q, Vector v) : q_(std::move(q)), v_(std::move(v)) {
    if (q_.size() != v_.size()) throw std::invalid_argument("half-space point and normal differ in dimension");
    if (!(v_.norm() > 0.0)) throw std::invalid_argument("half-space normal must be non-zero");
}

bool HalfSpace::contains(const Vector& z) const { return (z - q_).dot(v_) < 0.0; }

double HalfSpace::signed_distance(const Vector& z) const { return (z - q_).dot(v_) / v_.norm(); }

double dist_to_halfspace(const Vector& z, const HalfSpace& h) {
    if (h.contains(z)) throw std::domain_error("point lies inside the open half-space");
    return h.signed_distance(z);
}

double dist_to_halfspace(const PointSet& points, const HalfSpace& h) {
    // A linear functional attains its minimum over a polytope at a vertex.
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i) best = std::min(best, dist_to_halfspace(Vector(points.row(i).transpose()), h));
    return best;
}

HullProjection project_onto_hull(const Vector& z, const PointSet& points) {
    const int m = static_cast<int>(points.rows());
    if (m == 0) throw std::invalid_argument("project_onto_hull: empty point set");
    // Shifted so z = 0 and scaled to unit size: keeps the KKT blocks comparable.
    Matrix q = (points.rowwise() - z.transpose()).transpose();
    const double unit = std::sqrt(q.colwise().squaredNorm().maxCoeff());
    if (unit > 0.0) q /= unit;

    std::vector<int> active;
    std::vector<double> lambda;
    {
        Eigen::Index start = 0;
        q.colwise().squaredNorm().minCoeff(&start);
        active.push_back(static_cast<int>(start));
        lambda.push_back(1.0);
    }
    auto current = [&]() {
        Vector x = Vector::Zero(q.rows());
        for (std::size_t s = 0; s < active.size(); ++s) x += lambda[s] * q.col(active[s]);
        return x;
    };
    Vector x = current();
    constexpr double stop_tol = 1e-20;

    for (int major = 0; major < 10 * m + 100; ++major) {
        Eigen::Index j = 0;
        const double best = (x.transpose() * q).minCoeff(&j);
        if (x.squaredNorm() - best <= stop_tol) break;
        if (std::find(active.begin(), active.end(), j) != active.end()) break;
        active.push_back(static_cast<int>(j));
        lambda.push_back(0.0);

        for (int minor = 0; minor < 10 * m + 100; ++minor) {
            const int k = static_cast<int>(active.size());
            Matrix kkt = Matrix::Zero(k + 1, k + 1);
            for (int a = 0; a < k; ++a) {
                for (int b = 0; b < k; ++b) kkt(a, b) = q.col(active[a]).dot(q.col(active[b]));
                kkt(a, k) = kkt(k, a) = 1.0;
            }
            Vector rhs = Vector::Zero(k + 1);
            rhs(k) = 1.0;
            const Vector mu = kkt.completeOrthogonalDecomposition().solve(rhs).head(k);
            if (mu.minCoeff() > 1e-15) {
                for (int a = 0; a < k; ++a) lambda[a] = mu(a);
                break;
            }
            double theta = 1.0;
            int drop = -1;
            for (int a = 0; a < k; ++a) {
                if (mu(a) <= 1e-15) {
                    const double step = lambda[a] / (lambda[a] - mu(a));
                    if (step < theta) {
                        theta = step;
                        drop = a;
                    }
                }
            }
            for (int a = 0; a < k; ++a) lambda[a] = theta * mu(a) + (1.0 - theta) * lambda[a];
            if (drop >= 0) lambda[drop] = 0.0;
            for (int a = k - 1; a >= 0; --a) {
                if (lambda[a] <= 1e-15) {
                    active.erase(active.begin() + a);
                    lambda.erase(lambda.begin() + a);
                }
            }
            if (active.empty()) throw std::logic_error("project_onto_hull: active set collapsed");
        }
        x = current();
    }

    HullProjection result;
    result.coeffs = Vector::Zero(m);
    double total = 0.0;
    for (std::size_t s = 0; s < active.size(); ++s) total += lambda[s];
    for (std::size_t s = 0; s < active.size(); ++s) result.coeffs(active[s]) = lambda[s] / total;
    result.point = points.transpose() * result.coeffs;
    result.distance = (result.point - z).norm();
    return result;
}

// ---------------------------------------------------------------------------

OrthoProjection::OrthoProjection(Matrix p, double tol) : p_(std::move(p)) {
    if (p_.rows() != p_.cols()) throw std::invalid_argument("projection matrix must be square");
    if (symmetry_error() > tol) throw std::invalid_argument("projection matrix is not symmetric");
    if (idempotence_error() > tol) throw std::invalid_argument("projection matrix is not idempotent");
}

OrthoProjection OrthoProjection::identity(int d) { return OrthoProjection(Matrix::Identity(d, d)); }

OrthoProjection OrthoProjection::complement_of(const Matrix& basis) {
    const auto d = basis.rows();
    Matrix p = Matrix::Identity(d, d) - basis * basis.transpose();
    p = 0.5 * (p + p.transpose());
    return OrthoProjection(std::move(p));
}

int OrthoProjection::rank() const { return static_cast<int>(std::lround(p_.trace())); }

double OrthoProjection::idempotence_error() const { return (p_ * p_ - p_).cwiseAbs().maxCoeff(); }

double OrthoProjection::symmetry_error() const { return (p_ - p_.transpose()).cwiseAbs().maxCoeff(); }

Matrix direction_basis(const PointSet& points) {
    const auto d = points.cols();
    std::vector<Vector> basis;
    if (points.rows() < 2) return Matrix(d, 0);

    double largest = 0.0;
    for (Eigen::Index i = 1; i < points.rows(); ++i) largest = std::max(largest, (points.row(i) - points.row(0)).norm());
    const double drop_tol = 1e-10 * largest;

    for (Eigen::Index i = 1; i < points.rows() && static_cast<Eigen::Index>(basis.size()) < d; ++i) {
        Vector v = (points.row(i) - points.row(0)).transpose();
        // Two passes of modified Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b.dot(v) * b;
        const double norm = v.norm();
        if (norm > drop_tol && norm > 0.0) basis.push_back(v / norm);
    }
    Matrix out(d, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) out.col(c) = basis[c];
    return out;
}

OrthoProjection direction_projection(const PointSet& points) {
    if (points.rows() == 0) throw std::invalid_argument("direction_projection: empty point set");
    return OrthoProjection::complement_of(direction_basis(points));
}

double thickness(const PointSet& points, const OrthoProjection& p) {
    if (points.rows() == 0) throw std::invalid_argument("thickness: empty point set");
    const Matrix projected = points * p.matrix().transpose();
    double best = 0.0;
    for (Eigen::Index i = 0; i < projected.rows(); ++i)
        for (Eigen::Index j = i + 1; j < projected.rows(); ++j)
            best = std::max(best, (projected.row(i) - projected.row(j)).norm());
    return best;
}

double diameter(const PointSet& points) { return thickness(points, OrthoProjection::identity(static_cast<int>(points.cols()))); }

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

int affine_dim(const PointSet& points, double tol) {
    if (points.rows() == 0) throw std::invalid_argument("affine_dim: empty point set");
    if (!(tol > 0.0)) throw std::invalid_argument("affine_dim: tolerance must be positive");
    const Matrix centred = points.rowwise() - points.colwise().mean();
    const Vector sv = Eigen::JacobiSVD<Matrix>(centred).singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = tol * std::max(sv(0), 1.0);
    return static_cast<int>((sv.array() > cutoff).count());
}

double ball_coeff(int m) {
    if (m < 0) throw std::invalid_argument("ball_coeff: negative dimension");
    return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

// ---------------------------------------------------------------------------

bool is_discretely_concave(const std::vector<double>& xi, const std::vector<double>& r, double tol) {
    for (std::size_t i = 1; i + 1 < xi.size(); ++i) {
        const double left = (r[i] - r[i - 1]) / (xi[i] - xi[i - 1]);
        const double right = (r[i + 1] - r[i]) / (xi[i + 1] - xi[i]);
        if (right > left + tol * std::max(1.0, std::abs(left))) return false;
    }
    return true;
}

RadiusFunction::RadiusFunction(std::vector<double> xi, std::vector<double> r, double concavity_tol)
    : xi_(std::move(xi)), r_(std::move(r)) {
    if (xi_.size() != r_.size() || xi_.size() < 2) throw std::invalid_argument("radius function needs >= 2 samples");
    if (xi_.front() != 0.0) throw std::invalid_argument("radius samples must start at 0");
    for (std::size_t i = 1; i < xi_.size(); ++i)
        if (!(xi_[i] > xi_[i - 1])) throw std::invalid_argument("radius abscissae must be strictly increasing");
    for (double v : r_)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("radius values must be finite and >= 0");
    if (!is_discretely_concave(xi_, r_, concavity_tol)) throw std::invalid_argument("radius samples are not concave");
}

double RadiusFunction::operator()(double xi) const {
    if (xi <= xi_.front()) return r_.front();
    if (xi >= xi_.back()) return r_.back();
    const auto hi = std::upper_bound(xi_.begin(), xi_.end(), xi) - xi_.begin();
    const auto lo = hi - 1;
    const double w = (xi - xi_[lo]) / (xi_[hi] - xi_[lo]);
    return (1.0 - w) * r_[lo] + w * r_[hi];
}

SegmentVolumeBounds segment_volume_bounds(const RadiusFunction& r, double alpha, int d) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    const double h = r.length();
    const double split = (1.0 - alpha) * h;
    const double c = ball_coeff(d - 1);

    // Break points: the samples plus the split point.
    std::vector<double> nodes = r.abscissae();
    if (std::find(nodes.begin(), nodes.end(), split) == nodes.end()) {
        nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), split), split);
    }

    // Exact integral of C r^m over each linear piece:
    // (b - a) C sum_{k=0..m} ra^k rb^(m-k) / (m + 1).
    const int m = d - 1;
    SegmentVolumeBounds out;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i], b = nodes[i + 1];
        const double ra = r(a), rb = r(b);
        double sum = 0.0;
        for (int k = 0; k <= m; ++k) sum += std::pow(ra, k) * std::pow(rb, m - k);
        const double piece = (b - a) * c * sum / (m + 1);
        (b <= split ? out.left_integral : out.right_integral) += piece;
    }
    out.slack = 1e-12 * std::max(out.left_integral + out.right_integral, 1e-300);

    const double r0 = r(split);
    const double common = c * std::pow(r0, d - 1) * h / (std::pow(alpha, d - 1) * d);
    out.left_bound = common * (1.0 - std::pow(alpha, d));
    out.right_bound = common * std::pow(alpha, d);
    return out;
}

ChordCheck check_concave_chord(const RadiusFunction& r, double a, double b, double c, bool anchor_zero, double tol) {
    if (!(a < b && b < c)) throw std::invalid_argument("chord check needs a < b < c");
    const double rb = r(b);
    const double rc = anchor_zero ? 0.0 : r(c);
    auto chord = [&](double xi) { return (rb - rc) / (c - b) * (c - xi) + rc; };

    ChordCheck check;
    std::vector<double> probes = r.abscissae();
    probes.insert(probes.end(), {a, b, c});
    for (double xi : probes) {
        if (xi < a || xi > c) continue;
        const double slack = tol * std::max(1.0, std::abs(r(xi)));
        if (xi <= b && chord(xi) < r(xi) - slack) check.dominates_left = false;
        if (xi >= b && chord(xi) > r(xi) + slack) check.below_right = false;
    }
    return check;
}

}  // namespace subcon
