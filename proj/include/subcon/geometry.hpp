#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace subcon {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Finite point set in R^d stored one point per row.
using PointSet = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Convex hull volume

struct HullVolume {
    double value = 0.0;
    /// Standard error of a Monte Carlo estimate; 0 when exact.
    double std_error = 0.0;
    bool exact = true;
};

/// Outward facet of a full-dimensional hull: <normal, x> <= offset for all
/// hull points, with equality on `members`.
struct Facet {
    Vector normal;
    double offset = 0.0;
    std::vector<int> members;
};

/// Largest dimension for which hull_volume is computed exactly.
inline constexpr int kExactVolumeMaxDim = 4;

/// Facets by enumerating d-subsets of points, so cost is C(n, d) per level.
/// The point set must be full-dimensional.
std::vector<Facet> hull_facets(const PointSet& points);

/// Exact volume by recursive cone decomposition over the facets. Any d.
double hull_volume_exact(const PointSet& points);

/// Monte Carlo estimate from uniform samples of the bounding box.
HullVolume hull_volume_monte_carlo(const PointSet& points, int samples, std::uint64_t seed);

/// Exact for d <= kExactVolumeMaxDim, Monte Carlo above.
HullVolume hull_volume_estimate(const PointSet& points, int mc_samples = 200000, std::uint64_t seed = 0);

/// d-dimensional volume of the convex hull (0 for degenerate hulls).
double hull_volume(const PointSet& points);

// ---------------------------------------------------------------------------
// Half-spaces and distances

/// Open half-space {h : <h - q, v> < 0}.
class HalfSpace {
public:
    HalfSpace(Vector q, Vector v);

    const Vector& point() const { return q_; }
    const Vector& normal() const { return v_; }
    bool contains(const Vector& z) const;
    /// <z - q, v> / |v|; non-negative exactly when z is outside.
    double signed_distance(const Vector& z) const;

private:
    Vector q_;
    Vector v_;
};

/// Distance from a point outside H to H. Throws std::domain_error if z lies in H.
double dist_to_halfspace(const Vector& z, const HalfSpace& h);

/// Distance from a point set (or its hull) disjoint from H to H.
double dist_to_halfspace(const PointSet& points, const HalfSpace& h);

struct HullProjection {
    Vector point;
    /// Convex coefficients over the rows of the point set.
    Vector coeffs;
    double distance = 0.0;
};

/// Closest point of conv(points) to z (Wolfe's minimum-norm-point method).
HullProjection project_onto_hull(const Vector& z, const PointSet& points);

// ---------------------------------------------------------------------------
// Projections and thickness

/// Symmetric idempotent d x d matrix.
class OrthoProjection {
public:
    /// Throws std::invalid_argument unless p is symmetric and idempotent
    /// within `tol`.
    explicit OrthoProjection(Matrix p, double tol = 1e-10);

    static OrthoProjection identity(int d);
    /// Projection onto span(basis)^perp for an orthonormal basis given as columns.
    static OrthoProjection complement_of(const Matrix& orthonormal_basis);

    const Matrix& matrix() const { return p_; }
    int dim() const { return static_cast<int>(p_.rows()); }
    /// Trace of the matrix, rounded.
    int rank() const;
    Vector apply(const Vector& x) const { return p_ * x; }

    double idempotence_error() const;
    double symmetry_error() const;

private:
    Matrix p_;
};

/// Orthonormal basis (columns) of dir(points) = span{x - y : x, y in points}.
Matrix direction_basis(const PointSet& points);

/// Orthogonal projection onto dir(points)^perp.
OrthoProjection direction_projection(const PointSet& points);

/// max over pairs of |p (x - y)|.
double thickness(const PointSet& points, const OrthoProjection& p);

double diameter(const PointSet& points);

/// Spectral norm.
double operator_norm(const Matrix& m);

/// Number of singular values of the centred points above
/// tol * max(largest singular value, 1).
int affine_dim(const PointSet& points, double tol = 1e-8);

/// Volume of the unit m-ball.
double ball_coeff(int m);

// ---------------------------------------------------------------------------
// Concave radius functions

/// Samples (xi, r(xi)) of a non-negative concave function on [0, h],
/// evaluated as their piecewise-linear interpolant.
class RadiusFunction {
public:
    /// Samples must be strictly increasing in xi, start at 0, end at h, and be
    /// discretely concave. Throws std::invalid_argument otherwise.
    RadiusFunction(std::vector<double> xi, std::vector<double> r, double concavity_tol = 1e-12);

    /// n + 1 samples of f on a uniform grid over [0, h].
    template <class F>
    static RadiusFunction sample(F&& f, double h, int n) {
        std::vector<double> xi(n + 1), r(n + 1);
        for (int i = 0; i <= n; ++i) {
            xi[i] = (i == n) ? h : h * i / n;
            r[i] = f(xi[i]);
        }
        return RadiusFunction(std::move(xi), std::move(r));
    }

    double length() const { return xi_.back(); }
    double operator()(double xi) const;
    const std::vector<double>& abscissae() const { return xi_; }
    const std::vector<double>& values() const { return r_; }

private:
    std::vector<double> xi_;
    std::vector<double> r_;
};

/// True when slopes between consecutive samples are non-increasing.
bool is_discretely_concave(const std::vector<double>& xi, const std::vector<double>& r, double tol = 1e-12);

struct SegmentVolumeBounds {
    double left_integral = 0.0;
    double left_bound = 0.0;
    double right_integral = 0.0;
    double right_bound = 0.0;
    /// Floating-point allowance applying to each comparison.
    double slack = 0.0;

    bool left_holds() const { return left_integral <= left_bound + slack; }
    bool right_holds() const { return right_integral >= right_bound - slack; }
};

/// Volumes of the rotational body of r (its piecewise-linear interpolant,
/// integrated exactly) cut at (1 - alpha) h, against the closed-form bounds
/// with r0 = r((1 - alpha) h).
SegmentVolumeBounds segment_volume_bounds(const RadiusFunction& r, double alpha, int d);

struct ChordCheck {
    /// The chord dominates r on [a, b].
    bool dominates_left = true;
    /// The chord stays below r on [b, c].
    bool below_right = true;
};

/// Checks the affine bounds through (b, r(b)) and either (c, r(c)) or, with
/// `anchor_zero`, (c, 0), at every sample in [a, c].
ChordCheck check_concave_chord(const RadiusFunction& r, double a, double b, double c, bool anchor_zero,
                               double tol = 1e-12);

}  // namespace subcon
