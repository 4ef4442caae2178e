#pragma once

// Metric geometry of the complex hyperbolic ball: distance, metric tensor,
// geodesics, Busemann functions, boundary gauges, support hyperplanes,
// totally geodesic embeddings and triangle slimness.
//
// Curvature normalization: the metric induced by the form has sectional
// curvature in [-4,-1]; complex lines carry the curvature -4 disk metric,
// real planes the curvature -1 Klein metric.

#include "chg/form.hpp"

#include <utility>

namespace chg {

// d(x,y) = arccosh sqrt( |<x,y>|^2 / (q(x) q(y)) ).
double distance(const BallPoint& x, const BallPoint& y);
double distance_lifts(const Vec& x, const Vec& y);

// Hermitian metric h at z, evaluated on ambient tangent vectors u, v in C^n
// (the chart z0 = 1 is affine, so tangent vectors are just n-vectors).
cplx metric_inner(const BallPoint& z, const Vec& u, const Vec& v);

inline double kahler_potential(const BallPoint& z) {
    return std::log(1.0 - z.coords().squaredNorm());
}

// n!/(2 pi^n) (1 - z.conj(w))^{-n-1}
cplx bergman_kernel(const BallPoint& z, const BallPoint& w);

// Complete geodesic through two distinct ideal points, unit-speed
// parametrized as [e^t xi + e^{-t} eta] with <xi,eta> = -1; t -> +inf
// approaches xi.
struct AnchoredGeodesic;

class Geodesic {
  public:
    Geodesic(const BoundaryPoint& xi, const BoundaryPoint& eta);

    // Oriented line through two distinct interior points plus the curve
    // parameters of x and y (param_x < param_y; forward endpoint on the
    // y side).
    static AnchoredGeodesic through(const BallPoint& x, const BallPoint& y);
    // Ray from an interior point toward an ideal point: the line together
    // with the parameter of the base point.
    static AnchoredGeodesic ray(const BallPoint& base, const BoundaryPoint& xi);

    BallPoint point(double t) const;
    Vec point_lift(double t) const { return std::exp(t) * xi_ + std::exp(-t) * eta_; }

    BoundaryPoint forward() const;   // t -> +infinity
    BoundaryPoint backward() const;  // t -> -infinity

    // Parameter of (the projection of) a lift lying on the line.
    double param_of(const Vec& lift) const;

    // Distance from an interior point to the sub-arc t in [t_lo, t_hi]
    // (use +-inf for the full line or a ray). Closed form.
    double distance_to(const BallPoint& p, double t_lo, double t_hi) const;

    const Vec& xi_lift() const { return xi_; }
    const Vec& eta_lift() const { return eta_; }

  private:
    Geodesic(Vec xi, Vec eta) : xi_(std::move(xi)), eta_(std::move(eta)) {}
    Vec xi_, eta_;  // null lifts, <xi,eta> = -1
};

struct AnchoredGeodesic {
    Geodesic line;
    double param_x;
    double param_y;
};

// U(n,1) matrix with first column proportional to the lift of x; its
// inverse is the transvection taking x to the origin.
Mat frame_at(const BallPoint& x);
Mat move_to_origin(const BallPoint& x);

// Chart action of a form-preserving matrix on an interior point.
BallPoint apply_chart(const Mat& m, const BallPoint& x);

// Unit-speed point at signed distance t from x toward y.
BallPoint geodesic_point(const BallPoint& x, const BallPoint& y, double t);

// Busemann function based at xi, normalized to vanish at origin o.
struct BusemannSpec {
    BoundaryPoint base;
    BallPoint origin;
};

double busemann(const BusemannSpec& spec, const BallPoint& x);
// Truncated defining limit d(x, r(T)) - d(o, r(T)) along the ray o->xi.
double busemann_limit_estimate(const BusemannSpec& spec, const BallPoint& x, double truncation);

// Projective hyperplane {<x, w> = 0} given by a polar lift w.
struct Hyperplane {
    ProjectivePoint polar;

    cplx value(const Vec& lift) const { return form_inner(lift, polar.lift()); }
};

// The complex support hyperplane P_xi: polar is the null lift of xi itself;
// the locus meets the closed ball exactly at xi.
Hyperplane support_hyperplane(const BoundaryPoint& xi);

enum class Gauge { Chordal, Koranyi };

// chordal = |xi - eta|; koranyi = |1 - xi.conj(eta)|^{1/2}. The Koranyi
// gauge is the computable bi-Lipschitz substitute for the Carnot metric
// (bi-Lipschitz equivalence preserves the dimensions measured downstream).
double boundary_gauge(const BoundaryPoint& xi, const BoundaryPoint& eta, Gauge kind);
double boundary_gauge(const Vec& xi, const Vec& eta, Gauge kind);

// Totally geodesic embeddings of model spaces into B^n.
// Real hyperbolic plane (curvature -1): Klein-disk coordinates u, |u| < 1,
// mapped to the real points (u1, u2, 0, ..., 0).
BallPoint real_plane_embed(double u1, double u2, int n);
// Complex hyperbolic k-slice (curvature -4 lines): w in B^k -> (w, 0,...,0).
BallPoint complex_slice_embed(const Vec& w, int n);

// Max over sampled points of each edge of the distance to the union of
// the other two edges (point-to-edge distances are closed-form); accurate
// up to the sampling step along the probed edge. The default resolution
// is 10^-3 of the edge length.
double slimness(const BallPoint& x, const BallPoint& y, const BallPoint& z,
                int samples = 1000);

// Numeric length of the geodesic segment from x to y by Simpson quadrature
// of the metric along geodesic_point samples; consistency oracle for
// distance().
double geodesic_length_numeric(const BallPoint& x, const BallPoint& y, int panels);

}  // namespace chg
