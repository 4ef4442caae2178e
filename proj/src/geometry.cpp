#include "chg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chg {

namespace {

constexpr double kPi = 3.14159265358979323846;

double acosh_clamped(double c) { return std::acosh(std::max(1.0, c)); }

}  // namespace

double distance_lifts(const Vec& x, const Vec& y) {
    const double qx = form_q(x);
    const double qy = form_q(y);
    if (qx >= 0.0 || qy >= 0.0)
        throw Error("distance: point on or outside the boundary");
    const double num = std::norm(form_inner(x, y));
    return acosh_clamped(std::sqrt(num / (qx * qy)));
}

double distance(const BallPoint& x, const BallPoint& y) {
    return distance_lifts(x.lift(), y.lift());
}

cplx metric_inner(const BallPoint& z, const Vec& u, const Vec& v) {
    if (u.size() != z.dim() || v.size() != z.dim())
        throw Error("metric_inner: tangent dimension mismatch");
    const Vec x = z.lift();
    Vec uu = Vec::Zero(x.size());
    uu.tail(u.size()) = u;
    Vec vv = Vec::Zero(x.size());
    vv.tail(v.size()) = v;
    const cplx qx = form_inner(x, x);
    // first fundamental form of the chart: restrict the form to x-perp and
    // divide by -q(x)
    return (qx * form_inner(uu, vv) - form_inner(uu, x) * form_inner(x, vv)) / (-qx * qx);
}

cplx bergman_kernel(const BallPoint& z, const BallPoint& w) {
    const int n = z.dim();
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    const cplx dot = z.coords().dot(w.coords());  // conj in second slot? dot() conjugates *this
    // Eigen's a.dot(b) = conj(a).b; we want z.conj(w)
    const cplx zw = std::conj(dot);
    return fact / (2.0 * std::pow(kPi, n)) * std::pow(cplx(1.0, 0.0) - zw, -(n + 1.0));
}

Geodesic::Geodesic(const BoundaryPoint& xi, const BoundaryPoint& eta) {
    Vec a = xi.lift();
    Vec b = eta.lift();
    const cplx s = form_inner(a, b);
    if (std::abs(s) < 1e-14) throw Error("Geodesic: coincident endpoints");
    a *= -1.0 / s;  // now <a,b> = -1
    xi_ = std::move(a);
    eta_ = std::move(b);
}

AnchoredGeodesic Geodesic::through(const BallPoint& x, const BallPoint& y) {
    Vec xl = x.lift();
    Vec yl = y.lift();
    cplx s0 = form_inner(xl, yl);
    // rotate y's lift so the pairing is real negative; the pencil
    // x + mu * y then meets the null cone at two real mu
    yl *= std::conj(-std::abs(s0) / s0);
    const double s = -std::abs(s0);
    const double a = form_q(yl);
    const double b = 2.0 * s;
    const double c = form_q(xl);
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) throw Error("Geodesic::through: coincident points");
    const double r = std::sqrt(disc);
    const double mu1 = (-b + r) / (2.0 * a);  // more negative (a < 0)
    const double mu2 = (-b - r) / (2.0 * a);
    const double mu_fwd = std::min(mu1, mu2);
    const double mu_bwd = std::max(mu1, mu2);
    Vec xi = xl + mu_fwd * yl;
    Vec eta = xl + mu_bwd * yl;
    const cplx pair = form_inner(xi, eta);
    xi *= -1.0 / pair;
    Geodesic g(std::move(xi), std::move(eta));
    return AnchoredGeodesic{g, g.param_of(xl), g.param_of(yl)};
}

AnchoredGeodesic Geodesic::ray(const BallPoint& base, const BoundaryPoint& xi) {
    Vec xl = base.lift();
    Vec fl = xi.lift();
    cplx s0 = form_inner(xl, fl);
    if (std::abs(s0) < 1e-14) throw Error("Geodesic::ray: degenerate data");
    fl *= std::conj(-std::abs(s0) / s0);
    const double s = -std::abs(s0);
    // q(x + mu f) = q(x) + 2 mu s, zero at the backward endpoint
    const double mu = -form_q(xl) / (2.0 * s);
    Vec eta = xl + mu * fl;
    const cplx pair = form_inner(fl, eta);
    Vec xi_lift = fl * (-1.0 / pair);
    Geodesic g(std::move(xi_lift), std::move(eta));
    const double t0 = g.param_of(xl);
    return AnchoredGeodesic{g, t0, t0};
}

BallPoint Geodesic::point(double t) const {
    const Vec lift = point_lift(t);
    return BallPoint(lift.tail(lift.size() - 1) / lift(0));
}

BoundaryPoint Geodesic::forward() const {
    Vec z = xi_.tail(xi_.size() - 1) / xi_(0);
    return BoundaryPoint::project(z);
}

BoundaryPoint Geodesic::backward() const {
    Vec z = eta_.tail(eta_.size() - 1) / eta_(0);
    return BoundaryPoint::project(z);
}

double Geodesic::param_of(const Vec& lift) const {
    const double num = std::abs(form_inner(lift, eta_));
    const double den = std::abs(form_inner(lift, xi_));
    if (num == 0.0 || den == 0.0) throw Error("Geodesic::param_of: lift at an endpoint");
    return 0.5 * std::log(num / den);
}

double Geodesic::distance_to(const BallPoint& p, double t_lo, double t_hi) const {
    const Vec pl = p.lift();
    const cplx a = form_inner(xi_, pl);
    const cplx b = form_inner(eta_, pl);
    const double qp = form_q(pl);
    const double aa = std::abs(a);
    const double bb = std::abs(b);
    double t = 0.5 * std::log(bb / aa);  // unconstrained minimizer
    t = std::clamp(t, t_lo, t_hi);
    const double e = std::exp(t);
    const double num = aa * aa * e * e + bb * bb / (e * e) + 2.0 * (a * std::conj(b)).real();
    return acosh_clamped(std::sqrt(num / (-2.0 * qp)));
}

Mat frame_at(const BallPoint& x) { return j_frame(x.lift()); }

Mat move_to_origin(const BallPoint& x) {
    const Mat f = frame_at(x);
    // inverse of a J-unitary matrix: J f^* J
    const Eigen::Index d = f.rows();
    Mat j = Mat::Identity(d, d);
    j(0, 0) = -1.0;
    return j * f.adjoint() * j;
}

BallPoint apply_chart(const Mat& m, const BallPoint& x) {
    const Vec img = m * x.lift();
    return BallPoint(img.tail(img.size() - 1) / img(0));
}

BallPoint geodesic_point(const BallPoint& x, const BallPoint& y, double t) {
    const Mat to0 = move_to_origin(x);
    const Mat back = frame_at(x);
    const Vec yl = to0 * y.lift();
    Vec w = yl.tail(yl.size() - 1) / yl(0);
    const double wn = w.norm();
    if (wn < 1e-15) throw Error("geodesic_point: coincident points");
    w /= wn;
    const Vec z = std::tanh(t) * w;
    Vec lift(z.size() + 1);
    lift(0) = 1.0;
    lift.tail(z.size()) = z;
    const Vec img = back * lift;
    return BallPoint(img.tail(img.size() - 1) / img(0));
}

double busemann(const BusemannSpec& spec, const BallPoint& x) {
    const Vec xl = x.lift();
    const Vec ol = spec.origin.lift();
    const Vec fl = spec.base.lift();
    const double num = std::norm(form_inner(xl, fl)) * (-form_q(ol));
    const double den = (-form_q(xl)) * std::norm(form_inner(ol, fl));
    return 0.5 * std::log(num / den);
}

double busemann_limit_estimate(const BusemannSpec& spec, const BallPoint& x, double truncation) {
    const auto ray = Geodesic::ray(spec.origin, spec.base);
    // evaluate through lifts: the chart coordinates of r(t) degenerate for
    // large t, the lift e^t xi + e^{-t} eta does not
    const double t = ray.param_x + truncation;
    return ray.line.distance_to(x, t, t) - truncation;
}

Hyperplane support_hyperplane(const BoundaryPoint& xi) {
    ProjectivePoint polar(xi.lift());
    if (polar.point_class() != PointClass::Null)
        throw Error("support_hyperplane: polar is not null");
    return Hyperplane{std::move(polar)};
}

double boundary_gauge(const Vec& xi, const Vec& eta, Gauge kind) {
    if (kind == Gauge::Chordal) return (xi - eta).norm();
    const cplx dot = std::conj(xi.dot(eta));  // xi . conj(eta)
    return std::sqrt(std::abs(cplx(1.0, 0.0) - dot));
}

double boundary_gauge(const BoundaryPoint& xi, const BoundaryPoint& eta, Gauge kind) {
    return boundary_gauge(xi.coords(), eta.coords(), kind);
}

BallPoint real_plane_embed(double u1, double u2, int n) {
    if (n < 2) throw Error("real_plane_embed: needs n >= 2");
    Vec z = Vec::Zero(n);
    z(0) = u1;
    z(1) = u2;
    return BallPoint(std::move(z));
}

BallPoint complex_slice_embed(const Vec& w, int n) {
    if (w.size() > n) throw Error("complex_slice_embed: slice dimension exceeds n");
    Vec z = Vec::Zero(n);
    z.head(w.size()) = w;
    return BallPoint(std::move(z));
}

namespace {

struct Edge {
    Geodesic line;
    double t0, t1;
};

Edge make_edge(const BallPoint& a, const BallPoint& b) {
    auto tp = Geodesic::through(a, b);
    return Edge{tp.line, tp.param_x, tp.param_y};
}

}  // namespace

double slimness(const BallPoint& x, const BallPoint& y, const BallPoint& z, int samples) {
    if (samples < 2) throw Error("slimness: need at least 2 samples per edge");
    const double dxy = distance(x, y), dyz = distance(y, z), dzx = distance(z, x);
    const double tiny = 1e-12;
    if (dxy < tiny || dyz < tiny || dzx < tiny) return 0.0;

    const Edge exy = make_edge(x, y), eyz = make_edge(y, z), ezx = make_edge(z, x);
    const Edge* edges[3] = {&exy, &eyz, &ezx};

    double worst = 0.0;
    for (int e = 0; e < 3; ++e) {
        const Edge& cur = *edges[e];
        const Edge& o1 = *edges[(e + 1) % 3];
        const Edge& o2 = *edges[(e + 2) % 3];
        for (int i = 0; i <= samples; ++i) {
            const double t = cur.t0 + (cur.t1 - cur.t0) * i / samples;
            const BallPoint p = cur.line.point(t);
            const double d = std::min(o1.line.distance_to(p, o1.t0, o1.t1),
                                      o2.line.distance_to(p, o2.t0, o2.t1));
            worst = std::max(worst, d);
        }
    }
    return worst;
}

double geodesic_length_numeric(const BallPoint& x, const BallPoint& y, int panels) {
    const double len = distance(x, y);
    if (panels < 2) throw Error("geodesic_length_numeric: need >= 2 panels");
    if (panels % 2 != 0) ++panels;
    const double h = len / panels;
    const double dh = 1e-5;
    auto speed = [&](double t) {
        const Vec fwd = geodesic_point(x, y, t + dh).coords();
        const Vec bwd = geodesic_point(x, y, t - dh).coords();
        const Vec vel = (fwd - bwd) / (2.0 * dh);
        const BallPoint p = geodesic_point(x, y, t);
        return std::sqrt(metric_inner(p, vel, vel).real());
    };
    double sum = speed(0.0) + speed(len);
    for (int i = 1; i < panels; ++i) sum += speed(i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace chg
