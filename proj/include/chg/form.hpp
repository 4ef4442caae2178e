#pragma once

// Pseudo-Hermitian linear algebra of signature (n,1): the form <.,.>,
// the light cone, projective lifts and the unit-ball chart.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace chg {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Scale-free tolerance deciding when q(x) of a unit-norm lift counts as zero.
inline constexpr double kNullTol = 1e-9;
// Residual bound for M*JM = J.
inline constexpr double kUnitaryTol = 1e-9;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class PointClass { Negative, Null, Positive };

// <z,w> = -z0*conj(w0) + sum_k z_k*conj(w_k); conjugate-linear in the
// second argument.
inline cplx form_inner(const Vec& x, const Vec& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("form_inner: dimension mismatch");
    cplx s = -x(0) * std::conj(y(0));
    for (Eigen::Index k = 1; k < x.size(); ++k) s += x(k) * std::conj(y(k));
    return s;
}

inline double form_q(const Vec& x) {
    double s = -std::norm(x(0));
    for (Eigen::Index k = 1; k < x.size(); ++k) s += std::norm(x(k));
    return s;
}

// The (n,1) form on C^{n+1}, fixed to the basis diag(-1,1,...,1).
struct FormSpace {
    int n;  // complex dimension of the ball

    explicit FormSpace(int ball_dim) : n(ball_dim) {
        if (n < 1) throw Error("FormSpace: n must be >= 1");
    }

    int dim() const { return n + 1; }

    Mat jmatrix() const {
        Mat j = Mat::Identity(dim(), dim());
        j(0, 0) = -1.0;
        return j;
    }

    cplx inner(const Vec& x, const Vec& y) const { return form_inner(x, y); }
    double q(const Vec& x) const { return form_q(x); }
};

// A point of P^n held as a canonically normalized lift: unit Euclidean
// norm, and the first coordinate of largest modulus made real positive.
// The normalization makes fingerprinting in the dynamics module
// deterministic.
class ProjectivePoint {
  public:
    explicit ProjectivePoint(Vec lift) : lift_(std::move(lift)) {
        const double nrm = lift_.norm();
        if (!(nrm > 0.0) || !lift_.allFinite())
            throw Error("ProjectivePoint: zero or non-finite lift");
        lift_ /= nrm;
        Eigen::Index pivot = 0;
        double best = std::abs(lift_(0));
        for (Eigen::Index k = 1; k < lift_.size(); ++k) {
            const double a = std::abs(lift_(k));
            if (a > best) {
                best = a;
                pivot = k;
            }
        }
        lift_ *= std::conj(lift_(pivot)) / best;
        // pivot entry is now real positive up to roundoff
        lift_(pivot) = cplx(std::abs(lift_(pivot)), 0.0);
    }

    const Vec& lift() const { return lift_; }
    int ball_dim() const { return static_cast<int>(lift_.size()) - 1; }
    double q() const { return form_q(lift_); }

    PointClass point_class() const {
        const double v = q();
        if (std::abs(v) < kNullTol) return PointClass::Null;
        return v < 0 ? PointClass::Negative : PointClass::Positive;
    }

  private:
    Vec lift_;
};

inline PointClass classify_point(const ProjectivePoint& p) { return p.point_class(); }

// Point of the open unit ball B^n (affine chart z0 = 1).
class BallPoint {
  public:
    explicit BallPoint(Vec z) : z_(std::move(z)) {
        if (!(z_.norm() < 1.0))
            throw Error("BallPoint: |z| must be < 1");
    }

    static BallPoint origin(int n) { return BallPoint(Vec::Zero(n)); }

    const Vec& coords() const { return z_; }
    int dim() const { return static_cast<int>(z_.size()); }

    Vec lift() const {
        Vec x(z_.size() + 1);
        x(0) = 1.0;
        x.tail(z_.size()) = z_;
        return x;
    }

  private:
    Vec z_;
};

// Point of the boundary sphere S^{2n-1}.
class BoundaryPoint {
  public:
    explicit BoundaryPoint(Vec xi) : xi_(std::move(xi)) {
        if (std::abs(xi_.norm() - 1.0) > kNullTol)
            throw Error("BoundaryPoint: |xi| must be 1");
    }

    // Radial projection of a nonzero vector onto the sphere.
    static BoundaryPoint project(const Vec& v) {
        const double nrm = v.norm();
        if (!(nrm > 0.0)) throw Error("BoundaryPoint::project: zero vector");
        return BoundaryPoint(v / nrm);
    }

    const Vec& coords() const { return xi_; }
    int dim() const { return static_cast<int>(xi_.size()); }

    Vec lift() const {
        Vec x(xi_.size() + 1);
        x(0) = 1.0;
        x.tail(xi_.size()) = xi_;
        return x;
    }

  private:
    Vec xi_;
};

struct ChartPoint {
    // exactly one of the two is meaningful, per cls
    PointClass cls;
    Vec z;  // affine coordinates lift_k/lift_0, k = 1..n

    bool inside() const { return cls == PointClass::Negative; }
    BallPoint ball() const { return BallPoint(z); }
    BoundaryPoint boundary() const { return BoundaryPoint(z); }
};

// Affine chart image of a negative or null projective point.
inline ChartPoint project_to_chart(const ProjectivePoint& p) {
    const PointClass cls = p.point_class();
    if (cls == PointClass::Positive)
        throw Error("project_to_chart: positive point has no chart image");
    const Vec& x = p.lift();
    if (std::abs(x(0)) == 0.0)
        throw Error("project_to_chart: vanishing first coordinate");
    Vec z = x.tail(x.size() - 1) / x(0);
    if (cls == PointClass::Null && z.norm() > 0.0) z /= z.norm();
    return ChartPoint{cls, std::move(z)};
}

// J-orthonormal frame with first column proportional to the given
// negative lift: columns m0,...,mn satisfy q(m0) = -1, q(mk) = 1 and
// pairwise <mi,mj> = 0, so the matrix lies in U(n,1).
inline Mat j_frame(const Vec& negative_lift) {
    const Eigen::Index d = negative_lift.size();
    if (form_q(negative_lift) >= 0.0)
        throw Error("j_frame: lift is not negative");
    Mat frame(d, d);
    frame.col(0) = negative_lift / std::sqrt(-form_q(negative_lift));
    Eigen::Index have = 1;
    for (Eigen::Index k = 0; k < d && have < d; ++k) {
        Vec v = Vec::Zero(d);
        v(k) = 1.0;
        // subtract components along the columns built so far
        v += form_inner(v, frame.col(0)) * frame.col(0);
        for (Eigen::Index j = 1; j < have; ++j)
            v -= form_inner(v, frame.col(j)) * frame.col(j);
        const double qv = form_q(v);
        if (qv < 1e-12) continue;  // degenerate direction, skip
        frame.col(have++) = v / std::sqrt(qv);
    }
    if (have != d) throw Error("j_frame: failed to complete frame");
    return frame;
}

}  // namespace chg
