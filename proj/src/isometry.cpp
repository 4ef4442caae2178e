#include "chg/isometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace chg {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat jmat(Eigen::Index d) {
    Mat j = Mat::Identity(d, d);
    j(0, 0) = -1.0;
    return j;
}

}  // namespace

UnitaryCheck is_q_unitary(const Mat& m) {
    if (m.rows() != m.cols() || m.rows() < 2)
        throw Error("is_q_unitary: matrix must be square of size >= 2");
    const Mat j = jmat(m.rows());
    // relative residual: the roundoff in M*JM scales with |M|^2
    const double scale = std::max(1.0, m.squaredNorm());
    const double res = (m.adjoint() * j * m - j).cwiseAbs().maxCoeff() / scale;
    return UnitaryCheck{res < kUnitaryTol, res};
}

double projective_distance(const Mat& a, const Mat& b) {
    const Mat an = a / a.norm();
    const Mat bn = b / b.norm();
    const cplx overlap = (bn.adjoint() * an).trace();
    // explicit phase-aligned difference: sqrt(2 - 2|overlap|) would lose
    // the small-residual regime to cancellation
    const cplx phase = std::abs(overlap) < 1e-300 ? cplx(1, 0) : overlap / std::abs(overlap);
    return (an - phase * bn).norm();
}

Isometry::Isometry(Mat m) : m_(std::move(m)) {
    const auto check = is_q_unitary(m_);
    if (!check.ok)
        throw Error("Isometry: matrix does not preserve the form (residual " +
                    std::to_string(check.residual) + ")");
}

Isometry Isometry::identity(int ball_dim) {
    return Isometry(Mat::Identity(ball_dim + 1, ball_dim + 1));
}

Isometry Isometry::inverse() const {
    const Mat j = jmat(m_.rows());
    return Isometry(j * m_.adjoint() * j);
}

Isometry Isometry::operator*(const Isometry& rhs) const {
    return Isometry(m_ * rhs.m_);
}

ProjectivePoint Isometry::apply(const ProjectivePoint& p) const {
    return ProjectivePoint(m_ * p.lift());
}

BallPoint Isometry::apply(const BallPoint& x) const {
    const Vec img = m_ * x.lift();
    return BallPoint(img.tail(img.size() - 1) / img(0));
}

BoundaryPoint Isometry::apply(const BoundaryPoint& xi) const {
    const Vec img = m_ * xi.lift();
    return BoundaryPoint::project(img.tail(img.size() - 1) / img(0));
}

bool Isometry::is_identity(double tol) const {
    return projective_distance(m_, Mat::Identity(m_.rows(), m_.cols())) < tol;
}

namespace {

BoundaryPoint boundary_of_null_lift(const Vec& v) {
    Vec z = v.tail(v.size() - 1) / v(0);
    return BoundaryPoint::project(z);
}

// residual of xi under the chart action, in the Koranyi gauge
double boundary_fix_residual(const Mat& m, const BoundaryPoint& xi) {
    const Vec img = m * xi.lift();
    const BoundaryPoint moved = BoundaryPoint::project(img.tail(img.size() - 1) / img(0));
    return boundary_gauge(xi, moved, Gauge::Koranyi);
}

}  // namespace

namespace {

// right singular vector of M - lambda I for the smallest singular value;
// far more reliable than raw eigenvectors on defective (parabolic) input
Vec near_kernel_vector(const Mat& m, cplx lambda) {
    const Mat shifted = m - lambda * Mat::Identity(m.rows(), m.cols());
    Eigen::JacobiSVD<Mat> svd(shifted, Eigen::ComputeFullV);
    return svd.matrixV().col(m.rows() - 1);
}

// orthonormal basis of the right singular subspace of M - lambda I with
// singular values below the threshold (always at least one vector)
Mat near_kernel_basis(const Mat& m, cplx lambda, double threshold) {
    const Mat shifted = m - lambda * Mat::Identity(m.rows(), m.cols());
    Eigen::JacobiSVD<Mat> svd(shifted, Eigen::ComputeFullV);
    const auto& sing = svd.singularValues();
    Eigen::Index count = 1;
    for (Eigen::Index k = m.rows() - 2; k >= 0; --k) {
        if (sing(k) < threshold)
            ++count;
        else
            break;
    }
    return svd.matrixV().rightCols(count);
}

}  // namespace

ClassificationResult classify(const Isometry& g) {
    const Mat& m = g.matrix();
    const Eigen::Index d = m.rows();
    if (g.is_identity()) throw Error("classify: element is numerically the identity");

    Eigen::ComplexEigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("classify: eigensolver failed");
    const Vec vals = es.eigenvalues();

    Eigen::Index imax = 0, imin = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
        if (std::abs(vals(i)) > std::abs(vals(imax))) imax = i;
        if (std::abs(vals(i)) < std::abs(vals(imin))) imin = i;
    }
    const double spread = std::abs(vals(imax)) / std::abs(vals(imin));

    if (spread > 1.0 + kModulusBand) {
        Vec vplus = near_kernel_vector(m, vals(imax));
        Vec vminus = near_kernel_vector(m, vals(imin));
        const cplx pair = form_inner(vplus, vminus);
        // A genuine axis has two distinct null endpoints with a
        // nondegenerate pairing; a parabolic whose eigenvalues scattered
        // off the unit circle produces two copies of the same null line
        // and fails this test.
        if (std::abs(form_q(vplus)) < 1e-6 && std::abs(form_q(vminus)) < 1e-6 &&
            std::abs(pair) > 1e-6) {
            vplus *= -1.0 / pair;  // <v+,v-> = -1
            const Vec axis = vplus + vminus;
            ClassificationResult r;
            r.type = IsometryType::Hyperbolic;
            r.translation_length = distance_lifts(axis, m * axis);
            r.attracting = boundary_of_null_lift(near_kernel_vector(m, vals(imax)));
            r.repelling = boundary_of_null_lift(near_kernel_vector(m, vals(imin)));
            return r;
        }
    }

    // elliptic or parabolic: inspect the restriction of q to the
    // near-eigenspaces of each eigenvalue cluster
    std::vector<bool> used(d, false);
    std::optional<BallPoint> elliptic_fix;
    double most_negative = -1e-7;
    std::optional<BoundaryPoint> parabolic_fix;
    double best_null = 1e9;

    for (Eigen::Index i = 0; i < d; ++i) {
        if (used[i]) continue;
        used[i] = true;
        cplx center = vals(i);
        double radius = 0.0;
        std::vector<Eigen::Index> members{i};
        for (Eigen::Index k = i + 1; k < d; ++k) {
            if (!used[k] && std::abs(vals(k) - vals(i)) < 1e-5) {
                used[k] = true;
                members.push_back(k);
            }
        }
        if (members.size() > 1) {
            center = cplx(0, 0);
            for (Eigen::Index k : members) center += vals(k);
            center /= static_cast<double>(members.size());
            for (Eigen::Index k : members)
                radius = std::max(radius, std::abs(vals(k) - center));
        }
        const double threshold = std::max(1e-7, 4.0 * radius);
        const Mat basis = near_kernel_basis(m, center, threshold);
        const Mat gram = basis.adjoint() * jmat(d) * basis;
        Eigen::SelfAdjointEigenSolver<Mat> ges(gram);
        for (Eigen::Index c = 0; c < ges.eigenvalues().size(); ++c) {
            const double qn = ges.eigenvalues()(c);  // basis orthonormal: |dir| = 1
            const Vec dir = basis * ges.eigenvectors().col(c);
            if (qn < most_negative) {
                Vec z = dir.tail(d - 1) / dir(0);
                if (z.norm() < 1.0) {
                    BallPoint p{z};
                    if (distance(p, apply_chart(m, p)) < 1e-6) {
                        most_negative = qn;
                        elliptic_fix = std::move(p);
                    }
                }
            } else if (std::abs(qn) < 1e-4 && std::abs(qn) < best_null &&
                       std::abs(dir(0)) > 1e-8) {
                const Vec z = dir.tail(d - 1) / dir(0);
                if (z.norm() > 1e-8) {
                    BoundaryPoint cand = BoundaryPoint::project(z);
                    if (boundary_fix_residual(m, cand) < 1e-3) {
                        best_null = std::abs(qn);
                        parabolic_fix = std::move(cand);
                    }
                }
            }
        }
    }

    ClassificationResult r;
    if (elliptic_fix) {
        r.type = IsometryType::Elliptic;
        r.fixed_interior = std::move(elliptic_fix);
        return r;
    }
    if (!parabolic_fix)
        throw Error("classify: ill-conditioned eigenproblem, no verified fixed point");
    r.type = IsometryType::Parabolic;
    r.fixed_boundary = std::move(parabolic_fix);
    return r;
}

namespace {

// chart point from unconstrained coordinates via the radial tanh map
BallPoint unconstrained_to_ball(const Eigen::VectorXd& w) {
    const Eigen::Index n = w.size() / 2;
    Vec z(n);
    for (Eigen::Index k = 0; k < n; ++k) z(k) = cplx(w(2 * k), w(2 * k + 1));
    const double r = z.norm();
    if (r < 1e-14) return BallPoint(Vec::Zero(n));
    return BallPoint(z * (std::tanh(r) / r));
}

}  // namespace

DisplacementResult displacement_inf(const Isometry& g, const DisplacementBudget& budget) {
    const int n = g.ball_dim();
    const int dim = 2 * n;
    const Mat& m = g.matrix();

    auto objective = [&](const Eigen::VectorXd& w) {
        const BallPoint z = unconstrained_to_ball(w);
        const Vec lift = z.lift();
        return distance_lifts(lift, m * lift);
    };

    std::mt19937_64 rng(0x5eed0001u);  // fixed: results must be reproducible
    std::normal_distribution<double> gauss(0.0, 1.0);

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_w = Eigen::VectorXd::Zero(dim);
    bool converged = false;

    for (int start = 0; start < budget.restarts; ++start) {
        // Nelder-Mead from origin first, then from scattered points
        Eigen::VectorXd w0(dim);
        if (start == 0)
            w0.setZero();
        else
            for (int k = 0; k < dim; ++k) w0(k) = 0.8 * gauss(rng);

        std::vector<Eigen::VectorXd> simplex(dim + 1, w0);
        std::vector<double> fx(dim + 1);
        for (int k = 0; k < dim; ++k) simplex[k + 1](k) += 0.5;
        for (int k = 0; k <= dim; ++k) fx[k] = objective(simplex[k]);

        for (int it = 0; it < budget.max_iters; ++it) {
            std::vector<int> order(dim + 1);
            for (int k = 0; k <= dim; ++k) order[k] = k;
            std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
            std::vector<Eigen::VectorXd> s2(dim + 1);
            std::vector<double> f2(dim + 1);
            for (int k = 0; k <= dim; ++k) {
                s2[k] = simplex[order[k]];
                f2[k] = fx[order[k]];
            }
            simplex.swap(s2);
            fx.swap(f2);

            if (fx[dim] - fx[0] < budget.tol) {
                converged = true;
                break;
            }

            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
            for (int k = 0; k < dim; ++k) centroid += simplex[k];
            centroid /= dim;

            const Eigen::VectorXd refl = centroid + (centroid - simplex[dim]);
            const double frefl = objective(refl);
            if (frefl < fx[0]) {
                const Eigen::VectorXd exp_ = centroid + 2.0 * (centroid - simplex[dim]);
                const double fexp = objective(exp_);
                if (fexp < frefl) {
                    simplex[dim] = exp_;
                    fx[dim] = fexp;
                } else {
                    simplex[dim] = refl;
                    fx[dim] = frefl;
                }
            } else if (frefl < fx[dim - 1]) {
                simplex[dim] = refl;
                fx[dim] = frefl;
            } else {
                const Eigen::VectorXd contr = centroid + 0.5 * (simplex[dim] - centroid);
                const double fcontr = objective(contr);
                if (fcontr < fx[dim]) {
                    simplex[dim] = contr;
                    fx[dim] = fcontr;
                } else {
                    for (int k = 1; k <= dim; ++k) {
                        simplex[k] = simplex[0] + 0.5 * (simplex[k] - simplex[0]);
                        fx[k] = objective(simplex[k]);
                    }
                }
            }
        }

        for (int k = 0; k <= dim; ++k) {
            if (fx[k] < best) {
                best = fx[k];
                best_w = simplex[k];
            }
        }
    }

    const BallPoint argmin = unconstrained_to_ball(best_w);
    const bool attained = argmin.coords().norm() < 0.995;
    return DisplacementResult{best, attained, converged, argmin};
}

Isometry complex_reflection(const ProjectivePoint& polar, int order) {
    if (order < 2) throw Error("complex_reflection: order must be >= 2");
    const Vec& w = polar.lift();
    const double qw = form_q(w);
    if (qw <= kNullTol) throw Error("complex_reflection: polar must be positive");
    const Eigen::Index d = w.size();
    const cplx rot = std::exp(cplx(0.0, 2.0 * kPi / order)) - 1.0;
    // x -> x + rot * <x,w>/<w,w> * w, i.e. I + rot/q(w) * w (Jw)^*
    const Mat j = jmat(d);
    Mat m = Mat::Identity(d, d) + (rot / qw) * (w * (j * w).adjoint());
    return Isometry(std::move(m));
}

Isometry boost(double s, int ball_dim, int axis) {
    if (axis < 0 || axis >= ball_dim) throw Error("boost: axis out of range");
    const Eigen::Index d = ball_dim + 1;
    Mat m = Mat::Identity(d, d);
    m(0, 0) = std::cosh(s);
    m(0, axis + 1) = std::sinh(s);
    m(axis + 1, 0) = std::sinh(s);
    m(axis + 1, axis + 1) = std::cosh(s);
    return Isometry(std::move(m));
}

Isometry embed_su11(const Mat& m2, int ball_dim) {
    if (m2.rows() != 2 || m2.cols() != 2) throw Error("embed_su11: need a 2x2 matrix");
    Mat j2 = Mat::Identity(2, 2);
    j2(0, 0) = -1.0;
    if ((m2.adjoint() * j2 * m2 - j2).cwiseAbs().maxCoeff() > kUnitaryTol)
        throw Error("embed_su11: matrix is not in U(1,1)");
    const Eigen::Index d = ball_dim + 1;
    Mat m = Mat::Identity(d, d);
    m.topLeftCorner(2, 2) = m2;
    return Isometry(std::move(m));
}

Isometry embed_so21(const Eigen::Matrix3d& m3, int ball_dim) {
    if (ball_dim < 2) throw Error("embed_so21: needs ball_dim >= 2");
    Eigen::Matrix3d j3 = Eigen::Matrix3d::Identity();
    j3(0, 0) = -1.0;
    if ((m3.transpose() * j3 * m3 - j3).cwiseAbs().maxCoeff() > kUnitaryTol)
        throw Error("embed_so21: matrix is not in O(2,1)");
    const Eigen::Index d = ball_dim + 1;
    Mat m = Mat::Identity(d, d);
    m.topLeftCorner(3, 3) = m3.cast<cplx>();
    return Isometry(std::move(m));
}

Eigen::MatrixXd heisenberg_triple_matrix(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                         double c) {
    if (a.size() != b.size()) throw Error("heisenberg: a and b must have equal length");
    const Eigen::Index m = a.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m + 2, m + 2);
    h.block(0, 1, 1, m) = a.transpose();
    h.block(1, m + 1, m, 1) = b;
    h(0, m + 1) = c;
    return h;
}

Isometry heisenberg_embed(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double c) {
    if (a.size() != b.size()) throw Error("heisenberg_embed: a and b must have equal length");
    const Eigen::Index m = a.size();
    const Eigen::Index d = m + 2;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    // unipotent in the null basis of the corner form J2
    Eigen::RowVectorXcd alpha(m);
    for (Eigen::Index k = 0; k < m; ++k) alpha(k) = inv_sqrt2 * cplx(b(k), a(k));
    const cplx gamma(-0.25 * (a.squaredNorm() + b.squaredNorm()), 0.5 * (a.dot(b) - 2.0 * c));
    Mat nil = Mat::Identity(d, d);
    nil.block(0, 1, 1, m) = alpha;
    nil.block(1, d - 1, m, 1) = -alpha.adjoint();
    nil(0, d - 1) = gamma;

    // unitary change of basis T with T^* J2 T = diag(-1,1,...,1)
    Mat t = Mat::Zero(d, d);
    t(0, 0) = inv_sqrt2;
    t(d - 1, 0) = -inv_sqrt2;
    for (Eigen::Index k = 1; k <= m; ++k) t(k, k) = 1.0;
    t(0, d - 1) = inv_sqrt2;
    t(d - 1, d - 1) = inv_sqrt2;

    return Isometry(t.adjoint() * nil * t);
}

Mat su_normalize(const Mat& m) {
    const cplx det = m.determinant();
    const double r = std::abs(det);
    if (r < 1e-300) throw Error("su_normalize: singular matrix");
    const double theta = std::arg(det);
    const cplx root = std::pow(r, 1.0 / 3.0) * std::exp(cplx(0.0, theta / 3.0));
    return m / root;
}

namespace {

// orthonormal (under Re tr(A^*B)) basis of su(2,1)
std::vector<Mat> su21_basis() {
    auto e = [](int i, int j) {
        Mat m = Mat::Zero(3, 3);
        m(i, j) = 1.0;
        return m;
    };
    const cplx i1(0.0, 1.0);
    std::vector<Mat> raw;
    Mat d1 = Mat::Zero(3, 3);
    d1(0, 0) = i1;
    d1(1, 1) = -i1;
    raw.push_back(d1);
    Mat d2 = Mat::Zero(3, 3);
    d2(1, 1) = i1;
    d2(2, 2) = -i1;
    raw.push_back(d2);
    raw.push_back(e(1, 2) - e(2, 1));
    raw.push_back(i1 * (e(1, 2) + e(2, 1)));
    raw.push_back(e(0, 1) + e(1, 0));
    raw.push_back(i1 * e(0, 1) - i1 * e(1, 0));
    raw.push_back(e(0, 2) + e(2, 0));
    raw.push_back(i1 * e(0, 2) - i1 * e(2, 0));

    auto ip = [](const Mat& x, const Mat& y) { return (x.adjoint() * y).trace().real(); };
    std::vector<Mat> basis;
    for (Mat v : raw) {
        for (const Mat& u : basis) v -= ip(u, v) * u;
        v /= std::sqrt(ip(v, v));
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

int zeta(const Isometry& g) {
    if (g.ball_dim() != 2) throw Error("zeta: defined for PU(2,1) only");
    const Mat m = su_normalize(g.matrix());
    // invert the normalized matrix itself (J m* J); normalizing g^{-1}
    // separately can pick a mismatched cube-root branch
    const Mat j = jmat(3);
    const Mat minv = j * m.adjoint() * j;
    static const std::vector<Mat> basis = su21_basis();

    Eigen::MatrixXd ad(8, 8);
    auto ip = [](const Mat& x, const Mat& y) { return (x.adjoint() * y).trace().real(); };
    for (int b = 0; b < 8; ++b) {
        const Mat img = m * basis[b] * minv;
        for (int a = 0; a < 8; ++a) ad(a, b) = ip(basis[a], img);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ad - Eigen::MatrixXd::Identity(8, 8));
    int kernel = 0;
    for (int k = 0; k < 8; ++k)
        if (svd.singularValues()(k) < 1e-7) ++kernel;
    return 8 - kernel;
}

int weil_dimension(const Isometry& a, const Isometry& b, const Isometry& c) {
    const Mat prod = a.matrix() * b.matrix() * c.matrix();
    if (projective_distance(prod, Mat::Identity(prod.rows(), prod.cols())) > 1e-8)
        throw Error("weil_dimension: abc is not the identity");
    return zeta(a) + zeta(b) + zeta(c) - 16;
}

QuasiconstantLimit quasiconstant_limit(const Isometry& g, double norm_threshold) {
    const Mat& m = g.matrix();
    if (m.norm() <= norm_threshold)
        throw Error("quasiconstant_limit: norm below concentration threshold");

    auto attractor = [](const Mat& mm) {
        const Eigen::Index d = mm.rows();
        Vec v = Vec::Zero(d);
        v(0) = 1.0;
        Vec img = mm * v;
        if (img.norm() < 1e-2 * mm.norm()) {
            // e0 happens to be nearly annihilated; use a fixed generic
            // negative vector instead
            for (Eigen::Index k = 1; k < d; ++k)
                v(k) = cplx(0.3 / static_cast<double>(k), 0.17 / static_cast<double>(k + 1));
            v /= std::sqrt(-form_q(v));
            img = mm * v;
        }
        return BoundaryPoint::project(img.tail(d - 1) / img(0));
    };

    return QuasiconstantLimit{attractor(m), attractor(g.inverse().matrix())};
}

}  // namespace chg
