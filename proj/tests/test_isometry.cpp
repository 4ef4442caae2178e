#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chg/isometry.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace chg;
using namespace chg::testing;

namespace {

Mat diag3(cplx a, cplx b, cplx c) {
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
}

}  // namespace

TEST_CASE("q-unitarity check") {
    CHECK(is_q_unitary(Mat::Identity(3, 3)).ok);
    CHECK(is_q_unitary(Mat::Identity(3, 3)).residual == doctest::Approx(0.0));
    CHECK(is_q_unitary(diag3(std::exp(cplx(0, 0.8)), 1, 1)).ok);
    CHECK(!is_q_unitary(diag3(2, 1, 1)).ok);
    CHECK_THROWS_AS(Isometry(diag3(2, 1, 1)), Error);
}

TEST_CASE("apply preserves distance and class") {
    std::mt19937_64 rng(101);
    const Isometry id = Isometry::identity(2);
    const BallPoint p = random_ball_point(rng, 2);
    CHECK(distance(id.apply(p), p) < 1e-7);

    const double s = 0.9;
    const BallPoint img = boost(s, 2).apply(BallPoint::origin(2));
    CHECK(img.coords()(0).real() == doctest::Approx(std::tanh(s)));
    CHECK(std::abs(img.coords()(1)) < 1e-15);

    for (int trial = 0; trial < 100; ++trial) {
        const Isometry g = random_isometry(rng, 2);
        const BallPoint x = random_ball_point(rng, 2);
        const BallPoint y = random_ball_point(rng, 2);
        CHECK(std::abs(distance(g.apply(x), g.apply(y)) - distance(x, y)) < 1e-10);
        const ProjectivePoint pp(x.lift());
        CHECK(g.apply(pp).point_class() == pp.point_class());
    }
}

TEST_CASE("classify elliptic rotation") {
    const Isometry g(diag3(std::exp(cplx(0, 3.14159265358979323846 / 3.0)), 1, 1));
    const auto cls = classify(g);
    CHECK(cls.type == IsometryType::Elliptic);
    REQUIRE(cls.fixed_interior.has_value());
    CHECK(cls.fixed_interior->coords().norm() < 1e-9);
}

TEST_CASE("classify boost") {
    const double s = 0.8;
    const auto cls = classify(boost(s, 2));
    CHECK(cls.type == IsometryType::Hyperbolic);
    CHECK(cls.translation_length == doctest::Approx(s).epsilon(1e-10));
    REQUIRE(cls.attracting.has_value());
    REQUIRE(cls.repelling.has_value());
    CHECK(std::abs(cls.attracting->coords()(0) - cplx(1, 0)) < 1e-8);
    CHECK(std::abs(cls.repelling->coords()(0) - cplx(-1, 0)) < 1e-8);
    // fixed points are fixed
    const Isometry g = boost(s, 2);
    CHECK(boundary_gauge(g.apply(*cls.attracting), *cls.attracting, Gauge::Koranyi) < 1e-9);
    CHECK(boundary_gauge(g.apply(*cls.repelling), *cls.repelling, Gauge::Koranyi) < 1e-9);
}

TEST_CASE("classify heisenberg unipotent as parabolic") {
    Eigen::VectorXd a(1), b(1);
    a << 1.0;
    b << 0.0;
    const Isometry g = heisenberg_embed(a, b, 0.0);
    const auto cls = classify(g);
    CHECK(cls.type == IsometryType::Parabolic);
    REQUIRE(cls.fixed_boundary.has_value());
    // the designated fixed point of the embedding is (0, 1)
    CHECK(std::abs(cls.fixed_boundary->coords()(1) - cplx(1, 0)) < 1e-6);

    // central element too
    const Isometry t = heisenberg_embed(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), 1.0);
    CHECK(classify(t).type == IsometryType::Parabolic);
}

TEST_CASE("classify rejects the identity") {
    CHECK_THROWS_AS(classify(Isometry::identity(2)), Error);
}

TEST_CASE("displacement infimum") {
    CHECK(displacement_inf(Isometry::identity(2)).value < 1e-6);

    const auto hyp = displacement_inf(boost(0.7, 2));
    CHECK(hyp.value == doctest::Approx(0.7).epsilon(2e-4));
    CHECK(hyp.attained);

    Eigen::VectorXd a(1), b(1);
    a << 1.0;
    b << 0.0;
    const auto par = displacement_inf(heisenberg_embed(a, b, 0.0));
    CHECK(par.value <= 1e-2);
    CHECK(!par.attained);
}

TEST_CASE("classification agrees with the displacement oracle") {
    std::mt19937_64 rng(103);
    int hyperbolics = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Isometry g = random_isometry(rng, 2);
        if (g.is_identity()) continue;
        const auto cls = classify(g);
        const auto disp = displacement_inf(g);
        if (cls.type == IsometryType::Hyperbolic) {
            ++hyperbolics;
            CHECK(disp.value > 1e-2);
            CHECK(disp.attained);
            CHECK(std::abs(cls.translation_length - disp.value) < 1e-3);
        } else if (cls.type == IsometryType::Elliptic) {
            CHECK(disp.value < 1e-3);
        }
    }
    CHECK(hyperbolics > 5);  // the sampler produces mostly loxodromics
}

TEST_CASE("conjugation invariance") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const Isometry g = random_isometry(rng, 2);
        if (g.is_identity()) continue;
        const Isometry h = random_isometry(rng, 2);
        const Isometry conj = h * g * h.inverse();
        const auto c1 = classify(g);
        const auto c2 = classify(conj);
        CHECK(c1.type == c2.type);
        if (c1.type == IsometryType::Hyperbolic) {
            CHECK(std::abs(c1.translation_length - c2.translation_length) < 1e-8);
            // boundary fixed points are fixed (coordinate distance; the
            // Koranyi gauge would square-root the residual)
            CHECK(boundary_gauge(g.apply(*c1.attracting), *c1.attracting, Gauge::Chordal) <
                  1e-9);
            CHECK(boundary_gauge(g.apply(*c1.repelling), *c1.repelling, Gauge::Chordal) <
                  1e-9);
        }
        CHECK(zeta(g) == zeta(conj));
    }
}

TEST_CASE("complex reflection") {
    Vec w(3);
    w << 0, 0, 1;  // positive axis vector
    const Isometry r2 = complex_reflection(ProjectivePoint(w), 2);
    CHECK((r2.matrix() - diag3(1, 1, -1)).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(109);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int order : {2, 3, 5, 7}) {
        Vec polar(3);
        do {
            for (int k = 0; k < 3; ++k) polar(k) = cplx(gauss(rng), gauss(rng));
        } while (form_q(polar) < 0.1);
        const ProjectivePoint pp(polar);
        const Isometry refl = complex_reflection(pp, order);
        // fixes the orthogonal hyperplane pointwise
        for (int trial = 0; trial < 5; ++trial) {
            Vec v(3);
            for (int k = 0; k < 3; ++k) v(k) = cplx(gauss(rng), gauss(rng));
            const Vec perp =
                v - (form_inner(v, pp.lift()) / form_q(pp.lift())) * pp.lift();
            CHECK((refl.matrix() * perp - perp).norm() < 1e-10 * perp.norm());
        }
        // order relation
        Mat pw = Mat::Identity(3, 3);
        for (int k = 0; k < order; ++k) pw = pw * refl.matrix();
        CHECK(projective_distance(pw, Mat::Identity(3, 3)) < 1e-10);
        // elliptic with interior fixed points
        CHECK(classify(refl).type == IsometryType::Elliptic);
    }

    Vec neg(3);
    neg << 1, 0, 0;
    CHECK_THROWS_AS(complex_reflection(ProjectivePoint(neg), 2), Error);
    CHECK_THROWS_AS(complex_reflection(ProjectivePoint(w), 1), Error);
}

TEST_CASE("subgroup embeddings") {
    CHECK(embed_su11(Mat::Identity(2, 2), 3).is_identity());
    CHECK(embed_so21(Eigen::Matrix3d::Identity(), 2).is_identity());

    // heisenberg is a homomorphism on triples
    std::mt19937_64 rng(113);
    std::uniform_int_distribution<int> coeff(-3, 3);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::VectorXd a1(2), b1(2), a2(2), b2(2);
        for (int k = 0; k < 2; ++k) {
            a1(k) = coeff(rng);
            b1(k) = coeff(rng);
            a2(k) = coeff(rng);
            b2(k) = coeff(rng);
        }
        const double c1 = coeff(rng), c2 = coeff(rng);
        const Isometry lhs = heisenberg_embed(a1, b1, c1) * heisenberg_embed(a2, b2, c2);
        // triple product from the defining matrices
        const Eigen::MatrixXd prod =
            heisenberg_triple_matrix(a1, b1, c1) * heisenberg_triple_matrix(a2, b2, c2);
        const Eigen::VectorXd pa = prod.block(0, 1, 1, 2).transpose();
        const Eigen::VectorXd pb = prod.block(1, 3, 2, 1);
        const Isometry rhs = heisenberg_embed(pa, pb, prod(0, 3));
        CHECK((lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }

    // commutator [x1, y1] = t  (exact on the defining integer matrices)
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(1), zero = Eigen::VectorXd::Zero(1);
    e1(0) = 1.0;
    const Eigen::MatrixXd x = heisenberg_triple_matrix(e1, zero, 0.0);
    const Eigen::MatrixXd y = heisenberg_triple_matrix(zero, e1, 0.0);
    const Eigen::MatrixXd t = heisenberg_triple_matrix(zero, zero, 1.0);
    CHECK((x * y * x.inverse() * y.inverse() - t).cwiseAbs().maxCoeff() == 0.0);

    // and within 1e-12 on the embedded matrices
    const Isometry xe = heisenberg_embed(e1, zero, 0.0);
    const Isometry ye = heisenberg_embed(zero, e1, 0.0);
    const Isometry te = heisenberg_embed(zero, zero, 1.0);
    const Isometry comm = xe * ye * xe.inverse() * ye.inverse();
    CHECK((comm.matrix() - te.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    // the embedding fixes the designated boundary point (0, 1)
    Vec xi(2);
    xi << 0, 1;
    const BoundaryPoint fixed(xi);
    CHECK(boundary_gauge(xe.apply(fixed), fixed, Gauge::Koranyi) < 1e-12);
}

TEST_CASE("zeta values") {
    CHECK(zeta(Isometry::identity(2)) == 0);

    // every non-identity element has zeta >= 2
    std::mt19937_64 rng0(125);
    for (int trial = 0; trial < 20; ++trial) {
        const Isometry g = random_isometry(rng0, 2);
        if (g.is_identity()) continue;
        CHECK(zeta(g) >= 2);
    }

    Vec w(3);
    w << 0, 0, 1;
    const Isometry invol = complex_reflection(ProjectivePoint(w), 2);
    CHECK(zeta(invol) == 4);

    // regular semisimple: three distinct eigenvalue moduli/arguments
    CHECK(zeta(boost(1.1, 2)) == 6);
    const Isometry shifted = Isometry(diag3(1, 1, std::exp(cplx(0, 1.3)))) * boost(0.9, 2);
    CHECK(zeta(shifted) == 6);

    CHECK_THROWS_AS(zeta(Isometry::identity(3)), Error);
}

TEST_CASE("weil dimension count") {
    std::mt19937_64 rng(127);
    Vec w(3);
    w << cplx(0.1, 0.2), cplx(0.3, -0.1), 1.2;
    REQUIRE(form_q(w) > 0);
    const Isometry a = complex_reflection(ProjectivePoint(w), 2);
    CHECK(zeta(a) == 4);

    for (int trial = 0; trial < 10; ++trial) {
        const Isometry b = random_isometry(rng, 2);
        const Isometry c = (a * b).inverse();
        const int dim = weil_dimension(a, b, c);
        CHECK(dim == zeta(a) + zeta(b) + zeta(c) - 16);
        CHECK(dim <= 0);  // an involution input forces <= 4 + 12 - 16
    }

    for (int trial = 0; trial < 10; ++trial) {
        const Isometry g1 = random_boost(rng, 2);
        const Isometry g2 = random_boost(rng, 2);
        const Isometry g3 = (g1 * g2).inverse();
        if (zeta(g1) == 6 && zeta(g2) == 6 && zeta(g3) == 6)
            CHECK(weil_dimension(g1, g2, g3) == 2);
    }

    CHECK_THROWS_AS(weil_dimension(a, a, a), Error);
}

TEST_CASE("quasiconstant limits") {
    const Isometry g = isometry_power(boost(0.7, 2), 25);
    const auto lim = quasiconstant_limit(g);
    CHECK(std::abs(lim.attracting.coords()(0) - cplx(1, 0)) < 1e-6);
    CHECK(std::abs(lim.repelling.coords()(0) - cplx(-1, 0)) < 1e-6);

    // inverse swaps attractor and repeller
    const auto inv = quasiconstant_limit(g.inverse());
    CHECK(boundary_gauge(inv.attracting, lim.repelling, Gauge::Koranyi) < 1e-9);
    CHECK(boundary_gauge(inv.repelling, lim.attracting, Gauge::Koranyi) < 1e-9);

    // images of a scatter of ball points concentrate as the norm grows
    std::mt19937_64 rng(131);
    double spread_small = 0.0, spread_big = 0.0;
    const Isometry g1 = isometry_power(boost(0.7, 2), 8);
    const Isometry g2 = isometry_power(boost(0.7, 2), 18);
    Vec ref1 = g1.apply(BallPoint::origin(2)).coords();
    Vec ref2 = g2.apply(BallPoint::origin(2)).coords();
    for (int trial = 0; trial < 50; ++trial) {
        const BallPoint x = random_ball_point(rng, 2, 1.5);
        spread_small = std::max(spread_small, (g1.apply(x).coords() - ref1).norm());
        spread_big = std::max(spread_big, (g2.apply(x).coords() - ref2).norm());
    }
    CHECK(spread_big < spread_small);

    CHECK_THROWS_AS(quasiconstant_limit(boost(0.1, 2)), Error);
}
