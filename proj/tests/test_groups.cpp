#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chg/groups.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace chg;
using namespace chg::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("word utilities") {
    CHECK(free_reduce(Word{1, 2, -2, -1}) == Word{});
    CHECK(free_reduce(Word{1, 2, -2, 3}) == Word{1, 3});
    CHECK(word_inverse(Word{1, -2, 3}) == Word{-3, 2, -1});
    CHECK(commutator_word(1, 2) == Word{1, 2, -1, -2});

    const GeneratorSystem sys = heisenberg_lattice(1);
    const Word w = parse_word(sys, "x1 y1^-1 t");
    CHECK(w == Word{1, -2, 3});
    CHECK(word_to_string(sys, w) == "x1 y1^-1 t");
    CHECK_THROWS_AS(parse_word(sys, "bogus"), Error);
}

TEST_CASE("heisenberg lattice presentation") {
    const GeneratorSystem sys = heisenberg_lattice(1);
    CHECK(sys.size() == 3);
    const auto report = relator_check(sys, 1e-9);
    CHECK(report.all_pass);
    CHECK(report.max_residual < 1e-12);

    // all generators are parabolic with a common boundary fixed point
    Vec fixed(2);
    fixed << 0, 1;
    const BoundaryPoint xi(fixed);
    for (const Isometry& g : sys.generators) {
        const auto cls = classify(g);
        CHECK(cls.type == IsometryType::Parabolic);
        CHECK(boundary_gauge(*cls.fixed_boundary, xi, Gauge::Koranyi) < 1e-5);
        CHECK(is_q_unitary(g.matrix()).ok);
    }

    // n = 2 lattice as well
    const GeneratorSystem sys2 = heisenberg_lattice(2);
    CHECK(sys2.size() == 5);
    CHECK(relator_check(sys2, 1e-9).all_pass);
}

TEST_CASE("broken system fails the relator check") {
    GeneratorSystem sys = heisenberg_lattice(1);
    sys.generators[0] = sys.generators[0] * boost(1e-3, sys.ball_dim());
    const auto report = relator_check(sys, 1e-9);
    CHECK(!report.all_pass);
    CHECK(report.max_residual > 1e-5);
}

TEST_CASE("dyck representation on a complex line") {
    const GeneratorSystem sys = dyck_rep(2, 3, 7);
    CHECK(sys.size() == 3);
    CHECK(sys.ball_dim() == 1);
    const auto report = relator_check(sys, 1e-9);
    CHECK(report.all_pass);

    // abc = 1 projectively
    const Mat abc = evaluate_word(sys, Word{1, 2, 3});
    CHECK(projective_distance(abc, Mat::Identity(2, 2)) < 1e-9);

    // generators are elliptic of the right orders
    CHECK(classify(sys.generators[0]).type == IsometryType::Elliptic);
    CHECK(classify(sys.generators[1]).type == IsometryType::Elliptic);
    CHECK(classify(sys.generators[2]).type == IsometryType::Elliptic);

    // placed triangle has the prescribed angles (hyperbolic trig oracle):
    // vertex positions recovered from the elliptic fixed points
    const BallPoint a_fix = *classify(sys.generators[0]).fixed_interior;
    const BallPoint b_fix = *classify(sys.generators[1]).fixed_interior;
    const BallPoint c_fix = *classify(sys.generators[2]).fixed_interior;
    const double ab = distance(a_fix, b_fix);
    const double bc = distance(b_fix, c_fix);
    const double ca = distance(c_fix, a_fix);
    // curvature -4 side lengths are half the curvature -1 ones; check the
    // hyperbolic law of cosines for the angle at A
    const double alpha = std::acos(
        (std::cosh(2 * ab) * std::cosh(2 * ca) - std::cosh(2 * bc)) /
        (std::sinh(2 * ab) * std::sinh(2 * ca)));
    CHECK(alpha == doctest::Approx(kPi / 2).epsilon(1e-7));

    // Gauss-Bonnet: angle sum = pi - area, area = pi(1 - 1/p - 1/q - 1/r)
    const double beta = std::acos(
        (std::cosh(2 * ab) * std::cosh(2 * bc) - std::cosh(2 * ca)) /
        (std::sinh(2 * ab) * std::sinh(2 * bc)));
    const double gamma = std::acos(
        (std::cosh(2 * bc) * std::cosh(2 * ca) - std::cosh(2 * ab)) /
        (std::sinh(2 * bc) * std::sinh(2 * ca)));
    CHECK(alpha + beta + gamma ==
          doctest::Approx(kPi * (1.0 / 2 + 1.0 / 3 + 1.0 / 7)).epsilon(1e-7));

    CHECK_THROWS_AS(dyck_rep(2, 3, 6), Error);   // Euclidean triple
    CHECK_THROWS_AS(dyck_rep(2, 2, 2), Error);
}

TEST_CASE("su11 system embedding") {
    const GeneratorSystem line = dyck_rep(2, 3, 7);
    const GeneratorSystem sys = embed_system_su11(line, 2);
    CHECK(sys.ball_dim() == 2);
    CHECK(sys.relators.empty());
    // generators stay elliptic and preserve the complex line z2 = 0
    for (const Isometry& g : sys.generators) {
        CHECK(classify(g).type == IsometryType::Elliptic);
        Vec w(2);
        w << 0.3, 0.0;
        const Vec img = g.apply(BallPoint(w)).coords();
        CHECK(std::abs(img(1)) < 1e-12);
    }
    // words that are relators evaluate to central complex reflections:
    // projectively nontrivial in PU(2,1) but fixing the line pointwise
    const Mat abc = evaluate_word(sys, Word{1, 2, 3});
    Vec p(3);
    p << 1.0, 0.2, 0.0;
    const Vec moved = abc * p;
    CHECK((moved / moved(0) - p).norm() < 1e-9);
}

TEST_CASE("dyck representation on a real plane") {
    const GeneratorSystem sys = dyck_rep_real(2, 3, 7);
    CHECK(relator_check(sys, 1e-9).all_pass);
    // preserves the real plane: real points map to real points
    const BallPoint x = real_plane_embed(0.3, -0.2, 2);
    for (const Isometry& g : sys.generators) {
        const Vec img = g.apply(x).coords();
        CHECK(std::abs(img(0).imag()) < 1e-12);
        CHECK(std::abs(img(1).imag()) < 1e-12);
    }
}

TEST_CASE("right-angled polygon circumradius") {
    for (int p : {5, 6, 8, 12}) {
        const double r = right_angled_polygon_circumradius(p);
        CHECK(std::cosh(r) == doctest::Approx(1.0 / std::tan(kPi / p)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(right_angled_polygon_circumradius(4), Error);
}

TEST_CASE("polygon group representation") {
    const GeneratorSystem sys = polygon_rep(6, 3);
    CHECK(sys.size() == 6);
    const auto report = relator_check(sys, 1e-9);
    CHECK(report.all_pass);

    // adjacent polars are Hermitian-orthogonal
    // (recovered through the reflection construction: the rank-one part
    // of g - I is supported on the polar direction)
    for (const Isometry& g : sys.generators) CHECK(is_q_unitary(g.matrix()).ok);

    // non-adjacent generators do not commute
    double worst = 1e30;
    for (int gap = 2; gap <= 4; ++gap) {
        const Word w = free_reduce(Word{1, 1 + gap, -1, -(1 + gap)});
        const double res = projective_distance(evaluate_word(sys, w), Mat::Identity(3, 3));
        worst = std::min(worst, res);
    }
    CHECK(worst > 0.1);

    CHECK_THROWS_AS(polygon_rep(4, 3), Error);
    CHECK_THROWS_AS(polygon_rep(6, 1), Error);
}

TEST_CASE("polygon adjacent polars are orthogonal") {
    // rebuild the polars directly from the construction data
    const int p = 6;
    const double radius = right_angled_polygon_circumradius(p);
    const double klein = std::tanh(radius);
    std::vector<Vec> lifts;
    for (int k = 0; k < p; ++k) {
        Vec lift(3);
        lift << 1.0, klein * std::cos(2 * kPi * k / p), klein * std::sin(2 * kPi * k / p);
        lifts.push_back(lift);
    }
    Mat j = Mat::Identity(3, 3);
    j(0, 0) = -1;
    auto polar_of = [&](int k) {
        Mat rows(2, 3);
        rows.row(0) = (j * lifts[k]).adjoint();
        rows.row(1) = (j * lifts[(k + 1) % p]).adjoint();
        Eigen::FullPivLU<Mat> lu(rows);
        lu.setThreshold(1e-10);
        return Vec(lu.kernel().col(0));
    };
    for (int k = 0; k < p; ++k) {
        const Vec w1 = polar_of(k);
        const Vec w2 = polar_of((k + 1) % p);
        CHECK(std::abs(form_inner(w1, w2)) / (w1.norm() * w2.norm()) < 1e-9);
        CHECK(form_q(w1) > 0.0);
    }
}

TEST_CASE("conjugation covariance of constructors") {
    std::mt19937_64 rng(211);
    // moderate conjugator: residuals amplify with cond(h)^2
    const Isometry h2 = random_elliptic(rng, 2) * boost(0.4, 2);
    for (const GeneratorSystem& sys : {polygon_rep(5, 3), heisenberg_lattice(1)}) {
        const GeneratorSystem conj = conjugate_system(sys, h2);
        CHECK(relator_check(conj, 1e-8).all_pass);
    }
    const Isometry h1 = random_elliptic(rng, 1) * boost(0.4, 1);
    const GeneratorSystem dconj = conjugate_system(dyck_rep(2, 3, 7), h1);
    CHECK(relator_check(dconj, 1e-8).all_pass);
}

TEST_CASE("schottky from powers") {
    const Isometry b1 = boost(1.0, 2, 0);
    const Isometry b2 = boost(1.0, 2, 1);
    const GeneratorSystem sys = schottky_from_powers({b1, b2}, 1);
    CHECK(sys.size() == 2);
    CHECK(sys.relators.empty());

    // power multiplies the translation length
    for (int t : {2, 5}) {
        const GeneratorSystem st = schottky_from_powers({b1, b2}, t);
        const auto cls = classify(st.generators[0]);
        CHECK(cls.type == IsometryType::Hyperbolic);
        CHECK(cls.translation_length == doctest::Approx(t * 1.0).epsilon(1e-9));
    }

    CHECK_THROWS_AS(schottky_from_powers({b1, b1}, 1), Error);  // shared axis
    CHECK_THROWS_AS(schottky_from_powers({Isometry::identity(2)}, 1), Error);
}

TEST_CASE("ping pong certificates") {
    const Isometry b1 = boost(1.0, 2, 0);
    const Isometry b2 = boost(1.0, 2, 1);
    const auto result = ping_pong_search({b1, b2}, 12, 256);
    REQUIRE(result.found);
    CHECK(result.certificate.margin > 0.0);
    CHECK(result.certificate.heuristic);
    CHECK(result.system.size() == 2);

    // empirically monotone: the next power passes with at least the margin
    const auto next = ping_pong_validate({b1, b2}, result.t0 + 1, 256);
    CHECK(next.margin >= result.certificate.margin);

    // near-tangent configuration fails at low powers
    const Isometry rot = [&] {
        Mat m = Mat::Identity(3, 3);
        m(2, 2) = std::exp(cplx(0, 0.05));
        Mat r = Mat::Identity(3, 3);
        const double th = 0.1;
        r(1, 1) = std::cos(th);
        r(1, 2) = -std::sin(th);
        r(2, 1) = std::sin(th);
        r(2, 2) = std::cos(th);
        return Isometry(r);
    }();
    const Isometry b3 = rot * b1 * rot.inverse();
    const auto tight = ping_pong_search({b1, b3}, 1, 128);
    CHECK(!tight.found);
    CHECK(tight.best_failed_margin <= 0.0);
}
