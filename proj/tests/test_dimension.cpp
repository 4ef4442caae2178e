#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chg/dimension.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace chg;
using namespace chg::testing;

namespace {

GeneratorSystem cyclic_boost(double len = 1.0) {
    GeneratorSystem sys;
    sys.labels = {"g"};
    sys.generators = {boost(len, 2)};
    return sys;
}

}  // namespace

TEST_CASE("poincare partial sums") {
    GeneratorSystem only_id;
    only_id.labels = {"e"};
    only_id.generators = {Isometry::identity(2)};
    const OrbitIndex trivial = enumerate_ball(only_id, 3);
    CHECK(poincare_partial(trivial, 0.7) == doctest::Approx(1.0));

    const OrbitIndex cyc = enumerate_ball(cyclic_boost(), 30);
    CHECK(poincare_partial(cyc, 0.0) == doctest::Approx(61.0));
    double expect = 1.0;
    for (int k = 1; k <= 30; ++k) expect += 2.0 * std::exp(-static_cast<double>(k));
    CHECK(poincare_partial(cyc, 1.0) == doctest::Approx(expect).epsilon(1e-6));

    // strictly decreasing in s
    double prev = poincare_partial(cyc, 0.0);
    for (double s : {0.3, 0.8, 1.5, 3.0}) {
        const double v = poincare_partial(cyc, s);
        CHECK(v < prev);
        prev = v;
    }
    // nondecreasing under index inclusion
    const OrbitIndex small = enumerate_ball(cyclic_boost(), 10);
    CHECK(poincare_partial(small, 0.5) < poincare_partial(cyc, 0.5));

    CHECK_THROWS_AS(poincare_partial(cyc, -1.0), Error);
}

TEST_CASE("entropy estimate on linear growth is near zero") {
    const OrbitIndex cyc = enumerate_ball(cyclic_boost(), 55);
    std::vector<double> grid;
    for (int i = 1; i <= 64; ++i) grid.push_back(55.0 * i / 64.0);
    const OrbitCounts counts = orbit_counts(cyc, grid);
    const auto est = entropy_estimate(counts, default_window(counts), 2);
    CHECK(est.delta < 0.05);
    CHECK(est.method == "growth-regression");

    OrbitCounts tiny;
    tiny.radii = {1.0, 2.0};
    tiny.counts = {1, 2};
    CHECK_THROWS_AS(entropy_estimate(tiny, Window{0.0, 3.0}, 2), Error);
}

TEST_CASE("entropy estimate is stable under conjugation") {
    const GeneratorSystem sys = dyck_rep_real(2, 3, 7);
    std::mt19937_64 rng(401);
    const Isometry h = random_elliptic(rng, 2) * boost(0.3, 2);
    const GeneratorSystem conj = conjugate_system(sys, h);
    ExponentBudget b;
    b.max_elements = 60'000;
    const double d1 = critical_exponent(sys, b).delta;
    const double d2 = critical_exponent(conj, b).delta;
    CHECK(std::abs(d1 - d2) < 0.05);
}

TEST_CASE("critical exponent targets") {
    ExponentBudget b;
    b.max_elements = 120'000;

    const auto cyc = critical_exponent(cyclic_boost(), b);
    CHECK(cyc.delta <= 0.05);

    const auto real_f = critical_exponent(dyck_rep_real(2, 3, 7), b);
    CHECK(real_f.delta == doctest::Approx(1.0).epsilon(0.15));

    const auto cx_f = critical_exponent(dyck_rep(2, 3, 7), b);
    CHECK(cx_f.delta == doctest::Approx(2.0).epsilon(0.12));
    // the Poincare transition bracket lands near the regression value
    CHECK(std::abs(0.5 * (cx_f.bracket_lo + cx_f.bracket_hi) - cx_f.delta) < 0.15);

    const auto s3 = critical_exponent(
        schottky_from_powers({boost(1.0, 2, 0), boost(1.0, 2, 1)}, 3), b);
    const auto s8 = critical_exponent(
        schottky_from_powers({boost(1.0, 2, 0), boost(1.0, 2, 1)}, 8), b);
    CHECK(s8.delta < s3.delta);
}

TEST_CASE("spectral bottom formula") {
    CHECK(spectral_bottom(1.0, 2) == doctest::Approx(4.0));
    CHECK(spectral_bottom(3.0, 2) == doctest::Approx(3.0));
    CHECK(spectral_bottom(4.0, 2) == doctest::Approx(0.0));
    CHECK(spectral_bottom(2.0, 1) == doctest::Approx(0.0));
    // continuity at delta = n
    CHECK(spectral_bottom(2.0 - 1e-12, 2) == doctest::Approx(spectral_bottom(2.0 + 1e-12, 2)));
    CHECK(spectral_bottom(2.0, 2) == doctest::Approx(4.0));
    CHECK_THROWS_AS(spectral_bottom(-0.1, 2), Error);
    CHECK_THROWS_AS(spectral_bottom(4.1, 2), Error);
}

TEST_CASE("fractal membership") {
    CHECK(fractal_member(FractalKind::Sierpinski, {0.0, 0.0}, 8));
    CHECK(!fractal_member(FractalKind::Sierpinski, {0.5, 0.5}, 1));
    CHECK(!fractal_member(FractalKind::Menger, {0.5, 0.5, 0.5}, 1));
    CHECK(fractal_member(FractalKind::Menger, {0.0, 0.0, 0.0}, 6));
    // the menger point (1/2, 0, 1/2) projects to a removed carpet middle
    // in the (x,z) plane
    CHECK(!fractal_member(FractalKind::Menger, {0.5, 0.0, 0.5}, 1));
    CHECK_THROWS_AS(fractal_member(FractalKind::Sierpinski, {1.5, 0.0}, 3), Error);
    CHECK_THROWS_AS(fractal_member(FractalKind::Sierpinski, {0.1, 0.1}, 0), Error);
    CHECK_THROWS_AS(fractal_member(FractalKind::Menger, {0.1, 0.1}, 2), Error);

    // samples are members at their generation depth
    for (FractalKind kind : {FractalKind::Sierpinski, FractalKind::Menger}) {
        const auto pts = fractal_sample(kind, 2000, 5, 21);
        for (const Vec& p : pts) {
            std::vector<double> coords;
            coords.push_back(p(0).real());
            coords.push_back(p(0).imag());
            if (kind == FractalKind::Menger) coords.push_back(p(1).real());
            CHECK(fractal_member(kind, coords, 5));
        }
    }
}

TEST_CASE("box dimension calibration") {
    // carpet, grid boxes at powers of three
    const auto carpet = fractal_sample(FractalKind::Sierpinski, 150000, 9, 7);
    const auto carpet_est = box_dimension(
        carpet, Gauge::Chordal,
        {1.0 / 243, 1.0 / 81, 1.0 / 27, 1.0 / 9, 1.0 / 3});
    CHECK(carpet_est.dim == doctest::Approx(std::log(8.0) / std::log(3.0)).epsilon(0.032));

    // complex circle: sqrt-gauge doubles the dimension
    const auto cx = box_dimension(complex_circle_sample(50000, 9), Gauge::Koranyi,
                                  log_spaced_scales(0.025, 0.8, 7));
    CHECK(cx.dim == doctest::Approx(2.0).epsilon(0.075));

    // real circle keeps dimension one
    const auto re = box_dimension(real_circle_sample(30000, 10), Gauge::Koranyi,
                                  log_spaced_scales(0.01, 0.35, 6));
    CHECK(re.dim == doctest::Approx(1.0).epsilon(0.1));

    CHECK_THROWS_AS(box_dimension(std::vector<Vec>(10, carpet[0]), Gauge::Chordal,
                                  log_spaced_scales(0.01, 0.4, 5)),
                    Error);
    CHECK_THROWS_AS(box_dimension(carpet, Gauge::Chordal, {0.1, 0.2, 0.3, 0.4}), Error);
}
