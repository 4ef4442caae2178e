#pragma once

// Critical exponent and entropy estimators, Poincare series, spectral
// bottom formula, box-counting dimension in boundary gauges, and the
// reference fractals used for calibration.

#include "chg/dynamics.hpp"

#include <string>
#include <vector>

namespace chg {

// Partial Poincare series sum_gamma exp(-s d(o, gamma o)) over the index.
double poincare_partial(const OrbitIndex& index, double s);

struct ExponentEstimate {
    double delta = 0.0;
    std::string method;  // "growth-regression" or "poincare-bracket"
    double fit_r2 = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    int word_ceiling = 0;
    double bracket_lo = 0.0, bracket_hi = 0.0;  // Poincare transition bracket
    bool clamped = false;
    bool budget_flag = false;  // bracket did not stabilize within budget
};

struct Window {
    double lo;
    double hi;
};

// Least-squares slope of log N(r) against r over the window. The default
// window is the top 40% of realized radii. ball_dim > 0 clamps the
// estimate into [0, 2 ball_dim].
ExponentEstimate entropy_estimate(const OrbitCounts& counts, const Window& window,
                                  int ball_dim = 0);
Window default_window(const OrbitCounts& counts);

struct ExponentBudget {
    int max_word_len = 12;
    std::size_t max_elements = 400'000;
    int threads = 1;
    // 0 = escalate the displacement cap automatically until the element
    // budget is reached; > 0 = enumerate once with this cap.
    double radius_cap = 0.0;
};

// Brackets the critical exponent by the growth/saturation transition of
// Poincare shell sums across word lengths, cross-checked against the
// orbit-growth regression; the regression value is returned, the bracket
// goes into diagnostics.
ExponentEstimate critical_exponent(const GeneratorSystem& sys, const ExponentBudget& budget);
ExponentEstimate critical_exponent(const OrbitIndex& index, int ball_dim);

// lambda = n^2 for delta <= n, delta(2n - delta) for n <= delta <= 2n.
double spectral_bottom(double delta, int n);

struct DimensionEstimate {
    double dim = 0.0;
    std::string gauge;
    std::vector<double> scales;
    std::vector<std::size_t> counts;   // greedy net size per scale
    std::vector<int> fitted;           // indices of scales used in the fit
    double fit_r2 = 0.0;
};

// Slope of log(covering count) vs log(1/scale), covering by gauge balls
// on a greedy net. Scales where the net saturates against the sample size
// are excluded from the fit (they only flatten the slope).
DimensionEstimate box_dimension(const std::vector<Vec>& points, Gauge gauge,
                                const std::vector<double>& scales);

std::vector<double> log_spaced_scales(double lo, double hi, int count);

enum class FractalKind { Sierpinski, Menger };

// Base-3 digit membership test for the carpet/curve approximant at the
// given depth.
bool fractal_member(FractalKind kind, const std::vector<double>& point, int depth);

// Exact samples of the depth-level approximant, encoded for the gauge
// machinery: R^2 as one complex coordinate, R^3 as (x+iy, z).
std::vector<Vec> fractal_sample(FractalKind kind, std::size_t count, int depth,
                                std::uint64_t seed);

// Uniform samples of S^{2n-1} in C^n.
std::vector<Vec> sphere_sample(int n, std::size_t count, std::uint64_t seed);

// Uniform samples of the complex circle {(e^{i theta}, 0)} or the real
// circle {(cos theta, sin theta)} in C^2.
std::vector<Vec> complex_circle_sample(std::size_t count, std::uint64_t seed);
std::vector<Vec> real_circle_sample(std::size_t count, std::uint64_t seed);

}  // namespace chg
