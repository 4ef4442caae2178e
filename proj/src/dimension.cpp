#include "chg/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <optional>
#include <random>

namespace chg {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct LineFit {
    double slope;
    double r2;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double cov = n * sxy - sx * sy;
    const double var = (n * sxx - sx * sx) * (n * syy - sy * sy);
    const double r2 = var > 0 ? cov * cov / var : 1.0;
    return LineFit{slope, r2};
}

}  // namespace

double poincare_partial(const OrbitIndex& index, double s) {
    if (s < 0.0) throw Error("poincare_partial: s must be >= 0");
    double sum = 0.0;
    for (const auto& e : index.elements()) sum += std::exp(-s * e.displacement);
    return sum;
}

Window default_window(const OrbitCounts& counts) {
    const double rmax = counts.radii.empty() ? 0.0 : counts.radii.back();
    return Window{0.6 * rmax, rmax};
}

ExponentEstimate entropy_estimate(const OrbitCounts& counts, const Window& window,
                                  int ball_dim) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < counts.radii.size(); ++i) {
        const double r = counts.radii[i];
        if (r < window.lo || r > window.hi || counts.counts[i] == 0) continue;
        xs.push_back(r);
        ys.push_back(std::log(static_cast<double>(counts.counts[i])));
    }
    if (xs.size() < 3) throw Error("entropy_estimate: fewer than 3 grid points in window");
    const LineFit fit = least_squares(xs, ys);

    ExponentEstimate est;
    est.method = "growth-regression";
    est.delta = fit.slope;
    est.fit_r2 = fit.r2;
    est.window_lo = window.lo;
    est.window_hi = window.hi;
    if (est.delta < 0.0) {
        est.delta = 0.0;
        est.clamped = true;
    }
    if (ball_dim > 0 && est.delta > 2.0 * ball_dim) {
        est.delta = 2.0 * ball_dim;
        est.clamped = true;
    }
    return est;
}

namespace {

// Partial Poincare sum restricted to displacement <= r.
double poincare_below(const std::vector<double>& sorted_disp, double s, double r) {
    double sum = 0.0;
    for (double d : sorted_disp) {
        if (d > r) break;
        sum += std::exp(-s * d);
    }
    return sum;
}

}  // namespace

ExponentEstimate critical_exponent(const OrbitIndex& index, int ball_dim) {
    if (index.size() < 8) throw Error("critical_exponent: index too small");

    std::vector<double> disp;
    disp.reserve(index.size());
    for (const auto& e : index.elements()) disp.push_back(e.displacement);
    std::sort(disp.begin(), disp.end());
    const double rmax = disp.back();

    // growth regression over the radius range where the counting is
    // complete: up to the pruning cap for capped runs (elements beyond it
    // are slack spillover), up to the realized radius otherwise
    const double reach = index.radius_cap() > 0.0 ? std::min(rmax, index.radius_cap()) : rmax;
    const Window window{index.radius_cap() > 0.0 ? 0.45 * reach : 0.35 * reach, 0.95 * reach};
    std::vector<double> grid;
    for (int i = 1; i <= 96; ++i) grid.push_back(reach * i / 96.0);
    const OrbitCounts counts = orbit_counts(index, grid);
    ExponentEstimate est = entropy_estimate(counts, window, ball_dim);
    est.word_ceiling = index.max_word_length();

    // Poincare transition: the tail mass of sum exp(-s d) over the outer
    // half of the window grows against the inner half for s < delta and
    // dies for s > delta; bisect the balance point.
    const double lo = window.lo, hi = window.hi, mid = 0.5 * (lo + hi);
    auto still_growing = [&](double s) {
        const double inner = poincare_below(disp, s, mid) - poincare_below(disp, s, lo);
        const double outer = poincare_below(disp, s, hi) - poincare_below(disp, s, mid);
        return outer > inner;
    };
    double blo = 0.0, bhi = 2.0 * ball_dim + 2.0;
    if (still_growing(blo) && !still_growing(bhi)) {
        for (int it = 0; it < 48 && bhi - blo > 1e-3; ++it) {
            const double s = 0.5 * (blo + bhi);
            (still_growing(s) ? blo : bhi) = s;
        }
        est.bracket_lo = blo;
        est.bracket_hi = bhi;
    } else {
        est.budget_flag = true;
    }
    return est;
}

ExponentEstimate critical_exponent(const GeneratorSystem& sys, const ExponentBudget& budget) {
    OrbitOptions opts;
    opts.max_elements = budget.max_elements;
    opts.threads = budget.threads;

    // Grow the displacement cap until the element budget bites: pruned
    // expansion reaches radii that plain word balls cannot (they spend
    // exponentially many words near the basepoint stabilizers).
    // tight slack: geodesic words barely overshoot their target radius,
    // and every slack unit costs e^{2 slack} in stored elements
    opts.cap_slack = 1.0;
    auto run = [&](double cap) {
        opts.radius_cap = cap;
        const int depth = std::max(budget.max_word_len, static_cast<int>(14.0 * cap));
        return enumerate_ball(sys, depth, opts);
    };
    std::optional<OrbitIndex> index;
    if (budget.radius_cap > 0.0) {
        index = run(budget.radius_cap);
    } else {
        // geometric cap escalation, keeping the last complete run: the
        // final run dominates the total cost, earlier ones are a bounded
        // geometric overhead
        for (double cap = 3.0; cap <= 60.0; cap *= 1.25) {
            OrbitIndex idx = run(cap);
            const bool truncated = idx.truncated();
            const bool enough = idx.size() > budget.max_elements / 2.8;
            if (!truncated || !index) index = std::move(idx);
            if (truncated || enough) break;
        }
    }

    ExponentEstimate est = critical_exponent(*index, sys.ball_dim());
    if (index->truncated()) est.budget_flag = true;
    return est;
}

double spectral_bottom(double delta, int n) {
    if (n < 1) throw Error("spectral_bottom: n must be >= 1");
    if (delta < 0.0 || delta > 2.0 * n) throw Error("spectral_bottom: delta out of [0, 2n]");
    if (delta <= n) return static_cast<double>(n) * n;
    return delta * (2.0 * n - delta);
}

namespace {

// greedy net with a chordal spatial hash; koranyi balls of radius eps are
// contained in chordal balls of radius sqrt(2) eps
struct NetGrid {
    double cell;
    std::map<std::vector<std::int64_t>, std::vector<std::size_t>> cells;

    std::vector<std::int64_t> key_of(const Vec& v) const {
        std::vector<std::int64_t> key(2 * v.size());
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            key[2 * k] = static_cast<std::int64_t>(std::floor(v(k).real() / cell));
            key[2 * k + 1] = static_cast<std::int64_t>(std::floor(v(k).imag() / cell));
        }
        return key;
    }
};

// occupied axis-aligned boxes of side eps (the classical count; exact
// for the isotropic gauge)
std::size_t grid_box_count(const std::vector<Vec>& pts, double eps) {
    std::set<std::vector<std::int64_t>> cells;
    std::vector<std::int64_t> key(2 * pts.front().size());
    for (const Vec& p : pts) {
        for (Eigen::Index k = 0; k < p.size(); ++k) {
            key[2 * k] = static_cast<std::int64_t>(std::floor(p(k).real() / eps));
            key[2 * k + 1] = static_cast<std::int64_t>(std::floor(p(k).imag() / eps));
        }
        cells.insert(key);
    }
    return cells.size();
}

std::size_t greedy_net_count(const std::vector<Vec>& pts, Gauge gauge, double eps) {
    const double chordal_reach = gauge == Gauge::Koranyi ? std::sqrt(2.0) * eps : eps;
    NetGrid grid{chordal_reach, {}};
    std::vector<Vec> net;

    const int ncoord = static_cast<int>(2 * pts.front().size());
    std::vector<std::int64_t> probe(ncoord);
    std::size_t count = 0;
    for (const Vec& p : pts) {
        const auto key = grid.key_of(p);
        bool covered = false;
        // scan the 3^m neighborhood of the cell
        std::vector<int> offset(ncoord, -1);
        while (!covered) {
            for (int k = 0; k < ncoord; ++k) probe[k] = key[k] + offset[k];
            auto it = grid.cells.find(probe);
            if (it != grid.cells.end()) {
                for (std::size_t idx : it->second) {
                    if (boundary_gauge(net[idx], p, gauge) <= eps) {
                        covered = true;
                        break;
                    }
                }
            }
            int k = 0;
            for (; k < ncoord; ++k) {
                if (offset[k] < 1) {
                    ++offset[k];
                    break;
                }
                offset[k] = -1;
            }
            if (k == ncoord) break;
        }
        if (!covered) {
            grid.cells[key].push_back(net.size());
            net.push_back(p);
            ++count;
        }
    }
    return count;
}

}  // namespace

DimensionEstimate box_dimension(const std::vector<Vec>& points, Gauge gauge,
                                const std::vector<double>& scales) {
    if (points.size() < 1000) throw Error("box_dimension: need at least 10^3 points");
    if (scales.size() < 4) throw Error("box_dimension: need at least 4 scales");
    std::vector<double> sorted = scales;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() <= 0.0) throw Error("box_dimension: scales must be positive");
    if (sorted.back() / sorted.front() < std::pow(10.0, 1.5) * (1.0 - 1e-9))
        throw Error("box_dimension: scales must span at least 1.5 decades");

    DimensionEstimate est;
    est.gauge = gauge == Gauge::Koranyi ? "koranyi" : "euclidean";
    est.scales = sorted;
    // Koranyi balls are anisotropic in Euclidean coordinates, so they are
    // covered with a greedy net; the isotropic gauge uses grid boxes,
    // whose occupancy saturates far less against the sample size than a
    // greedy packing does.
    for (double eps : sorted)
        est.counts.push_back(gauge == Gauge::Koranyi ? greedy_net_count(points, gauge, eps)
                                                     : grid_box_count(points, eps));

    // drop saturated scales: once the count approaches the sample size
    // the curve flattens and only biases the slope
    const std::size_t saturation = gauge == Gauge::Koranyi ? points.size() / 4
                                                           : points.size() / 6;
    std::vector<double> xs, ys;
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (est.counts[i] > saturation) continue;
        if (est.counts[i] < 2) continue;
        est.fitted.push_back(static_cast<int>(i));
        xs.push_back(std::log(1.0 / sorted[i]));
        ys.push_back(std::log(static_cast<double>(est.counts[i])));
    }
    if (xs.size() < 2) throw Error("box_dimension: not enough usable scales (sample too small)");
    const LineFit fit = least_squares(xs, ys);
    est.dim = fit.slope;
    est.fit_r2 = fit.r2;
    return est;
}

std::vector<double> log_spaced_scales(double lo, double hi, int count) {
    if (count < 2 || lo <= 0 || hi <= lo) throw Error("log_spaced_scales: bad range");
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return out;
}

namespace {

bool carpet_digits_ok(double x, double y, int depth) {
    for (int level = 0; level < depth; ++level) {
        x *= 3.0;
        y *= 3.0;
        const int dx = std::min(2, static_cast<int>(x));
        const int dy = std::min(2, static_cast<int>(y));
        if (dx == 1 && dy == 1) return false;
        x -= dx;
        y -= dy;
    }
    return true;
}

}  // namespace

bool fractal_member(FractalKind kind, const std::vector<double>& point, int depth) {
    if (depth < 1) throw Error("fractal_member: depth must be >= 1");
    const size_t want = kind == FractalKind::Sierpinski ? 2 : 3;
    if (point.size() != want) throw Error("fractal_member: wrong point dimension");
    for (double c : point)
        if (c < 0.0 || c > 1.0) throw Error("fractal_member: point outside the unit cube");
    if (kind == FractalKind::Sierpinski) return carpet_digits_ok(point[0], point[1], depth);
    // Menger: all three coordinate-plane projections must survive the carpet
    return carpet_digits_ok(point[0], point[1], depth) &&
           carpet_digits_ok(point[0], point[2], depth) &&
           carpet_digits_ok(point[1], point[2], depth);
}

std::vector<Vec> fractal_sample(FractalKind kind, std::size_t count, int depth,
                                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> digit(0, 2);

    std::vector<Vec> out;
    out.reserve(count);
    while (out.size() < count) {
        double coords[3] = {0.0, 0.0, 0.0};
        const int ncoord = kind == FractalKind::Sierpinski ? 2 : 3;
        double scale = 1.0;
        for (int level = 0; level < depth; ++level) {
            scale /= 3.0;
            int d[3];
            while (true) {
                for (int k = 0; k < ncoord; ++k) d[k] = digit(rng);
                if (kind == FractalKind::Sierpinski) {
                    if (!(d[0] == 1 && d[1] == 1)) break;
                } else {
                    const int ones = (d[0] == 1) + (d[1] == 1) + (d[2] == 1);
                    if (ones < 2) break;
                }
            }
            for (int k = 0; k < ncoord; ++k) coords[k] += d[k] * scale;
        }
        for (int k = 0; k < ncoord; ++k) coords[k] += unif(rng) * scale;
        if (kind == FractalKind::Sierpinski) {
            Vec v(1);
            v(0) = cplx(coords[0], coords[1]);
            out.push_back(std::move(v));
        } else {
            Vec v(2);
            v(0) = cplx(coords[0], coords[1]);
            v(1) = cplx(coords[2], 0.0);
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<Vec> sphere_sample(int n, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec> out;
    out.reserve(count);
    while (out.size() < count) {
        Vec v(n);
        for (int k = 0; k < n; ++k) v(k) = cplx(gauss(rng), gauss(rng));
        const double nrm = v.norm();
        if (nrm < 1e-12) continue;
        out.push_back(v / nrm);
    }
    return out;
}

std::vector<Vec> complex_circle_sample(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    std::vector<Vec> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Vec v(2);
        v(0) = std::exp(cplx(0.0, unif(rng)));
        v(1) = 0.0;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Vec> real_circle_sample(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    std::vector<Vec> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double theta = unif(rng);
        Vec v(2);
        v(0) = std::cos(theta);
        v(1) = std::sin(theta);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace chg
