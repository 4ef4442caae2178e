#include "chg/groups.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace chg {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Word free_reduce(Word w) {
    Word out;
    out.reserve(w.size());
    for (int letter : w) {
        if (letter == 0) throw Error("free_reduce: zero letter");
        if (!out.empty() && out.back() == -letter)
            out.pop_back();
        else
            out.push_back(letter);
    }
    return out;
}

Word word_inverse(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (int& letter : out) letter = -letter;
    return out;
}

Word commutator_word(int a, int b) { return Word{a, b, -a, -b}; }

int GeneratorSystem::index_of(const std::string& label) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    throw Error("GeneratorSystem: unknown label '" + label + "'");
}

Mat evaluate_word(const GeneratorSystem& sys, const Word& w) {
    const int d = sys.ball_dim() + 1;
    Mat acc = Mat::Identity(d, d);
    for (int letter : w) {
        const int idx = std::abs(letter) - 1;
        if (idx < 0 || idx >= sys.size()) throw Error("evaluate_word: letter out of range");
        const Isometry& g = sys.generators[idx];
        acc = acc * (letter > 0 ? g.matrix() : g.inverse().matrix());
    }
    return acc;
}

std::string word_to_string(const GeneratorSystem& sys, const Word& w) {
    std::string out;
    for (int letter : w) {
        if (!out.empty()) out += ' ';
        out += sys.labels.at(std::abs(letter) - 1);
        if (letter < 0) out += "^-1";
    }
    return out.empty() ? "e" : out;
}

Word parse_word(const GeneratorSystem& sys, const std::string& text) {
    Word out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        if (tok == "e") continue;
        bool inv = false;
        if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
            inv = true;
            tok = tok.substr(0, tok.size() - 3);
        }
        const int idx = sys.index_of(tok) + 1;
        out.push_back(inv ? -idx : idx);
    }
    return out;
}

GeneratorSystem conjugate_system(const GeneratorSystem& sys, const Isometry& h) {
    GeneratorSystem out;
    out.labels = sys.labels;
    out.relators = sys.relators;
    const Isometry hinv = h.inverse();
    for (const Isometry& g : sys.generators) out.generators.push_back(h * g * hinv);
    return out;
}

RelatorReport relator_check(const GeneratorSystem& sys, double tol) {
    if (sys.relators.empty()) throw Error("relator_check: system has no presentation");
    RelatorReport report;
    const int d = sys.ball_dim() + 1;
    const Mat id = Mat::Identity(d, d);
    for (const Word& w : sys.relators) {
        const double res = projective_distance(evaluate_word(sys, w), id);
        report.residuals.push_back(res);
        report.max_residual = std::max(report.max_residual, res);
    }
    report.all_pass = report.max_residual < tol;
    return report;
}

Isometry isometry_power(const Isometry& g, int k) {
    if (k == 0) return Isometry::identity(g.ball_dim());
    const Isometry base = k > 0 ? g : g.inverse();
    Isometry acc = base;
    for (int i = 1; i < std::abs(k); ++i) acc = acc * base;
    return acc;
}

namespace {

struct FixedPair {
    BoundaryPoint attracting;
    BoundaryPoint repelling;
};

std::vector<FixedPair> hyperbolic_fixed_pairs(const std::vector<Isometry>& hyperbolics) {
    std::vector<FixedPair> pairs;
    for (const Isometry& g : hyperbolics) {
        const auto cls = classify(g);
        if (cls.type != IsometryType::Hyperbolic)
            throw Error("schottky: generator is not hyperbolic");
        pairs.push_back(FixedPair{*cls.attracting, *cls.repelling});
    }
    for (size_t i = 0; i < pairs.size(); ++i) {
        const BoundaryPoint* pi[2] = {&pairs[i].attracting, &pairs[i].repelling};
        for (size_t j = i + 1; j < pairs.size(); ++j) {
            const BoundaryPoint* pj[2] = {&pairs[j].attracting, &pairs[j].repelling};
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v)
                    if (boundary_gauge(*pi[u], *pj[v], Gauge::Koranyi) < 1e-6)
                        throw Error("schottky: fixed-point sets are not disjoint");
        }
    }
    return pairs;
}

}  // namespace

GeneratorSystem schottky_from_powers(const std::vector<Isometry>& hyperbolics, int t) {
    if (hyperbolics.empty()) throw Error("schottky: empty generator list");
    if (t < 1) throw Error("schottky: power must be >= 1");
    hyperbolic_fixed_pairs(hyperbolics);  // validates input
    GeneratorSystem sys;
    for (size_t i = 0; i < hyperbolics.size(); ++i) {
        sys.labels.push_back("s" + std::to_string(i + 1));
        sys.generators.push_back(isometry_power(hyperbolics[i], t));
    }
    return sys;
}

PingPongCertificate ping_pong_validate(const std::vector<Isometry>& hyperbolics, int t,
                                       int net_size) {
    if (net_size < 8) throw Error("ping_pong: net too small");
    if (t < 1) throw Error("ping_pong: power must be >= 1");
    const auto pairs = hyperbolic_fixed_pairs(hyperbolics);
    const size_t k = hyperbolics.size();
    const int n = hyperbolics[0].ball_dim();

    // ball radius: a third of the closest approach among all 2k centers
    std::vector<const BoundaryPoint*> centers;
    for (const auto& p : pairs) {
        centers.push_back(&p.attracting);
        centers.push_back(&p.repelling);
    }
    double min_sep = 1e30;
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j)
            min_sep =
                std::min(min_sep, boundary_gauge(*centers[i], *centers[j], Gauge::Koranyi));
    const double radius = min_sep / 3.0;

    // deterministic sampled net on the sphere
    std::mt19937_64 rng(0x5eed0b17u);  // fixed seed: certificates must be reproducible
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<BoundaryPoint> net;
    net.reserve(net_size);
    while (static_cast<int>(net.size()) < net_size) {
        Vec v(n);
        for (int c = 0; c < n; ++c) v(c) = cplx(gauss(rng), gauss(rng));
        if (v.norm() < 1e-8) continue;
        net.push_back(BoundaryPoint::project(v));
    }

    PingPongCertificate cert;
    cert.net_size = net_size;
    double margin = 1e30;
    std::vector<Isometry> powers;
    for (size_t i = 0; i < k; ++i) {
        powers.push_back(isometry_power(hyperbolics[i], t));
        cert.attracting.push_back(PingPongBall{pairs[i].attracting, radius});
        cert.repelling.push_back(PingPongBall{pairs[i].repelling, radius});
    }
    // disjointness margin
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j)
            margin = std::min(margin, boundary_gauge(*centers[i], *centers[j],
                                                     Gauge::Koranyi) -
                                          2.0 * radius);
    // mapping margins on the net: each power sends the sphere minus its
    // repelling ball strictly into its attracting ball (and conversely
    // for the inverse)
    for (size_t i = 0; i < k; ++i) {
        for (int dir = 0; dir < 2; ++dir) {
            const Isometry map = dir == 0 ? powers[i] : powers[i].inverse();
            const BoundaryPoint& excluded =
                dir == 0 ? pairs[i].repelling : pairs[i].attracting;
            const BoundaryPoint& target =
                dir == 0 ? pairs[i].attracting : pairs[i].repelling;
            for (const BoundaryPoint& x : net) {
                if (boundary_gauge(x, excluded, Gauge::Koranyi) <= radius) continue;
                const BoundaryPoint img = map.apply(x);
                margin =
                    std::min(margin, radius - boundary_gauge(img, target, Gauge::Koranyi));
            }
        }
    }
    cert.margin = margin;
    return cert;
}

PingPongSearchResult ping_pong_search(const std::vector<Isometry>& hyperbolics, int t_max,
                                      int net_size) {
    PingPongSearchResult result;
    result.best_failed_margin = -1e30;
    for (int t = 1; t <= t_max; ++t) {
        PingPongCertificate cert = ping_pong_validate(hyperbolics, t, net_size);
        if (cert.margin > 0.0) {
            result.found = true;
            result.t0 = t;
            result.certificate = std::move(cert);
            result.system = schottky_from_powers(hyperbolics, t);
            return result;
        }
        result.best_failed_margin = std::max(result.best_failed_margin, cert.margin);
    }
    return result;
}

namespace {

// U(1,1) building blocks for the disk model of the complex line
Mat su11_translate(cplx v) {
    const double s = 1.0 / std::sqrt(1.0 - std::norm(v));
    Mat m(2, 2);
    m(0, 0) = s;
    m(0, 1) = std::conj(v) * s;
    m(1, 0) = v * s;
    m(1, 1) = s;
    return m;
}

Mat su11_rotation_at(cplx center, double angle) {
    Mat rot = Mat::Identity(2, 2);
    rot(1, 1) = std::exp(cplx(0.0, angle));
    const Mat t = su11_translate(center);
    return t * rot * t.inverse();
}

// triangle in the curvature -1 model with angles pi/p, pi/q, pi/r:
// A at the origin, B on the positive real axis, C at argument alpha
struct TrianglePlacement {
    double side_ab;  // curvature -1 lengths
    double side_ac;
    double alpha, beta, gamma;
};

TrianglePlacement hyperbolic_triangle(int p, int q, int r) {
    if (p < 2 || q < 2 || r < 2 || 1.0 / p + 1.0 / q + 1.0 / r >= 1.0)
        throw Error("dyck_rep: (p,q,r) is not a hyperbolic triple");
    const double a = kPi / p, b = kPi / q, c = kPi / r;
    TrianglePlacement tp;
    tp.alpha = a;
    tp.beta = b;
    tp.gamma = c;
    tp.side_ab = std::acosh((std::cos(a) * std::cos(b) + std::cos(c)) /
                            (std::sin(a) * std::sin(b)));
    tp.side_ac = std::acosh((std::cos(a) * std::cos(c) + std::cos(b)) /
                            (std::sin(a) * std::sin(c)));
    return tp;
}

GeneratorSystem finish_triangle_group(std::vector<Isometry> gens, int p, int q, int r) {
    GeneratorSystem sys;
    sys.labels = {"a", "b", "c"};
    sys.generators = std::move(gens);
    Word wa, wb, wc;
    for (int i = 0; i < p; ++i) wa.push_back(1);
    for (int i = 0; i < q; ++i) wb.push_back(2);
    for (int i = 0; i < r; ++i) wc.push_back(3);
    sys.relators = {wa, wb, wc, Word{1, 2, 3}};
    return sys;
}

}  // namespace

GeneratorSystem dyck_rep(int p, int q, int r) {
    const TrianglePlacement tp = hyperbolic_triangle(p, q, r);
    const cplx pos_b = std::tanh(tp.side_ab / 2.0);
    const cplx pos_c = std::tanh(tp.side_ac / 2.0) * std::exp(cplx(0.0, tp.alpha));

    const Mat id = Mat::Identity(2, 2);
    for (double sign : {1.0, -1.0}) {
        const Mat a = su11_rotation_at(0.0, sign * 2.0 * kPi / p);
        const Mat b = su11_rotation_at(pos_b, sign * 2.0 * kPi / q);
        const Mat c = su11_rotation_at(pos_c, sign * 2.0 * kPi / r);
        if (projective_distance(a * b * c, id) < 1e-9) {
            return finish_triangle_group({Isometry(a), Isometry(b), Isometry(c)}, p, q, r);
        }
    }
    throw Error("dyck_rep: triangle rotations failed to close up");
}

GeneratorSystem embed_system_su11(const GeneratorSystem& sys, int ball_dim) {
    if (sys.ball_dim() != 1) throw Error("embed_system_su11: source must live in PU(1,1)");
    GeneratorSystem out;
    out.labels = sys.labels;
    for (const Isometry& g : sys.generators)
        out.generators.push_back(embed_su11(g.matrix(), ball_dim));
    return out;
}

namespace {

Eigen::Matrix3d so21_rotation(double angle) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(1, 1) = std::cos(angle);
    m(1, 2) = -std::sin(angle);
    m(2, 1) = std::sin(angle);
    m(2, 2) = std::cos(angle);
    return m;
}

Eigen::Matrix3d so21_boost(double t, double n1, double n2) {
    Eigen::Matrix3d m;
    const double ch = std::cosh(t), sh = std::sinh(t);
    m << ch, sh * n1, sh * n2,                                     //
        sh * n1, 1.0 + (ch - 1.0) * n1 * n1, (ch - 1.0) * n1 * n2,  //
        sh * n2, (ch - 1.0) * n1 * n2, 1.0 + (ch - 1.0) * n2 * n2;
    return m;
}

Eigen::Matrix3d so21_rotation_at(double t, double dir, double angle) {
    const Eigen::Matrix3d l = so21_boost(t, std::cos(dir), std::sin(dir));
    return l * so21_rotation(angle) * l.inverse();
}

}  // namespace

GeneratorSystem dyck_rep_real(int p, int q, int r, int ball_dim) {
    const TrianglePlacement tp = hyperbolic_triangle(p, q, r);
    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    for (double sign : {1.0, -1.0}) {
        const Eigen::Matrix3d a = so21_rotation(sign * 2.0 * kPi / p);
        const Eigen::Matrix3d b = so21_rotation_at(tp.side_ab, 0.0, sign * 2.0 * kPi / q);
        const Eigen::Matrix3d c =
            so21_rotation_at(tp.side_ac, tp.alpha, sign * 2.0 * kPi / r);
        if ((a * b * c - id).cwiseAbs().maxCoeff() < 1e-9) {
            return finish_triangle_group({embed_so21(a, ball_dim), embed_so21(b, ball_dim),
                                          embed_so21(c, ball_dim)},
                                         p, q, r);
        }
    }
    throw Error("dyck_rep_real: triangle rotations failed to close up");
}

double right_angled_polygon_circumradius(int p) {
    if (p < 5) throw Error("polygon: no right-angled regular p-gon for p < 5");
    // vertex angle at circumradius R: 2*arccot(cosh(R) tan(pi/p)); solve = pi/2
    auto vertex_angle = [&](double radius) {
        return 2.0 * std::atan(1.0 / (std::cosh(radius) * std::tan(kPi / p)));
    };
    double lo = 1e-9, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (vertex_angle(mid) > kPi / 2.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

GeneratorSystem polygon_rep(int p, int q) {
    if (p < 5) throw Error("polygon_rep: p must be >= 5");
    if (q < 2) throw Error("polygon_rep: q must be >= 2");
    const double radius = right_angled_polygon_circumradius(p);
    const double klein = std::tanh(radius);

    std::vector<Vec> vertex_lifts;
    for (int k = 0; k < p; ++k) {
        const double phi = 2.0 * kPi * k / p;
        Vec lift(3);
        lift(0) = 1.0;
        lift(1) = klein * std::cos(phi);
        lift(2) = klein * std::sin(phi);
        vertex_lifts.push_back(std::move(lift));
    }

    GeneratorSystem sys;
    const Mat j = [&] {
        Mat m = Mat::Identity(3, 3);
        m(0, 0) = -1.0;
        return m;
    }();
    for (int k = 0; k < p; ++k) {
        const Vec& x = vertex_lifts[k];
        const Vec& y = vertex_lifts[(k + 1) % p];
        // polar of the complex geodesic through the edge: kernel of
        // the pairing against both lifts
        Mat rows(2, 3);
        rows.row(0) = (j * x).adjoint();
        rows.row(1) = (j * y).adjoint();
        Eigen::FullPivLU<Mat> lu(rows);
        lu.setThreshold(1e-10);
        const Mat kernel = lu.kernel();
        if (kernel.cols() != 1) throw Error("polygon_rep: degenerate edge");
        ProjectivePoint polar{Vec(kernel.col(0))};
        sys.labels.push_back("a" + std::to_string(k + 1));
        sys.generators.push_back(complex_reflection(polar, q));
    }
    for (int k = 1; k <= p; ++k) {
        Word pw;
        for (int i = 0; i < q; ++i) pw.push_back(k);
        sys.relators.push_back(pw);
    }
    for (int k = 1; k <= p; ++k)
        sys.relators.push_back(commutator_word(k, k % p + 1));
    return sys;
}

GeneratorSystem heisenberg_lattice(int n) {
    if (n < 1) throw Error("heisenberg_lattice: n must be >= 1");
    GeneratorSystem sys;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e(i) = 1.0;
        sys.labels.push_back("x" + std::to_string(i + 1));
        sys.generators.push_back(heisenberg_embed(e, zero, 0.0));
        sys.labels.push_back("y" + std::to_string(i + 1));
        sys.generators.push_back(heisenberg_embed(zero, e, 0.0));
    }
    sys.labels.push_back("t");
    sys.generators.push_back(heisenberg_embed(zero, zero, 1.0));

    const int t_idx = 2 * n + 1;
    for (int i = 0; i < n; ++i) {
        const int xi = 2 * i + 1, yi = 2 * i + 2;
        sys.relators.push_back(commutator_word(xi, t_idx));
        sys.relators.push_back(commutator_word(yi, t_idx));
        Word w = commutator_word(xi, yi);
        w.push_back(-t_idx);
        sys.relators.push_back(w);
    }
    return sys;
}

}  // namespace chg
