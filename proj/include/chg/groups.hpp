#pragma once

// Constructors for discrete subgroups: Schottky systems from powers of
// hyperbolics (with sampled ping-pong certificates), von Dyck triangle
// rotation groups, right-angled polygon reflection groups, and integer
// Heisenberg lattices. Plus words, relators and their residual checks.

#include "chg/isometry.hpp"

#include <string>
#include <vector>

namespace chg {

// Signed generator indices: +k is generator k-1, -k its inverse.
using Word = std::vector<int>;

Word free_reduce(Word w);
Word word_inverse(const Word& w);
Word commutator_word(int gen_a, int gen_b);  // 1-based indices

struct GeneratorSystem {
    std::vector<std::string> labels;
    std::vector<Isometry> generators;
    std::vector<Word> relators;  // empty = no presentation attached

    int ball_dim() const { return generators.at(0).ball_dim(); }
    int size() const { return static_cast<int>(generators.size()); }
    int index_of(const std::string& label) const;
};

Mat evaluate_word(const GeneratorSystem& sys, const Word& w);
std::string word_to_string(const GeneratorSystem& sys, const Word& w);
Word parse_word(const GeneratorSystem& sys, const std::string& text);

// Conjugated copy h . sys . h^{-1} (labels and relators carried over).
GeneratorSystem conjugate_system(const GeneratorSystem& sys, const Isometry& h);

struct RelatorReport {
    std::vector<double> residuals;  // projective distance of rho(w) to the identity
    double max_residual = 0.0;
    bool all_pass = false;
};

RelatorReport relator_check(const GeneratorSystem& sys, double tol);

Isometry isometry_power(const Isometry& g, int k);

// Subgroup generated by the t-th powers of the given hyperbolic elements;
// free by the Schottky procedure for t large, so no presentation is
// attached. Rejects non-hyperbolic input and shared fixed points.
GeneratorSystem schottky_from_powers(const std::vector<Isometry>& hyperbolics, int t);

struct PingPongBall {
    BoundaryPoint center;
    double radius;  // Koranyi gauge
};

// Sampled-net ping-pong certificate: heuristic evidence, not a proof.
struct PingPongCertificate {
    std::vector<PingPongBall> attracting;
    std::vector<PingPongBall> repelling;
    double margin = 0.0;  // min slack over all validated constraints
    int net_size = 0;
    bool heuristic = true;
};

struct PingPongSearchResult {
    bool found = false;
    int t0 = 0;
    PingPongCertificate certificate;
    GeneratorSystem system;       // only valid when found
    double best_failed_margin = -1e9;
};

// Certificate for a fixed power t, validated on a sampled Koranyi net.
PingPongCertificate ping_pong_validate(const std::vector<Isometry>& hyperbolics, int t,
                                       int net_size);

// Smallest power t <= t_max whose certificate validates on a sampled
// Koranyi net, margins recorded.
PingPongSearchResult ping_pong_search(const std::vector<Isometry>& hyperbolics, int t_max,
                                      int net_size);

// Rotation representation of the von Dyck group D(p,q,r) in PU(1,1),
// i.e. on the complex hyperbolic line. Relators a^p, b^q, c^r, abc are
// attached and hold projectively in PU(1,1).
GeneratorSystem dyck_rep(int p, int q, int r);

// Block inclusion of a PU(1,1) system into PU(ball_dim,1). Relators are
// dropped: words that are central in U(1,1) (phase multiples of the
// identity) become complex reflections around the invariant line after
// identity padding, so they no longer evaluate to the projective
// identity. The generated subgroup is a finite central extension with
// the same limit set and orbit growth.
GeneratorSystem embed_system_su11(const GeneratorSystem& sys, int ball_dim);

// The same triangle rotation group acting on a real hyperbolic plane
// (via O(2,1), which is centerless: relators survive the embedding),
// in PU(ball_dim,1).
GeneratorSystem dyck_rep_real(int p, int q, int r, int ball_dim = 2);

// Polygon group generators: order-q complex reflections in the complex
// geodesics through the edges of the regular right-angled p-gon in the
// real plane of B^2. Relators a_i^q and [a_i, a_{i+1}] are attached.
GeneratorSystem polygon_rep(int p, int q);

// Circumradius of the regular right-angled hyperbolic p-gon (curvature -1),
// solved by bisection on the vertex-angle function.
double right_angled_polygon_circumradius(int p);

// Integer Heisenberg lattice H_{2n+1}(Z) embedded in PU(n+1,1):
// generators x_1, y_1, ..., x_n, y_n, t with the standard presentation.
GeneratorSystem heisenberg_lattice(int n);

}  // namespace chg
