#pragma once

// Elements of U(n,1)/PU(n,1): construction and verification, projective
// action, elliptic/parabolic/hyperbolic classification, displacement
// infimum, complex reflections, standard subgroup embeddings, centralizer
// codimension and Weil's dimension count.

#include "chg/form.hpp"
#include "chg/geometry.hpp"

#include <optional>
#include <utility>

namespace chg {

// Tolerance band around unit modulus separating hyperbolic eigenvalue
// spread from elliptic/parabolic.
inline constexpr double kModulusBand = 1e-8;

struct UnitaryCheck {
    bool ok;
    double residual;  // max-abs entry of M*JM - J
};

UnitaryCheck is_q_unitary(const Mat& m);

// min over unit-modulus phases of ||a - phase*b||_F, both sides Frobenius
// normalized; zero iff the matrices are projectively equal.
double projective_distance(const Mat& a, const Mat& b);

class Isometry {
  public:
    explicit Isometry(Mat m);

    static Isometry identity(int ball_dim);

    const Mat& matrix() const { return m_; }
    int ball_dim() const { return static_cast<int>(m_.rows()) - 1; }
    int dim() const { return static_cast<int>(m_.rows()); }

    Isometry inverse() const;
    Isometry operator*(const Isometry& rhs) const;

    ProjectivePoint apply(const ProjectivePoint& p) const;
    BallPoint apply(const BallPoint& x) const;
    BoundaryPoint apply(const BoundaryPoint& xi) const;

    bool is_identity(double tol = 1e-12) const;

  private:
    Mat m_;
};

enum class IsometryType { Elliptic, Parabolic, Hyperbolic };

struct ClassificationResult {
    IsometryType type;
    // hyperbolic data
    std::optional<BoundaryPoint> attracting;
    std::optional<BoundaryPoint> repelling;
    double translation_length = 0.0;
    // elliptic data
    std::optional<BallPoint> fixed_interior;
    // parabolic data
    std::optional<BoundaryPoint> fixed_boundary;
};

// Eigenstructure-driven classification. Hyperbolic <=> eigenvalue modulus
// spread beyond the unit-modulus band; the translation length is computed
// at the axis point v+ + v- normalized to <v+,v-> = -1. Without spread,
// an eigendirection of negative q means elliptic, otherwise the unique
// null eigendirection is the parabolic fixed point. Candidate fixed
// points are verified by applying the map before being trusted.
ClassificationResult classify(const Isometry& g);

struct DisplacementResult {
    double value;
    bool attained;   // minimizer stayed well inside the ball
    bool converged;  // optimizer met its tolerance within budget
    BallPoint argmin;
};

struct DisplacementBudget {
    int restarts = 6;
    int max_iters = 400;
    double tol = 1e-10;
};

// Numerical infimum of z -> d(z, gz) by multi-start Nelder-Mead descent;
// independent oracle for classify().
DisplacementResult displacement_inf(const Isometry& g, const DisplacementBudget& budget = {});

// I + (e^{2 pi i/order} - 1) * <., w>/<w,w> * w; fixes the hyperplane
// w-perp pointwise.
Isometry complex_reflection(const ProjectivePoint& polar, int order);

// Transvection of translation length s along the axis through +-e_{axis+1}.
Isometry boost(double s, int ball_dim, int axis = 0);

// Block embeddings into U(n,1), padded by the identity.
Isometry embed_su11(const Mat& m2, int ball_dim);
Isometry embed_so21(const Eigen::Matrix3d& m3, int ball_dim);

// Image of the Heisenberg element [[1,a,c],[0,I,b],[0,0,1]] (a, b real
// m-vectors, c real) in U(m+1,1); unipotent upper-triangular in a null
// basis, conjugated back to the diag(-1,1,...,1) basis. Fixes the boundary
// point (0,...,0,1).
Isometry heisenberg_embed(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double c);

// The defining (m+2)x(m+2) integer-friendly Heisenberg matrix itself,
// for exact-arithmetic oracles.
Eigen::MatrixXd heisenberg_triple_matrix(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                         double c);

// Divide by the principal cube root of the determinant (SU normalization).
Mat su_normalize(const Mat& m);

// Codimension in PU(2,1) of the centralizer: 8 - dim ker(Ad(g) - I) on the
// Lie algebra su(2,1), kernel dimension by numerical rank (tol 1e-7).
int zeta(const Isometry& g);

// zeta(a) + zeta(b) + zeta(c) - 16, requiring abc = 1 projectively.
int weil_dimension(const Isometry& a, const Isometry& b, const Isometry& c);

struct QuasiconstantLimit {
    BoundaryPoint attracting;  // near-constant value of the map
    BoundaryPoint repelling;   // indeterminacy point, from the inverse
};

// For a large-norm element, the boundary points the map concentrates at.
QuasiconstantLimit quasiconstant_limit(const Isometry& g, double norm_threshold = 1e4);

}  // namespace chg
