#pragma once

// Orbit enumeration with fingerprint deduplication, limit-set sampling,
// thin-part element search and conical-approach testing.

#include "chg/groups.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chg {

// Two stored elements are never within this projective distance.
inline constexpr double kMergeTol = 1e-8;

struct OrbitElement {
    Mat matrix;
    Word word;
    double displacement;  // d(o, g o)
};

struct OrbitOptions {
    std::size_t max_elements = 4'000'000;
    int threads = 1;
    // When positive, prune words whose basepoint displacement exceeds
    // radius_cap + cap_slack. Word balls waste exponentially many words
    // on elements that barely move the basepoint; for metric-ball counts
    // (orbit growth) the pruned expansion still reaches every element of
    // displacement <= radius_cap through paths staying inside the slack.
    double radius_cap = 0.0;
    double cap_slack = 2.5;
};

class OrbitIndex {
  public:
    const std::vector<OrbitElement>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    const BallPoint& basepoint() const { return basepoint_; }
    int max_word_length() const { return max_word_length_; }
    bool truncated() const { return truncated_; }
    // cap the enumeration was pruned at (0 = plain word ball)
    double radius_cap() const { return radius_cap_; }
    // number of candidate words that matched an already-stored element
    std::size_t merges() const { return merges_; }

  private:
    friend OrbitIndex enumerate_ball(const GeneratorSystem&, int, const BallPoint&,
                                     const OrbitOptions&);
    explicit OrbitIndex(BallPoint basepoint) : basepoint_(std::move(basepoint)) {}

    std::vector<OrbitElement> elements_;
    BallPoint basepoint_;
    int max_word_length_ = 0;
    bool truncated_ = false;
    double radius_cap_ = 0.0;
    std::size_t merges_ = 0;
};

// Breadth-first expansion of reduced words up to the given length;
// relations collapse through fingerprint dedup (quantized phase-invariant
// key, verified by projective distance before merging). The result is
// independent of the thread count.
OrbitIndex enumerate_ball(const GeneratorSystem& sys, int max_word_len,
                          const BallPoint& basepoint, const OrbitOptions& opts = {});

inline OrbitIndex enumerate_ball(const GeneratorSystem& sys, int max_word_len,
                                 const OrbitOptions& opts = {}) {
    return enumerate_ball(sys, max_word_len, BallPoint::origin(sys.ball_dim()), opts);
}

struct OrbitCounts {
    std::vector<double> radii;
    std::vector<std::size_t> counts;  // card{g : d(o, g o) <= r}
};

OrbitCounts orbit_counts(const OrbitIndex& index, const std::vector<double>& grid);

struct CloudPoint {
    BoundaryPoint point;
    int word_length;
};

struct PointCloud {
    std::vector<CloudPoint> points;
    std::string method;
    int ball_dim = 0;
    bool elementary_warning = false;  // fewer than 3 distinct points seen

    std::vector<Vec> coords() const {
        std::vector<Vec> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.point.coords());
        return out;
    }
};

enum class LimitMethod { OrbitEndpoint, ConjugateFixedPoints };

struct LimitOptions {
    double endpoint_cutoff = 5.0;  // minimal displacement before projecting
    OrbitOptions orbit;
};

PointCloud limit_sample(const GeneratorSystem& sys, int max_word_len, LimitMethod method,
                        const LimitOptions& opts = {});
PointCloud limit_sample(const OrbitIndex& index, LimitMethod method,
                        const LimitOptions& opts = {});

// Indices of stored elements with d(x, g x) < eps (word-ball approximation
// of the Margulis almost-stabilizer generating set).
std::vector<std::size_t> thin_part_elements(const OrbitIndex& index, const BallPoint& x,
                                            double eps);

struct ConicalOptions {
    int witnesses = 10;      // required depth-increasing orbit points
    double depth_gap = 0.5;  // minimal Busemann-depth increase between witnesses
};

// True iff enough indexed orbit points lie within distance R of the ray
// from the basepoint to xi at increasing Busemann depths.
bool conical_test(const BoundaryPoint& xi, const OrbitIndex& index, double R,
                  const ConicalOptions& opts = {});

}  // namespace chg
