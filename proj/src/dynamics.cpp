#include "chg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace chg {

namespace {

// d(o, g o) evaluated from the preserved form value q(g o) = q(o); the
// direct recomputation of q on a large lift cancels catastrophically
double displacement_of(const Vec& o, const Vec& img, double qo) {
    const double num = std::norm(form_inner(o, img));
    return std::acosh(std::max(1.0, std::sqrt(num / (qo * qo))));
}

// Phase- and scale-invariant fingerprint features of a matrix, quantized
// onto a grid that is coarse against numerical noise between different
// arrivals of the same group element.
constexpr double kKeyGrid = 1e-6;

struct BucketKey {
    std::int64_t v[4];
    bool operator==(const BucketKey& o) const {
        return v[0] == o.v[0] && v[1] == o.v[1] && v[2] == o.v[2] && v[3] == o.v[3];
    }
};

struct BucketHash {
    std::size_t operator()(const BucketKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (int i = 0; i < 4; ++i) {
            h ^= static_cast<std::uint64_t>(k.v[i]);
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

struct Features {
    double f[4];
};

Features features_of(const Mat& raw) {
    const double scale = 1.0 / raw.norm();
    // all entries are insensitive to a global phase of the matrix
    return Features{{std::abs(raw.trace()) * scale, std::abs(raw(0, 0)) * scale,
                     raw.cwiseAbs().sum() * scale, raw.row(0).norm() * scale}};
}

BucketKey quantize(const Features& f, const int* off) {
    BucketKey k;
    for (int i = 0; i < 4; ++i)
        k.v[i] = static_cast<std::int64_t>(std::floor(f.f[i] / kKeyGrid)) + off[i];
    return k;
}

// offsets to probe per feature: same-element arrivals differ by far less
// than the grid, so adjacent cells matter only right at a cell boundary
void boundary_offsets(const Features& f, int lo[4], int hi[4]) {
    for (int i = 0; i < 4; ++i) {
        const double cell = f.f[i] / kKeyGrid;
        const double frac = cell - std::floor(cell);
        lo[i] = frac < 1e-4 ? -1 : 0;
        hi[i] = frac > 1.0 - 1e-4 ? 1 : 0;
    }
}

struct DedupStore {
    std::unordered_multimap<BucketKey, std::size_t, BucketHash> buckets;

    // index of a stored element projectively equal to m, or npos
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Equality is decided on C = stored^{-1} candidate: distinct group
    // elements can be arbitrarily close in normalized-matrix distance
    // (the convergence property concentrates deep words onto rank-one
    // projectors), but their quotient stays far from the identity. The
    // threshold scales with the conditioning of the product and is capped
    // so that undecidable comparisons (beyond float range) never merge.
    static bool same_element(const Mat& a_raw, const Mat& b_raw) {
        const Eigen::Index d = a_raw.rows();
        Mat j = Mat::Identity(d, d);
        j(0, 0) = -1.0;
        const Mat quotient = j * a_raw.adjoint() * j * b_raw;
        const double kappa = a_raw.norm() * b_raw.norm();
        const double threshold = std::min(1e-6, std::max(kMergeTol, 1e-13 * kappa));
        return projective_distance(quotient, Mat::Identity(d, d)) < threshold;
    }

    std::size_t find(const Mat& cand_raw, const Features& f,
                     const std::vector<OrbitElement>& elements) const {
        int lo[4], hi[4];
        boundary_offsets(f, lo, hi);
        int off[4];
        for (off[0] = lo[0]; off[0] <= hi[0]; ++off[0])
            for (off[1] = lo[1]; off[1] <= hi[1]; ++off[1])
                for (off[2] = lo[2]; off[2] <= hi[2]; ++off[2])
                    for (off[3] = lo[3]; off[3] <= hi[3]; ++off[3]) {
                        auto range = buckets.equal_range(quantize(f, off));
                        for (auto it = range.first; it != range.second; ++it) {
                            if (same_element(elements[it->second].matrix, cand_raw))
                                return it->second;
                        }
                    }
        return npos;
    }

    void insert(const Features& f, std::size_t idx) {
        static constexpr int center[4] = {0, 0, 0, 0};
        buckets.emplace(quantize(f, center), idx);
    }
};

struct Candidate {
    Mat matrix;
    std::size_t parent;
    int letter;
};

}  // namespace

OrbitIndex enumerate_ball(const GeneratorSystem& sys, int max_word_len,
                          const BallPoint& basepoint, const OrbitOptions& opts) {
    if (max_word_len < 1) throw Error("enumerate_ball: max_word_len must be >= 1");
    if (sys.generators.empty()) throw Error("enumerate_ball: empty system");
    const int k = sys.size();
    const int d = sys.ball_dim() + 1;
    const Vec olift = basepoint.lift();
    const double qo = form_q(olift);

    // letters: 1..k positive, -1..-k inverses; drop generators that are
    // numerically the identity (they only create duplicate words)
    std::vector<int> letters;
    std::vector<Mat> letter_mats;
    for (int i = 0; i < k; ++i) {
        if (sys.generators[i].is_identity()) continue;
        letters.push_back(i + 1);
        letter_mats.push_back(sys.generators[i].matrix());
        letters.push_back(-(i + 1));
        letter_mats.push_back(sys.generators[i].inverse().matrix());
    }

    OrbitIndex index(basepoint);
    DedupStore store;

    index.radius_cap_ = opts.radius_cap;
    const double cap = opts.radius_cap > 0.0 ? opts.radius_cap + opts.cap_slack : 0.0;
    auto push_element = [&](Mat m, Word word) {
        const double disp = displacement_of(olift, m * olift, qo);
        if (cap > 0.0 && disp > cap) return false;  // pruned, not a merge
        const Features f = features_of(m);
        const std::size_t found = store.find(m, f, index.elements_);
        if (found != DedupStore::npos) {
            ++index.merges_;
            return false;
        }
        store.insert(f, index.elements_.size());
        index.elements_.push_back(OrbitElement{std::move(m), std::move(word), disp});
        return true;
    };

    push_element(Mat::Identity(d, d), Word{});
    std::vector<std::size_t> frontier{0};

    const int threads = std::max(1, opts.threads);
    const std::size_t parents_per_block = 16384;
    std::vector<Candidate> candidates;
    for (int len = 1; len <= max_word_len && !frontier.empty(); ++len) {
        std::vector<std::size_t> next;
        const std::size_t per_parent = letters.size();
        // expand the frontier block by block: candidate generation is
        // parallel inside a block, insertion order stays deterministic
        for (std::size_t base = 0; base < frontier.size() && !index.truncated_;
             base += parents_per_block) {
            const std::size_t block = std::min(parents_per_block, frontier.size() - base);
            candidates.assign(block * per_parent, Candidate{});
            auto fill_range = [&](std::size_t lo, std::size_t hi) {
                for (std::size_t fi = lo; fi < hi; ++fi) {
                    const OrbitElement& parent = index.elements_[frontier[base + fi]];
                    const int last = parent.word.empty() ? 0 : parent.word.back();
                    for (std::size_t li = 0; li < per_parent; ++li) {
                        Candidate& cand = candidates[fi * per_parent + li];
                        cand.parent = frontier[base + fi];
                        if (letters[li] == -last) {
                            cand.letter = 0;  // would cancel; skip later
                            continue;
                        }
                        cand.letter = letters[li];
                        cand.matrix = parent.matrix * letter_mats[li];
                    }
                }
            };
            if (threads == 1 || block < 64) {
                fill_range(0, block);
            } else {
                std::vector<std::thread> pool;
                const std::size_t chunk = (block + threads - 1) / threads;
                for (int t = 0; t < threads; ++t) {
                    const std::size_t lo = std::min(block, t * chunk);
                    const std::size_t hi = std::min(block, lo + chunk);
                    if (lo < hi) pool.emplace_back(fill_range, lo, hi);
                }
                for (auto& th : pool) th.join();
            }

            for (Candidate& cand : candidates) {
                if (cand.letter == 0) continue;
                if (index.elements_.size() >= opts.max_elements) {
                    index.truncated_ = true;
                    break;
                }
                Word word = index.elements_[cand.parent].word;
                word.push_back(cand.letter);
                const std::size_t before = index.elements_.size();
                if (push_element(std::move(cand.matrix), std::move(word)))
                    next.push_back(before);
            }
        }
        index.max_word_length_ = len;
        if (index.truncated_) break;
        frontier = std::move(next);
    }
    return index;
}

OrbitCounts orbit_counts(const OrbitIndex& index, const std::vector<double>& grid) {
    if (index.size() == 0) throw Error("orbit_counts: empty index");
    OrbitCounts out;
    out.radii = grid;
    std::sort(out.radii.begin(), out.radii.end());
    std::vector<double> disps;
    disps.reserve(index.size());
    for (const auto& e : index.elements()) disps.push_back(e.displacement);
    std::sort(disps.begin(), disps.end());
    for (double r : out.radii) {
        const auto it = std::upper_bound(disps.begin(), disps.end(), r);
        out.counts.push_back(static_cast<std::size_t>(it - disps.begin()));
    }
    return out;
}

PointCloud limit_sample(const OrbitIndex& index, LimitMethod method, const LimitOptions& opts) {
    PointCloud cloud;
    cloud.ball_dim = index.basepoint().dim();
    cloud.method =
        method == LimitMethod::OrbitEndpoint ? "orbit-endpoint" : "conjugate-fixed-points";
    const Vec olift = index.basepoint().lift();

    if (method == LimitMethod::OrbitEndpoint) {
        for (const auto& e : index.elements()) {
            if (e.displacement < opts.endpoint_cutoff) continue;
            const Vec img = e.matrix * olift;
            Vec z = img.tail(img.size() - 1) / img(0);
            cloud.points.push_back(CloudPoint{BoundaryPoint::project(z),
                                              static_cast<int>(e.word.size())});
        }
        if (cloud.points.empty())
            throw Error("limit_sample: no orbit points beyond the cutoff; increase the "
                        "word length or lower the cutoff");
    } else {
        for (const auto& e : index.elements()) {
            if (e.word.empty()) continue;
            Isometry g{e.matrix};
            if (g.is_identity()) continue;
            ClassificationResult cls;
            try {
                cls = classify(g);
            } catch (const Error&) {
                continue;  // ill-conditioned element; skip
            }
            if (cls.type != IsometryType::Hyperbolic) continue;
            cloud.points.push_back(
                CloudPoint{*cls.attracting, static_cast<int>(e.word.size())});
        }
        if (cloud.points.empty())
            throw Error("limit_sample: no hyperbolic words found (elementary parabolic "
                        "input?)");
    }

    // elementary inputs produce at most two distinct points
    std::vector<Vec> distinct;
    for (const auto& p : cloud.points) {
        bool fresh = true;
        for (const Vec& q : distinct)
            if (boundary_gauge(p.point.coords(), q, Gauge::Koranyi) < 1e-6) {
                fresh = false;
                break;
            }
        if (fresh) distinct.push_back(p.point.coords());
        if (distinct.size() >= 3) break;
    }
    cloud.elementary_warning = distinct.size() < 3;
    return cloud;
}

PointCloud limit_sample(const GeneratorSystem& sys, int max_word_len, LimitMethod method,
                        const LimitOptions& opts) {
    const OrbitIndex index = enumerate_ball(sys, max_word_len, opts.orbit);
    return limit_sample(index, method, opts);
}

std::vector<std::size_t> thin_part_elements(const OrbitIndex& index, const BallPoint& x,
                                            double eps) {
    if (eps <= 0.0) throw Error("thin_part_elements: eps must be positive");
    const Vec xlift = x.lift();
    const double qx = form_q(xlift);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < index.size(); ++i) {
        const Vec img = index.elements()[i].matrix * xlift;
        if (displacement_of(xlift, img, qx) < eps) out.push_back(i);
    }
    return out;
}

bool conical_test(const BoundaryPoint& xi, const OrbitIndex& index, double R,
                  const ConicalOptions& opts) {
    const auto ray = Geodesic::ray(index.basepoint(), xi);
    const Vec olift = index.basepoint().lift();
    const Vec xilift = xi.lift();
    const double qo = form_q(olift);
    const double oxi = std::norm(form_inner(olift, xilift));

    std::vector<double> depths;
    for (const auto& e : index.elements()) {
        const Vec p = e.matrix * olift;
        // distance from the orbit point to the ray [t0, inf)
        const cplx a = form_inner(ray.line.xi_lift(), p);
        const cplx b = form_inner(ray.line.eta_lift(), p);
        const double aa = std::abs(a), bb = std::abs(b);
        double t = 0.5 * std::log(bb / aa);
        t = std::max(t, ray.param_x);
        const double e2t = std::exp(2.0 * t);
        const double num = aa * aa * e2t + bb * bb / e2t + 2.0 * (a * std::conj(b)).real();
        const double dist = std::acosh(std::max(1.0, std::sqrt(num / (-2.0 * qo))));
        if (dist > R) continue;
        // Busemann depth toward xi (positive = deeper); q(p) = q(o) exactly
        const double bus =
            0.5 * std::log(std::norm(form_inner(p, xilift)) / oxi);
        depths.push_back(-bus);
    }
    std::sort(depths.begin(), depths.end());
    int witnesses = 0;
    double last = -1e30;
    for (double depth : depths) {
        if (depth >= last + opts.depth_gap) {
            ++witnesses;
            last = depth;
            if (witnesses >= opts.witnesses) return true;
        }
    }
    return false;
}

}  // namespace chg
