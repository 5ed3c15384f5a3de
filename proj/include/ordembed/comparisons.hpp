#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>

#include "ordembed/common.hpp"
#include "ordembed/domain.hpp"

namespace ordembed {

// Strictly increasing dissimilarity transform g.  Table entries define a
// strictly increasing piecewise-linear map (extrapolated linearly).
struct MonotoneTransform {
    enum class Kind { Identity, Square, Log1p, Table };
    Kind kind = Kind::Identity;
    std::vector<std::pair<double, double>> table;

    static MonotoneTransform identity() { return {}; }
    static MonotoneTransform square() { return {Kind::Square, {}}; }
    static MonotoneTransform log1p() { return {Kind::Log1p, {}}; }
    static MonotoneTransform tabulated(std::vector<std::pair<double, double>> t) {
        if (t.size() < 2) throw ConfigError("transform table needs at least 2 knots");
        for (std::size_t i = 1; i < t.size(); ++i)
            if (!(t[i].first > t[i - 1].first) || !(t[i].second > t[i - 1].second))
                throw ConfigError("transform table must be strictly increasing");
        return {Kind::Table, std::move(t)};
    }

    double operator()(double x) const {
        switch (kind) {
            case Kind::Identity: return x;
            case Kind::Square: return x * x;
            case Kind::Log1p: return std::log1p(x);
            case Kind::Table: {
                std::size_t j = 1;
                while (j + 1 < table.size() && table[j].first < x) ++j;
                const auto& a = table[j - 1];
                const auto& b = table[j];
                return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
            }
        }
        return x;
    }
};

// delta_ij = g(||x_i - x_j||), with an optional seeded 1e-12 jitter to break
// exact ties on adversarial inputs.
class DissimilarityOracle {
public:
    explicit DissimilarityOracle(PointCloud cloud,
                                 MonotoneTransform transform = MonotoneTransform::identity(),
                                 std::optional<std::uint64_t> tie_jitter_seed = std::nullopt)
        : cloud_(std::move(cloud)), transform_(std::move(transform)), jitter_(tie_jitter_seed) {
        if (cloud_.points.size() < 2) throw DegenerateInputError("oracle needs >= 2 items");
    }

    std::size_t n() const { return cloud_.points.size(); }
    const PointCloud& cloud() const { return cloud_; }

    double distance(int i, int j) const {
        return (cloud_.points[static_cast<std::size_t>(i)] -
                cloud_.points[static_cast<std::size_t>(j)])
            .norm();
    }

    double delta(int i, int j) const {
        if (i == j) return 0.0;
        double v = transform_(distance(i, j));
        if (jitter_) {
            const int a = std::min(i, j), b = std::max(i, j);
            const std::uint64_t hsh = splitmix64(
                *jitter_ ^ splitmix64((static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b)));
            v += 1e-12 * (static_cast<double>(hsh >> 11) * 0x1.0p-53);
        }
        return v;
    }

    // Comparison key: monotone-equivalent to delta, avoiding the transform
    // when no jitter is in play.
    double key(int i, int j) const {
        if (i == j) return 0.0;
        if (!jitter_ && transform_.kind == MonotoneTransform::Kind::Identity) return distance(i, j);
        if (!jitter_) return distance(i, j);  // g strictly increasing preserves order
        return delta(i, j);
    }

private:
    PointCloud cloud_;
    MonotoneTransform transform_;
    std::optional<std::uint64_t> jitter_;
};

struct LandmarkIndex {
    std::vector<int> indices;  // sorted, unique

    static LandmarkIndex of(std::vector<int> idx, std::size_t n) {
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        if (idx.empty()) throw ConfigError("landmark set must be nonempty");
        if (idx.front() < 0 || static_cast<std::size_t>(idx.back()) >= n)
            throw ConfigError("landmark index out of range");
        return {std::move(idx)};
    }
    std::size_t count() const { return indices.size(); }
    bool contains(int i) const {
        return std::binary_search(indices.begin(), indices.end(), i);
    }
};

enum class Verdict { Less, Greater, NotInDesign };

enum class DesignKind { Quadruple, Triple, LocalRadius, LocalKnn, LandmarkTriple, LandmarkQuadruple };

using Quad = std::array<int, 4>;

// A comparison design over [n]: a lazy membership oracle for quadruples
// (i,j,k,l) meaning delta_ij < delta_kl, with optional materialization for
// small n.  Exact dissimilarity ties are never asserted.
class ComparisonSet {
public:
    static constexpr std::size_t kMaterializeGuard = 40;

    static ComparisonSet quadruple(std::shared_ptr<const DissimilarityOracle> oracle) {
        return ComparisonSet(std::move(oracle), DesignKind::Quadruple);
    }
    static ComparisonSet triple(std::shared_ptr<const DissimilarityOracle> oracle) {
        return ComparisonSet(std::move(oracle), DesignKind::Triple);
    }
    static ComparisonSet local_radius(std::shared_ptr<const DissimilarityOracle> oracle,
                                      double radius) {
        if (!(radius > 0.0)) throw ConfigError("locality radius must be positive");
        ComparisonSet c(std::move(oracle), DesignKind::LocalRadius);
        c.radius_ = radius;
        return c;
    }
    static ComparisonSet local_knn(std::shared_ptr<const DissimilarityOracle> oracle, int k) {
        ComparisonSet c(std::move(oracle), DesignKind::LocalKnn);
        if (k < 1 || static_cast<std::size_t>(k) >= c.n()) throw ConfigError("need 1 <= K < n");
        c.k_ = k;
        c.build_knn();
        return c;
    }
    static ComparisonSet landmark(std::shared_ptr<const DissimilarityOracle> oracle,
                                  LandmarkIndex landmarks, bool quadruple_flavor) {
        ComparisonSet c(std::move(oracle),
                        quadruple_flavor ? DesignKind::LandmarkQuadruple : DesignKind::LandmarkTriple);
        c.landmarks_ = std::move(landmarks);
        c.landmark_mask_.assign(c.n(), 0);
        for (int i : c.landmarks_.indices) c.landmark_mask_[static_cast<std::size_t>(i)] = 1;
        return c;
    }

    DesignKind kind() const { return kind_; }
    std::size_t n() const { return oracle_->n(); }
    const DissimilarityOracle& oracle() const { return *oracle_; }
    const LandmarkIndex& landmarks() const { return landmarks_; }
    double radius() const { return radius_; }
    int knn_k() const { return k_; }

    Verdict query(int i, int j, int k, int l) const {
        check_index(i);
        check_index(j);
        check_index(k);
        check_index(l);
        if (in_structure(i, j, k, l)) {
            const double a = oracle_->key(i, j), b = oracle_->key(k, l);
            if (a < b) return Verdict::Less;
        }
        if (in_structure(k, l, i, j)) {
            const double a = oracle_->key(i, j), b = oracle_->key(k, l);
            if (b < a) return Verdict::Greater;
        }
        return Verdict::NotInDesign;
    }

    bool asserts(int i, int j, int k, int l) const { return query(i, j, k, l) == Verdict::Less; }

    // Number of comparison queries needed to build the design:
    // n*l*(l-1) item-to-landmark triples, plus l^2(l^2-1) ordered
    // pair-vs-pair queries among landmarks for the quadruple flavor.
    std::uint64_t query_budget() const {
        const auto nn = static_cast<std::uint64_t>(n());
        switch (kind_) {
            case DesignKind::Quadruple: {
                const std::uint64_t p = nn * nn;
                return p * (p - 1);
            }
            case DesignKind::Triple: return nn * nn * (nn - 1);
            case DesignKind::LandmarkTriple: {
                const auto l = static_cast<std::uint64_t>(landmarks_.count());
                return nn * l * (l - 1);
            }
            case DesignKind::LandmarkQuadruple: {
                const auto l = static_cast<std::uint64_t>(landmarks_.count());
                return nn * l * (l - 1) + l * l * (l * l - 1);
            }
            default: return 0;  // local designs: data dependent, see materialize()
        }
    }

    // Explicit list of asserted quadruples; guarded to small item counts.
    std::vector<Quad> materialize() const {
        if (n() > kMaterializeGuard)
            throw SizeGuardError("materialization limited to n <= " +
                                 std::to_string(kMaterializeGuard));
        const int m = static_cast<int>(n());
        std::vector<Quad> out;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l)
                        if (asserts(i, j, k, l)) out.push_back({i, j, k, l});
        return out;
    }

    // Window membership for local designs: can pair (i, j) appear on the
    // apex-i side of the window.
    bool in_window(int i, int j) const {
        switch (kind_) {
            case DesignKind::LocalRadius: return i == j || oracle_->distance(i, j) < radius_;
            case DesignKind::LocalKnn: return i != j && knn_contains(i, j);
            default: return true;
        }
    }

private:
    ComparisonSet(std::shared_ptr<const DissimilarityOracle> oracle, DesignKind kind)
        : oracle_(std::move(oracle)), kind_(kind) {
        if (!oracle_) throw ConfigError("null oracle");
        if (oracle_->n() < 2) throw ConfigError("design needs n >= 2");
    }

    void check_index(int i) const {
        if (i < 0 || static_cast<std::size_t>(i) >= n()) throw DimensionError("item index out of range");
    }

    void build_knn() {
        const int m = static_cast<int>(n());
        knn_.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0);
        std::vector<int> order(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            std::iota(order.begin(), order.end(), 0);
            // K nearest by distance, ties at the K-th broken by index order
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (a == i) return false;
                if (b == i) return true;
                const double da = oracle_->distance(i, a), db = oracle_->distance(i, b);
                if (da != db) return da < db;
                return a < b;
            });
            for (int t = 0; t < k_; ++t)
                knn_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                     static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = 1;
        }
    }

    bool knn_contains(int i, int j) const {
        return knn_[static_cast<std::size_t>(i) * n() + static_cast<std::size_t>(j)] != 0;
    }

    // Structural (non-comparison) membership condition of the ordered tuple.
    bool in_structure(int i, int j, int k, int l) const {
        switch (kind_) {
            case DesignKind::Quadruple: return true;
            case DesignKind::Triple: return i == k;
            case DesignKind::LocalRadius:
                return in_window(i, j) && in_window(i, k) && in_window(i, l);
            case DesignKind::LocalKnn:
                return in_window(i, j) && in_window(i, k) && in_window(i, l);
            case DesignKind::LandmarkTriple:
                return i == k && landmark_mask_[static_cast<std::size_t>(j)] &&
                       landmark_mask_[static_cast<std::size_t>(l)];
            case DesignKind::LandmarkQuadruple:
                return (i == k && landmark_mask_[static_cast<std::size_t>(j)] &&
                        landmark_mask_[static_cast<std::size_t>(l)]) ||
                       (landmark_mask_[static_cast<std::size_t>(i)] &&
                        landmark_mask_[static_cast<std::size_t>(j)] &&
                        landmark_mask_[static_cast<std::size_t>(k)] &&
                        landmark_mask_[static_cast<std::size_t>(l)]);
        }
        return false;
    }

    std::shared_ptr<const DissimilarityOracle> oracle_;
    DesignKind kind_;
    double radius_ = 0.0;
    int k_ = 0;
    LandmarkIndex landmarks_;
    std::vector<char> landmark_mask_;
    std::vector<char> knn_;
};

inline ComparisonSet design_quadruple(std::shared_ptr<const DissimilarityOracle> oracle) {
    return ComparisonSet::quadruple(std::move(oracle));
}
inline ComparisonSet design_triple(std::shared_ptr<const DissimilarityOracle> oracle) {
    return ComparisonSet::triple(std::move(oracle));
}
inline ComparisonSet design_local(std::shared_ptr<const DissimilarityOracle> oracle, double radius) {
    return ComparisonSet::local_radius(std::move(oracle), radius);
}
inline ComparisonSet design_local_knn(std::shared_ptr<const DissimilarityOracle> oracle, int k) {
    return ComparisonSet::local_knn(std::move(oracle), k);
}
inline ComparisonSet design_landmark(std::shared_ptr<const DissimilarityOracle> oracle,
                                     LandmarkIndex landmarks, bool quadruple_flavor) {
    return ComparisonSet::landmark(std::move(oracle), std::move(landmarks), quadruple_flavor);
}

enum class InferenceRule { Degenerate, DistinctItems };

struct InferredPairs {
    std::vector<std::pair<int, int>> pairs;  // unordered pairs with delta < r
    bool window_condition_ok = true;         // r >= C0 * (covering-radius proxy)
    double eps_proxy = 0.0;
};

// Recover the sub-threshold pair set {(k,l) : delta_kl < r} from a local
// design through its membership oracle alone.
//
// Degenerate rule: (k,k,k,l) or (l,l,l,k) is in the design iff delta_kl < r.
// Distinct-items rule: a witness tuple (k,l,k,m) or (l,k,l,m) with three
// distinct items; its window certifies delta_kl < r, and for r well above
// the sample density some witness m exists whenever delta_kl < r.
inline InferredPairs infer_below_threshold(const ComparisonSet& cset,
                                           InferenceRule rule = InferenceRule::Degenerate,
                                           double c0 = 10.0) {
    if (cset.kind() != DesignKind::LocalRadius)
        throw InapplicableError("threshold inference needs a radius-based local design");
    const int m = static_cast<int>(cset.n());
    InferredPairs out;
    for (int k = 0; k < m; ++k)
        for (int l = k + 1; l < m; ++l) {
            bool below = false;
            if (rule == InferenceRule::Degenerate) {
                below = cset.query(k, k, k, l) == Verdict::Less ||
                        cset.query(l, l, l, k) == Verdict::Less;
            } else {
                for (int w = 0; w < m && !below; ++w) {
                    if (w == k || w == l) continue;
                    below = cset.query(k, l, k, w) != Verdict::NotInDesign ||
                            cset.query(l, k, l, w) != Verdict::NotInDesign;
                }
            }
            if (below) out.pairs.emplace_back(k, l);
        }
    // sample-density proxy for eps_n: median nearest-item distance
    std::vector<double> nn_dist(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double nn = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j)
            if (j != i) nn = std::min(nn, cset.oracle().distance(i, j));
        nn_dist[static_cast<std::size_t>(i)] = nn;
    }
    std::sort(nn_dist.begin(), nn_dist.end());
    out.eps_proxy = nn_dist[nn_dist.size() / 2];
    out.window_condition_ok = cset.radius() >= c0 * out.eps_proxy;
    return out;
}

struct SandwichReport {
    bool holds_for_all = true;
    std::vector<int> violating_indices;
};

// Check Neigh_{K/2}(x_i) ⊆ {||x_j - x_i|| <= r} ⊆ Neigh_{2K}(x_i) for all i,
// with K = round(n r^d).
inline SandwichReport knn_rball_sandwich(const PointCloud& cloud, double r, int K) {
    const int m = static_cast<int>(cloud.points.size());
    if (K < 1) throw ConfigError("need K >= 1");
    const double expected = static_cast<double>(m) * std::pow(r, cloud.dim);
    if (std::abs(static_cast<double>(K) - expected) > 0.5 + 1e-9)
        throw ConfigError("K must equal round(n * r^d)");
    SandwichReport rep;
    const int k_half = K / 2;
    std::vector<double> dist(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) dist[static_cast<std::size_t>(j)] = (cloud.points[static_cast<std::size_t>(j)] - cloud.points[static_cast<std::size_t>(i)]).norm();
        dist[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
        std::vector<double> sorted(dist);
        std::sort(sorted.begin(), sorted.end());
        int in_ball = 0;
        for (int j = 0; j < m; ++j)
            if (j != i && dist[static_cast<std::size_t>(j)] <= r) ++in_ball;
        const bool left_ok = k_half == 0 || sorted[static_cast<std::size_t>(k_half - 1)] <= r;
        const bool right_ok = in_ball <= 2 * K;
        if (!(left_ok && right_ok)) {
            rep.holds_for_all = false;
            rep.violating_indices.push_back(i);
        }
    }
    return rep;
}

}  // namespace ordembed
