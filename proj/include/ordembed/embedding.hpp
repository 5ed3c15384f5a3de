#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ordembed/common.hpp"
#include "ordembed/comparisons.hpp"

namespace ordembed {

// Map from item index to a point p_i in R^d.
struct Embedding {
    int dim = 0;
    std::vector<Vec> points;
    std::string provenance;
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }

    bool finite() const {
        for (const auto& p : points)
            if (!p.allFinite()) return false;
        return true;
    }

    // Enclosing ball of the image (the bounded set Q the map lands in).
    std::pair<Vec, double> bounding_ball() const {
        Vec c = Vec::Zero(dim);
        for (const auto& p : points) c += p;
        c /= static_cast<double>(points.size());
        for (int k = 1; k <= 256; ++k) {
            std::size_t far = 0;
            double best = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double v = (points[i] - c).squaredNorm();
                if (v > best) {
                    best = v;
                    far = i;
                }
            }
            c += (points[far] - c) / static_cast<double>(k + 1);
        }
        double r = 0.0;
        for (const auto& p : points) r = std::max(r, (p - c).norm());
        return {c, r};
    }
};

struct EmbedReport {
    std::uint64_t violations = 0;   // asserted comparisons with ||p_i-p_j|| > ||p_k-p_l||
    std::uint64_t iterations = 0;   // gradient steps, or draws for the rejection sampler
    double wall_time = 0.0;         // seconds
    std::uint64_t fallback_count = 0;       // stage-2 items placed at the nearest landmark
    std::uint64_t stage1_violations = 0;    // landmark-subdesign violations after stage 1
    std::vector<double> penalty_trace;      // per-iteration penalty, full-batch runs only
};

namespace detail {

inline double img_sq(const Embedding& e, int i, int j) {
    return (e.points[static_cast<std::size_t>(i)] - e.points[static_cast<std::size_t>(j)])
        .squaredNorm();
}

// Walk values sorted by key and demand the image never decreases across
// strictly increasing keys (ties are unconstrained).  Returns false on the
// first inversion.
inline bool chain_monotone(std::vector<std::pair<double, double>>& kv) {
    std::sort(kv.begin(), kv.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double running_max = -1.0, group_max = -1.0, group_key = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [key, img] : kv) {
        if (key != group_key) {
            running_max = std::max(running_max, group_max);
            group_key = key;
            group_max = -1.0;
        }
        if (img < running_max) return false;
        group_max = std::max(group_max, img);
    }
    return true;
}

}  // namespace detail

// Exactness of the embedding for the design: every asserted comparison
// delta_ij < delta_kl maps to ||p_i - p_j|| <= ||p_k - p_l||.  Uses the
// per-design chain structure, so it is exact at any size.
inline bool embedding_is_exact(const Embedding& emb, const ComparisonSet& cset) {
    const int n = static_cast<int>(cset.n());
    const auto& oracle = cset.oracle();
    switch (cset.kind()) {
        case DesignKind::Quadruple: {
            std::vector<std::pair<double, double>> kv;
            kv.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    kv.emplace_back(oracle.key(i, j), detail::img_sq(emb, i, j));
            return detail::chain_monotone(kv);
        }
        case DesignKind::Triple:
        case DesignKind::LandmarkTriple:
        case DesignKind::LandmarkQuadruple: {
            const bool landmark = cset.kind() != DesignKind::Triple;
            for (int i = 0; i < n; ++i) {
                std::vector<std::pair<double, double>> kv;
                if (landmark) {
                    for (int a : cset.landmarks().indices)
                        if (a != i) kv.emplace_back(oracle.key(i, a), detail::img_sq(emb, i, a));
                } else {
                    for (int j = 0; j < n; ++j)
                        if (j != i) kv.emplace_back(oracle.key(i, j), detail::img_sq(emb, i, j));
                }
                if (!detail::chain_monotone(kv)) return false;
            }
            if (cset.kind() == DesignKind::LandmarkQuadruple) {
                std::vector<std::pair<double, double>> kv;
                const auto& ls = cset.landmarks().indices;
                for (std::size_t a = 0; a < ls.size(); ++a)
                    for (std::size_t b = a + 1; b < ls.size(); ++b)
                        kv.emplace_back(oracle.key(ls[a], ls[b]), detail::img_sq(emb, ls[a], ls[b]));
                if (!detail::chain_monotone(kv)) return false;
            }
            return true;
        }
        case DesignKind::LocalRadius:
        case DesignKind::LocalKnn: {
            for (int i = 0; i < n; ++i) {
                std::vector<int> window;
                for (int j = 0; j < n; ++j)
                    if (j != i && cset.in_window(i, j)) window.push_back(j);
                // apex pairs sorted by key, with prefix maxima of the image
                std::vector<std::pair<double, double>> left;
                left.reserve(window.size());
                for (int j : window) left.emplace_back(oracle.key(i, j), detail::img_sq(emb, i, j));
                std::sort(left.begin(), left.end());
                std::vector<double> prefix_max(left.size());
                double run = -1.0;
                for (std::size_t t = 0; t < left.size(); ++t) {
                    run = std::max(run, left[t].second);
                    prefix_max[t] = run;
                }
                for (std::size_t a = 0; a < window.size(); ++a)
                    for (std::size_t b = a + 1; b < window.size(); ++b) {
                        const int k = window[a], l = window[b];
                        const double key_kl = oracle.key(k, l);
                        // count of apex pairs with key strictly below key_kl
                        auto it = std::lower_bound(
                            left.begin(), left.end(), key_kl,
                            [](const auto& p, double v) { return p.first < v; });
                        if (it == left.begin()) continue;
                        const std::size_t t = static_cast<std::size_t>(it - left.begin()) - 1;
                        if (prefix_max[t] > detail::img_sq(emb, k, l)) return false;
                    }
            }
            return true;
        }
    }
    return false;
}

enum class VerifyMode { Exhaustive, Sampled };

// Count asserted comparisons the embedding violates.  Image comparisons use
// weak <= with exact double arithmetic.  Exhaustive mode walks all tuples
// and is guarded to materializable sizes; sampled mode counts over k
// uniformly drawn tuples.
inline EmbedReport verify_embedding(const Embedding& emb, const ComparisonSet& cset,
                                    VerifyMode mode = VerifyMode::Exhaustive,
                                    std::uint64_t samples = 100000, std::uint64_t seed = 0) {
    EmbedReport rep;
    const int n = static_cast<int>(cset.n());
    if (mode == VerifyMode::Exhaustive) {
        if (cset.n() > ComparisonSet::kMaterializeGuard)
            throw SizeGuardError("exhaustive verification limited to n <= " +
                                 std::to_string(ComparisonSet::kMaterializeGuard));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        if (cset.asserts(i, j, k, l) &&
                            detail::img_sq(emb, i, j) > detail::img_sq(emb, k, l))
                            ++rep.violations;
        return rep;
    }
    Rng rng(seed);
    for (std::uint64_t t = 0; t < samples; ++t) {
        const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const int l = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (cset.asserts(i, j, k, l) && detail::img_sq(emb, i, j) > detail::img_sq(emb, k, l))
            ++rep.violations;
    }
    return rep;
}

// Residuals of the cross-threshold requirement for a radius-local design:
// pairs below the locality radius must not map farther apart than pairs at
// or beyond it.  Returns the exact count of violating (below, above) pairs.
inline std::uint64_t outside_condition_violations(const Embedding& emb, const ComparisonSet& cset) {
    if (cset.kind() != DesignKind::LocalRadius)
        throw InapplicableError("outside condition applies to radius-local designs");
    const int n = static_cast<int>(cset.n());
    std::vector<double> below, above;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double img = detail::img_sq(emb, i, j);
            if (cset.in_window(i, j))
                below.push_back(img);
            else
                above.push_back(img);
        }
    std::sort(below.begin(), below.end());
    std::sort(above.begin(), above.end());
    // count (b, a) with b > a by merging
    std::uint64_t count = 0;
    std::size_t ai = 0;
    for (const double b : below) {
        while (ai < above.size() && above[ai] < b) ++ai;
        count += ai;
    }
    return count;
}

// 1-nearest-neighbor interpolation: the mean of the images over the argmin
// set of sample points (exact distance ties are averaged).
inline Vec one_nn_interpolate(const std::vector<Vec>& sources, const std::vector<Vec>& images,
                              const Vec& query) {
    if (sources.empty() || sources.size() != images.size())
        throw DegenerateInputError("interpolation needs matching nonempty sources and images");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : sources) best = std::min(best, (query - s).squaredNorm());
    Vec acc = Vec::Zero(images[0].size());
    int count = 0;
    for (std::size_t i = 0; i < sources.size(); ++i)
        if ((query - sources[i]).squaredNorm() == best) {
            acc += images[i];
            ++count;
        }
    return acc / static_cast<double>(count);
}

inline std::vector<Vec> one_nn_interpolate(const std::vector<Vec>& sources,
                                           const std::vector<Vec>& images,
                                           const std::vector<Vec>& queries) {
    std::vector<Vec> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(one_nn_interpolate(sources, images, q));
    return out;
}

}  // namespace ordembed
