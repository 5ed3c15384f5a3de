#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include "ordembed/common.hpp"
#include "ordembed/domain.hpp"
#include "ordembed/embedding.hpp"
#include "ordembed/similarity.hpp"

namespace ordembed {

struct AlignmentResult {
    SimilarityTransform transform;
    double sup_error = 0.0;  // max_i ||phi(x_i) - S(x_i)||, upper bound on the infimum
    double rms_error = 0.0;
    double scale_estimate = 1.0;
};

// How close the embedding is to a similarity of the ground truth, over an
// optional index subset (e.g. the U^h interior items).
inline AlignmentResult alignment_error(const Embedding& emb, const PointCloud& truth,
                                       const std::vector<int>& restrict_to = {}) {
    if (emb.size() != truth.size()) throw DimensionError("embedding/truth size mismatch");
    std::vector<int> idx = restrict_to;
    if (idx.empty()) {
        idx.resize(truth.size());
        std::iota(idx.begin(), idx.end(), 0);
    }
    if (static_cast<int>(idx.size()) < truth.dim + 1)
        throw DegenerateInputError("restriction smaller than d+1 items");
    std::vector<Vec> src, dst;
    src.reserve(idx.size());
    dst.reserve(idx.size());
    for (int i : idx) {
        src.push_back(truth.points[static_cast<std::size_t>(i)]);
        dst.push_back(emb.points[static_cast<std::size_t>(i)]);
    }
    auto fit = fit_similarity(src, dst);
    AlignmentResult out;
    out.transform = fit.transform;
    out.sup_error = fit.sup_error;
    out.scale_estimate = fit.transform.scale;
    double acc = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i)
        acc += (fit.transform(src[i]) - dst[i]).squaredNorm();
    out.rms_error = std::sqrt(acc / static_cast<double>(src.size()));
    return out;
}

struct ModulusProfile {
    std::vector<double> eta_grid;
    std::vector<double> omega_values;  // non-decreasing in eta
};

// omega(eta) = sup { ||psi(x) - psi(x')|| : ||x - x'|| <= eta }, exact over
// the finite map.
inline ModulusProfile modulus_of_continuity(const std::vector<Vec>& sources,
                                            const std::vector<Vec>& images,
                                            std::vector<double> eta_grid) {
    if (sources.size() < 2 || sources.size() != images.size())
        throw DegenerateInputError("need >= 2 paired points");
    std::sort(eta_grid.begin(), eta_grid.end());
    std::vector<std::pair<double, double>> pairs;  // (source distance, image distance)
    for (std::size_t i = 0; i < sources.size(); ++i)
        for (std::size_t j = i + 1; j < sources.size(); ++j)
            pairs.emplace_back((sources[i] - sources[j]).norm(), (images[i] - images[j]).norm());
    std::sort(pairs.begin(), pairs.end());
    ModulusProfile prof;
    prof.eta_grid = eta_grid;
    prof.omega_values.resize(eta_grid.size(), 0.0);
    double run = 0.0;
    std::size_t p = 0;
    for (std::size_t g = 0; g < eta_grid.size(); ++g) {
        while (p < pairs.size() && pairs[p].first <= eta_grid[g]) {
            run = std::max(run, pairs[p].second);
            ++p;
        }
        prof.omega_values[g] = run;
    }
    return prof;
}

// Max additive distance distortion over all pairs.
inline double eps_isometry_defect(const std::vector<Vec>& sources,
                                  const std::vector<Vec>& images) {
    if (sources.size() < 2 || sources.size() != images.size())
        throw DegenerateInputError("need >= 2 paired points");
    double eps = 0.0;
    for (std::size_t i = 0; i < sources.size(); ++i)
        for (std::size_t j = i + 1; j < sources.size(); ++j)
            eps = std::max(eps, std::abs((images[i] - images[j]).norm() -
                                         (sources[i] - sources[j]).norm()));
    return eps;
}

// Directional-sampling lower bound of the thickness
// theta(V) = inf_{||u||=1} diam(u^T V).
inline double thickness(const std::vector<Vec>& points, std::uint64_t seed = 0,
                        int directions = 1000) {
    if (points.size() < 2) throw DegenerateInputError("need >= 2 points");
    const int d = static_cast<int>(points[0].size());
    Rng rng(seed);
    double theta = std::numeric_limits<double>::infinity();
    for (int t = 0; t < directions; ++t) {
        Vec u = rng.unit_vector(d);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : points) {
            const double v = u.dot(p);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        theta = std::min(theta, hi - lo);
    }
    return theta;
}

// Max over sampled pairs of || f((x+y)/2) - (f(x)+f(y))/2 ||.  The map is a
// callable; wrap a discrete map in its 1-NN interpolation first.
inline double midlinearity_defect(const std::function<Vec(const Vec&)>& map,
                                  const std::vector<Vec>& region_points, int pair_samples,
                                  std::uint64_t seed) {
    if (region_points.size() < 2) throw DegenerateInputError("need >= 2 region points");
    Rng rng(seed);
    double defect = 0.0;
    const auto n = static_cast<std::uint64_t>(region_points.size());
    for (int t = 0; t < pair_samples; ++t) {
        const auto a = rng.below(n), b = rng.below(n);
        if (a == b) continue;
        const Vec& x = region_points[a];
        const Vec& y = region_points[b];
        const Vec mid = 0.5 * (x + y);
        defect = std::max(defect, (map(mid) - 0.5 * (map(x) + map(y))).norm());
    }
    return defect;
}

inline double midlinearity_defect(const std::vector<Vec>& sources, const std::vector<Vec>& images,
                                  int pair_samples, std::uint64_t seed) {
    auto interp = [&](const Vec& q) { return one_nn_interpolate(sources, images, q); };
    return midlinearity_defect(interp, sources, pair_samples, seed);
}

struct NearSimReport {
    std::vector<double> eta_grid;
    std::vector<double> max_discrepancy;  // per eta bucket
    double epsilon = 0.0;                 // Hausdorff density of the tested points in the ball
    double envelope_slope = 0.0;          // least-squares fit of discrepancy on (eta + eps)
    double envelope_intercept = 0.0;
    bool fits_envelope = false;           // discrepancy <= budget * (eta + eps) everywhere
};

// Near-similarity behavior of an isotonic map on a ball: quadruples with
// ||x - x'|| = ||x^dag - x^ddag|| +- eta must have image distances within a
// linear-in-(eta + eps) band.
inline NearSimReport near_sim_check(const std::vector<Vec>& sources, const std::vector<Vec>& images,
                                    const Vec& ball_center, double ball_radius,
                                    double tolerance_budget, const std::vector<double>& eta_grid,
                                    std::uint64_t seed = 0, int quad_samples = 200000) {
    if (sources.size() != images.size() || sources.size() < 4)
        throw DegenerateInputError("need >= 4 paired points");
    // precondition: the map is isotonic over the tested points
    std::vector<std::pair<double, double>> kv;
    for (std::size_t i = 0; i < sources.size(); ++i)
        for (std::size_t j = i + 1; j < sources.size(); ++j)
            kv.emplace_back((sources[i] - sources[j]).norm(), (images[i] - images[j]).norm());
    {
        auto sorted = kv;
        std::sort(sorted.begin(), sorted.end());
        double run = -1.0;
        for (std::size_t t = 0; t < sorted.size(); ++t) {
            if (t > 0 && sorted[t].first > sorted[t - 1].first) run = std::max(run, sorted[t - 1].second);
            if (sorted[t].second < run)
                throw InapplicableError("map is not isotonic on the tested points");
        }
    }

    // inner pairs: both endpoints in B(v, 3r/4)
    std::vector<std::pair<int, int>> inner, all_pairs;
    for (int i = 0; i < static_cast<int>(sources.size()); ++i)
        for (int j = i + 1; j < static_cast<int>(sources.size()); ++j) {
            all_pairs.emplace_back(i, j);
            if ((sources[static_cast<std::size_t>(i)] - ball_center).norm() <= 0.75 * ball_radius &&
                (sources[static_cast<std::size_t>(j)] - ball_center).norm() <= 0.75 * ball_radius)
                inner.emplace_back(i, j);
        }
    if (inner.empty()) throw InapplicableError("no pairs inside the inner ball");

    // Hausdorff density of the sources in the ball, by grid
    DomainSpec ball({Ball{ball_center, ball_radius}});
    const double eps = hausdorff_density(sources, ball, ball_radius / 40.0);

    NearSimReport rep;
    rep.eta_grid = eta_grid;
    std::sort(rep.eta_grid.begin(), rep.eta_grid.end());
    rep.max_discrepancy.assign(rep.eta_grid.size(), 0.0);
    rep.epsilon = eps;

    Rng rng(seed);
    for (int t = 0; t < quad_samples; ++t) {
        const auto& [i, j] = inner[rng.below(inner.size())];
        const auto& [k, l] = all_pairs[rng.below(all_pairs.size())];
        const double gap = std::abs((sources[static_cast<std::size_t>(i)] - sources[static_cast<std::size_t>(j)]).norm() -
                                    (sources[static_cast<std::size_t>(k)] - sources[static_cast<std::size_t>(l)]).norm());
        const double disc = std::abs((images[static_cast<std::size_t>(i)] - images[static_cast<std::size_t>(j)]).norm() -
                                     (images[static_cast<std::size_t>(k)] - images[static_cast<std::size_t>(l)]).norm());
        for (std::size_t g = 0; g < rep.eta_grid.size(); ++g)
            if (gap <= rep.eta_grid[g]) {
                rep.max_discrepancy[g] = std::max(rep.max_discrepancy[g], disc);
                break;  // buckets are nested via the cumulative pass below
            }
    }
    for (std::size_t g = 1; g < rep.max_discrepancy.size(); ++g)
        rep.max_discrepancy[g] = std::max(rep.max_discrepancy[g], rep.max_discrepancy[g - 1]);

    // least-squares discrepancy ~ slope * (eta + eps) + intercept
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto m = static_cast<double>(rep.eta_grid.size());
    for (std::size_t g = 0; g < rep.eta_grid.size(); ++g) {
        const double x = rep.eta_grid[g] + eps, y = rep.max_discrepancy[g];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    rep.envelope_slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    rep.envelope_intercept = (sy - rep.envelope_slope * sx) / m;
    rep.fits_envelope = true;
    for (std::size_t g = 0; g < rep.eta_grid.size(); ++g)
        if (rep.max_discrepancy[g] > tolerance_budget * (rep.eta_grid[g] + eps))
            rep.fits_envelope = false;
    return rep;
}

struct DiamBoundReport {
    double c = 0.0;        // diam(psi(Lambda)) / (5 diam(Lambda))
    double epsilon = 0.0;  // Hausdorff density of Lambda in its convex hull (sampled)
    std::vector<std::pair<int, int>> violators;
    bool holds = true;
};

// Lower bound on image distances: ||psi(x)-psi(x')|| >= c ||x-x'|| whenever
// ||x-x'|| >= 4 eps.  eps is estimated by seeded sampling of the convex
// hull (documented underestimate).
inline DiamBoundReport diam_lower_bound_check(const std::vector<Vec>& sources,
                                              const std::vector<Vec>& images,
                                              std::uint64_t seed = 0, int hull_samples = 20000) {
    if (sources.size() < 2 || sources.size() != images.size())
        throw DegenerateInputError("need >= 2 paired points");
    DiamBoundReport rep;
    double diam_src = 0.0, diam_img = 0.0;
    for (std::size_t i = 0; i < sources.size(); ++i)
        for (std::size_t j = i + 1; j < sources.size(); ++j) {
            diam_src = std::max(diam_src, (sources[i] - sources[j]).norm());
            diam_img = std::max(diam_img, (images[i] - images[j]).norm());
        }
    if (diam_src == 0.0) throw DegenerateInputError("degenerate source set");
    rep.c = diam_img / (5.0 * diam_src);

    Rng rng(seed);
    const int d = static_cast<int>(sources[0].size());
    const auto n = sources.size();
    double eps_sq = 0.0;
    for (int t = 0; t < hull_samples; ++t) {
        // random convex combination of d+1 sampled vertices
        Vec y = Vec::Zero(d);
        double wsum = 0.0;
        for (int s = 0; s < d + 1; ++s) {
            const double w = -std::log(1.0 - rng.uniform());
            y += w * sources[rng.below(n)];
            wsum += w;
        }
        y /= wsum;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& x : sources) best = std::min(best, (y - x).squaredNorm());
        eps_sq = std::max(eps_sq, best);
    }
    rep.epsilon = std::sqrt(eps_sq);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double src = (sources[i] - sources[j]).norm();
            if (src < 4.0 * rep.epsilon) continue;
            if ((images[i] - images[j]).norm() < rep.c * src) {
                rep.violators.emplace_back(static_cast<int>(i), static_cast<int>(j));
                rep.holds = false;
            }
        }
    return rep;
}

}  // namespace ordembed
