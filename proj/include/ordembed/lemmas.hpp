#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "ordembed/calibration.hpp"
#include "ordembed/common.hpp"
#include "ordembed/comparisons.hpp"
#include "ordembed/domain.hpp"
#include "ordembed/embedders.hpp"
#include "ordembed/metrics.hpp"
#include "ordembed/similarity.hpp"
#include "ordembed/simplex.hpp"
#include "ordembed/trilateration.hpp"

namespace ordembed {

struct LemmaResult {
    std::string name;
    bool pass = false;
    bool applicable = true;
    double slack = 0.0;  // measured margin; meaning is per certifier
    std::string note;
};

namespace certify {

inline LemmaResult simplex_identities(std::uint64_t) {
    LemmaResult r{"simplex", true};
    for (int m = 2; m <= 10; ++m) {
        auto s = regular_simplex(m, 1.0, m, Vec::Zero(m));
        const Vec mu = s.barycenter();
        for (const auto& v : s.vertices)
            r.slack = std::max(r.slack,
                               std::abs((mu - v).norm() - std::sqrt((m - 1) / (2.0 * m))));
        const Vec apex = simplex_apex(s);
        r.slack = std::max(r.slack, std::abs((apex - mu).norm() - std::sqrt((m + 1) / (2.0 * m))));
        for (const auto& v : s.vertices)
            r.slack = std::max(r.slack, std::abs((apex - v).norm() - 1.0));
    }
    r.pass = r.slack < 1e-12;
    return r;
}

inline LemmaResult trilateration_bound(std::uint64_t seed, int trials = 2000) {
    LemmaResult r{"trilateration", true};
    Rng rng(seed);
    double worst_exact = 0.0, worst_ratio = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int d = 1 + static_cast<int>(rng.below(5));
        std::vector<Vec> anchors;
        double sigma = 0.0;
        do {
            anchors.clear();
            for (int i = 0; i <= d; ++i) anchors.push_back(rng.unit_ball(d));
            sigma = smallest_relevant_singular_value(anchors);
        } while (sigma < 0.05);
        const Vec p = rng.unit_ball(d);
        std::vector<double> a2(static_cast<std::size_t>(d + 1)), b2 = a2;
        for (int i = 0; i <= d; ++i) a2[static_cast<std::size_t>(i)] = (p - anchors[static_cast<std::size_t>(i)]).squaredNorm();
        worst_exact = std::max(worst_exact, (trilaterate(anchors, a2) - p).norm());
        double max_pert = 0.0;
        for (int i = 0; i <= d; ++i) {
            const double noise = 0.02 * (rng.uniform() - 0.5);
            b2[static_cast<std::size_t>(i)] = std::max(0.0, a2[static_cast<std::size_t>(i)] + noise);
            max_pert = std::max(max_pert, std::abs(a2[static_cast<std::size_t>(i)] - b2[static_cast<std::size_t>(i)]));
        }
        const Vec q = trilaterate(anchors, b2);
        const double bound = std::sqrt(static_cast<double>(d)) / sigma * max_pert;
        if (bound > 0.0) worst_ratio = std::max(worst_ratio, (p - q).norm() / bound);
    }
    r.slack = std::max(worst_exact * 1e9, worst_ratio);
    r.pass = worst_exact < 1e-9 && worst_ratio <= 1.0;
    return r;
}

inline LemmaResult approx_simplex(std::uint64_t seed, int trials = 300) {
    LemmaResult r{"approx-simplex", true};
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int m = 3 + static_cast<int>(rng.below(4));
        const int d = m - 1 + static_cast<int>(rng.below(2));
        const double lambda = 0.5 + 2.0 * rng.uniform();
        auto s = regular_simplex(m, lambda, d, rng.unit_ball(d).eval());
        const double eta = 0.002 + 0.06 * rng.uniform();
        std::vector<Vec> pts = s.vertices;
        for (auto& p : pts) p += (eta * lambda / 4.0) * rng.unit_ball(d).eval();
        const double defect = approx_simplex_defect(pts);
        if (defect <= 0.0) continue;
        auto [fit, dev] = fit_regular_simplex(pts);
        double lam = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                lam = std::max(lam, (pts[i] - pts[j]).norm());
        worst = std::max(worst, dev / (lam * defect));
    }
    // degenerate probe: collinear input must be rejected, not fitted
    bool rejected = false;
    try {
        std::vector<Vec> col{Vec::Zero(2), Vec::Zero(2), Vec::Zero(2)};
        col[1][0] = 1.0;
        col[2][0] = 2.0;
        fit_regular_simplex(col);
    } catch (const DegenerateInputError&) {
        rejected = true;
    }
    r.slack = worst;
    r.pass = worst <= calib::kSimplexFitC && rejected;
    if (!rejected) r.note = "collinear probe was not rejected";
    return r;
}

inline LemmaResult barycenter_bound(std::uint64_t seed, int trials = 300) {
    LemmaResult r{"barycenter", true};
    Rng rng(seed);
    // gamma = 0 on an exact simplex: the equidistant hull point is the
    // barycenter itself
    {
        auto s = regular_simplex(4, 1.0, 3, Vec::Zero(3));
        const Vec mu = s.barycenter();
        double gamma = 0.0;
        for (const auto& v : s.vertices) gamma = std::max(gamma, std::abs((mu - v).squaredNorm() - (mu - s.vertices[0]).squaredNorm()));
        if (gamma > 1e-10) {
            r.pass = false;
            r.note = "gamma not zero at the barycenter of an exact simplex";
            return r;
        }
    }
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int m = 3 + static_cast<int>(rng.below(4));
        const int d = m - 1;
        const double lambda = 0.5 + 2.0 * rng.uniform();
        auto s = regular_simplex(m, lambda, d, rng.unit_ball(d).eval());
        std::vector<Vec> z = s.vertices;
        const double eta = 0.04 * rng.uniform();
        for (auto& p : z) p += (eta * lambda / 4.0) * rng.unit_ball(d).eval();
        // p in the affine hull: random convex-ish combination
        Vec p = Vec::Zero(d);
        double wsum = 0.0;
        for (const auto& v : z) {
            const double w = rng.uniform();
            p += w * v;
            wsum += w;
        }
        p /= wsum;
        Vec mu = Vec::Zero(d);
        for (const auto& v : z) mu += v;
        mu /= static_cast<double>(m);
        double lam = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t j = i + 1; j < z.size(); ++j) lam = std::max(lam, (z[i] - z[j]).norm());
        auto spread = [&](const Vec& q) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (const auto& v : z) {
                const double s2 = (q - v).squaredNorm();
                lo = std::min(lo, s2);
                hi = std::max(hi, s2);
            }
            return hi - lo;
        };
        const double gamma = spread(p), gamma_mu = spread(mu);
        const double bound = calib::kBarycenterC * (gamma + gamma_mu) / lam;
        if (bound > 0.0) worst = std::max(worst, (p - mu).norm() / bound);
    }
    r.slack = worst;
    r.pass = r.pass && worst <= 1.0;
    return r;
}

// Exact embedding of a small disk cloud, used by several certifiers.
inline std::pair<PointCloud, Embedding> exact_disk_embedding(std::uint64_t seed, int n) {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    PointCloud cloud = sample_domain(disk, static_cast<std::size_t>(n), seed);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    auto cset = design_quadruple(oracle);
    auto warm = rank_mds_init(cset, 2);
    RefineSchedule sched;
    sched.restarts = 3;
    auto [emb, rep] = refine_embed(cset, 2, derive_seed(seed, 9), warm, sched);
    if (rep.violations != 0) throw NumericError("exact embedding unavailable for certifier");
    return {cloud, emb};
}

inline LemmaResult near_sim(std::uint64_t seed, int n = 120) {
    LemmaResult r{"near-sim", true};
    try {
        auto [cloud, emb] = exact_disk_embedding(seed, n);
        // normalize the image scale so the frozen budget is comparable
        double src_diam = cloud.diameter();
        Embedding scaled = emb;
        double img_diam = 0.0;
        for (std::size_t i = 0; i < emb.points.size(); ++i)
            for (std::size_t j = i + 1; j < emb.points.size(); ++j)
                img_diam = std::max(img_diam, (emb.points[i] - emb.points[j]).norm());
        for (auto& p : scaled.points) p *= src_diam / img_diam;
        auto rep = near_sim_check(cloud.points, scaled.points, Vec::Zero(2), 1.0,
                                  calib::kNearSimBudget, {0.0, 0.05, 0.1, 0.2, 0.3},
                                  derive_seed(seed, 2), 100000);
        double worst = 0.0;
        for (std::size_t g = 0; g < rep.eta_grid.size(); ++g)
            worst = std::max(worst, rep.max_discrepancy[g] /
                                        (calib::kNearSimBudget * (rep.eta_grid[g] + rep.epsilon)));
        r.slack = worst;
        r.pass = rep.fits_envelope;
    } catch (const NumericError& e) {
        r.applicable = false;
        r.note = e.what();
    }
    return r;
}

inline LemmaResult diam_bound(std::uint64_t seed, int instances = 6, int n = 100) {
    LemmaResult r{"diam-bound", true};
    int done = 0;
    for (int t = 0; t < instances; ++t) {
        try {
            auto [cloud, emb] = exact_disk_embedding(derive_seed(seed, static_cast<std::uint64_t>(t)), n);
            auto rep = diam_lower_bound_check(cloud.points, emb.points, derive_seed(seed, 77));
            if (!rep.holds) {
                r.pass = false;
                r.slack += static_cast<double>(rep.violators.size());
            }
            ++done;
        } catch (const NumericError&) {
            continue;
        }
    }
    if (done == 0) {
        r.applicable = false;
        r.note = "no exact embeddings available";
    }
    return r;
}

inline LemmaResult one_nn_modulus(std::uint64_t seed, int instances = 20, int n = 80) {
    LemmaResult r{"1nn-modulus", true};
    Rng rng(seed);
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    double worst = 0.0;
    for (int t = 0; t < instances; ++t) {
        PointCloud cloud = sample_domain(disk, static_cast<std::size_t>(n), derive_seed(seed, static_cast<std::uint64_t>(t)));
        // arbitrary bounded map: random similarity plus noise
        Mat rot = rng.rotation(2);
        const double lam = 0.5 + rng.uniform();
        std::vector<Vec> images;
        images.reserve(cloud.points.size());
        for (const auto& x : cloud.points)
            images.push_back(lam * (rot * x) + 0.2 * rng.unit_ball(2).eval());
        // queries on a grid; eps upper bound adds the grid slack
        std::vector<Vec> queries;
        detail::for_each_grid_point(disk, 0.05, [&](const Vec& q) { queries.push_back(q); });
        double eps_hat = hausdorff_density(cloud.points, disk, 0.05) + 0.05 * std::sqrt(2.0);
        auto interp = one_nn_interpolate(cloud.points, images, queries);
        std::vector<double> etas{0.05, 0.1, 0.2, 0.4};
        auto omega_hat = modulus_of_continuity(queries, interp, etas);
        std::vector<double> shifted;
        for (double e : etas) shifted.push_back(e + 2.0 * eps_hat);
        auto omega = modulus_of_continuity(cloud.points, images, shifted);
        for (std::size_t g = 0; g < etas.size(); ++g) {
            if (omega.omega_values[g] > 0.0)
                worst = std::max(worst, omega_hat.omega_values[g] / omega.omega_values[g]);
            if (omega_hat.omega_values[g] > omega.omega_values[g]) r.pass = false;
        }
    }
    r.slack = worst;
    return r;
}

// The (K/2, 2K) sandwich constants leave little room between the boundary
// neighbor deficit and binomial fluctuations; the margin scales with the
// ratio of the ball volume unit to vol(U) and with sqrt(K).  A radius-0.8
// domain at K = 200 gives both inclusions a comfortable buffer.
inline LemmaResult knn_sandwich(std::uint64_t seed, int seeds = 10, int n = 4000, int K = 200) {
    LemmaResult r{"knn-sandwich", true};
    DomainSpec dom({Ball{Vec::Zero(2), 0.8}});
    const double radius = std::sqrt(static_cast<double>(K) / static_cast<double>(n));
    int held = 0;
    for (int s = 0; s < seeds; ++s) {
        PointCloud cloud = sample_domain(dom, static_cast<std::size_t>(n), derive_seed(seed, static_cast<std::uint64_t>(s)));
        if (knn_rball_sandwich(cloud, radius, K).holds_for_all) ++held;
    }
    r.slack = static_cast<double>(held) / static_cast<double>(seeds);
    r.pass = held * 10 >= seeds * 9;
    return r;
}

inline LemmaResult inter_vol(std::uint64_t seed, int trials = 50) {
    LemmaResult r{"inter-vol", true};
    Rng rng(seed);
    Vec c2(2);
    c2 << 1.2, 0.0;
    DomainSpec dom({Ball{Vec::Zero(2), 1.0}, Ball{c2, 0.8}});
    PointCloud probe = sample_domain(dom, static_cast<std::size_t>(trials), derive_seed(seed, 5));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Vec& x = probe.points[static_cast<std::size_t>(t)];
        const double rq = 0.05 + 2.0 * rng.uniform();
        auto [center, rad] = find_inscribed_ball(dom, x, rq, derive_seed(seed, static_cast<std::uint64_t>(t)));
        const double want = std::min(rq, dom.h()) / 2.0;
        // containment in B(x, rq) ∩ U via a single constituent ball
        double dom_margin = -std::numeric_limits<double>::infinity();
        for (const auto& b : dom.balls())
            dom_margin = std::max(dom_margin, b.radius - (center - b.center).norm() - rad);
        const double query_margin = rq - (center - x).norm() - rad;
        const double closure_margin = rad - (center - x).norm();
        if (rad < want - 1e-9 || dom_margin < -1e-9 || query_margin < -1e-9 ||
            closure_margin < -1e-9)
            r.pass = false;
        worst = std::max(worst, -std::min({dom_margin, query_margin, closure_margin}));
    }
    r.slack = worst;
    return r;
}

inline LemmaResult affine_close(std::uint64_t seed, int trials = 1000) {
    LemmaResult r{"affine-close", true};
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int d = 2 + static_cast<int>(rng.below(2));
        AffineMap s1{Mat::Random(d, d), Vec::Random(d)};
        Mat dlin = 0.01 * Mat::Random(d, d);
        Vec doff = 0.01 * Vec::Random(d);
        AffineMap s2{s1.linear + dlin, s1.offset + doff};
        const Vec y = rng.unit_ball(d);
        const double rad = 0.3 + rng.uniform();
        // premise: an upper bound on the deviation over B(y, rad)
        Eigen::JacobiSVD<Mat> svd(dlin);
        const double eta = (dlin * y + doff).norm() + rad * svd.singularValues()[0];
        const Vec query = y + (1.0 + 9.0 * rng.uniform()) * rad * rng.unit_vector(d).eval();
        const double bound = affine_deviation_extrapolate(s1, s2, BallWitness{y, rad}, eta, query);
        const double actual = (s1(query) - s2(query)).norm();
        if (bound > 0.0) worst = std::max(worst, actual / bound);
        if (actual > bound + 1e-12) r.pass = false;
        // discrete witness variant
        auto sw = regular_simplex(d + 1, rad, d, y);
        double eps_w = 0.0;
        for (const auto& z : sw.vertices) eps_w = std::max(eps_w, (s1(z) - s2(z)).norm());
        const double bound2 = affine_deviation_extrapolate(s1, s2, sw.vertices, eps_w, query);
        if (actual > bound2 + 1e-12) r.pass = false;
        if (bound2 > 0.0) worst = std::max(worst, actual / bound2);
    }
    r.slack = worst;
    return r;
}

}  // namespace certify

// Run every lemma certifier with the frozen calibration constants.
inline std::vector<LemmaResult> run_lemma_suite(std::uint64_t seed,
                                                const std::vector<int>& sizes = {100}) {
    const int n = sizes.empty() ? 100 : sizes.front();
    std::vector<LemmaResult> out;
    out.push_back(certify::simplex_identities(seed));
    out.push_back(certify::trilateration_bound(derive_seed(seed, 1)));
    out.push_back(certify::approx_simplex(derive_seed(seed, 2)));
    out.push_back(certify::barycenter_bound(derive_seed(seed, 3)));
    out.push_back(certify::near_sim(derive_seed(seed, 4), std::max(40, n)));
    out.push_back(certify::diam_bound(derive_seed(seed, 5), 6, std::max(40, n)));
    out.push_back(certify::one_nn_modulus(derive_seed(seed, 6)));
    out.push_back(certify::knn_sandwich(derive_seed(seed, 7)));
    out.push_back(certify::inter_vol(derive_seed(seed, 8)));
    out.push_back(certify::affine_close(derive_seed(seed, 9)));
    return out;
}

}  // namespace ordembed
