// Acceptance suite: runs every gated criterion at its stated tolerance and
// prints one pass/fail line per criterion.  Exit code is the number of
// failed criteria.

#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "ordembed/ordembed.hpp"

using namespace ordembed;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---- 1. simplex identities ----------------------------------------------
bool crit_simplex(std::string& detail) {
    double worst = 0.0;
    for (int m = 2; m <= 10; ++m) {
        auto s = regular_simplex(m, 1.0, m, Vec::Zero(m));
        const Vec mu = s.barycenter();
        for (const auto& v : s.vertices)
            worst = std::max(worst, std::abs((mu - v).norm() - std::sqrt((m - 1) / (2.0 * m))));
        const Vec apex = simplex_apex(s);
        worst = std::max(worst, std::abs((apex - mu).norm() - std::sqrt((m + 1) / (2.0 * m))));
    }
    detail = fmt("max identity deviation %.2e (tolerance 1e-12)", worst);
    return worst < 1e-12;
}

// ---- 2. trilateration ----------------------------------------------------
bool crit_trilateration(std::string& detail) {
    Rng rng(20250809);
    double worst_exact = 0.0, worst_ratio = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const int d = 1 + static_cast<int>(rng.below(5));
        std::vector<Vec> anchors;
        double sigma = 0.0;
        do {
            anchors.clear();
            for (int i = 0; i <= d; ++i) anchors.push_back(rng.unit_ball(d));
            sigma = smallest_relevant_singular_value(anchors);
        } while (sigma < 0.05);
        const Vec p = rng.unit_ball(d);
        std::vector<double> a2(static_cast<std::size_t>(d) + 1);
        for (int i = 0; i <= d; ++i)
            a2[static_cast<std::size_t>(i)] = (p - anchors[static_cast<std::size_t>(i)]).squaredNorm();
        worst_exact = std::max(worst_exact, (trilaterate(anchors, a2) - p).norm());
        auto b2 = a2;
        double max_pert = 0.0;
        for (auto& v : b2) {
            const double noise = 0.02 * (rng.uniform() - 0.5);
            const double nv = std::max(0.0, v + noise);
            max_pert = std::max(max_pert, std::abs(nv - v));
            v = nv;
        }
        const Vec q = trilaterate(anchors, b2);
        const double bound = std::sqrt(static_cast<double>(d)) / sigma * max_pert;
        if (bound > 0.0) worst_ratio = std::max(worst_ratio, (p - q).norm() / bound);
    }
    detail = fmt("exact recovery %.2e (< 1e-9), perturbation ratio %.3f (<= 1)", worst_exact,
                 worst_ratio);
    return worst_exact < 1e-9 && worst_ratio <= 1.0;
}

// ---- 3. rejection-embedding exactness ------------------------------------
bool crit_rejection(std::string& detail) {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    const std::uint64_t cap = 40000000;
    bool pass = true;
    detail.clear();
    for (int m : {3, 4, 5, 6}) {
        int successes = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto cloud = sample_domain(disk, static_cast<std::size_t>(m), derive_seed(300, seed * 16 + static_cast<std::uint64_t>(m)));
            auto oracle = std::make_shared<DissimilarityOracle>(cloud);
            auto cset = design_quadruple(oracle);
            try {
                auto [emb, rep] = exact_rejection_embed(cset, 2, seed, cap);
                if (rep.violations == 0 && verify_embedding(emb, cset).violations == 0) ++successes;
            } catch (const DrawBudgetError&) {
            }
        }
        detail += fmt("m=%d: %d/10  ", m, successes);
        if (successes < 8) pass = false;
    }
    detail += fmt("(draw cap %llu)", static_cast<unsigned long long>(cap));
    return pass;
}

// ---- 4/5. rate experiments ------------------------------------------------
RateExperimentResult run_rates(int d, DesignKind kind, int trials, std::uint64_t seed) {
    ExperimentConfig config;
    config.domain_balls = {Ball{Vec::Zero(d), 1.0}};
    config.dim = d;
    config.n_grid = {32, 64, 128, 256};
    config.trials = trials;
    config.master_seed = seed;
    config.design.kind = kind;
    config.embedder.kind = EmbedderDescriptor::Kind::Refine;
    return run_rate_experiment(config);
}

bool crit_quadruple_rate(std::string& detail) {
    bool pass = true;
    detail.clear();
    for (int d : {1, 2}) {
        auto result = run_rates(d, DesignKind::Quadruple, 20, 40000 + static_cast<std::uint64_t>(d));
        std::map<int, std::vector<double>> ratio_by_n;
        for (const auto& rec : result.records)
            if (rec.success && rec.eps_n > 0.0) ratio_by_n[rec.n].push_back(rec.sup_error / rec.eps_n);
        double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
        for (auto& [n, v] : ratio_by_n) {
            const double med = median(v);
            rmin = std::min(rmin, med);
            rmax = std::max(rmax, med);
        }
        const double slope = result.slope.value_or(0.0);
        const double spread = rmax / rmin;
        detail += fmt("d=%d: slope %.2f (>= 0.7), ratio spread %.1fx (<= 3), excluded %d  ", d,
                      slope, spread, result.excluded);
        if (!(slope >= 0.7) || !(spread <= 3.0)) pass = false;
    }
    return pass;
}

bool crit_triple_consistency(std::string& detail) {
    bool pass = true;
    detail.clear();
    for (int d : {1, 2}) {
        auto result = run_rates(d, DesignKind::Triple, 20, 50000 + static_cast<std::uint64_t>(d));
        std::vector<double> err32, err256;
        for (const auto& rec : result.records) {
            if (!rec.success) continue;
            if (rec.n == 32) err32.push_back(rec.sup_error);
            if (rec.n == 256) err256.push_back(rec.sup_error);
        }
        int good = 0, total = 0;
        for (double late : err256)
            for (double early : err32) {
                ++total;
                if (late < 0.5 * early) ++good;
            }
        const double frac = total ? static_cast<double>(good) / total : 0.0;
        detail += fmt("d=%d: halving fraction %.2f (>= 0.8, %zu/%zu records)  ", d, frac,
                      err256.size(), err32.size());
        if (!(frac >= 0.8)) pass = false;
    }
    return pass;
}

// ---- 6. landmark rate ------------------------------------------------------
bool crit_landmark_rate(std::string& detail) {
    ExperimentConfig config;
    config.domain_balls = {Ball{Vec::Zero(2), 1.0}};
    config.dim = 2;
    config.n_grid = {64, 128, 256, 512};
    config.trials = 10;
    config.master_seed = 60001;
    config.design.kind = DesignKind::LandmarkQuadruple;
    config.design.landmarks.kind = Schedule::Kind::CeilSqrt;
    config.embedder.kind = EmbedderDescriptor::Kind::Landmark;
    auto result = run_rate_experiment(config);

    // budget closed form, checked exactly for every grid size
    bool budget_ok = true;
    for (int n : config.n_grid) {
        const auto ell = static_cast<std::uint64_t>(std::ceil(std::sqrt(n)));
        DomainSpec dom(config.domain_balls);
        auto cloud = sample_domain(dom, static_cast<std::size_t>(n), 1);
        auto oracle = std::make_shared<DissimilarityOracle>(cloud);
        std::vector<int> idx(static_cast<std::size_t>(ell));
        std::iota(idx.begin(), idx.end(), 0);
        auto cset = design_landmark(oracle, LandmarkIndex::of(idx, static_cast<std::size_t>(n)), true);
        const std::uint64_t expect = static_cast<std::uint64_t>(n) * ell * (ell - 1) + ell * ell * (ell * ell - 1);
        if (cset.query_budget() != expect) budget_ok = false;
    }

    std::map<int, std::vector<double>> ratio_by_n;
    int stage1_ok = 0;
    for (const auto& rec : result.records) {
        if (rec.stage1_violations != 0) continue;
        ++stage1_ok;
        if (rec.eta_n > 0.0) ratio_by_n[rec.n].push_back(rec.sup_error / rec.eta_n);
    }
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (auto& [n, v] : ratio_by_n) {
        const double med = median(v);
        rmin = std::min(rmin, med);
        rmax = std::max(rmax, med);
    }
    const double spread = rmax / rmin;
    detail = fmt("sup/eta median spread %.2fx (<= 5), stage-1 exact %d/%zu, budget %s", spread,
                 stage1_ok, result.records.size(), budget_ok ? "exact" : "MISMATCH");
    return spread <= 5.0 && budget_ok && stage1_ok > 0;
}

// ---- 7. local design -------------------------------------------------------
bool crit_local(std::string& detail) {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    const double r = 0.4 * disk.diameter();
    int pass_seeds = 0, solved = 0;
    double worst_ratio = 0.0;
    for (std::uint64_t seed = 2000; seed < 2010; ++seed) {
        auto cloud = sample_domain(disk, 512, seed);
        auto oracle = std::make_shared<DissimilarityOracle>(cloud);
        auto cset = design_local(oracle, r);
        auto warm = rank_mds_init(cset, 2);
        auto [emb, rep] = refine_embed(cset, 2, derive_seed(1, seed), warm);
        if (rep.violations != 0 || outside_condition_violations(emb, cset) != 0) continue;
        ++solved;
        const double eps = hausdorff_density(cloud, disk, 0.01);
        const double sup = alignment_error(emb, cloud).sup_error;
        const double ratio = sup / (eps / (r * r));
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio <= calib::kLocalRateC) ++pass_seeds;
    }
    detail = fmt("%d/10 seeds within C*eps/r^2 (C=%.2e frozen; %d solved; worst ratio %.2e)",
                 pass_seeds, calib::kLocalRateC, solved, worst_ratio);
    return pass_seeds >= 8;
}

// ---- 8. K-NN sandwich ------------------------------------------------------
bool crit_knn_sandwich(std::string& detail) {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    const int n = 2000, K = 100;
    const double r = std::sqrt(static_cast<double>(K) / n);
    int held = 0;
    std::size_t worst_violations = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto cloud = sample_domain(disk, n, derive_seed(80000, s));
        auto rep = knn_rball_sandwich(cloud, r, K);
        if (rep.holds_for_all) ++held;
        worst_violations = std::max(worst_violations, rep.violating_indices.size());
    }
    detail = fmt("held for all i in %d/10 seeds (need >= 9; worst seed had %zu violating items)",
                 held, worst_violations);
    return held >= 9;
}

// ---- 9. 1-NN interpolation modulus ----------------------------------------
bool crit_one_nn(std::string& detail) {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    Rng rng(90001);
    int checked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        auto cloud = sample_domain(disk, 70, derive_seed(90002, static_cast<std::uint64_t>(inst)));
        std::vector<Vec> images;
        Mat rot = rng.rotation(2);
        const double lam = 0.4 + rng.uniform();
        for (const auto& x : cloud.points)
            images.push_back(Vec(lam * (rot * x) + 0.15 * rng.unit_ball(2).eval()));
        std::vector<Vec> queries;
        detail::for_each_grid_point(disk, 0.09, [&](const Vec& q) { queries.push_back(q); });
        const double eps_hat = hausdorff_density(cloud.points, disk, 0.045) + 0.045 * std::sqrt(2.0);
        auto interp = one_nn_interpolate(cloud.points, images, queries);
        std::vector<double> etas{0.04, 0.08, 0.15, 0.3, 0.6};
        auto omega_hat = modulus_of_continuity(queries, interp, etas);
        std::vector<double> shifted;
        for (double e : etas) shifted.push_back(e + 2.0 * eps_hat);
        auto omega = modulus_of_continuity(cloud.points, images, shifted);
        for (std::size_t g = 0; g < etas.size(); ++g) {
            ++checked;
            if (omega_hat.omega_values[g] > omega.omega_values[g]) {
                detail = fmt("violated at instance %d, eta %.2f", inst, etas[g]);
                return false;
            }
        }
    }
    detail = fmt("omega_hat(eta) <= omega(eta + 2 eps) held at all %d checkpoints", checked);
    return true;
}

// ---- 10. design soundness and transform invariance -------------------------
bool crit_design_soundness(std::string& detail) {
    const int n = 12;
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    auto cloud = sample_domain(disk, n, 777);
    std::vector<MonotoneTransform> gs{MonotoneTransform::identity(), MonotoneTransform::square(),
                                      MonotoneTransform::log1p()};
    std::uint64_t checked = 0;
    for (const auto& g : gs) {
        auto oracle = std::make_shared<DissimilarityOracle>(cloud, g);
        auto base = std::make_shared<DissimilarityOracle>(cloud);
        std::vector<std::pair<ComparisonSet, ComparisonSet>> pairs;
        pairs.emplace_back(design_quadruple(oracle), design_quadruple(base));
        pairs.emplace_back(design_triple(oracle), design_triple(base));
        pairs.emplace_back(design_local(oracle, 0.7), design_local(base, 0.7));
        pairs.emplace_back(design_landmark(oracle, LandmarkIndex::of({0, 1, 2, 3}, n), true),
                           design_landmark(base, LandmarkIndex::of({0, 1, 2, 3}, n), true));
        for (const auto& [transformed, reference] : pairs)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            ++checked;
                            // soundness vs brute force on the raw oracle
                            const bool truth = base->delta(i, j) < base->delta(k, l);
                            const auto v = transformed.query(i, j, k, l);
                            if (v == Verdict::Less && !truth) {
                                detail = "asserted an untrue comparison";
                                return false;
                            }
                            // transform invariance
                            if (v != reference.query(i, j, k, l)) {
                                detail = "transform changed a verdict";
                                return false;
                            }
                        }
    }
    detail = fmt("%llu exhaustive tuple checks across designs and transforms",
                 static_cast<unsigned long long>(checked));
    return true;
}

// ---- 11. structural invariants ---------------------------------------------
bool crit_structural(std::string& detail) {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto cloud = sample_domain(disk, 10, derive_seed(110000, seed));
        auto oracle = std::make_shared<DissimilarityOracle>(cloud);
        auto quad = design_quadruple(oracle);
        auto warm = rank_mds_init(quad, 2);
        auto [emb, rep] = refine_embed(quad, 2, seed, warm);
        if (rep.violations != 0) {
            detail = fmt("no exact quadruple embedding at seed %llu", static_cast<unsigned long long>(seed));
            return false;
        }
        auto dist = [&](const Embedding& e, int a, int b) {
            return (e.points[static_cast<std::size_t>(a)] - e.points[static_cast<std::size_t>(b)]).norm();
        };
        for (int a = 0; a < 10; ++a)
            for (int b = a + 1; b < 10; ++b)
                for (int u = 0; u < 10; ++u)
                    for (int v = u + 1; v < 10; ++v)
                        if (oracle->distance(u, v) > oracle->distance(a, b) &&
                            dist(emb, u, v) < dist(emb, a, b) - 1e-12) {
                            detail = "packing-image property violated";
                            return false;
                        }
        auto triple = design_triple(oracle);
        auto [emb3, rep3] = refine_embed(triple, 2, seed, warm);
        if (rep3.violations != 0) {
            detail = "no exact triple embedding";
            return false;
        }
        for (int x = 0; x < 10; ++x)
            for (int y = 0; y < 10; ++y)
                for (int z = 0; z < 10; ++z)
                    if (oracle->distance(x, y) < oracle->distance(x, z) &&
                        dist(emb3, x, y) > dist(emb3, x, z) + 1e-12) {
                        detail = "weak isotonicity violated";
                        return false;
                    }
    }
    detail = "packing-image and weak-isotonicity invariants held exhaustively (n = 10, 3 seeds)";
    return true;
}

// ---- 12. reproducibility ----------------------------------------------------
bool crit_reproducibility(std::string& detail) {
    ExperimentConfig config;
    config.domain_balls = {Ball{Vec::Zero(1), 1.0}};
    config.dim = 1;
    config.n_grid = {32, 64};
    config.trials = 5;
    config.master_seed = 120001;
    config.design.kind = DesignKind::Quadruple;
    auto a = run_rate_experiment(config);
    auto b = run_rate_experiment(config);
    const std::string csv_a = rates_to_csv(a.records);
    const std::string csv_b = rates_to_csv(b.records);
    detail = fmt("two runs, %zu bytes each, byte-identical: %s", csv_a.size(),
                 csv_a == csv_b ? "yes" : "NO");
    return csv_a == csv_b;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria{
        {"simplex identities (1e-12)", crit_simplex},
        {"trilateration bounds (1e4 trials)", crit_trilateration},
        {"rejection-embedding exactness (m <= 6)", crit_rejection},
        {"quadruple rate (slope and ratio spread)", crit_quadruple_rate},
        {"triple-design consistency (error halving)", crit_triple_consistency},
        {"landmark rate (spread and query budget)", crit_landmark_rate},
        {"local design (frozen C * eps/r^2)", crit_local},
        {"K-NN sandwich (n=2000, K=100)", crit_knn_sandwich},
        {"1-NN interpolation modulus", crit_one_nn},
        {"design soundness and transform invariance", crit_design_soundness},
        {"packing-image and weak-isotonicity invariants", crit_structural},
        {"rates reproducibility (golden CSV)", crit_reproducibility},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        detail::Stopwatch timer;
        std::string note;
        bool ok = false;
        try {
            ok = criteria[i].run(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %2zu. %s (%.1fs): %s\n", ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), timer.seconds(), note.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
