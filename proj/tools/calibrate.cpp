// Measures the constants frozen in include/ordembed/calibration.hpp over
// their training seeds and prints the observed maxima.  Run manually when a
// constant needs to be re-derived; the committed values include headroom.

#include <cstdio>

#include "ordembed/ordembed.hpp"

using namespace ordembed;

namespace {

double simplex_fit_ratio(std::uint64_t seed, int trials) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int m = 3 + static_cast<int>(rng.below(4));
        const int d = m - 1 + static_cast<int>(rng.below(2));
        const double lambda = 0.5 + 2.0 * rng.uniform();
        auto s = regular_simplex(m, lambda, d, rng.unit_ball(d).eval());
        const double eta = 0.002 + 0.1 * rng.uniform();
        std::vector<Vec> pts = s.vertices;
        for (auto& p : pts) p += (eta * lambda / 4.0) * rng.unit_ball(d).eval();
        const double defect = approx_simplex_defect(pts);
        if (defect <= 1e-6) continue;
        auto [fit, dev] = fit_regular_simplex(pts);
        double lam = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                lam = std::max(lam, (pts[i] - pts[j]).norm());
        worst = std::max(worst, dev / (lam * defect));
    }
    return worst;
}

double barycenter_ratio(std::uint64_t seed, int trials) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int m = 3 + static_cast<int>(rng.below(4));
        const int d = m - 1;
        const double lambda = 0.5 + 2.0 * rng.uniform();
        auto s = regular_simplex(m, lambda, d, rng.unit_ball(d).eval());
        std::vector<Vec> z = s.vertices;
        for (auto& p : z) p += (0.04 * rng.uniform() * lambda / 4.0) * rng.unit_ball(d).eval();
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
        const double denom = (spread(p) + spread(mu)) / lam;
        if (denom > 1e-12) worst = std::max(worst, (p - mu).norm() / denom);
    }
    return worst;
}

double isometry_fit_ratio(std::uint64_t seed, int trials) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int d = 2 + static_cast<int>(rng.below(2));
        const int n = 20 + static_cast<int>(rng.below(30));
        std::vector<Vec> src, dst;
        for (int i = 0; i < n; ++i) src.push_back(rng.unit_ball(d));
        Mat rot = rng.rotation(d);
        Vec b = rng.unit_ball(d);
        for (const auto& x : src) dst.push_back(rot * x + b + 0.01 * rng.unit_ball(d).eval());
        const double defect = eps_isometry_defect(src, dst);
        double diam = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) diam = std::max(diam, (src[static_cast<std::size_t>(i)] - src[static_cast<std::size_t>(j)]).norm());
        const double eta = thickness(src, derive_seed(seed, static_cast<std::uint64_t>(t))) / diam;
        auto fit = fit_isometry(src, dst);
        if (defect > 0.0 && eta > 0.0) worst = std::max(worst, fit.sup_error / (defect / eta));
    }
    return worst;
}

double similarity_noise_ratio(std::uint64_t seed, int trials) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int d = 2;
        const int n = 10;
        const double amp = 0.01;
        std::vector<Vec> src, dst;
        for (int i = 0; i < n; ++i) src.push_back(rng.unit_ball(d));
        Mat rot = rng.rotation(d);
        const double lam = 0.5 + 2.0 * rng.uniform();
        Vec b = rng.unit_ball(d);
        for (const auto& x : src)
            dst.push_back(lam * (rot * x) + b + amp * (2.0 * rng.uniform() - 1.0) * rng.unit_vector(d).eval());
        auto fit = fit_similarity(src, dst);
        worst = std::max(worst, fit.sup_error / amp);
    }
    return worst;
}

double lip_envelope_ratio(std::uint64_t seed, int instances) {
    double worst = 0.0;
    for (int t = 0; t < instances; ++t) {
        auto [cloud, emb] = certify::exact_disk_embedding(derive_seed(seed, static_cast<std::uint64_t>(t)), 100);
        DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
        const double eps = hausdorff_density(cloud, disk, 0.01);
        double img_diam = 0.0;
        for (std::size_t i = 0; i < emb.points.size(); ++i)
            for (std::size_t j = i + 1; j < emb.points.size(); ++j)
                img_diam = std::max(img_diam, (emb.points[i] - emb.points[j]).norm());
        std::vector<Vec> scaled = emb.points;
        for (auto& p : scaled) p /= img_diam;
        std::vector<double> etas{0.05, 0.1, 0.2, 0.4, 0.8};
        auto prof = modulus_of_continuity(cloud.points, scaled, etas);
        for (std::size_t g = 0; g < etas.size(); ++g)
            worst = std::max(worst, prof.omega_values[g] / (etas[g] + eps));
    }
    return worst;
}

double local_rate_ratio(std::uint64_t master, int seeds) {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    const double r = 0.4 * disk.diameter();
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(s);
        PointCloud cloud = sample_domain(disk, 512, seed);
        auto oracle = std::make_shared<DissimilarityOracle>(cloud);
        auto cset = design_local(oracle, r);
        auto warm = rank_mds_init(cset, 2);
        auto [emb, rep] = refine_embed(cset, 2, derive_seed(master, seed), warm);
        if (rep.violations != 0) {
            std::printf("  local seed %llu: violations %llu (skipped)\n",
                        static_cast<unsigned long long>(seed),
                        static_cast<unsigned long long>(rep.violations));
            continue;
        }
        const double eps = hausdorff_density(cloud, disk, 0.01);
        auto align = alignment_error(emb, cloud);
        const double ratio = align.sup_error / (eps / (r * r));
        std::printf("  local seed %llu: sup=%.3e eps=%.4f ratio=%.3e\n",
                    static_cast<unsigned long long>(seed), align.sup_error, eps, ratio);
        worst = std::max(worst, ratio);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    const int scale = quick ? 1 : 4;
    std::printf("simplex fit ratio (seeds 100..):      %.4f\n", simplex_fit_ratio(100, 250 * scale));
    std::printf("barycenter ratio (seeds 100..):       %.4f\n", barycenter_ratio(100, 250 * scale));
    std::printf("isometry fit ratio (seeds 400..):     %.4f\n", isometry_fit_ratio(400, 12 * scale));
    std::printf("similarity noise ratio (seeds 700..): %.4f\n", similarity_noise_ratio(700, 12 * scale));
    std::printf("lip envelope ratio (seeds 500..):     %.4f\n", lip_envelope_ratio(500, 2 * scale));
    std::printf("local rate ratio (seeds 1000..):      %.3e\n", local_rate_ratio(1, quick ? 2 : 10));
    return 0;
}
