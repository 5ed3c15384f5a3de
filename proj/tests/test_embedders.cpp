#include <catch2/catch_amalgamated.hpp>

#include "ordembed/domain.hpp"
#include "ordembed/embedders.hpp"

using namespace ordembed;

namespace {

std::shared_ptr<DissimilarityOracle> line_oracle(std::vector<double> xs) {
    PointCloud cloud;
    cloud.dim = 1;
    for (double x : xs) {
        Vec v(1);
        v << x;
        cloud.points.push_back(v);
    }
    return std::make_shared<DissimilarityOracle>(cloud);
}

PointCloud disk_cloud(int n, std::uint64_t seed) {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    return sample_domain(disk, static_cast<std::size_t>(n), seed);
}

Embedding truth_embedding(const PointCloud& cloud) {
    Embedding e;
    e.dim = cloud.dim;
    e.points = cloud.points;
    e.provenance = "truth";
    return e;
}

}  // namespace

TEST_CASE("rejection embedding with two items succeeds on the first draw") {
    auto oracle = line_oracle({0.0, 1.0});
    auto cset = design_quadruple(oracle);
    auto [emb, rep] = exact_rejection_embed(cset, 1, 3);
    REQUIRE(rep.iterations == 1);
    REQUIRE(rep.violations == 0);
}

TEST_CASE("rejection embedding on the 3-point line satisfies every ordering") {
    auto oracle = line_oracle({0.0, 1.0, 3.0});
    auto cset = design_quadruple(oracle);
    auto [emb, rep] = exact_rejection_embed(cset, 1, 5);
    REQUIRE(rep.violations == 0);
    const double d01 = (emb.points[0] - emb.points[1]).norm();
    const double d12 = (emb.points[1] - emb.points[2]).norm();
    const double d02 = (emb.points[0] - emb.points[2]).norm();
    REQUIRE(d01 < d12);
    REQUIRE(d12 < d02);
    REQUIRE(verify_embedding(emb, cset).violations == 0);
}

TEST_CASE("rejection embedding fixture: m=5 planar clouds over 10 seeds") {
    // frozen reference run: all 10 seeds succeed within 3e6 draws, with the
    // median draw count in the 1e4..2e6 band
    std::vector<std::uint64_t> draws;
    int successes = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto cloud = disk_cloud(5, seed);
        auto oracle = std::make_shared<DissimilarityOracle>(cloud);
        auto cset = design_quadruple(oracle);
        try {
            auto [emb, rep] = exact_rejection_embed(cset, 2, seed, 3000000);
            REQUIRE(rep.violations == 0);
            REQUIRE(verify_embedding(emb, cset).violations == 0);
            draws.push_back(rep.iterations);
            ++successes;
        } catch (const DrawBudgetError&) {
        }
    }
    REQUIRE(successes >= 8);
    std::sort(draws.begin(), draws.end());
    const std::uint64_t median = draws[draws.size() / 2];
    REQUIRE(median >= 10000);
    REQUIRE(median <= 2000000);
}

TEST_CASE("rejection draw budget raises a typed error carrying the count") {
    auto cloud = disk_cloud(6, 99);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    auto cset = design_quadruple(oracle);
    try {
        exact_rejection_embed(cset, 2, 1, 50);
        FAIL("expected DrawBudgetError");
    } catch (const DrawBudgetError& e) {
        REQUIRE(e.draws == 50);
    }
    auto big = disk_cloud(9, 1);
    auto big_oracle = std::make_shared<DissimilarityOracle>(big);
    REQUIRE_THROWS_AS(exact_rejection_embed(design_quadruple(big_oracle), 2, 1), SizeGuardError);
}

TEST_CASE("refine from the ground truth is exact immediately") {
    auto cloud = disk_cloud(40, 5);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    for (auto cset : {design_quadruple(oracle), design_triple(oracle)}) {
        auto [emb, rep] = refine_embed(cset, 2, 7, truth_embedding(cloud));
        REQUIRE(rep.violations == 0);
        REQUIRE(embedding_is_exact(emb, cset));
    }
}

TEST_CASE("refine reaches exactness on 64-point quadruple designs") {
    int exact_seeds = 0;
    std::uint64_t total_iters = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto cloud = disk_cloud(64, seed);
        auto oracle = std::make_shared<DissimilarityOracle>(cloud);
        auto cset = design_quadruple(oracle);
        auto warm = rank_mds_init(cset, 2);
        auto [emb, rep] = refine_embed(cset, 2, seed, warm);
        total_iters += rep.iterations;
        if (rep.violations == 0) {
            ++exact_seeds;
            REQUIRE(embedding_is_exact(emb, cset));
        }
    }
    REQUIRE(exact_seeds >= 4);
    REQUIRE(total_iters > 0);
}

TEST_CASE("full-batch margin-zero run has a non-increasing penalty trace") {
    auto cloud = disk_cloud(10, 3);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    auto cset = design_quadruple(oracle);
    RefineSchedule sched;
    sched.full_batch = true;
    sched.margin_scale = 0.0;
    sched.restarts = 1;
    sched.iters = 300;
    auto [emb, rep] = refine_embed(cset, 2, 11, std::nullopt, sched);
    REQUIRE(rep.penalty_trace.size() >= 2);
    for (std::size_t i = 1; i < rep.penalty_trace.size(); ++i)
        REQUIRE(rep.penalty_trace[i] <= rep.penalty_trace[i - 1] + 1e-12);
}

TEST_CASE("refine is deterministic given the seed") {
    auto cloud = disk_cloud(32, 9);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    auto cset = design_quadruple(oracle);
    auto warm = rank_mds_init(cset, 2);
    auto [e1, r1] = refine_embed(cset, 2, 123, warm);
    auto [e2, r2] = refine_embed(cset, 2, 123, warm);
    REQUIRE(r1.violations == r2.violations);
    for (std::size_t i = 0; i < e1.points.size(); ++i)
        REQUIRE((e1.points[i] - e2.points[i]).norm() == 0.0);
}

TEST_CASE("landmark embedding with every item a landmark reduces to stage 1") {
    auto cloud = disk_cloud(7, 13);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    std::vector<int> all{0, 1, 2, 3, 4, 5, 6};
    auto cset = design_landmark(oracle, LandmarkIndex::of(all, 7), true);
    auto [emb, rep] = landmark_embed(cset, 2, 21, Stage1::Refine);
    REQUIRE(rep.fallback_count == 0);
    REQUIRE(rep.stage1_violations == 0);
    REQUIRE(rep.violations == 0);
}

TEST_CASE("landmark embedding places most items consistently") {
    auto cloud = disk_cloud(200, 31);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    std::vector<int> idx(20);
    std::iota(idx.begin(), idx.end(), 0);
    auto cset = design_landmark(oracle, LandmarkIndex::of(idx, 200), true);
    auto [emb, rep] = landmark_embed(cset, 2, 77, Stage1::Refine, 2000);
    REQUIRE(rep.stage1_violations == 0);
    // per-item ordering satisfaction rate
    int placed_ok = 0, non_landmarks = 0;
    for (int i = 20; i < 200; ++i) {
        ++non_landmarks;
        bool ok = true;
        for (int a : idx)
            for (int b : idx)
                if (cset.query(i, a, i, b) == Verdict::Less &&
                    (emb.points[static_cast<std::size_t>(i)] - emb.points[static_cast<std::size_t>(a)]).norm() >
                        (emb.points[static_cast<std::size_t>(i)] - emb.points[static_cast<std::size_t>(b)]).norm())
                    ok = false;
        if (ok) ++placed_ok;
    }
    REQUIRE(static_cast<double>(placed_ok) >= 0.95 * static_cast<double>(non_landmarks));
}

TEST_CASE("an item coincident with a landmark lands in that landmark's cell") {
    auto cloud = disk_cloud(30, 41);
    cloud.points.push_back(cloud.points[0]);  // duplicate of landmark 0
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    std::vector<int> idx{0, 1, 2, 3, 4, 5};
    auto cset = design_landmark(oracle, LandmarkIndex::of(idx, 31), true);
    auto [emb, rep] = landmark_embed(cset, 2, 5, Stage1::Refine);
    const Vec& placed = emb.points[30];
    const Vec& l0 = emb.points[0];
    for (int a = 1; a <= 5; ++a)
        REQUIRE((placed - l0).norm() <= (placed - emb.points[static_cast<std::size_t>(a)]).norm() + 1e-12);
}

TEST_CASE("landmark designs need enough landmarks for the dimension") {
    auto cloud = disk_cloud(12, 2);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    auto cset = design_landmark(oracle, LandmarkIndex::of({0, 1}, 12), true);
    REQUIRE_THROWS_AS(landmark_embed(cset, 2, 1, Stage1::Refine), ConfigError);
}

TEST_CASE("1-NN interpolation basics") {
    std::vector<Vec> sources, images;
    for (double x : {0.0, 1.0, 3.0}) {
        Vec s(1), im(2);
        s << x;
        im << 2.0 * x, -x;
        sources.push_back(s);
        images.push_back(im);
    }
    // a sample point maps to its own image
    REQUIRE((one_nn_interpolate(sources, images, sources[1]) - images[1]).norm() == 0.0);
    // an equidistant query averages the tied images
    Vec mid(1);
    mid << 0.5;
    REQUIRE((one_nn_interpolate(sources, images, mid) - 0.5 * (images[0] + images[1])).norm() <
            1e-15);
}

TEST_CASE("interpolated modulus is controlled by the sample modulus") {
    DomainSpec disk({Ball{Vec::Zero(2), 1.0}});
    Rng rng(61);
    for (int inst = 0; inst < 20; ++inst) {
        auto cloud = sample_domain(disk, 60, derive_seed(55, static_cast<std::uint64_t>(inst)));
        std::vector<Vec> images;
        for (const auto& x : cloud.points)
            images.push_back(Vec(0.7 * x + 0.1 * rng.unit_ball(2).eval()));
        std::vector<Vec> queries;
        detail::for_each_grid_point(disk, 0.08, [&](const Vec& q) { queries.push_back(q); });
        const double eps_hat = hausdorff_density(cloud.points, disk, 0.04) + 0.04 * std::sqrt(2.0);
        auto interp = one_nn_interpolate(cloud.points, images, queries);
        for (double eta : {0.1, 0.25, 0.5}) {
            double omega_hat = 0.0, omega = 0.0;
            for (std::size_t i = 0; i < queries.size(); ++i)
                for (std::size_t j = i + 1; j < queries.size(); ++j)
                    if ((queries[i] - queries[j]).norm() <= eta)
                        omega_hat = std::max(omega_hat, (interp[i] - interp[j]).norm());
            for (std::size_t i = 0; i < cloud.points.size(); ++i)
                for (std::size_t j = i + 1; j < cloud.points.size(); ++j)
                    if ((cloud.points[i] - cloud.points[j]).norm() <= eta + 2.0 * eps_hat)
                        omega = std::max(omega, (images[i] - images[j]).norm());
            REQUIRE(omega_hat <= omega);
        }
    }
}

TEST_CASE("verification counts match hand enumeration on the swapped line") {
    auto oracle = line_oracle({0.0, 1.0, 3.0});
    auto cset = design_quadruple(oracle);
    Embedding emb;
    emb.dim = 1;
    for (double x : {1.0, 0.0, 3.0}) {  // first two items swapped
        Vec v(1);
        v << x;
        emb.points.push_back(v);
    }
    std::uint64_t hand = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    if (oracle->delta(i, j) < oracle->delta(k, l) &&
                        (emb.points[static_cast<std::size_t>(i)] - emb.points[static_cast<std::size_t>(j)]).norm() >
                            (emb.points[static_cast<std::size_t>(k)] - emb.points[static_cast<std::size_t>(l)]).norm())
                        ++hand;
    REQUIRE(verify_embedding(emb, cset).violations == hand);
    REQUIRE_FALSE(embedding_is_exact(emb, cset));
}

TEST_CASE("ground truth verifies cleanly under every design, sampled included") {
    auto cloud = disk_cloud(25, 8);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    auto truth = truth_embedding(cloud);
    std::vector<ComparisonSet> designs;
    designs.push_back(design_quadruple(oracle));
    designs.push_back(design_triple(oracle));
    designs.push_back(design_local(oracle, 0.5));
    designs.push_back(design_landmark(oracle, LandmarkIndex::of({0, 1, 2, 3, 4}, 25), true));
    for (const auto& cset : designs) {
        REQUIRE(verify_embedding(truth, cset).violations == 0);
        REQUIRE(embedding_is_exact(truth, cset));
        REQUIRE(verify_embedding(truth, cset, VerifyMode::Sampled, 100000, 3).violations == 0);
    }
}

TEST_CASE("violation counts are invariant under similarity transforms of the image") {
    auto cloud = disk_cloud(15, 3);
    auto oracle = std::make_shared<DissimilarityOracle>(cloud);
    auto cset = design_quadruple(oracle);
    Embedding emb;
    emb.dim = 2;
    Rng rng(10);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) emb.points.push_back(rng.unit_ball(2));
    const auto base = verify_embedding(emb, cset).violations;
    for (int t = 0; t < 10; ++t) {
        const double lam = 0.3 + 2.0 * rng.uniform();
        Mat rot = rng.rotation(2);
        Vec b = rng.unit_ball(2);
        Embedding moved = emb;
        for (auto& p : moved.points) p = lam * (rot * p) + b;
        REQUIRE(verify_embedding(moved, cset).violations == base);
    }
}

TEST_CASE("packing-image and weak-isotonicity structural invariants") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto cloud = disk_cloud(10, seed);
        auto oracle = std::make_shared<DissimilarityOracle>(cloud);
        auto quad = design_quadruple(oracle);
        auto warm = rank_mds_init(quad, 2);
        auto [emb, rep] = refine_embed(quad, 2, seed, warm);
        REQUIRE(rep.violations == 0);
        const int n = 10;
        auto dist = [&](const Embedding& e, int a, int b) {
            return (e.points[static_cast<std::size_t>(a)] - e.points[static_cast<std::size_t>(b)]).norm();
        };
        // packing image: any pair with larger source distance than (a,b)
        // maps at least as far apart as (a,b) does
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int u = 0; u < n; ++u)
                    for (int v = u + 1; v < n; ++v)
                        if (oracle->distance(u, v) > oracle->distance(a, b))
                            REQUIRE(dist(emb, u, v) >= dist(emb, a, b) - 1e-12);
        // weak isotonicity under the triple design
        auto triple = design_triple(oracle);
        auto [emb3, rep3] = refine_embed(triple, 2, seed, warm);
        REQUIRE(rep3.violations == 0);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    if (oracle->distance(x, y) < oracle->distance(x, z))
                        REQUIRE(dist(emb3, x, y) <= dist(emb3, x, z) + 1e-12);
    }
}
