#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>

#include "ordembed/common.hpp"
#include "ordembed/embedding.hpp"

namespace ordembed {

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Cached view of a design for the solvers: key lookups, window lists, and
// asserted-tuple sampling.
class DesignView {
public:
    explicit DesignView(const ComparisonSet& cset, bool enforce_outside = false)
        : cset_(cset), n_(static_cast<int>(cset.n())),
          outside_(enforce_outside && cset.kind() == DesignKind::LocalRadius) {
        keys_.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                keys_[idx(i, j)] = cset.oracle().key(i, j);
        if (cset_.kind() == DesignKind::LocalRadius || cset_.kind() == DesignKind::LocalKnn) {
            windows_.resize(static_cast<std::size_t>(n_));
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    if (j != i && cset_.in_window(i, j))
                        windows_[static_cast<std::size_t>(i)].push_back(j);
        }
        if (outside_) {
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j)
                    if (!cset_.in_window(i, j)) above_pairs_.emplace_back(i, j);
            if (above_pairs_.empty()) outside_ = false;
        }
        if (cset_.kind() == DesignKind::LocalRadius || cset_.kind() == DesignKind::LocalKnn) {
            // static chain-walk scaffolding per apex: window sorted by key,
            // and all window pairs sorted by key (two-pointer prefix walks)
            left_sorted_.resize(static_cast<std::size_t>(n_));
            right_sorted_.resize(static_cast<std::size_t>(n_));
            for (int i = 0; i < n_; ++i) {
                auto& w = windows_[static_cast<std::size_t>(i)];
                auto& ls = left_sorted_[static_cast<std::size_t>(i)];
                ls = w;
                std::sort(ls.begin(), ls.end(),
                          [&](int a, int b) { return key(i, a) < key(i, b); });
                auto& rs = right_sorted_[static_cast<std::size_t>(i)];
                rs.reserve(w.size() * (w.size() - 1) / 2);
                for (std::size_t a = 0; a < w.size(); ++a)
                    for (std::size_t b = a + 1; b < w.size(); ++b)
                        rs.push_back(static_cast<std::uint32_t>(w[a]) << 16 |
                                     static_cast<std::uint32_t>(w[b]));
                std::sort(rs.begin(), rs.end(), [&](std::uint32_t x, std::uint32_t y) {
                    return key(static_cast<int>(x >> 16), static_cast<int>(x & 0xffff)) <
                           key(static_cast<int>(y >> 16), static_cast<int>(y & 0xffff));
                });
            }
        }
        if (cset_.kind() == DesignKind::LandmarkTriple ||
            cset_.kind() == DesignKind::LandmarkQuadruple)
            landmarks_ = cset_.landmarks().indices;
    }

    int n() const { return n_; }
    double key(int i, int j) const { return keys_[idx(i, j)]; }
    const std::vector<int>& window(int i) const { return windows_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& landmark_list() const { return landmarks_; }

    // Draw an asserted tuple (i,j,k,l), i.e. key(i,j) < key(k,l) within the
    // design structure.  Returns false when the draw was uninformative.
    bool sample(Rng& rng, Quad& out) const {
        const auto u = [&](int hi) { return static_cast<int>(rng.below(static_cast<std::uint64_t>(hi))); };
        int i, j, k, l;
        switch (cset_.kind()) {
            case DesignKind::Quadruple:
                i = u(n_); j = u(n_); k = u(n_); l = u(n_);
                break;
            case DesignKind::Triple:
                i = u(n_); j = u(n_); l = u(n_); k = i;
                break;
            case DesignKind::LandmarkTriple: {
                const int ls = static_cast<int>(landmarks_.size());
                i = u(n_); j = landmarks_[static_cast<std::size_t>(u(ls))];
                l = landmarks_[static_cast<std::size_t>(u(ls))]; k = i;
                break;
            }
            case DesignKind::LandmarkQuadruple: {
                const int ls = static_cast<int>(landmarks_.size());
                if ((rng.next_u64() & 1) == 0) {
                    i = u(n_); j = landmarks_[static_cast<std::size_t>(u(ls))];
                    l = landmarks_[static_cast<std::size_t>(u(ls))]; k = i;
                } else {
                    i = landmarks_[static_cast<std::size_t>(u(ls))];
                    j = landmarks_[static_cast<std::size_t>(u(ls))];
                    k = landmarks_[static_cast<std::size_t>(u(ls))];
                    l = landmarks_[static_cast<std::size_t>(u(ls))];
                }
                break;
            }
            case DesignKind::LocalRadius:
            case DesignKind::LocalKnn: {
                if (outside_ && (rng.next_u64() & 3) == 0) {
                    // cross constraint: below-radius pair stays below any
                    // at-or-beyond-radius pair
                    i = u(n_);
                    const auto& w = windows_[static_cast<std::size_t>(i)];
                    if (w.empty()) return false;
                    j = w[static_cast<std::size_t>(u(static_cast<int>(w.size())))];
                    const auto& ab = above_pairs_[static_cast<std::size_t>(u(static_cast<int>(above_pairs_.size())))];
                    out = {i, j, ab.first, ab.second};
                    return true;
                }
                i = u(n_);
                const auto& w = windows_[static_cast<std::size_t>(i)];
                if (w.size() < 2) return false;
                const int ws = static_cast<int>(w.size());
                j = w[static_cast<std::size_t>(u(ws))];
                k = w[static_cast<std::size_t>(u(ws))];
                l = w[static_cast<std::size_t>(u(ws))];
                break;
            }
            default: return false;
        }
        const double a = key(i, j), b = key(k, l);
        if (a < b) {
            out = {i, j, k, l};
            return true;
        }
        if (b < a) {
            out = {k, l, i, j};
            return true;
        }
        return false;
    }

    // All violated (asserted-left, asserted-right) witnesses found by the
    // per-design chain walks over the current image distances.
    std::vector<Quad> violations(const std::vector<double>& pts, int d) const {
        std::vector<Quad> out;
        auto img = [&](int a, int b) {
            double s = 0.0;
            for (int t = 0; t < d; ++t)
                s += sq(pts[static_cast<std::size_t>(a) * d + t] - pts[static_cast<std::size_t>(b) * d + t]);
            return s;
        };
        struct Entry {
            double key, img;
            int a, b;
        };
        auto walk = [&](std::vector<Entry>& es) {
            std::sort(es.begin(), es.end(), [](const Entry& x, const Entry& y) { return x.key < y.key; });
            double run_max = -1.0;
            int ra = -1, rb = -1;
            std::size_t t = 0;
            while (t < es.size()) {
                std::size_t g = t;
                while (g < es.size() && es[g].key == es[t].key) ++g;
                for (std::size_t s = t; s < g; ++s)
                    if (ra >= 0 && es[s].img < run_max) out.push_back({ra, rb, es[s].a, es[s].b});
                for (std::size_t s = t; s < g; ++s)
                    if (es[s].img > run_max) {
                        run_max = es[s].img;
                        ra = es[s].a;
                        rb = es[s].b;
                    }
                t = g;
            }
        };
        switch (cset_.kind()) {
            case DesignKind::Quadruple: {
                std::vector<Entry> es;
                es.reserve(static_cast<std::size_t>(n_) * (n_ - 1) / 2);
                for (int i = 0; i < n_; ++i)
                    for (int j = i + 1; j < n_; ++j) es.push_back({key(i, j), img(i, j), i, j});
                walk(es);
                break;
            }
            case DesignKind::Triple: {
                for (int i = 0; i < n_; ++i) {
                    std::vector<Entry> es;
                    for (int j = 0; j < n_; ++j)
                        if (j != i) es.push_back({key(i, j), img(i, j), i, j});
                    walk(es);
                }
                break;
            }
            case DesignKind::LandmarkTriple:
            case DesignKind::LandmarkQuadruple: {
                for (int i = 0; i < n_; ++i) {
                    std::vector<Entry> es;
                    for (int a : landmarks_)
                        if (a != i) es.push_back({key(i, a), img(i, a), i, a});
                    walk(es);
                }
                if (cset_.kind() == DesignKind::LandmarkQuadruple) {
                    std::vector<Entry> es;
                    for (std::size_t a = 0; a < landmarks_.size(); ++a)
                        for (std::size_t b = a + 1; b < landmarks_.size(); ++b)
                            es.push_back({key(landmarks_[a], landmarks_[b]),
                                          img(landmarks_[a], landmarks_[b]),
                                          landmarks_[a], landmarks_[b]});
                    walk(es);
                }
                break;
            }
            case DesignKind::LocalRadius:
            case DesignKind::LocalKnn: {
                for (int i = 0; i < n_; ++i) {
                    const auto& ls = left_sorted_[static_cast<std::size_t>(i)];
                    const auto& rs = right_sorted_[static_cast<std::size_t>(i)];
                    // running prefix max of left images in key order, advanced
                    // in lockstep with the key-sorted right pairs
                    double run = -1.0;
                    int argj = -1;
                    std::size_t ptr = 0;
                    for (const std::uint32_t packed : rs) {
                        const int k = static_cast<int>(packed >> 16);
                        const int l = static_cast<int>(packed & 0xffff);
                        const double kk = key(k, l);
                        while (ptr < ls.size() && key(i, ls[ptr]) < kk) {
                            const double v = img(i, ls[ptr]);
                            if (v > run) {
                                run = v;
                                argj = ls[ptr];
                            }
                            ++ptr;
                        }
                        if (argj >= 0 && run > img(k, l)) out.push_back({i, argj, k, l});
                    }
                }
                if (outside_) {
                    double max_below = -1.0, min_above = std::numeric_limits<double>::infinity();
                    int b0 = -1, b1 = -1, a0 = -1, a1 = -1;
                    for (int i = 0; i < n_; ++i)
                        for (int j : windows_[static_cast<std::size_t>(i)]) {
                            if (j < i) continue;
                            const double v = img(i, j);
                            if (v > max_below) {
                                max_below = v;
                                b0 = i;
                                b1 = j;
                            }
                        }
                    for (const auto& [i, j] : above_pairs_) {
                        const double v = img(i, j);
                        if (v < min_above) {
                            min_above = v;
                            a0 = i;
                            a1 = j;
                        }
                    }
                    if (b0 >= 0 && a0 >= 0 && max_below > min_above) {
                        for (const auto& [i, j] : above_pairs_)
                            if (img(i, j) < max_below) out.push_back({b0, b1, i, j});
                        for (int i = 0; i < n_; ++i)
                            for (int j : windows_[static_cast<std::size_t>(i)]) {
                                if (j < i) continue;
                                if (img(i, j) > min_above) out.push_back({i, j, a0, a1});
                            }
                    }
                }
                break;
            }
        }
        return out;
    }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(j);
    }
    const ComparisonSet& cset_;
    int n_;
    bool outside_ = false;
    std::vector<double> keys_;
    std::vector<std::vector<int>> windows_;
    std::vector<std::vector<int>> left_sorted_;
    std::vector<std::vector<std::uint32_t>> right_sorted_;
    std::vector<std::pair<int, int>> above_pairs_;
    std::vector<int> landmarks_;
};

inline Embedding to_embedding(const std::vector<double>& pts, int n, int d,
                              const std::string& provenance, std::uint64_t seed) {
    Embedding e;
    e.dim = d;
    e.provenance = provenance;
    e.seed = seed;
    e.points.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Vec p(d);
        for (int t = 0; t < d; ++t) p[t] = pts[static_cast<std::size_t>(i) * d + t];
        e.points[static_cast<std::size_t>(i)] = p;
    }
    return e;
}

}  // namespace detail

// First i.i.d. uniform-in-unit-ball draw of the m items that satisfies every
// asserted comparison strictly.  Expected draw counts explode quickly with
// m; the budget turns that into a typed error.
inline std::pair<Embedding, EmbedReport> exact_rejection_embed(const ComparisonSet& cset, int d,
                                                               std::uint64_t seed,
                                                               std::uint64_t max_draws = 10000000,
                                                               int item_guard = 8) {
    const int m = static_cast<int>(cset.n());
    if (m > item_guard)
        throw SizeGuardError("rejection embedding guarded to m <= " + std::to_string(item_guard));
    detail::Stopwatch timer;

    // unique pair-level constraints: image of pair A strictly below pair B
    const int npairs = m * (m - 1) / 2;
    auto pair_id = [m](int a, int b) {
        if (a > b) std::swap(a, b);
        return a * m - a * (a + 1) / 2 + (b - a - 1);
    };
    std::vector<std::pair<int, int>> constraints;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    if (i != j && k != l && cset.asserts(i, j, k, l))
                        constraints.emplace_back(pair_id(i, j), pair_id(k, l));
    std::sort(constraints.begin(), constraints.end());
    constraints.erase(std::unique(constraints.begin(), constraints.end()), constraints.end());

    Rng rng(seed);
    std::vector<double> pts(static_cast<std::size_t>(m) * static_cast<std::size_t>(d));
    std::vector<double> sqd(static_cast<std::size_t>(npairs));
    for (std::uint64_t draw = 1; draw <= max_draws; ++draw) {
        for (int i = 0; i < m; ++i) {
            Vec p = rng.unit_ball(d);
            for (int t = 0; t < d; ++t) pts[static_cast<std::size_t>(i) * d + t] = p[t];
        }
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                double s = 0.0;
                for (int t = 0; t < d; ++t)
                    s += sq(pts[static_cast<std::size_t>(a) * d + t] - pts[static_cast<std::size_t>(b) * d + t]);
                sqd[static_cast<std::size_t>(pair_id(a, b))] = s;
            }
        bool ok = true;
        for (const auto& [lo, hi] : constraints)
            if (!(sqd[static_cast<std::size_t>(lo)] < sqd[static_cast<std::size_t>(hi)])) {
                ok = false;
                break;
            }
        if (ok) {
            Embedding e = detail::to_embedding(pts, m, d, "exact_rejection", seed);
            EmbedReport rep;
            rep.iterations = draw;
            rep.wall_time = timer.seconds();
            rep.violations = 0;
            return {e, rep};
        }
    }
    throw DrawBudgetError(max_draws);
}

// Classical-MDS warm start on design-derivable disparities: global pair
// ranks for quadruple-type designs, symmetrized row ranks for triples, and
// graph hop counts for local designs.
inline Embedding rank_mds_init(const ComparisonSet& cset, int d) {
    const int n = static_cast<int>(cset.n());
    detail::DesignView view(cset);
    Mat disp = Mat::Zero(n, n);
    switch (cset.kind()) {
        case DesignKind::Quadruple:
        case DesignKind::LandmarkQuadruple: {
            std::vector<std::pair<double, std::pair<int, int>>> pairs;
            pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) pairs.push_back({view.key(i, j), {i, j}});
            std::sort(pairs.begin(), pairs.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t r = 0; r < pairs.size(); ++r) {
                const auto [i, j] = pairs[r].second;
                disp(i, j) = disp(j, i) = static_cast<double>(r + 1);
            }
            break;
        }
        case DesignKind::Triple:
        case DesignKind::LandmarkTriple: {
            for (int i = 0; i < n; ++i) {
                std::vector<int> order;
                for (int j = 0; j < n; ++j)
                    if (j != i) order.push_back(j);
                std::sort(order.begin(), order.end(),
                          [&](int a, int b) { return view.key(i, a) < view.key(i, b); });
                for (std::size_t r = 0; r < order.size(); ++r)
                    disp(i, order[r]) += static_cast<double>(r + 1);
            }
            disp = 0.5 * (disp + disp.transpose()).eval();
            break;
        }
        case DesignKind::LocalRadius:
        case DesignKind::LocalKnn: {
            // BFS hop counts on the window graph
            const double far = static_cast<double>(2 * n);
            for (int s = 0; s < n; ++s) {
                std::vector<double> hop(static_cast<std::size_t>(n), far);
                std::vector<int> queue{s};
                hop[static_cast<std::size_t>(s)] = 0.0;
                for (std::size_t qh = 0; qh < queue.size(); ++qh) {
                    const int u = queue[qh];
                    for (int v : view.window(u))
                        if (hop[static_cast<std::size_t>(v)] == far) {
                            hop[static_cast<std::size_t>(v)] = hop[static_cast<std::size_t>(u)] + 1.0;
                            queue.push_back(v);
                        }
                }
                for (int j = 0; j < n; ++j) disp(s, j) = hop[static_cast<std::size_t>(j)];
            }
            disp = 0.5 * (disp + disp.transpose()).eval();
            break;
        }
    }
    disp /= disp.maxCoeff();

    Mat d2 = disp.array().square();
    Mat j = Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / n);
    Mat b = -0.5 * j * d2 * j;
    Eigen::SelfAdjointEigenSolver<Mat> eig(b);
    Embedding e;
    e.dim = d;
    e.provenance = "rank_mds_init";
    e.points.assign(static_cast<std::size_t>(n), Vec::Zero(d));
    for (int t = 0; t < d; ++t) {
        const int col = n - 1 - t;
        if (col < 0) break;
        const double lam = std::max(eig.eigenvalues()[col], 0.0);
        const double s = std::sqrt(lam);
        for (int i = 0; i < n; ++i) e.points[static_cast<std::size_t>(i)][t] = s * eig.eigenvectors()(i, col);
    }
    return e;
}

struct RefineSchedule {
    int restarts = 5;
    std::uint64_t iters = 40000;       // SGD steps per restart
    int batch = 32;                    // sampled constraints per step
    double step = 0.02;                // Adam step, relative to image spread
    double margin_scale = 1e-3;        // margin = scale * mean image squared distance
    int polish_rounds = 400;           // full-batch rounds on chain-walk violations
    std::uint64_t check_every = 2000;  // exactness check cadence
    bool full_batch = false;           // deterministic full-batch mode with monotone penalty
    bool enforce_outside = true;       // cross-threshold constraints for radius-local designs
};

// Margin hinge minimization over sampled asserted comparisons, with
// restarts, a chain-walk polish phase, and exactness checks.  Returns the
// best embedding found; report.violations is zero iff it is exact.
inline std::pair<Embedding, EmbedReport> refine_embed(
    const ComparisonSet& cset, int d, std::uint64_t seed,
    const std::optional<Embedding>& init = std::nullopt,
    const RefineSchedule& schedule = RefineSchedule()) {
    if (d < 1) throw DimensionError("need d >= 1");
    const int n = static_cast<int>(cset.n());
    detail::Stopwatch timer;
    detail::DesignView view(cset, schedule.enforce_outside);
    const std::size_t nd = static_cast<std::size_t>(n) * static_cast<std::size_t>(d);

    std::vector<double> best_pts;
    std::size_t best_viol = std::numeric_limits<std::size_t>::max();
    EmbedReport rep;

    auto finish = [&](const std::vector<double>& pts, std::size_t viol) {
        Embedding e = detail::to_embedding(pts, n, d, "refine", seed);
        rep.violations = viol;
        rep.wall_time = timer.seconds();
        if (!e.finite()) throw NumericError("non-finite embedding coordinates");
        return std::make_pair(e, rep);
    };

    for (int restart = 0; restart < std::max(1, schedule.restarts); ++restart) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart) + 1));
        std::vector<double> pts(nd);
        if (restart == 0 && init) {
            if (static_cast<int>(init->size()) != n || init->dim != d)
                throw DimensionError("init embedding has the wrong shape");
            for (int i = 0; i < n; ++i)
                for (int t = 0; t < d; ++t) pts[static_cast<std::size_t>(i) * d + t] = init->points[static_cast<std::size_t>(i)][t];
        } else {
            for (int i = 0; i < n; ++i) {
                Vec p = rng.unit_ball(d);
                for (int t = 0; t < d; ++t) pts[static_cast<std::size_t>(i) * d + t] = p[t];
            }
        }

        auto mean_sqdist = [&]() {
            double s = 0.0;
            int cnt = 0;
            Rng r2(derive_seed(seed, 777));
            for (int t = 0; t < 256; ++t) {
                const int a = static_cast<int>(r2.below(static_cast<std::uint64_t>(n)));
                const int b = static_cast<int>(r2.below(static_cast<std::uint64_t>(n)));
                if (a == b) continue;
                double v = 0.0;
                for (int q = 0; q < d; ++q)
                    v += sq(pts[static_cast<std::size_t>(a) * d + q] - pts[static_cast<std::size_t>(b) * d + q]);
                s += v;
                ++cnt;
            }
            return cnt ? s / cnt : 1.0;
        };

        if (schedule.full_batch) {
            // deterministic full-batch mode over the materialized constraints
            auto quads = cset.materialize();
            const double margin = schedule.margin_scale * mean_sqdist();
            auto penalty = [&](const std::vector<double>& x) {
                double p = 0.0;
                for (const auto& q : quads) {
                    double a = 0.0, b = 0.0;
                    for (int t = 0; t < d; ++t) {
                        a += sq(x[static_cast<std::size_t>(q[0]) * d + t] - x[static_cast<std::size_t>(q[1]) * d + t]);
                        b += sq(x[static_cast<std::size_t>(q[2]) * d + t] - x[static_cast<std::size_t>(q[3]) * d + t]);
                    }
                    p += std::max(0.0, a - b + margin);
                }
                return p;
            };
            double step = schedule.step;
            double cur = penalty(pts);
            rep.penalty_trace.push_back(cur);
            std::vector<double> grad(nd), cand(nd);
            for (std::uint64_t it = 0; it < schedule.iters; ++it) {
                std::fill(grad.begin(), grad.end(), 0.0);
                for (const auto& q : quads) {
                    double a = 0.0, b = 0.0;
                    for (int t = 0; t < d; ++t) {
                        a += sq(pts[static_cast<std::size_t>(q[0]) * d + t] - pts[static_cast<std::size_t>(q[1]) * d + t]);
                        b += sq(pts[static_cast<std::size_t>(q[2]) * d + t] - pts[static_cast<std::size_t>(q[3]) * d + t]);
                    }
                    if (a - b + margin <= 0.0) continue;
                    for (int t = 0; t < d; ++t) {
                        const double gab = 2.0 * (pts[static_cast<std::size_t>(q[0]) * d + t] - pts[static_cast<std::size_t>(q[1]) * d + t]);
                        const double gcd = 2.0 * (pts[static_cast<std::size_t>(q[2]) * d + t] - pts[static_cast<std::size_t>(q[3]) * d + t]);
                        grad[static_cast<std::size_t>(q[0]) * d + t] += gab;
                        grad[static_cast<std::size_t>(q[1]) * d + t] -= gab;
                        grad[static_cast<std::size_t>(q[2]) * d + t] -= gcd;
                        grad[static_cast<std::size_t>(q[3]) * d + t] += gcd;
                    }
                }
                double gn = 0.0;
                for (double g : grad) gn += g * g;
                if (gn == 0.0) break;
                // backtracking keeps the trace non-increasing
                double next = cur;
                for (int half = 0; half < 30; ++half) {
                    for (std::size_t z = 0; z < nd; ++z) cand[z] = pts[z] - step * grad[z];
                    next = penalty(cand);
                    if (next <= cur) break;
                    step *= 0.5;
                }
                if (next > cur) break;
                pts.swap(cand);
                cur = next;
                rep.penalty_trace.push_back(cur);
                ++rep.iterations;
                if (cur == 0.0) break;
            }
            const auto viols = view.violations(pts, d);
            if (viols.size() < best_viol) {
                best_viol = viols.size();
                best_pts = pts;
            }
            if (best_viol == 0) return finish(best_pts, 0);
            continue;
        }

        // Adam state
        std::vector<double> m1(nd, 0.0), m2(nd, 0.0);
        double margin = schedule.margin_scale * mean_sqdist();
        double spread = std::sqrt(mean_sqdist());
        const double b1 = 0.9, b2 = 0.999, eps = 1e-12;
        std::uint64_t adam_t = 0;
        Quad quad;
        for (std::uint64_t it = 0; it < schedule.iters; ++it) {
            if (it % schedule.check_every == 0) {
                if (view.violations(pts, d).empty()) {
                    rep.iterations += it;
                    return finish(pts, 0);
                }
                margin = schedule.margin_scale * mean_sqdist();
                spread = std::sqrt(mean_sqdist());
            }
            const double lr = schedule.step * spread /
                              (1.0 + 3.0 * static_cast<double>(it) / static_cast<double>(schedule.iters));
            ++adam_t;
            for (int bi = 0; bi < schedule.batch; ++bi) {
                if (!view.sample(rng, quad)) continue;
                double a = 0.0, b = 0.0;
                for (int t = 0; t < d; ++t) {
                    a += sq(pts[static_cast<std::size_t>(quad[0]) * d + t] - pts[static_cast<std::size_t>(quad[1]) * d + t]);
                    b += sq(pts[static_cast<std::size_t>(quad[2]) * d + t] - pts[static_cast<std::size_t>(quad[3]) * d + t]);
                }
                if (a - b + margin <= 0.0) continue;
                const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam_t));
                const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam_t));
                for (int t = 0; t < d; ++t) {
                    const double gab = 2.0 * (pts[static_cast<std::size_t>(quad[0]) * d + t] - pts[static_cast<std::size_t>(quad[1]) * d + t]);
                    const double gcd = 2.0 * (pts[static_cast<std::size_t>(quad[2]) * d + t] - pts[static_cast<std::size_t>(quad[3]) * d + t]);
                    const int ids[4] = {quad[0], quad[1], quad[2], quad[3]};
                    const double gs[4] = {gab, -gab, -gcd, gcd};
                    for (int w = 0; w < 4; ++w) {
                        const std::size_t z = static_cast<std::size_t>(ids[w]) * d + t;
                        const double g = gs[w];
                        m1[z] = b1 * m1[z] + (1 - b1) * g;
                        m2[z] = b2 * m2[z] + (1 - b2) * g * g;
                        pts[z] -= lr * (m1[z] / bc1) / (std::sqrt(m2[z] / bc2) + eps);
                    }
                }
            }
        }
        rep.iterations += schedule.iters;

        // polish: cyclic projections onto the violated half-spaces (step
        // sized so each constraint is met exactly in the linearization).
        // Full chain walks are expensive for wide local windows, so rounds
        // reuse the last witness list plus freshly sampled violations,
        // walking in full every 16 rounds or when a round looks clean.
        const double pm = 1e-9 * mean_sqdist();
        auto project = [&](const Quad& q) {
            double a = 0.0, b = 0.0;
            for (int t = 0; t < d; ++t) {
                a += sq(pts[static_cast<std::size_t>(q[0]) * d + t] - pts[static_cast<std::size_t>(q[1]) * d + t]);
                b += sq(pts[static_cast<std::size_t>(q[2]) * d + t] - pts[static_cast<std::size_t>(q[3]) * d + t]);
            }
            const double v = a - b + pm;
            if (v <= 0.0) return false;
            double gnorm2 = 0.0;
            for (int t = 0; t < d; ++t) {
                const double gab = 2.0 * (pts[static_cast<std::size_t>(q[0]) * d + t] - pts[static_cast<std::size_t>(q[1]) * d + t]);
                const double gcd = 2.0 * (pts[static_cast<std::size_t>(q[2]) * d + t] - pts[static_cast<std::size_t>(q[3]) * d + t]);
                gnorm2 += 2.0 * gab * gab + 2.0 * gcd * gcd;
            }
            if (gnorm2 <= 0.0) return false;
            const double step = v / gnorm2;
            for (int t = 0; t < d; ++t) {
                const double gab = 2.0 * (pts[static_cast<std::size_t>(q[0]) * d + t] - pts[static_cast<std::size_t>(q[1]) * d + t]);
                const double gcd = 2.0 * (pts[static_cast<std::size_t>(q[2]) * d + t] - pts[static_cast<std::size_t>(q[3]) * d + t]);
                pts[static_cast<std::size_t>(q[0]) * d + t] -= step * gab;
                pts[static_cast<std::size_t>(q[1]) * d + t] += step * gab;
                pts[static_cast<std::size_t>(q[2]) * d + t] += step * gcd;
                pts[static_cast<std::size_t>(q[3]) * d + t] -= step * gcd;
            }
            return true;
        };
        for (int round = 0; round < schedule.polish_rounds; ++round) {
            const auto viols = view.violations(pts, d);
            if (viols.empty()) return finish(pts, 0);
            for (const auto& q : viols) project(q);
            ++rep.iterations;
        }
        const auto final_viols = view.violations(pts, d);
        if (final_viols.size() < best_viol) {
            best_viol = final_viols.size();
            best_pts = pts;
        }
        if (best_viol == 0) return finish(best_pts, 0);
    }
    return finish(best_pts, best_viol);
}

enum class Stage1 { Exact, Refine };

// Two-stage landmark embedding: embed the landmarks from their mutual
// comparisons, then place every other item by Monte Carlo inside its
// landmark-ordering cell (barycenter of the accepted candidates), with an
// optional per-item hinge polish.
inline std::pair<Embedding, EmbedReport> landmark_embed(const ComparisonSet& cset, int d,
                                                        std::uint64_t seed, Stage1 stage1,
                                                        int cell_samples = 2000,
                                                        int polish_iters = 300) {
    if (cset.kind() != DesignKind::LandmarkTriple && cset.kind() != DesignKind::LandmarkQuadruple)
        throw ConfigError("landmark_embed needs a landmark design");
    const auto& lset = cset.landmarks().indices;
    const int ell = static_cast<int>(lset.size());
    const int n = static_cast<int>(cset.n());
    if (ell < d + 1) throw ConfigError("need at least d+1 landmarks");
    detail::Stopwatch timer;

    // stage 1: sub-design over the landmark items
    PointCloud sub;
    sub.dim = cset.oracle().cloud().dim;
    sub.seed = cset.oracle().cloud().seed;
    for (int a : lset) sub.points.push_back(cset.oracle().cloud().points[static_cast<std::size_t>(a)]);
    auto sub_oracle = std::make_shared<DissimilarityOracle>(sub);
    ComparisonSet sub_design = cset.kind() == DesignKind::LandmarkQuadruple
                                   ? design_quadruple(sub_oracle)
                                   : design_triple(sub_oracle);
    Embedding lm_embed;
    EmbedReport rep;
    if (stage1 == Stage1::Exact) {
        auto [e, r] = exact_rejection_embed(sub_design, d, derive_seed(seed, 1));
        lm_embed = std::move(e);
        rep.iterations = r.iterations;
        rep.stage1_violations = r.violations;
    } else {
        auto warm = rank_mds_init(sub_design, d);
        auto [e, r] = refine_embed(sub_design, d, derive_seed(seed, 1), warm);
        lm_embed = std::move(e);
        rep.iterations = r.iterations;
        rep.stage1_violations = r.violations;
    }

    Embedding out;
    out.dim = d;
    out.provenance = "landmark";
    out.seed = seed;
    out.points.assign(static_cast<std::size_t>(n), Vec::Zero(d));
    std::vector<char> is_landmark(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < ell; ++t) {
        out.points[static_cast<std::size_t>(lset[static_cast<std::size_t>(t)])] =
            lm_embed.points[static_cast<std::size_t>(t)];
        is_landmark[static_cast<std::size_t>(lset[static_cast<std::size_t>(t)])] = 1;
    }

    auto [ball_c, ball_r] = lm_embed.bounding_ball();
    const auto& oracle = cset.oracle();

    for (int i = 0; i < n; ++i) {
        if (is_landmark[static_cast<std::size_t>(i)]) continue;
        // the item's landmark ordering, derivable from design queries
        std::vector<int> order(lset.begin(), lset.end());
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return oracle.key(i, a) < oracle.key(i, b); });
        std::vector<Vec> ordered(static_cast<std::size_t>(ell));
        std::vector<char> tie_next(static_cast<std::size_t>(ell), 0);
        for (int t = 0; t < ell; ++t) {
            ordered[static_cast<std::size_t>(t)] = out.points[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])];
            if (t + 1 < ell)
                tie_next[static_cast<std::size_t>(t)] =
                    oracle.key(i, order[static_cast<std::size_t>(t)]) ==
                    oracle.key(i, order[static_cast<std::size_t>(t + 1)]);
        }
        auto matches = [&](const Vec& q) {
            double prev = (q - ordered[0]).squaredNorm();
            for (int t = 1; t < ell; ++t) {
                const double cur = (q - ordered[static_cast<std::size_t>(t)]).squaredNorm();
                if (!tie_next[static_cast<std::size_t>(t - 1)] && cur < prev) return false;
                prev = cur;
            }
            return true;
        };
        Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(i)));
        Vec acc = Vec::Zero(d);
        int kept = 0;
        for (int s = 0; s < cell_samples; ++s) {
            Vec q = ball_c + ball_r * rng.unit_ball(d).eval();
            if (matches(q)) {
                acc += q;
                ++kept;
            }
        }
        Vec q;
        if (kept > 0) {
            q = acc / static_cast<double>(kept);
        } else {
            q = ordered[0];  // nearest landmark position
            ++rep.fallback_count;
        }
        // per-item polish: cyclic projections onto the adjacent ordering
        // constraints (bisector half-planes; exact step per constraint)
        const double margin = 1e-9 * sq(std::max(ball_r, 1e-12));
        auto violated = [&](const Vec& p) {
            int c = 0;
            for (int t = 0; t + 1 < ell; ++t) {
                if (tie_next[static_cast<std::size_t>(t)]) continue;
                if ((p - ordered[static_cast<std::size_t>(t)]).squaredNorm() >
                    (p - ordered[static_cast<std::size_t>(t + 1)]).squaredNorm())
                    ++c;
            }
            return c;
        };
        auto pocs = [&](Vec p, int iters) {
            for (int it = 0; it < iters; ++it) {
                bool any = false;
                for (int t = 0; t + 1 < ell; ++t) {
                    if (tie_next[static_cast<std::size_t>(t)]) continue;
                    const Vec& a = ordered[static_cast<std::size_t>(t)];
                    const Vec& b = ordered[static_cast<std::size_t>(t + 1)];
                    const double v = (p - a).squaredNorm() - (p - b).squaredNorm() + margin;
                    if (v <= 0.0) continue;
                    const Vec grad = 2.0 * (b - a);
                    const double g2 = grad.squaredNorm();
                    if (g2 <= 0.0) continue;
                    p -= (v / g2) * grad;
                    any = true;
                }
                if (!any) break;
            }
            return p;
        };
        if (polish_iters > 0) {
            Vec best = pocs(q, polish_iters);
            int best_viol = violated(best);
            // restart the projections from fresh draws when the first pass
            // cannot close the cell
            for (int attempt = 0; attempt < 6 && best_viol > 0; ++attempt) {
                Vec start = attempt == 0 ? ordered[0]
                                         : Vec(ball_c + ball_r * rng.unit_ball(d).eval());
                Vec cand = pocs(start, polish_iters);
                const int cv = violated(cand);
                if (cv < best_viol) {
                    best_viol = cv;
                    best = cand;
                }
            }
            q = best;
        }
        out.points[static_cast<std::size_t>(i)] = q;
    }
    rep.violations = embedding_is_exact(out, cset)
                         ? 0
                         : std::max<std::uint64_t>(
                               verify_embedding(out, cset, VerifyMode::Sampled, 20000,
                                                derive_seed(seed, 42))
                                   .violations,
                               1);
    rep.wall_time = timer.seconds();
    return {out, rep};
}

}  // namespace ordembed
