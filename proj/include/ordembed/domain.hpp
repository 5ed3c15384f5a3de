#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "ordembed/common.hpp"

namespace ordembed {

struct Ball {
    Vec center;
    double radius = 0.0;
};

// Bounded connected open domain given as a union of open balls.  h is the
// smallest constituent radius; every point of the union then lies in some
// ball of radius >= h inside the union, so U = U^h.
class DomainSpec {
public:
    explicit DomainSpec(std::vector<Ball> balls) : balls_(std::move(balls)) {
        if (balls_.empty()) throw DomainError("domain needs at least one ball");
        dim_ = static_cast<int>(balls_[0].center.size());
        h_ = std::numeric_limits<double>::infinity();
        for (const auto& b : balls_) {
            if (b.center.size() != dim_) throw DimensionError("ball dimension mismatch");
            if (!(b.radius > 0.0)) throw DomainError("ball radius must be positive");
            h_ = std::min(h_, b.radius);
        }
        check_connected();
    }

    int dim() const { return dim_; }
    const std::vector<Ball>& balls() const { return balls_; }
    double h() const { return h_; }

    bool contains(const Vec& x) const {
        for (const auto& b : balls_)
            if ((x - b.center).norm() < b.radius) return true;
        return false;
    }

    // Membership in U^h for a given h: the point lies in a constituent ball
    // of radius >= h.  Exact for ball unions (see the U = U^h identity).
    bool contains_in_core(const Vec& x, double h) const {
        for (const auto& b : balls_)
            if (b.radius >= h && (x - b.center).norm() < b.radius) return true;
        return false;
    }

    // Diameter of the union; attained in the closure between two sphere
    // caps, so the pairwise formula is exact.
    double diameter() const {
        double d = 0.0;
        for (std::size_t i = 0; i < balls_.size(); ++i)
            for (std::size_t j = i; j < balls_.size(); ++j) {
                double v = (balls_[i].center - balls_[j].center).norm() + balls_[i].radius +
                           balls_[j].radius;
                if (i == j) v = 2.0 * balls_[i].radius;
                d = std::max(d, v);
            }
        return d;
    }

    // Diameter of a largest inscribed ball.  For a ball union we report the
    // largest constituent diameter, a lower bound that is tight unless
    // overlapping balls jointly contain a larger one.
    double inscribed_diameter() const {
        double r = 0.0;
        for (const auto& b : balls_) r = std::max(r, b.radius);
        return 2.0 * r;
    }

    std::pair<Vec, Vec> bounding_box() const {
        Vec lo = balls_[0].center.array() - balls_[0].radius;
        Vec hi = balls_[0].center.array() + balls_[0].radius;
        for (const auto& b : balls_) {
            lo = lo.cwiseMin(Vec(b.center.array() - b.radius));
            hi = hi.cwiseMax(Vec(b.center.array() + b.radius));
        }
        return {lo, hi};
    }

private:
    void check_connected() const {
        const std::size_t n = balls_.size();
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                if (seen[j]) continue;
                // open balls overlap iff strict inequality
                if ((balls_[i].center - balls_[j].center).norm() <
                    balls_[i].radius + balls_[j].radius) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        if (!std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }))
            throw DomainError("ball union is not connected");
    }

    std::vector<Ball> balls_;
    int dim_ = 0;
    double h_ = 0.0;
};

struct PointCloud {
    int dim = 0;
    std::vector<Vec> points;
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
    const Vec& operator[](std::size_t i) const { return points[i]; }

    double diameter() const {
        double d = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                d = std::max(d, (points[i] - points[j]).norm());
        return d;
    }
};

// n i.i.d. points uniform on the ball union, by rejection from the bounding
// box.  Deterministic given the seed.
inline PointCloud sample_domain(const DomainSpec& domain, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("need n >= 1");
    Rng rng(seed);
    auto [lo, hi] = domain.bounding_box();
    const int d = domain.dim();
    PointCloud cloud;
    cloud.dim = d;
    cloud.seed = seed;
    cloud.points.reserve(n);
    std::uint64_t proposals = 0;
    while (cloud.points.size() < n) {
        Vec x(d);
        for (int k = 0; k < d; ++k) x[k] = rng.uniform(lo[k], hi[k]);
        ++proposals;
        if (domain.contains(x)) cloud.points.push_back(x);
        if ((proposals & 0xfffffULL) == 0 &&
            static_cast<double>(cloud.points.size()) < 1e-6 * static_cast<double>(proposals))
            throw DomainError("rejection acceptance rate below 1e-6");
    }
    return cloud;
}

namespace detail {

// Grid points of spacing <= resolution inside the domain, enumerated over
// the bounding box.  Used for the Hausdorff sup and packing candidates.
template <typename F>
inline void for_each_grid_point(const DomainSpec& domain, double resolution, F&& f) {
    auto [lo, hi] = domain.bounding_box();
    const int d = domain.dim();
    std::vector<std::int64_t> counts(d);
    std::vector<double> steps(d);
    for (int k = 0; k < d; ++k) {
        const double span = hi[k] - lo[k];
        counts[k] = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(span / resolution)) + 1);
        steps[k] = span / static_cast<double>(counts[k] - 1);
    }
    std::vector<std::int64_t> idx(d, 0);
    Vec x(d);
    while (true) {
        for (int k = 0; k < d; ++k) x[k] = lo[k] + steps[k] * static_cast<double>(idx[k]);
        if (domain.contains(x)) f(x);
        int k = 0;
        while (k < d && ++idx[k] == counts[k]) idx[k++] = 0;
        if (k == d) break;
    }
}

}  // namespace detail

// Grid estimate of eps_n = sup_{x in U} min_i ||x - x_i||.  Underestimates
// the supremum by at most resolution * sqrt(d) because every domain point is
// that close to an interior grid point.
inline double hausdorff_density(const PointCloud& cloud, const DomainSpec& domain,
                                double grid_resolution) {
    if (cloud.points.empty()) throw DegenerateInputError("empty cloud");
    if (!(grid_resolution > 0.0)) throw DomainError("grid resolution must be positive");
    double eps = 0.0;
    detail::for_each_grid_point(domain, grid_resolution, [&](const Vec& x) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : cloud.points) {
            const double v = (x - p).squaredNorm();
            if (v < best) best = v;
        }
        eps = std::max(eps, best);
    });
    return std::sqrt(eps);
}

// Hausdorff density of a subset of the cloud (e.g. the landmarks) in U.
inline double hausdorff_density(const std::vector<Vec>& pts, const DomainSpec& domain,
                                double grid_resolution) {
    if (pts.empty()) throw DegenerateInputError("empty point set");
    double eps = 0.0;
    detail::for_each_grid_point(domain, grid_resolution, [&](const Vec& x) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) best = std::min(best, (x - p).squaredNorm());
        eps = std::max(eps, best);
    });
    return std::sqrt(eps);
}

// Greedy packing of a closed ball: walk a fine candidate grid (seeded phase
// offset) in scan order and accept every candidate at distance >= eta from
// all accepted points.  The result is an eta-packing, maximal over the grid.
inline std::vector<Vec> greedy_packing(const Vec& center, double radius, double eta,
                                        std::uint64_t seed) {
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    const int d = static_cast<int>(center.size());
    Rng rng(seed);
    const double spacing = std::min(eta / 4.0, radius / 2.0);
    Vec phase(d);
    for (int k = 0; k < d; ++k) phase[k] = spacing * rng.uniform();

    std::vector<Vec> out;
    const auto steps = static_cast<std::int64_t>(std::ceil(2.0 * radius / spacing)) + 1;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    Vec x(d);
    while (true) {
        for (int k = 0; k < d; ++k)
            x[k] = center[k] - radius + phase[k] +
                   spacing * static_cast<double>(idx[static_cast<std::size_t>(k)]);
        if ((x - center).norm() <= radius) {
            bool ok = true;
            for (const auto& p : out)
                if ((x - p).norm() < eta) {
                    ok = false;
                    break;
                }
            if (ok) out.push_back(x);
        }
        int k = 0;
        while (k < d && ++idx[static_cast<std::size_t>(k)] >= steps) idx[static_cast<std::size_t>(k++)] = 0;
        if (k == d) break;
    }
    if (out.empty()) out.push_back(center);
    return out;
}

// Constructive version of the inscribed-ball property: inside B(x, r) ∩ U
// find a ball of radius min(r, h)/2.  Follows the segment-toward-center
// construction; a seeded jitter search confirms it is not knife-edge.
inline std::pair<Vec, double> find_inscribed_ball(const DomainSpec& domain, const Vec& x,
                                                  double r, std::uint64_t seed) {
    if (!domain.contains(x)) throw DomainError("query point not in domain");
    const double h = domain.h();
    const double rad = std::min(r, h) / 2.0;
    // locate a constituent ball containing x and slide toward its center
    Vec best_center = x;
    double best_margin = -std::numeric_limits<double>::infinity();
    auto margin = [&](const Vec& z) {
        // how deeply B(z, rad) sits inside B(x, r) ∩ U (via one constituent)
        // while keeping x in its closure
        double m_dom = -std::numeric_limits<double>::infinity();
        for (const auto& b : domain.balls())
            m_dom = std::max(m_dom, b.radius - (z - b.center).norm());
        const double m_query = r - (z - x).norm();
        const double m_closure = rad - (z - x).norm();
        return std::min({m_dom - rad, m_query - rad, m_closure});
    };
    for (const auto& b : domain.balls()) {
        const double dxc = (x - b.center).norm();
        if (dxc >= b.radius) continue;
        // y: center of a radius-h ball inside b whose closure contains x
        Vec y = b.center;
        const double slide = std::max(0.0, dxc - (b.radius - h));
        if (dxc > 1e-15) y = x + (slide / dxc) * (b.center - x);
        const double dxy = (x - y).norm();
        // ball of radius rad = min(r,h)/2 inside B(x,r) ∩ B(y,h), centered
        // between the two centers, x on its closure
        Vec z;
        if (r <= h) {
            z = (dxy <= rad || dxy <= 1e-15) ? x : Vec(x + (rad / dxy) * (y - x));
        } else {
            z = (dxy <= rad || dxy <= 1e-15) ? y : Vec(y + (rad / dxy) * (x - y));
        }
        if (margin(z) > best_margin) {
            best_margin = margin(z);
            best_center = z;
        }
    }
    Rng rng(seed);
    for (int it = 0; it < 256; ++it) {
        Vec z = best_center + (0.1 * rad) * rng.unit_ball(domain.dim()).eval();
        if (margin(z) > best_margin) {
            best_margin = margin(z);
            best_center = z;
        }
    }
    if (best_margin < -1e-9)
        throw NumericError("inscribed ball search failed");
    return {best_center, rad};
}

}  // namespace ordembed
