// Test-only brute-force oracles, independent of the library's fitting path.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ordembed/common.hpp"

namespace oracles {

using ordembed::Mat;
using ordembed::Vec;

// Plain Nelder-Mead over R^k.
inline std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
    double scale = 0.25, int iters = 1200) {
    const std::size_t k = x0.size();
    std::vector<std::pair<double, std::vector<double>>> simplex;
    simplex.reserve(k + 1);
    simplex.push_back({f(x0), x0});
    for (std::size_t i = 0; i < k; ++i) {
        auto x = x0;
        x[i] += scale;
        simplex.push_back({f(x), x});
    }
    auto centroid = [&](std::size_t skip) {
        std::vector<double> c(k, 0.0);
        for (std::size_t s = 0; s < simplex.size(); ++s) {
            if (s == skip) continue;
            for (std::size_t i = 0; i < k; ++i) c[i] += simplex[s].second[i];
        }
        for (auto& v : c) v /= static_cast<double>(k);
        return c;
    };
    for (int it = 0; it < iters; ++it) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        const auto c = centroid(k);
        auto blend = [&](double t) {
            std::vector<double> x(k);
            for (std::size_t i = 0; i < k; ++i)
                x[i] = c[i] + t * (simplex[k].second[i] - c[i]);
            return x;
        };
        auto xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < simplex[0].first) {
            auto xe = blend(-2.0);
            const double fe = f(xe);
            simplex[k] = fe < fr ? std::make_pair(fe, xe) : std::make_pair(fr, xr);
        } else if (fr < simplex[k - 1].first) {
            simplex[k] = {fr, xr};
        } else {
            auto xc = blend(0.5);
            const double fc = f(xc);
            if (fc < simplex[k].first) {
                simplex[k] = {fc, xc};
            } else {
                for (std::size_t s = 1; s <= k; ++s) {
                    for (std::size_t i = 0; i < k; ++i)
                        simplex[s].second[i] =
                            0.5 * (simplex[s].second[i] + simplex[0].second[i]);
                    simplex[s].first = f(simplex[s].second);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return {simplex[0].second, simplex[0].first};
}

// Direct minimization of the sup-norm similarity deviation in the plane:
// parameters (theta, log lambda, bx, by), both orientation branches, a grid
// of starts refined by Nelder-Mead.
inline double best_similarity_sup_2d(const std::vector<Vec>& src, const std::vector<Vec>& dst,
                                     bool fixed_unit_scale = false) {
    auto sup_for = [&](double theta, double lambda, double bx, double by, double det) {
        Mat r(2, 2);
        r << std::cos(theta), -det * std::sin(theta), std::sin(theta), det * std::cos(theta);
        double e = 0.0;
        Vec b(2);
        b << bx, by;
        for (std::size_t i = 0; i < src.size(); ++i)
            e = std::max(e, (lambda * (r * src[i]) + b - dst[i]).norm());
        return e;
    };
    double best = std::numeric_limits<double>::infinity();
    for (double det : {1.0, -1.0}) {
        for (int g = 0; g < 16; ++g) {
            const double theta0 = g * 2.0 * M_PI / 16.0;
            std::vector<double> x0{theta0, 0.0, 0.0, 0.0};
            auto f = [&](const std::vector<double>& x) {
                const double lambda = fixed_unit_scale ? 1.0 : std::exp(x[1]);
                return sup_for(x[0], lambda, x[2], x[3], det);
            };
            auto [x, v] = nelder_mead(f, x0);
            best = std::min(best, v);
        }
    }
    return best;
}

}  // namespace oracles
