#pragma once

#include "ordembed/common.hpp"
#include "ordembed/simplex.hpp"

namespace ordembed {

// Locate a point from squared distances to d+1 affinely spanning anchors.
// Solves the normal equations Z^T Z a = u/2 with the last anchor translated
// to the origin; exact squared distances recover the point exactly, and
// perturbed inputs obey ||p - q|| <= sqrt(d) sigma_d(Z)^{-1} max|a_i^2-b_i^2|.
inline Vec trilaterate(const std::vector<Vec>& anchors, const std::vector<double>& sq_distances) {
    const int d = static_cast<int>(anchors.empty() ? 0 : anchors[0].size());
    if (static_cast<int>(anchors.size()) != d + 1)
        throw DimensionError("need d+1 anchors in dimension d");
    if (sq_distances.size() != anchors.size())
        throw DimensionError("need one squared distance per anchor");
    for (double s : sq_distances)
        if (s < 0.0) throw DegenerateInputError("squared distances must be nonnegative");

    if (smallest_relevant_singular_value(anchors) < 1e-10)
        throw DegenerateInputError("anchors are ill-conditioned (affinely degenerate)");

    const Vec& origin = anchors[d];
    Mat z(d, d);
    Vec u(d);
    for (int i = 0; i < d; ++i) {
        z.col(i) = anchors[i] - origin;
        u[i] = sq_distances[d] - sq_distances[i] + z.col(i).squaredNorm();
    }
    Mat zt_z = z.transpose() * z;
    Vec alpha = zt_z.ldlt().solve(0.5 * u);
    return z * alpha + origin;
}

}  // namespace ordembed
