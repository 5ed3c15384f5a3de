#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ordembed/common.hpp"

namespace ordembed {

// m points in R^d with all pairwise distances equal.
struct RegularSimplex {
    std::vector<Vec> vertices;
    double edge = 0.0;

    Vec barycenter() const {
        Vec mu = Vec::Zero(vertices[0].size());
        for (const auto& v : vertices) mu += v;
        return mu / static_cast<double>(vertices.size());
    }
};

namespace detail {

// Canonical unit-edge regular simplex on m vertices, centered at the
// origin, expressed in R^{m-1}.
inline std::vector<Vec> canonical_simplex(int m) {
    // e_i / sqrt(2) in R^m has unit pairwise distances; center and rotate
    // into the (m-1)-dimensional span.
    Mat v = Mat::Identity(m, m) / std::sqrt(2.0);
    Vec mu = v.rowwise().mean();
    v.colwise() -= mu;
    Eigen::JacobiSVD<Mat> svd(v, Eigen::ComputeThinU);
    Mat basis = svd.matrixU().leftCols(m - 1);  // span of the centered vertices
    std::vector<Vec> out(m);
    for (int i = 0; i < m; ++i) out[i] = basis.transpose() * v.col(i);
    return out;
}

}  // namespace detail

// Regular simplex with the requested edge, barycenter, and orientation.
// orientation defaults to the identity frame; it must be orthogonal.
inline RegularSimplex regular_simplex(int m, double edge, int dim, const Vec& center,
                                      const Mat& orientation = Mat()) {
    if (m < 2) throw DimensionError("a simplex needs at least 2 vertices");
    if (m > dim + 1) throw DimensionError("m points with equal distances need dim >= m-1");
    if (!(edge > 0.0)) throw DegenerateInputError("edge must be positive");
    if (center.size() != dim) throw DimensionError("center dimension mismatch");
    Mat q = orientation;
    if (q.size() == 0) q = Mat::Identity(dim, dim);
    if (q.rows() != dim || q.cols() != dim ||
        (q * q.transpose() - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10)
        throw DegenerateInputError("orientation must be a d x d orthogonal matrix");

    auto canon = detail::canonical_simplex(m);
    RegularSimplex s;
    s.edge = edge;
    s.vertices.resize(m);
    for (int i = 0; i < m; ++i) {
        Vec x = Vec::Zero(dim);
        x.head(m - 1) = edge * canon[i];
        s.vertices[i] = q * x + center;
    }
    return s;
}

// The point z completing vertices to a regular simplex on m+1 vertices,
// chosen deterministically among the valid normals of the affine hull.
inline Vec simplex_apex(const RegularSimplex& s) {
    const int m = static_cast<int>(s.vertices.size());
    const int d = static_cast<int>(s.vertices[0].size());
    if (m > d) throw DimensionError("no room for an apex: need dim >= m");
    Vec mu = s.barycenter();
    Mat centered(d, m);
    for (int i = 0; i < m; ++i) centered.col(i) = s.vertices[i] - mu;
    Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeFullU);
    Vec normal = svd.matrixU().col(m - 1);  // first direction orthogonal to the hull
    const double height = s.edge * std::sqrt((m + 1) / (2.0 * m));
    return mu + height * normal;
}

// Defect of an approximate regular simplex: 1 - min/max pairwise distance.
inline double approx_simplex_defect(const std::vector<Vec>& points) {
    if (points.size() < 2) throw DimensionError("need at least 2 points");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = (points[i] - points[j]).norm();
            if (d == 0.0) throw DegenerateInputError("coincident points");
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    return 1.0 - lo / hi;
}

// sigma_{m-1} of the matrix whose columns are the points with the last
// point translated to the origin (the trilateration normal-equation matrix).
inline double smallest_relevant_singular_value(const std::vector<Vec>& points) {
    const int m = static_cast<int>(points.size());
    if (m < 2) throw DimensionError("need at least 2 points");
    const int d = static_cast<int>(points[0].size());
    Mat z(d, m);
    for (int i = 0; i < m; ++i) z.col(i) = points[i] - points[m - 1];
    Eigen::JacobiSVD<Mat> svd(z);
    const auto& sv = svd.singularValues();
    if (m - 2 >= sv.size()) return 0.0;
    return sv[m - 2];
}

// Nearest regular simplex by the inductive projection construction: anchor
// the two vertices realizing the maximum edge (lowest index pair on ties),
// then place each further vertex at the apex over the barycenter of the
// already-built face, on the input point's side of the hull.  Returns the
// simplex (vertex i corresponds to input i) and max_i ||z'_i - z_i||.
inline std::pair<RegularSimplex, double> fit_regular_simplex(const std::vector<Vec>& points) {
    const int m = static_cast<int>(points.size());
    if (m < 2) throw DimensionError("need at least 2 points");
    const int d = static_cast<int>(points[0].size());
    if (m > d + 1) throw DimensionError("m points with equal distances need dim >= m-1");

    // affine rank check
    double lambda = 0.0;
    {
        Mat c(d, m);
        for (int i = 0; i < m; ++i) c.col(i) = points[i] - points[0];
        Eigen::JacobiSVD<Mat> svd(c);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                lambda = std::max(lambda, (points[i] - points[j]).norm());
        if (m >= 2 && svd.singularValues()[m - 2] <= 1e-8 * std::max(1.0, lambda))
            throw DegenerateInputError("points do not affinely span m-1 dimensions");
    }

    // order: max-edge pair first (lowest index pair on ties), rest by index
    int a = 0, b = 1;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if ((points[i] - points[j]).norm() > (points[a] - points[b]).norm()) {
                a = i;
                b = j;
            }
    std::vector<int> order{a, b};
    for (int i = 0; i < m; ++i)
        if (i != a && i != b) order.push_back(i);

    std::vector<Vec> built;  // built[k] corresponds to points[order[k]]
    built.push_back(points[a]);
    built.push_back(points[b]);
    for (int k = 2; k < m; ++k) {
        const Vec& zk = points[order[k]];
        // barycenter and orthonormal basis of the current face's hull
        Vec mu = Vec::Zero(d);
        for (const auto& v : built) mu += v;
        mu /= static_cast<double>(built.size());
        Mat c(d, static_cast<int>(built.size()));
        for (std::size_t i = 0; i < built.size(); ++i) c.col(static_cast<int>(i)) = built[i] - mu;
        Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullU);
        Mat u = svd.matrixU().leftCols(k - 1);
        Vec w = zk - mu;
        Vec off = w - u * (u.transpose() * w);  // component orthogonal to the hull
        const double off_norm = off.norm();
        if (off_norm <= 1e-12 * std::max(1.0, lambda))
            throw DegenerateInputError("next vertex lies in the current affine hull");
        const double height = lambda * std::sqrt((k + 1) / (2.0 * k));
        built.push_back(mu + (height / off_norm) * off);
    }

    RegularSimplex s;
    s.edge = lambda;
    s.vertices.assign(m, Vec());
    double dev = 0.0;
    for (int k = 0; k < m; ++k) {
        s.vertices[order[k]] = built[k];
        dev = std::max(dev, (built[k] - points[order[k]]).norm());
    }
    return {s, dev};
}

}  // namespace ordembed
