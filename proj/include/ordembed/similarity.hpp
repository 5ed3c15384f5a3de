#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "ordembed/common.hpp"
#include "ordembed/simplex.hpp"

namespace ordembed {

// S(x) = scale * rotation * x + translation, with rotation orthogonal
// (reflections permitted).
struct SimilarityTransform {
    double scale = 1.0;
    Mat rotation;
    Vec translation;

    static SimilarityTransform identity(int d) {
        return {1.0, Mat::Identity(d, d), Vec::Zero(d)};
    }

    Vec operator()(const Vec& x) const { return scale * (rotation * x) + translation; }

    bool valid(double tol = 1e-10) const {
        if (scale < 0.0) return false;
        const int d = static_cast<int>(rotation.rows());
        return (rotation * rotation.transpose() - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <=
               tol;
    }
};

struct FitResult {
    SimilarityTransform transform;
    double sup_error = 0.0;
};

namespace detail {

inline double sup_deviation(const SimilarityTransform& s, const std::vector<Vec>& src,
                            const std::vector<Vec>& dst) {
    double e = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) e = std::max(e, (s(src[i]) - dst[i]).norm());
    return e;
}

// Weighted orthogonal Procrustes factor between centered clouds.
inline Mat procrustes_rotation(const std::vector<Vec>& src, const std::vector<Vec>& dst,
                               const std::vector<double>& w, const Vec& src_mean,
                               const Vec& dst_mean, bool allow_reflection) {
    const int d = static_cast<int>(src[0].size());
    Mat cov = Mat::Zero(d, d);
    for (std::size_t i = 0; i < src.size(); ++i)
        cov += w[i] * (dst[i] - dst_mean) * (src[i] - src_mean).transpose();
    Eigen::JacobiSVD<Mat> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat r = svd.matrixU() * svd.matrixV().transpose();
    if (!allow_reflection && r.determinant() < 0.0) {
        Mat fix = Mat::Identity(d, d);
        fix(d - 1, d - 1) = -1.0;
        r = svd.matrixU() * fix * svd.matrixV().transpose();
    }
    return r;
}

// Smooth surrogate for the Chebyshev center of the residual set: softmax
// averaging with an increasing focus parameter.  Smooth in the inputs, so
// the fit stays equivariant under similarity re-parameterizations.
inline Vec soft_center(const std::vector<Vec>& pts, int rounds = 200) {
    Vec c = Vec::Zero(pts[0].size());
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    for (int k = 1; k <= rounds; ++k) {
        double maxr = 0.0;
        for (const auto& p : pts) maxr = std::max(maxr, (p - c).norm());
        if (maxr <= 0.0) break;
        Vec dir = Vec::Zero(c.size());
        double wsum = 0.0;
        for (const auto& p : pts) {
            const double w = std::exp(12.0 * ((p - c).norm() / maxr - 1.0));
            dir += w * (p - c);
            wsum += w;
        }
        c += dir / (wsum * static_cast<double>(k + 1));
    }
    return c;
}

// Golden-section minimization of a convex 1-d function over [s0/2, 2 s0].
template <typename F>
inline double golden_min(const F& f, double s0) {
    double lo = s0 * 0.5, hi = s0 * 2.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo), c = lo + gr * (hi - lo);
    double fa = f(a), fc = f(c);
    for (int it = 0; it < 80; ++it) {
        if (fa < fc) {
            hi = c;
            c = a;
            fc = fa;
            a = hi - gr * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = c;
            fa = fc;
            c = lo + gr * (hi - lo);
            fc = f(c);
        }
    }
    return fa < fc ? a : c;
}

inline FitResult fit_transform(const std::vector<Vec>& source, const std::vector<Vec>& target,
                               bool allow_reflection, bool fixed_unit_scale) {
    if (source.size() != target.size()) throw DimensionError("source/target size mismatch");
    const std::size_t n = source.size();
    if (n < 2) throw DegenerateInputError("need at least 2 points");
    const int d = static_cast<int>(source[0].size());

    Vec src_mean = Vec::Zero(d), dst_mean = Vec::Zero(d);
    for (std::size_t i = 0; i < n; ++i) {
        src_mean += source[i];
        dst_mean += target[i];
    }
    src_mean /= static_cast<double>(n);
    dst_mean /= static_cast<double>(n);
    double src_var = 0.0;
    for (std::size_t i = 0; i < n; ++i) src_var += (source[i] - src_mean).squaredNorm();
    if (src_var <= 0.0) throw DegenerateInputError("source has zero variance");

    // closed-form least-squares warm start
    std::vector<double> w(n, 1.0);
    Mat rot = procrustes_rotation(source, target, w, src_mean, dst_mean, allow_reflection);
    double scale = 1.0;
    if (!fixed_unit_scale) {
        double num = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            num += (target[i] - dst_mean).dot(rot * (source[i] - src_mean));
        scale = std::max(num / src_var, 0.0);
    }
    Vec b = dst_mean - scale * (rot * src_mean);

    SimilarityTransform best{scale, rot, b};
    double best_err = sup_deviation(best, source, target);

    // sup-norm refinement in the centered frame.  Each candidate reweights
    // the closed-form fit toward the warm start's worst residuals at one
    // focus level, refits the orthogonal factor, recenters with the smooth
    // surrogate, and line-searches the scale.  Every ingredient is built
    // from (x - src_mean) and (t - dst_mean), which keeps the reported
    // sup_error equivariant under similarity re-parameterizations.
    std::vector<Vec> c_src(n), c_dst(n);
    for (std::size_t i = 0; i < n; ++i) {
        c_src[i] = source[i] - src_mean;
        c_dst[i] = target[i] - dst_mean;
    }
    std::vector<double> base_res(n);
    for (std::size_t i = 0; i < n; ++i) base_res[i] = (best(source[i]) - target[i]).norm();
    const double base_max = *std::max_element(base_res.begin(), base_res.end());
    std::vector<Vec> residuals(n);
    auto consider = [&](double s2, const Mat& r2) {
        for (std::size_t i = 0; i < n; ++i) residuals[i] = c_dst[i] - s2 * (r2 * c_src[i]);
        const Vec c0 = soft_center(residuals);
        if (!fixed_unit_scale)
            s2 = golden_min(
                [&](double s) {
                    double e = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        e = std::max(e, (s * (r2 * c_src[i]) + c0 - c_dst[i]).norm());
                    return e;
                },
                std::max(s2, 1e-12));
        for (std::size_t i = 0; i < n; ++i) residuals[i] = c_dst[i] - s2 * (r2 * c_src[i]);
        SimilarityTransform cand{s2, r2, dst_mean + soft_center(residuals) - s2 * (r2 * src_mean)};
        const double cand_err = sup_deviation(cand, source, target);
        if (cand_err < best_err) {
            best = cand;
            best_err = cand_err;
        }
    };
    consider(scale, rot);
    for (int round = 0; round < 10 && base_max > 0.0; ++round) {
        const double beta = 2.0 + 2.0 * round;
        for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(beta * (base_res[i] / base_max - 1.0));
        Mat r2 = procrustes_rotation(source, target, w, src_mean, dst_mean, allow_reflection);
        double s2 = scale;
        if (!fixed_unit_scale) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                num += w[i] * c_dst[i].dot(r2 * c_src[i]);
                den += w[i] * c_src[i].squaredNorm();
            }
            if (den > 0.0) s2 = std::max(num / den, 1e-12);
        }
        consider(s2, r2);
    }
    return {best, best_err};
}

}  // namespace detail

// Least-squares similarity Procrustes fit followed by a sup-norm refinement
// pass.  The reported sup_error is an upper bound on the infimum over
// similarities of max_i ||S(source_i) - target_i||.
inline FitResult fit_similarity(const std::vector<Vec>& source, const std::vector<Vec>& target,
                                bool allow_reflection = true) {
    return detail::fit_transform(source, target, allow_reflection, false);
}

// Same with the scale pinned to 1.
inline FitResult fit_isometry(const std::vector<Vec>& source, const std::vector<Vec>& target,
                              bool allow_reflection = true) {
    return detail::fit_transform(source, target, allow_reflection, true);
}

struct AffineMap {
    Mat linear;
    Vec offset;
    Vec operator()(const Vec& x) const { return linear * x + offset; }
};

struct BallWitness {
    Vec center;
    double radius = 0.0;
};

// Deviation bound between two affine maps away from a witness region where
// they agree within eps.  Ball witness: 2 eps ||x-y||/r + eps.  Simplex
// witness z_0..z_d: 2 sqrt(d) eps ||x-z_0|| / sigma_d([z_j - z_0]) + eps,
// with the singular value computed from the witness itself.
inline double affine_deviation_extrapolate(const AffineMap& s1, const AffineMap& s2,
                                           const BallWitness& witness, double eps,
                                           const Vec& query) {
    (void)s1;
    (void)s2;
    if (!(witness.radius > 0.0)) throw DegenerateInputError("witness ball radius must be positive");
    return 2.0 * eps * (query - witness.center).norm() / witness.radius + eps;
}

inline double affine_deviation_extrapolate(const AffineMap& s1, const AffineMap& s2,
                                           const std::vector<Vec>& simplex_witness, double eps,
                                           const Vec& query) {
    (void)s1;
    (void)s2;
    const int d = static_cast<int>(query.size());
    if (static_cast<int>(simplex_witness.size()) != d + 1)
        throw DimensionError("simplex witness needs d+1 points");
    if (approx_simplex_defect(simplex_witness) > 0.5)
        throw InapplicableError("simplex witness defect above threshold");
    std::vector<Vec> reordered(simplex_witness.rbegin(), simplex_witness.rend());
    const double sigma = smallest_relevant_singular_value(reordered);  // z_0 at the origin
    if (sigma < 1e-10) throw InapplicableError("simplex witness is degenerate");
    return 2.0 * std::sqrt(static_cast<double>(d)) * eps *
               (query - simplex_witness[0]).norm() / sigma +
           eps;
}

}  // namespace ordembed
