#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ordembed {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Typed errors.  Degenerate or out-of-contract inputs are rejected, never
// silently regularized.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DegenerateInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SizeGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InapplicableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Thrown when the rejection sampler exhausts its draw budget; carries the
// number of draws attempted.
struct DrawBudgetError : std::runtime_error {
    std::uint64_t draws;
    explicit DrawBudgetError(std::uint64_t n)
        : std::runtime_error("draw budget exhausted after " + std::to_string(n) + " draws"),
          draws(n) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent stream seed from a master seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Deterministic uniform RNG.  xoshiro256** core with raw-bit double
// conversion, so the byte stream does not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) {
            x = splitmix64(x);
            w = x;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Marsaglia's polar method (cached spare).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Uniform point in the unit ball of dimension d.
    Vec unit_ball(int d) {
        Vec g(d);
        for (int i = 0; i < d; ++i) g[i] = normal();
        const double nrm = g.norm();
        if (nrm == 0.0) return unit_ball(d);
        const double r = std::pow(uniform(), 1.0 / d);
        return g * (r / nrm);
    }

    // Uniform direction on the unit sphere.
    Vec unit_vector(int d) {
        Vec g(d);
        double nrm;
        do {
            for (int i = 0; i < d; ++i) g[i] = normal();
            nrm = g.norm();
        } while (nrm == 0.0);
        return g / nrm;
    }

    // Haar-random rotation (det +1) via QR of a Gaussian matrix.
    Mat rotation(int d) {
        Mat g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = normal();
        Eigen::HouseholderQR<Mat> qr(g);
        Mat q = qr.householderQ();
        Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < d; ++i)
            if (r(i, i) < 0) q.col(i) *= -1.0;
        if (q.determinant() < 0) q.col(0) *= -1.0;
        return q;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline double sq(double x) { return x * x; }

}  // namespace ordembed
