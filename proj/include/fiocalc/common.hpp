#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fiocalc {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-9;

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input violates a precondition (wrong shape, asymmetry, singular block, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Input is outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// A sampled curve is too coarse to continue a branch; carries the offending
/// parameter interval.
class RefinementError : public Error {
public:
    RefinementError(const std::string& what, double lo, double hi)
        : Error(what), interval_lo(lo), interval_hi(hi) {}
    double interval_lo;
    double interval_hi;
};

/// An internal numerical invariant failed (signals a bug or an input far
/// outside the supported regime).
class NumericsError : public Error {
public:
    explicit NumericsError(const std::string& what) : Error(what) {}
};

/// Threshold used for rank/sign decisions: `tol < 0` requests the default
/// 1e-9 x scale.
inline double resolve_tol(double tol, double scale) {
    if (tol < 0) tol = kDefaultTol;
    return tol * std::max(scale, 1.0);
}

/// i^k for integer k.
inline Complex ipow(long k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

/// i^x = exp(i pi x / 2) for real x.
inline Complex ipow(double x) {
    return std::polar(1.0, M_PI * x / 2.0);
}

// ---------------------------------------------------------------------------
// Smooth windows (C^infinity, used for cutoffs and probe weights)
// ---------------------------------------------------------------------------

/// 0 for s<=0, 1 for s>=1, C^inf monotone in between.
inline double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

/// 1 for |u| <= flat, 0 for |u| >= 1, smooth in between (flat in (0,1)).
inline double bump(double u, double flat = 0.5) {
    u = std::abs(u);
    if (u <= flat) return 1.0;
    if (u >= 1.0) return 0.0;
    return smooth_step((1.0 - u) / (1.0 - flat));
}

// ---------------------------------------------------------------------------
// Deterministic parallel loop: results must be written by index.
// ---------------------------------------------------------------------------

inline unsigned worker_count() {
    if (const char* env = std::getenv("FIOCALC_THREADS")) {
        const int k = std::atoi(env);
        if (k > 0) return static_cast<unsigned>(k);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            constexpr std::size_t chunk = 16;
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= count) break;
                const std::size_t end = std::min(begin + chunk, count);
                for (std::size_t i = begin; i < end; ++i) fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Seeded random helpers for property tests and transversal draws
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double normal(double sigma = 1.0) {
        return std::normal_distribution<double>(0.0, sigma)(gen_);
    }
    long integer(long lo, long hi) {
        return std::uniform_int_distribution<long>(lo, hi)(gen_);
    }
    Vec vector(int n, double sigma = 1.0) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = normal(sigma);
        return v;
    }
    Vec unit_vector(int n) {
        for (;;) {
            Vec v = vector(n);
            const double norm = v.norm();
            if (norm > 1e-6) return v / norm;
        }
    }
    Mat matrix(int rows, int cols, double sigma = 1.0) {
        Mat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = normal(sigma);
        return m;
    }
    Mat sym_matrix(int n, double sigma = 1.0) {
        Mat m = matrix(n, n, sigma);
        return 0.5 * (m + m.transpose());
    }
    /// Random matrix redrawn until comfortably invertible.
    Mat nondegenerate_matrix(int n, double sigma = 1.0) {
        for (;;) {
            Mat m = matrix(n, n, sigma);
            Eigen::JacobiSVD<Mat> svd(m);
            if (svd.singularValues()(n - 1) > 1e-3 * svd.singularValues()(0)) return m;
        }
    }
    std::mt19937_64& raw() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace fiocalc
