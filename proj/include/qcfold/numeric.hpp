#pragma once

// Shared numeric primitives: complex alias, angle wrapping, a 2x2 real
// matrix with singular-value helpers, and the error types thrown by the
// library.  Everything downstream includes this header.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace qcfold {

using cplx = std::complex<double>;

inline constexpr double PI     = 3.141592653589793238462643383279502884;
inline constexpr double TWO_PI = 2.0 * PI;
inline constexpr double E_CONST = 2.718281828459045235360287471352662498;

// Thrown when an algorithm leaves its domain of validity (branch tracking
// lost, Jacobian degenerate, iteration diverged).  The CLI maps this to a
// dedicated exit code so scripted runs can distinguish "bad math" from
// "bad config".
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed or out-of-contract configuration input.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double t) {
    double r = std::fmod(t, TWO_PI);
    if (r < 0.0) r += TWO_PI;
    // fmod can return exactly TWO_PI after the correction when t is a tiny
    // negative number; clamp that endpoint back to zero.
    if (r >= TWO_PI) r = 0.0;
    return r;
}

/// Wrap an angle into (-pi, pi].
inline double wrap_pm(double t) {
    double r = wrap_angle(t);
    if (r > PI) r -= TWO_PI;
    return r;
}

/// Unit-modulus complex number e^{i t}.
inline cplx unit(double t) { return {std::cos(t), std::sin(t)}; }

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Real 2x2 matrix, row major: [[a, b], [c, d]].  Used for Jacobians of the
// piecewise-affine maps and for dilatation bookkeeping.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double det() const { return a * d - b * c; }

    // Singular values via the closed form for 2x2 matrices.
    void singular_values(double& smax, double& smin) const {
        const double e1 = (a + d) * 0.5, f1 = (a - d) * 0.5;
        const double g1 = (c + b) * 0.5, h1 = (c - b) * 0.5;
        const double q = std::hypot(e1, h1), r = std::hypot(f1, g1);
        smax = q + r;
        smin = std::fabs(q - r);
    }

    // Linear distortion K = smax/smin; infinite for singular matrices.
    double distortion() const {
        double smax, smin;
        singular_values(smax, smin);
        if (smin <= 0.0) return std::numeric_limits<double>::infinity();
        return smax / smin;
    }

    // Apply to a point viewed as a complex number.
    cplx apply(cplx z) const { return {a * z.real() + b * z.imag(), c * z.real() + d * z.imag()}; }

    static Mat2 compose(const Mat2& lhs, const Mat2& rhs) {
        return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
                lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
    }
};

/// Beltrami coefficient of the real-linear map with Jacobian J:
/// mu = (fx + i fy) / conj-part, written via the Wirtinger derivatives.
inline cplx beltrami_of_jacobian(const Mat2& J) {
    // f_z    = ((a + d) + i (c - b)) / 2
    // f_zbar = ((a - d) + i (c + b)) / 2
    const cplx fz{0.5 * (J.a + J.d), 0.5 * (J.c - J.b)};
    const cplx fzb{0.5 * (J.a - J.d), 0.5 * (J.c + J.b)};
    if (std::abs(fz) == 0.0) return {1.0, 0.0};
    return fzb / fz;
}

/// Distortion K of a Beltrami coefficient, K = (1+|mu|)/(1-|mu|).
inline double distortion_of_beltrami(cplx mu) {
    const double m = std::abs(mu);
    if (m >= 1.0) return std::numeric_limits<double>::infinity();
    return (1.0 + m) / (1.0 - m);
}

// FNV-1a over raw bytes; used for cache keys and render provenance tags.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull) {
    return fnv1a(s.data(), s.size(), seed);
}

} // namespace qcfold
