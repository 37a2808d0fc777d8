#pragma once

// Scalar special functions used by every closed form in the library.
// All functions are pure; relative accuracy is 1e-12 or better on the
// domains exercised by the tests (x in (0.1, 200) for ln_gamma, p in (0,2)
// for erfc_inv).

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace levyrisk {

struct Accuracy {
    double rel_tol = 1e-12;
};

inline constexpr Accuracy kSpecialFunctionAccuracy{};

/// Complementary error function, 1 - erf(x).
inline double erfc(double x) noexcept { return std::erfc(x); }

namespace detail {

// Single-precision polynomial start for erfinv(1 - p), expressed through
// w = -log(p (2 - p)) so that no cancellation happens for p near 0.
inline double erfc_inv_initial(double p) {
    const double x = 1.0 - p;
    double w = -std::log(p * (2.0 - p));
    if (w > 36.0) {
        // Deep tail: iterate x = sqrt(-log(p x sqrt(pi))) from the leading term.
        double y = std::sqrt(-std::log(p));
        for (int i = 0; i < 4; ++i) {
            y = std::sqrt(-std::log(p * y * std::sqrt(std::numbers::pi)));
        }
        return y;
    }
    double r;
    if (w < 5.0) {
        w -= 2.5;
        r = 2.81022636e-08;
        r = 3.43273939e-07 + r * w;
        r = -3.5233877e-06 + r * w;
        r = -4.39150654e-06 + r * w;
        r = 0.00021858087 + r * w;
        r = -0.00125372503 + r * w;
        r = -0.00417768164 + r * w;
        r = 0.246640727 + r * w;
        r = 1.50140941 + r * w;
    } else {
        w = std::sqrt(w) - 3.0;
        r = -0.000200214257;
        r = 0.000100950558 + r * w;
        r = 0.00134934322 + r * w;
        r = -0.00367342844 + r * w;
        r = 0.00573950773 + r * w;
        r = -0.0076224613 + r * w;
        r = 0.00943887047 + r * w;
        r = 1.00167406 + r * w;
        r = 2.83297682 + r * w;
    }
    return r * x;
}

}  // namespace detail

/// Inverse of erfc on (0, 2). Throws std::domain_error outside.
inline double erfc_inv(double p) {
    if (!(p > 0.0 && p < 2.0)) {
        throw std::domain_error("erfc_inv: argument must lie in (0,2), got " + std::to_string(p));
    }
    if (p == 1.0) return 0.0;
    if (p > 1.0) return -erfc_inv(2.0 - p);

    constexpr double two_over_sqrt_pi = 2.0 / 1.7724538509055160273;
    double x = detail::erfc_inv_initial(p);
    // Halley on f(x) = erfc(x) - p, using f''/f' = -2x.
    for (int it = 0; it < 8; ++it) {
        const double slope = -two_over_sqrt_pi * std::exp(-x * x);
        if (slope == 0.0) break;
        const double t = (std::erfc(x) - p) / slope;
        const double step = t / (1.0 + x * t);
        x -= step;
        if (std::abs(step) <= 1e-16 * std::abs(x)) break;
    }
    return x;
}

/// Natural log of the Gamma function for x > 0 (Lanczos, g = 7, 9 terms).
inline double ln_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("ln_gamma: argument must be positive, got " + std::to_string(x));
    }
    if (x == 1.0 || x == 2.0) return 0.0;
    if (x < 0.5) {
        // Shift up once; the series is accurate for x >= 0.5.
        return ln_gamma(x + 1.0) - std::log(x);
    }
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    constexpr double g = 7.0;
    const double z = x - 1.0;
    double a = c[0];
    for (std::size_t i = 1; i < c.size(); ++i) a += c[i] / (z + static_cast<double>(i));
    const double t = z + g + 0.5;
    constexpr double half_log_two_pi = 0.91893853320467274178;
    return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(a);
}

/// ln B(a, b) = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b).
inline double ln_beta(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) {
        throw std::domain_error("ln_beta: arguments must be positive");
    }
    // Sum the two single terms in a fixed order so that ln_beta(a,b) == ln_beta(b,a).
    const double lo = a < b ? a : b;
    const double hi = a < b ? b : a;
    return (ln_gamma(lo) + ln_gamma(hi)) - ln_gamma(a + b);
}

/// ln C(n, k) for real-valued upper index, via ln_gamma.
inline double ln_choose(double n, double k) {
    return ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
}

}  // namespace levyrisk
