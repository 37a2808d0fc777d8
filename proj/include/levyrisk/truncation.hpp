#pragma once

// Choice of the retained count range [n_lower, n_upper] for the mixture
// series. Terms are ranked by their contribution W_n to the compound tail
// probability; everything more than e^-37 below the largest term is dropped.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "levyrisk/frequency.hpp"

namespace levyrisk {

struct TruncationOptions {
    double threshold_log = -37.0;
    long long max_terms = 100000;  // hard cap for counts whose weights decay polynomially
};

struct TruncationBounds {
    long long n_lower = 1;
    long long n_mode = 1;
    long long n_upper = 1;
    double threshold_log = -37.0;
    bool capped = false;  // n_upper hit max_terms before the threshold was crossed

    friend bool operator==(const TruncationBounds&, const TruncationBounds&) = default;
};

/// ln W_n, the term size in the tail-probability series.
///
/// Poisson uses W_n = sqrt(gamma) e^-lambda lambda^n / (n-1)!, which carries the
/// factor n from gamma_n^{1/2} = n sqrt(gamma). The negative binomial, Beta-mixed
/// negative binomial and Poisson-Gamma terms are sqrt(gamma) P(N = n). The
/// binomial family has finite support and uses sqrt(gamma) n P(N = n).
inline double log_tail_weight(const FrequencyModel& f, double gamma, long long n) {
    if (n < 1) throw std::domain_error("log_tail_weight: n must be >= 1");
    const double base = 0.5 * std::log(gamma) + log_pmf(f, n);
    const bool carries_n = std::holds_alternative<Poisson>(f) || std::holds_alternative<Binomial>(f) ||
                           std::holds_alternative<BetaBinomial>(f);
    return carries_n ? base + std::log(static_cast<double>(n)) : base;
}

/// Stirling approximation of d/dn ln W_n. Its sign change from + to - locates
/// the largest term. NaN for the binomial family (finite support, scanned directly).
inline double mode_equation(const FrequencyModel& f, double n) {
    return std::visit(
        overloaded{
            [&](const Poisson& m) { return std::log(m.lambda) - std::log(n) - 1.0 / (2.0 * n); },
            [&](const PoissonGamma& m) {
                const double a = m.shape;
                const double s = n + a - 1.0;
                return std::log(s) + n / s + (a - 0.5) / s - std::log(n) - 1.0 - 1.0 / (2.0 * n) -
                       std::log(m.rate + 1.0);
            },
            [&](const NegBinomial& m) {
                const double r = static_cast<double>(m.r);
                return std::log(n + r - 1.0) + n / (n + r - 0.5) + (r - 0.5) / (n + r - 1.0) - 1.0 - std::log(n) -
                       1.0 / (2.0 * n) + std::log(m.p);
            },
            [&](const BetaNegBinomial& m) {
                // ln W_n = lnG(n+r) - lnG(n+1) + lnG(a+n) - lnG(a+b+r+n) + const,
                // differentiated with psi(x) ~ ln x - 1/(2x).
                const double r = static_cast<double>(m.r);
                auto psi = [](double x) { return std::log(x) - 1.0 / (2.0 * x); };
                return psi(n + r) - psi(n + 1.0) + psi(m.a + n) - psi(m.a + m.b + r + n);
            },
            [](const Binomial&) { return std::numeric_limits<double>::quiet_NaN(); },
            [](const BetaBinomial&) { return std::numeric_limits<double>::quiet_NaN(); },
        },
        f);
}

namespace detail {

inline long long hill_climb(const FrequencyModel& f, double gamma, long long n, long long limit) {
    n = std::clamp(n, 1LL, limit);
    double here = log_tail_weight(f, gamma, n);
    while (n < limit) {
        const double next = log_tail_weight(f, gamma, n + 1);
        if (!(next > here)) break;
        ++n;
        here = next;
    }
    while (n > 1) {
        const double prev = log_tail_weight(f, gamma, n - 1);
        if (!(prev > here)) break;
        --n;
        here = prev;
    }
    return n;
}

}  // namespace detail

/// Index of the largest W_n.
inline long long tail_weight_mode(const FrequencyModel& f, double gamma, const TruncationOptions& opts = {}) {
    const auto bounded = support_max(f);
    const long long limit = bounded ? *bounded : std::max(1LL, opts.max_terms);
    if (bounded) {
        long long best = 1;
        double best_w = log_tail_weight(f, gamma, 1);
        for (long long n = 2; n <= limit; ++n) {
            const double w = log_tail_weight(f, gamma, n);
            if (w > best_w) {
                best_w = w;
                best = n;
            }
        }
        return best;
    }
    // First sign change of the Stirling derivative.
    long long seed = 1;
    for (long long n = 1; n <= limit; ++n) {
        if (!(mode_equation(f, static_cast<double>(n)) > 0.0)) {
            seed = n;
            break;
        }
        seed = n;
    }
    long long mode = detail::hill_climb(f, gamma, seed, limit);

    // Window scan around the mean guards against a misbehaving seed at small n.
    const double mu = mean(f);
    if (std::isfinite(mu)) {
        const double half = 20.0 * std::sqrt(mu + 1.0);
        const long long lo = std::max(1LL, static_cast<long long>(std::floor(mu - half)));
        const long long hi = std::min(limit, static_cast<long long>(std::ceil(mu + half)));
        double best_w = log_tail_weight(f, gamma, mode);
        for (long long n = lo; n <= hi; ++n) {
            const double w = log_tail_weight(f, gamma, n);
            if (w > best_w) {
                best_w = w;
                mode = n;
            }
        }
    }
    return mode;
}

/// Retained range: n_upper is the first index above the mode whose term is at or
/// below e^threshold times the largest term, n_lower the last such index below
/// the mode (or 1).
inline TruncationBounds truncation_bounds(const FrequencyModel& f, double gamma, const TruncationOptions& opts = {}) {
    validate(f);
    if (!(gamma > 0.0)) throw std::invalid_argument("truncation_bounds: gamma must be positive");
    if (opts.max_terms < 1) throw std::invalid_argument("truncation_bounds: max_terms must be >= 1");
    const auto bounded = support_max(f);
    const long long limit = bounded ? *bounded : opts.max_terms;

    TruncationBounds b;
    b.threshold_log = opts.threshold_log;
    b.n_mode = tail_weight_mode(f, gamma, opts);
    const double cut = log_tail_weight(f, gamma, b.n_mode) + opts.threshold_log;

    b.n_upper = limit;
    b.capped = !bounded;
    for (long long n = b.n_mode + 1; n <= limit; ++n) {
        if (log_tail_weight(f, gamma, n) <= cut) {
            b.n_upper = n;
            b.capped = false;
            break;
        }
    }
    if (b.n_mode == limit) b.capped = false;

    b.n_lower = 1;
    for (long long n = b.n_mode - 1; n >= 1; --n) {
        if (log_tail_weight(f, gamma, n) <= cut) {
            b.n_lower = n;
            break;
        }
    }
    return b;
}

/// Probability mass of counts n >= 1 outside [n_lower, n_upper].
inline double truncated_mass(const FrequencyModel& f, const TruncationBounds& b) {
    double inside = zero_prob(f);
    for (long long n = b.n_lower; n <= b.n_upper; ++n) inside += pmf(f, n);
    return std::max(0.0, 1.0 - inside);
}

}  // namespace levyrisk
