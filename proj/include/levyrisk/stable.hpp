#pragma once

// Stable-law parameter algebra, the analytic Levy sub-family and variate
// generation.
//
// Two location conventions are in use for stable laws and they differ by
// beta * gamma * tan(pi alpha / 2) when alpha != 1:
//   S0 - continuous in alpha; convolution adds a drift correction.
//   S1 - locations add under convolution.
// The Levy density f(x) = sqrt(g / 2pi) (x - d)^-3/2 exp(-g / 2(x - d)) is
// the S1 form: d is the left end of the support. LevyParams always stores
// that support boundary; conversion to either form is explicit.

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "levyrisk/special_functions.hpp"

namespace levyrisk {

enum class ParamForm { S0, S1 };

struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double gamma = 1.0;
    double delta = 0.0;
    ParamForm form = ParamForm::S0;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("stable: alpha must lie in (0,2]");
        if (!(std::abs(beta) <= 1.0)) throw std::invalid_argument("stable: beta must lie in [-1,1]");
        if (!(gamma > 0.0)) throw std::invalid_argument("stable: gamma must be positive");
        if (!std::isfinite(delta)) throw std::invalid_argument("stable: delta must be finite");
    }

    friend bool operator==(const StableParams&, const StableParams&) = default;
};

namespace detail {

// delta_S0 - delta_S1 for a law with the given alpha, beta, gamma.
inline double s0_minus_s1_shift(double alpha, double beta, double gamma) {
    if (alpha == 1.0) return beta * (2.0 / std::numbers::pi) * gamma * std::log(gamma);
    // tan(pi/4) is not exactly 1 in floating point; pin the Levy case.
    const double t = alpha == 0.5 ? 1.0 : std::tan(std::numbers::pi * alpha / 2.0);
    return beta * gamma * t;
}

}  // namespace detail

/// Re-express p in the requested location convention.
inline StableParams to_form(StableParams p, ParamForm target) {
    if (p.form == target) return p;
    const double shift = detail::s0_minus_s1_shift(p.alpha, p.beta, p.gamma);
    p.delta += target == ParamForm::S0 ? shift : -shift;
    p.form = target;
    return p;
}

/// Distribution of a * Y + b for Y ~ p. Result is returned in p's form.
inline StableParams affine_transform(const StableParams& p, double a, double b) {
    if (a == 0.0) throw std::invalid_argument("affine_transform: a must be nonzero");
    p.validate();
    StableParams s0 = to_form(p, ParamForm::S0);
    StableParams out{s0.alpha, a > 0 ? s0.beta : -s0.beta, std::abs(a) * s0.gamma, a * s0.delta + b,
                     ParamForm::S0};
    return to_form(out, p.form);
}

/// Law of the sum of independent stable variables sharing alpha.
/// Inputs may be in either form; the result is in S0.
inline StableParams convolve_params(std::span<const StableParams> parts) {
    if (parts.empty()) throw std::invalid_argument("convolve_params: empty list");
    const double alpha = parts.front().alpha;
    double scale_pow = 0.0;  // sum gamma_i^alpha
    double skew_mass = 0.0;  // sum beta_i gamma_i^alpha
    double loc = 0.0;        // sum delta_i (S0)
    double beta_gamma = 0.0; // sum beta_i gamma_i            (alpha != 1)
    double beta_gamma_log = 0.0; // sum beta_i gamma_i ln gamma_i (alpha == 1)
    for (const auto& raw : parts) {
        raw.validate();
        if (raw.alpha != alpha) throw std::invalid_argument("convolve_params: mixed alpha");
        const StableParams p = to_form(raw, ParamForm::S0);
        const double ga = std::pow(p.gamma, alpha);
        scale_pow += ga;
        skew_mass += p.beta * ga;
        loc += p.delta;
        beta_gamma += p.beta * p.gamma;
        beta_gamma_log += p.beta * p.gamma * std::log(p.gamma);
    }
    if (parts.size() == 1) return to_form(parts.front(), ParamForm::S0);
    StableParams out;
    out.alpha = alpha;
    out.form = ParamForm::S0;
    out.gamma = std::pow(scale_pow, 1.0 / alpha);
    out.beta = skew_mass / scale_pow;
    if (alpha == 1.0) {
        out.delta = loc + (2.0 / std::numbers::pi) *
                              (out.beta * out.gamma * std::log(out.gamma) - beta_gamma_log);
    } else {
        const double t = alpha == 0.5 ? 1.0 : std::tan(std::numbers::pi * alpha / 2.0);
        out.delta = loc + t * (out.beta * out.gamma - beta_gamma);
    }
    return out;
}

/// n-fold convolution of one law with itself, without materializing copies.
inline StableParams convolve_identical(const StableParams& p, long long n) {
    if (n < 1) throw std::invalid_argument("convolve_identical: n must be >= 1");
    p.validate();
    const StableParams s0 = to_form(p, ParamForm::S0);
    if (n == 1) return s0;
    const double nd = static_cast<double>(n);
    StableParams out = s0;
    out.gamma = std::pow(nd, 1.0 / s0.alpha) * s0.gamma;
    if (s0.alpha == 1.0) {
        out.delta = nd * s0.delta +
                    (2.0 / std::numbers::pi) * s0.beta * (out.gamma * std::log(out.gamma) - nd * s0.gamma * std::log(s0.gamma));
    } else {
        const double t = s0.alpha == 0.5 ? 1.0 : std::tan(std::numbers::pi * s0.alpha / 2.0);
        out.delta = nd * s0.delta + t * s0.beta * (out.gamma - nd * s0.gamma);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Levy sub-family (alpha = 1/2, beta = 1)

struct LevyParams {
    double gamma = 1.0;
    double delta = 0.0;  // support boundary (S1 location)

    void validate() const {
        if (!(gamma > 0.0)) throw std::invalid_argument("levy: gamma must be positive");
        if (!std::isfinite(delta)) throw std::invalid_argument("levy: delta must be finite");
    }

    StableParams stable(ParamForm form = ParamForm::S0) const {
        return to_form(StableParams{0.5, 1.0, gamma, delta, ParamForm::S1}, form);
    }

    static LevyParams from_stable(const StableParams& p) {
        if (p.alpha != 0.5 || p.beta != 1.0) {
            throw std::invalid_argument("LevyParams::from_stable: needs alpha = 0.5, beta = 1");
        }
        const StableParams s1 = to_form(p, ParamForm::S1);
        return {s1.gamma, s1.delta};
    }

    friend bool operator==(const LevyParams&, const LevyParams&) = default;
};

inline double levy_pdf(const LevyParams& p, double x) {
    const double u = x - p.delta;
    if (!(u > 0.0)) return 0.0;
    constexpr double inv_two_pi = 0.15915494309189533577;
    return std::sqrt(p.gamma * inv_two_pi) * std::exp(-1.5 * std::log(u) - p.gamma / (2.0 * u));
}

inline double levy_cdf(const LevyParams& p, double x) {
    const double u = x - p.delta;
    if (!(u > 0.0)) return 0.0;
    return erfc(std::sqrt(p.gamma / (2.0 * u)));
}

/// 1 - levy_cdf, computed as erf so that the far tail keeps relative accuracy.
inline double levy_survival(const LevyParams& p, double x) {
    const double u = x - p.delta;
    if (!(u > 0.0)) return 1.0;
    return std::erf(std::sqrt(p.gamma / (2.0 * u)));
}

inline double levy_quantile(const LevyParams& p, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("levy_quantile: q must lie in (0,1)");
    const double e = erfc_inv(q);
    return p.delta + p.gamma / (2.0 * e * e);
}

inline double levy_median(const LevyParams& p) { return levy_quantile(p, 0.5); }

inline double levy_mode(const LevyParams& p) { return p.delta + p.gamma / 3.0; }

// ---------------------------------------------------------------------------
// Tail asymptotics

struct TailAsymptote {
    double coefficient = 0.0;  // gamma^alpha c_alpha (1 + beta)
    double exponent = 0.0;     // alpha

    double operator()(double x) const { return coefficient * std::pow(x, -exponent); }
};

struct TailEstimate {
    double value = 0.0;
    bool asymptotic = false;  // false when x is too close to the body for the limit to be trusted
};

/// c_alpha = sin(pi alpha / 2) Gamma(alpha) / pi.
inline double stable_tail_constant(double alpha) {
    return std::sin(std::numbers::pi * alpha / 2.0) * std::exp(ln_gamma(alpha)) / std::numbers::pi;
}

inline TailAsymptote stable_tail_asymptote(const StableParams& p) {
    p.validate();
    if (!(p.alpha < 2.0)) throw std::invalid_argument("stable_tail: alpha must be < 2");
    return {std::pow(p.gamma, p.alpha) * stable_tail_constant(p.alpha) * (1.0 + p.beta), p.alpha};
}

/// P(X > x) ~ gamma^alpha c_alpha (1 + beta) x^-alpha.
inline TailEstimate stable_tail(const StableParams& p, double x) {
    const TailAsymptote a = stable_tail_asymptote(p);
    const StableParams s1 = to_form(p, ParamForm::S1);
    const bool far = x - s1.delta >= 100.0 * p.gamma;
    return {x > 0.0 ? a(x) : 1.0, far && x > 0.0};
}

// ---------------------------------------------------------------------------
// Sampling. Every sampler takes a caller-owned uniform random bit generator.

/// Chambers-Mallows-Stuck transform. Produces one variate of p in either form.
template <class URBG>
double sample_stable_cms(const StableParams& p, URBG& rng) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unif(-half_pi, half_pi);
    double w = expo(rng);
    while (w == 0.0) w = expo(rng);
    double u = unif(rng);
    while (u == -half_pi) u = unif(rng);

    const double a = p.alpha;
    const double b = p.beta;
    double standard;  // S1 with unit scale, zero location
    if (a != 1.0) {
        const double t = a == 0.5 ? b : b * std::tan(half_pi * a);
        const double shift = std::atan(t) / a;
        const double scale = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
        const double au = a * (u + shift);
        standard = scale * std::sin(au) / std::pow(std::cos(u), 1.0 / a) *
                   std::pow(std::cos(u - au) / w, (1.0 - a) / a);
    } else {
        const double bu = half_pi + b * u;
        standard = (bu * std::tan(u) - b * std::log(half_pi * w * std::cos(u) / bu)) / half_pi;
    }
    const StableParams s1 = to_form(p, ParamForm::S1);
    double y = s1.gamma * standard + s1.delta;
    if (a == 1.0) y += (2.0 / std::numbers::pi) * s1.beta * s1.gamma * std::log(s1.gamma);
    return y;
}

/// Inverse-CDF draw from the Levy law: delta + gamma / (2 erfc_inv(U)^2).
template <class URBG>
double sample_levy_inverse(const LevyParams& p, URBG& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    while (u == 0.0) u = unif(rng);
    const double e = erfc_inv(u);
    return p.delta + p.gamma / (2.0 * e * e);
}

}  // namespace levyrisk
