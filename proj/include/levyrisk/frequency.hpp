#pragma once

// Counting laws for the annual number of losses, including the doubly
// stochastic (Beta- and Gamma-mixed) forms with their parameter integrated out.

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>

#include "levyrisk/special_functions.hpp"

namespace levyrisk {

struct Binomial {
    long long trials = 1;  // M
    double p = 0.5;

    friend bool operator==(const Binomial&, const Binomial&) = default;
};

/// Binomial(M, p) with p ~ Beta(a, b).
struct BetaBinomial {
    long long trials = 1;
    double a = 1.0;
    double b = 1.0;

    friend bool operator==(const BetaBinomial&, const BetaBinomial&) = default;
};

/// P(N = n) = C(n + r - 1, n) (1 - p)^r p^n.
struct NegBinomial {
    long long r = 1;
    double p = 0.5;

    friend bool operator==(const NegBinomial&, const NegBinomial&) = default;
};

/// NegBinomial(r, p) with p ~ Beta(a, b).
struct BetaNegBinomial {
    long long r = 1;
    double a = 1.0;
    double b = 1.0;

    friend bool operator==(const BetaNegBinomial&, const BetaNegBinomial&) = default;
};

struct Poisson {
    double lambda = 1.0;

    friend bool operator==(const Poisson&, const Poisson&) = default;
};

/// Poisson(lambda) with lambda ~ Gamma(shape, rate).
struct PoissonGamma {
    double shape = 1.0;
    double rate = 1.0;

    friend bool operator==(const PoissonGamma&, const PoissonGamma&) = default;
};

using FrequencyModel =
    std::variant<Binomial, BetaBinomial, NegBinomial, BetaNegBinomial, Poisson, PoissonGamma>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string kind_name(const FrequencyModel& f) {
    return std::visit(overloaded{
                          [](const Binomial&) { return std::string("binomial"); },
                          [](const BetaBinomial&) { return std::string("beta_binomial"); },
                          [](const NegBinomial&) { return std::string("negative_binomial"); },
                          [](const BetaNegBinomial&) { return std::string("beta_negative_binomial"); },
                          [](const Poisson&) { return std::string("poisson"); },
                          [](const PoissonGamma&) { return std::string("poisson_gamma"); },
                      },
                      f);
}

namespace detail {

inline bool open_unit(double p) { return p > 0.0 && p < 1.0; }
inline bool positive(double x) { return x > 0.0 && std::isfinite(x); }

// Shared by NegBinomial and PoissonGamma so the two agree term for term.
inline double nb_log_pmf(double r, double p, long long n) {
    const double nd = static_cast<double>(n);
    const double tail = n == 0 ? 0.0 : nd * std::log(p);
    return ln_gamma(nd + r) - ln_gamma(r) - ln_gamma(nd + 1.0) + r * std::log1p(-p) + tail;
}

}  // namespace detail

inline void validate(const FrequencyModel& f) {
    std::visit(overloaded{
                   [](const Binomial& m) {
                       if (m.trials < 1) throw std::invalid_argument("binomial: trials must be >= 1");
                       if (!detail::open_unit(m.p)) throw std::invalid_argument("binomial: p must lie in (0,1)");
                   },
                   [](const BetaBinomial& m) {
                       if (m.trials < 1) throw std::invalid_argument("beta_binomial: trials must be >= 1");
                       if (!detail::positive(m.a) || !detail::positive(m.b))
                           throw std::invalid_argument("beta_binomial: Beta shapes must be positive");
                   },
                   [](const NegBinomial& m) {
                       if (m.r < 1) throw std::invalid_argument("negative_binomial: r must be >= 1");
                       if (!detail::open_unit(m.p)) throw std::invalid_argument("negative_binomial: p must lie in (0,1)");
                   },
                   [](const BetaNegBinomial& m) {
                       if (m.r < 1) throw std::invalid_argument("beta_negative_binomial: r must be >= 1");
                       if (!detail::positive(m.a) || !detail::positive(m.b))
                           throw std::invalid_argument("beta_negative_binomial: Beta shapes must be positive");
                   },
                   [](const Poisson& m) {
                       if (!detail::positive(m.lambda)) throw std::invalid_argument("poisson: lambda must be positive");
                   },
                   [](const PoissonGamma& m) {
                       if (!detail::positive(m.shape) || !detail::positive(m.rate))
                           throw std::invalid_argument("poisson_gamma: shape and rate must be positive");
                   },
               },
               f);
}

/// Largest attainable count, or nullopt for unbounded support.
inline std::optional<long long> support_max(const FrequencyModel& f) {
    if (const auto* m = std::get_if<Binomial>(&f)) return m->trials;
    if (const auto* m = std::get_if<BetaBinomial>(&f)) return m->trials;
    return std::nullopt;
}

/// E[N]; +inf when the mixed law has no mean.
inline double mean(const FrequencyModel& f) {
    return std::visit(overloaded{
                          [](const Binomial& m) { return static_cast<double>(m.trials) * m.p; },
                          [](const BetaBinomial& m) { return static_cast<double>(m.trials) * m.a / (m.a + m.b); },
                          [](const NegBinomial& m) { return static_cast<double>(m.r) * m.p / (1.0 - m.p); },
                          [](const BetaNegBinomial& m) {
                              // E[p / (1 - p)] under Beta(a, b) = a / (b - 1) for b > 1.
                              return m.b > 1.0 ? static_cast<double>(m.r) * m.a / (m.b - 1.0)
                                               : std::numeric_limits<double>::infinity();
                          },
                          [](const Poisson& m) { return m.lambda; },
                          [](const PoissonGamma& m) { return m.shape / m.rate; },
                      },
                      f);
}

inline double log_pmf(const FrequencyModel& f, long long n) {
    if (n < 0) throw std::domain_error("log_pmf: count must be nonnegative");
    const double nd = static_cast<double>(n);
    return std::visit(
        overloaded{
            [&](const Binomial& m) {
                if (n > m.trials) throw std::domain_error("log_pmf: count exceeds binomial trials");
                const double M = static_cast<double>(m.trials);
                const double success = n == 0 ? 0.0 : nd * std::log(m.p);
                const double failure = n == m.trials ? 0.0 : (M - nd) * std::log1p(-m.p);
                return ln_choose(M, nd) + success + failure;
            },
            [&](const BetaBinomial& m) {
                if (n > m.trials) throw std::domain_error("log_pmf: count exceeds binomial trials");
                const double M = static_cast<double>(m.trials);
                return ln_choose(M, nd) + ln_beta(m.a + nd, m.b + M - nd) - ln_beta(m.a, m.b);
            },
            [&](const NegBinomial& m) { return detail::nb_log_pmf(static_cast<double>(m.r), m.p, n); },
            [&](const BetaNegBinomial& m) {
                const double r = static_cast<double>(m.r);
                return ln_gamma(nd + r) - ln_gamma(r) - ln_gamma(nd + 1.0) + ln_beta(m.a + nd, m.b + r) -
                       ln_beta(m.a, m.b);
            },
            [&](const Poisson& m) {
                const double rate_term = n == 0 ? 0.0 : nd * std::log(m.lambda);
                return -m.lambda + rate_term - ln_gamma(nd + 1.0);
            },
            [&](const PoissonGamma& m) { return detail::nb_log_pmf(m.shape, 1.0 / (1.0 + m.rate), n); },
        },
        f);
}

inline double pmf(const FrequencyModel& f, long long n) { return std::exp(log_pmf(f, n)); }

/// P(N = 0), the size of the atom at zero annual loss.
inline double zero_prob(const FrequencyModel& f) { return pmf(f, 0); }

namespace detail {

template <class URBG>
double sample_beta(double a, double b, URBG& rng, double* complement) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    for (;;) {
        const double x = ga(rng);
        const double y = gb(rng);
        const double s = x + y;
        if (s > 0.0 && x > 0.0 && y > 0.0) {
            *complement = y / s;
            return x / s;
        }
    }
}

// Count with P(N = n) = C(n + r - 1, n) q^r (1 - q)^n, drawn as a Gamma-Poisson
// composition. odds = (1 - q) / q is passed directly to avoid cancellation.
template <class URBG>
long long sample_gamma_poisson(double shape, double scale, URBG& rng) {
    std::gamma_distribution<double> g(shape, scale);
    const double lambda = g(rng);
    if (!(lambda > 0.0)) return 0;
    if (lambda > 1e15) return static_cast<long long>(std::llround(lambda));
    std::poisson_distribution<long long> po(lambda);
    return po(rng);
}

}  // namespace detail

/// One draw of N. Mixed models draw their parameter first, then the count.
template <class URBG>
long long sample_count(const FrequencyModel& f, URBG& rng) {
    return std::visit(
        overloaded{
            [&](const Binomial& m) { return std::binomial_distribution<long long>(m.trials, m.p)(rng); },
            [&](const BetaBinomial& m) {
                double q;
                const double p = detail::sample_beta(m.a, m.b, rng, &q);
                return std::binomial_distribution<long long>(m.trials, p)(rng);
            },
            [&](const NegBinomial& m) {
                return detail::sample_gamma_poisson(static_cast<double>(m.r), m.p / (1.0 - m.p), rng);
            },
            [&](const BetaNegBinomial& m) {
                double q;
                const double p = detail::sample_beta(m.a, m.b, rng, &q);
                return detail::sample_gamma_poisson(static_cast<double>(m.r), p / q, rng);
            },
            [&](const Poisson& m) { return std::poisson_distribution<long long>(m.lambda)(rng); },
            [&](const PoissonGamma& m) {
                return detail::sample_gamma_poisson(m.shape, 1.0 / m.rate, rng);
            },
        },
        f);
}

}  // namespace levyrisk
