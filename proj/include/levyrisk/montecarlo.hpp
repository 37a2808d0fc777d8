#pragma once

// Monte Carlo oracle for the closed forms: simulated annual losses, blocked
// empirical CDFs, truncation-error curves and timing comparisons.
//
// Years are simulated in blocks. Block b always uses the random stream derived
// from (seed, b), so output is bit-identical for any thread count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "levyrisk/aggregate.hpp"
#include "levyrisk/compound.hpp"

namespace levyrisk {

struct SimulationConfig {
    long long years = 200'000;
    long long block_size = 50'000;
    std::uint64_t seed = 1;
    std::vector<double> grid;
    unsigned threads = 0;  // 0 = hardware concurrency

    long long blocks() const { return block_size > 0 ? years / block_size : 0; }

    void validate() const {
        if (years < 1) throw std::invalid_argument("simulation: years must be positive");
        if (block_size < 1) throw std::invalid_argument("simulation: block_size must be positive");
        if (years % block_size != 0) {
            throw std::invalid_argument("simulation: block_size " + std::to_string(block_size) +
                                        " does not divide years " + std::to_string(years));
        }
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("simulation: grid must be strictly increasing");
        }
    }
};

/// n equally spaced points on [from, to].
inline std::vector<double> linear_grid(double from, double to, std::size_t n) {
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = from;
        return g;
    }
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

inline std::vector<double> default_grid() { return linear_grid(1.0, 200.0, 200); }

struct EmpiricalCdf {
    std::vector<double> grid;
    std::vector<double> estimate;
    std::vector<double> std_error;
};

enum class SeverityDraw { InverseCdf, Cms };

/// Independent engine for stream `stream` of a run seeded with `seed`.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return std::mt19937_64(seq);
}

namespace detail {

// Above this many losses in one year the sum is drawn from its closed-form law
// (exact in distribution) instead of term by term.
inline constexpr long long kDirectSumThreshold = 1'000'000;

template <class URBG>
double simulate_cell_year(const CompoundModel& m, SeverityDraw draw, URBG& rng) {
    const long long n = sample_count(m.frequency(), rng);
    if (n == 0) return 0.0;
    const LevyParams& sev = m.severity();
    if (n > kDirectSumThreshold) return sample_levy_inverse(sum_of_iid(sev, n), rng);
    double total = 0.0;
    if (draw == SeverityDraw::InverseCdf) {
        for (long long i = 0; i < n; ++i) total += sample_levy_inverse(sev, rng);
    } else {
        const StableParams s = sev.stable(ParamForm::S0);
        for (long long i = 0; i < n; ++i) total += sample_stable_cms(s, rng);
    }
    return total;
}

inline unsigned worker_count(unsigned requested, long long blocks) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<long long>(t, std::max(1LL, blocks)));
}

// Runs fill(block, rng, out_slice) for every block across workers.
template <class Fill>
std::vector<double> run_blocks(const SimulationConfig& cfg, Fill fill) {
    cfg.validate();
    std::vector<double> out(static_cast<std::size_t>(cfg.years));
    const long long nb = cfg.blocks();
    const unsigned workers = worker_count(cfg.threads, nb);
    auto work = [&](unsigned w) {
        for (long long b = w; b < nb; b += workers) {
            auto rng = stream_engine(cfg.seed, static_cast<std::uint64_t>(b));
            std::span<double> slice(out.data() + b * cfg.block_size, static_cast<std::size_t>(cfg.block_size));
            for (double& v : slice) v = fill(rng);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    return out;
}

}  // namespace detail

/// Annual losses for `cfg.years` simulated years.
inline std::vector<double> simulate_years(const CompoundModel& m, const SimulationConfig& cfg,
                                          SeverityDraw draw = SeverityDraw::InverseCdf) {
    return detail::run_blocks(cfg, [&](std::mt19937_64& rng) { return detail::simulate_cell_year(m, draw, rng); });
}

/// Annual totals over independent cells.
inline std::vector<double> simulate_aggregate_years(const std::vector<CompoundModel>& cells,
                                                    const SimulationConfig& cfg) {
    return detail::run_blocks(cfg, [&](std::mt19937_64& rng) {
        double total = 0.0;
        for (const auto& c : cells) total += detail::simulate_cell_year(c, SeverityDraw::InverseCdf, rng);
        return total;
    });
}

/// Pooled P(Z <= z) per grid point with block standard errors.
inline EmpiricalCdf empirical_cdf(std::span<const double> losses, const SimulationConfig& cfg) {
    if (losses.empty()) throw std::invalid_argument("empirical_cdf: no losses");
    if (cfg.block_size < 1) throw std::invalid_argument("empirical_cdf: block_size must be positive");
    const std::size_t bs = static_cast<std::size_t>(cfg.block_size);
    const std::size_t nb = losses.size() / bs;
    if (nb < 2) throw std::invalid_argument("empirical_cdf: at least 2 blocks are required");

    const std::size_t k = cfg.grid.size();
    std::vector<std::vector<double>> per_block(nb, std::vector<double>(k));
    std::vector<double> sorted(bs);
    for (std::size_t b = 0; b < nb; ++b) {
        std::copy_n(losses.begin() + static_cast<std::ptrdiff_t>(b * bs), bs, sorted.begin());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < k; ++i) {
            const auto it = std::upper_bound(sorted.begin(), sorted.end(), cfg.grid[i]);
            per_block[b][i] = static_cast<double>(it - sorted.begin()) / static_cast<double>(bs);
        }
    }
    EmpiricalCdf e{cfg.grid, std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
    const double dnb = static_cast<double>(nb);
    for (std::size_t i = 0; i < k; ++i) {
        double mean = 0.0;
        for (std::size_t b = 0; b < nb; ++b) mean += per_block[b][i];
        mean /= dnb;
        double ss = 0.0;
        for (std::size_t b = 0; b < nb; ++b) ss += (per_block[b][i] - mean) * (per_block[b][i] - mean);
        e.estimate[i] = mean;
        e.std_error[i] = std::sqrt(ss / (dnb - 1.0)) / std::sqrt(dnb);
    }
    return e;
}

struct TruncationPoint {
    long long cap = 0;
    double mse = 0.0;
};

/// Mean squared CDF difference between counts 1..cap and the reference cap.
inline std::vector<TruncationPoint> truncation_study(const CompoundModel& m, std::span<const long long> caps,
                                                     std::span<const double> grid, long long reference_cap = 1000) {
    for (std::size_t i = 1; i < caps.size(); ++i) {
        if (!(caps[i] > caps[i - 1])) throw std::invalid_argument("truncation_study: caps must be increasing");
    }
    const CompoundModel ref = m.with_cap(reference_cap);
    std::vector<double> ref_cdf(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) ref_cdf[i] = ref.cdf(grid[i]);

    std::vector<TruncationPoint> out;
    out.reserve(caps.size());
    for (long long cap : caps) {
        const CompoundModel capped = m.with_cap(cap);
        double s = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double d = capped.cdf(grid[i]) - ref_cdf[i];
            s += d * d;
        }
        out.push_back({cap, grid.empty() ? 0.0 : s / static_cast<double>(grid.size())});
    }
    return out;
}

struct TimingResult {
    double closed_form_seconds = 0.0;
    double monte_carlo_seconds = 0.0;
    double ratio() const { return monte_carlo_seconds > 0.0 ? closed_form_seconds / monte_carlo_seconds : 0.0; }
};

/// Wall clock for the closed form (counts 1..closed_form_cap, including
/// building the mixture) against simulation plus empirical CDF on the same grid.
inline TimingResult timing_study(const CompoundModel& m, const SimulationConfig& cfg,
                                 long long closed_form_cap = 1000) {
    using clock = std::chrono::steady_clock;
    TimingResult t;
    volatile double sink = 0.0;

    const auto c0 = clock::now();
    if (!cfg.grid.empty()) {
        const CompoundModel exact = m.with_cap(closed_form_cap);
        for (double z : cfg.grid) sink = sink + exact.cdf(z);
    }
    const auto c1 = clock::now();
    t.closed_form_seconds = std::chrono::duration<double>(c1 - c0).count();

    const auto m0 = clock::now();
    if (!cfg.grid.empty()) {
        const auto losses = simulate_years(m, cfg);
        const auto e = empirical_cdf(losses, cfg);
        sink = sink + e.estimate.back();
    }
    const auto m1 = clock::now();
    t.monte_carlo_seconds = std::chrono::duration<double>(m1 - m0).count();
    return t;
}

}  // namespace levyrisk
