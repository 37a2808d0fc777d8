// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// All tolerances and seeds are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "levyrisk/levyrisk.hpp"
#include "support/oracles.hpp"

using namespace levyrisk;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr long long kYears = 200'000;
constexpr long long kBlock = 10'000;  // 20 blocks
constexpr double kWithin3Fraction = 0.95;
constexpr double kMassTol = 1e-9;
constexpr double kMassRounding = 1e-12;
constexpr double kDensityTol = 1e-8;
constexpr double kKsLevel = 0.01;
constexpr long long kKsDraws = 100'000;
constexpr double kTailTol = 0.05;
constexpr double kVarTol = 1e-9;
constexpr double kMseTol = 1e-12;
constexpr double kReductionTol = 1e-12;
constexpr double kTimingRatio = 0.10;

const LevyParams kSev{0.01, 0.0};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

SimulationConfig sim_config() {
    SimulationConfig s;
    s.years = kYears;
    s.block_size = kBlock;
    s.seed = kSeed;
    s.grid = default_grid();
    return s;
}

struct SeBands {
    double within3 = 0.0;
    double within5 = 0.0;
};

SeBands se_bands(const EmpiricalCdf& e, const std::function<double(double)>& cdf) {
    int three = 0, five = 0;
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
        const double d = std::abs(e.estimate[i] - cdf(e.grid[i]));
        three += d <= 3.0 * e.std_error[i];
        five += d <= 5.0 * e.std_error[i];
    }
    const double n = static_cast<double>(e.grid.size());
    return {three / n, five / n};
}

void truncation_regression() {
    const auto t0 = clock_type::now();
    const std::vector<std::pair<FrequencyModel, long long>> targets{
        {Poisson{0.1}, 11}, {Poisson{10.0}, 49}, {NegBinomial{2, 0.1}, 19},
        {NegBinomial{10, 0.6}, 120}, {Binomial{12, 0.1}, 12}, {Binomial{12, 0.6}, 12}};
    bool ok = true;
    std::string got;
    for (const auto& [f, expect] : targets) {
        const long long u = truncation_bounds(f, kSev.gamma).n_upper;
        ok = ok && u == expect;
        got += (got.empty() ? "" : ",") + std::to_string(u);
    }
    const double dt = seconds_since(t0);
    report(1, "truncation regression", ok && dt < 1.0,
           "N_U = " + got + " (expected 11,49,19,120,12,12) in " + fmt("%.3f s", dt));
}

void closed_form_vs_monte_carlo() {
    const auto t0 = clock_type::now();
    bool ok = true;
    std::string worst = "all within bounds";
    double min3 = 1.0, min5 = 1.0;
    for (const auto& cell : oracle::reference_cells()) {
        const CompoundModel m(cell.frequency, cell.severity);
        const auto cfg = sim_config();
        const auto e = empirical_cdf(simulate_years(m, cfg), cfg);
        const SeBands b = se_bands(e, [&](double z) { return m.cdf(z); });
        if (b.within3 < kWithin3Fraction || b.within5 < 1.0) {
            ok = false;
            worst = cell.name + " within3=" + fmt("%.3f", b.within3) + " within5=" + fmt("%.3f", b.within5);
        }
        min3 = std::min(min3, b.within3);
        min5 = std::min(min5, b.within5);
    }
    const double dt = seconds_since(t0);
    report(2, "closed form vs Monte Carlo", ok && dt < 300.0,
           "12 configs, T=200000 in 20 blocks; min fraction within 3 SE " + fmt("%.3f", min3) + ", within 5 SE " +
               fmt("%.3f", min5) + "; " + worst + "; " + fmt("%.1f s", dt));
}

void normalization() {
    bool ok = true;
    std::string bad;
    double worst_mass = 0.0, worst_density = 0.0;
    for (const auto& cell : oracle::reference_cells()) {
        const CompoundModel m(cell.frequency, cell.severity);
        const double mass = m.mixture().retained_mass();
        const double integral = oracle::density_mass(m);
        const bool mass_ok = mass >= 1.0 - kMassTol && mass <= 1.0 + kMassRounding;
        const bool dens_ok = std::abs(integral - 1.0) <= kDensityTol;
        worst_mass = std::max(worst_mass, std::abs(1.0 - mass));
        worst_density = std::max(worst_density, std::abs(1.0 - integral));
        if (!mass_ok || !dens_ok) {
            ok = false;
            bad += " " + cell.name + " (mass " + fmt("%.12f", mass) + ", density integral " + fmt("%.12f", integral) +
                   ")";
        }
    }
    report(3, "normalization", ok,
           "max |1-mass| " + fmt("%.2e", worst_mass) + ", max |1-integral| " + fmt("%.2e", worst_density) +
               (ok ? "" : ";" + bad));
}

void sampler_correctness() {
    std::mt19937_64 rng(kSeed);
    const StableParams s = kSev.stable(ParamForm::S1);
    std::vector<double> cms(kKsDraws), inv(kKsDraws);
    for (auto& x : cms) x = sample_stable_cms(s, rng);
    for (auto& x : inv) x = sample_levy_inverse(kSev, rng);
    const double p1 = oracle::ks_one_sample(cms, [](double v) { return levy_cdf(kSev, v); }).p_value;
    const double p2 = oracle::ks_two_sample(cms, inv).p_value;
    report(4, "sampler correctness", p1 > kKsLevel && p2 > kKsLevel,
           "CMS vs cdf p=" + fmt("%.3f", p1) + ", inverse vs CMS p=" + fmt("%.3f", p2));
}

void convolution_closure() {
    std::mt19937_64 rng(kSeed + 1);
    const StableParams s0{0.5, 1.0, 0.01, 0.0, ParamForm::S0};
    bool ok = true;
    std::string detail;
    for (long long n : {2LL, 3LL, 5LL}) {
        const StableParams closed = convolve_identical(s0, n);
        const LevyParams closed_law = LevyParams::from_stable(closed);
        std::vector<double> sums(kKsDraws), direct(kKsDraws);
        for (auto& x : sums) {
            x = 0.0;
            for (long long i = 0; i < n; ++i) x += sample_stable_cms(s0, rng);
        }
        for (auto& x : direct) x = sample_levy_inverse(closed_law, rng);
        const double p = oracle::ks_two_sample(sums, direct).p_value;
        const bool params_ok = std::abs(closed.gamma - n * n * 0.01) < 1e-15 &&
                               std::abs(closed.delta - (n * n - n) * 0.01) < 1e-15;
        ok = ok && params_ok && p > kKsLevel;
        detail += (detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " p=" + fmt("%.3f", p);
    }
    report(5, "convolution closure", ok, detail);
}

void tail_asymptotic() {
    const CompoundModel m(Poisson{0.1}, kSev);
    const double z = oracle::bisect_increasing([&](double x) { return -m.survival(x); }, -1e-4, 1.0, 1e12);
    const double ratio = m.tail_prob_asymptotic(z).value / m.survival(z);
    report(6, "tail asymptotic", std::abs(ratio - 1.0) <= kTailTol,
           "z=" + fmt("%.6g", z) + " survival=" + fmt("%.3e", m.survival(z)) + " ratio=" + fmt("%.5f", ratio));
}

void var_round_trip() {
    bool ok = true;
    int checked = 0, in_atom = 0;
    double worst = 0.0;
    std::string bad;
    for (const auto& cell : oracle::reference_cells()) {
        const CompoundModel m(cell.frequency, cell.severity);
        for (double q : {0.9, 0.99, 0.995, 0.999}) {
            try {
                const double v = m.value_at_risk(q);
                if (q <= m.zero_prob()) {
                    ++in_atom;
                    if (v != 0.0) {
                        ok = false;
                        bad += " " + cell.name + "@" + fmt("%g", q) + " atom";
                    }
                    continue;
                }
                const double err = std::abs(m.cdf(v) - q);
                worst = std::max(worst, err);
                ++checked;
                if (err > kVarTol) {
                    ok = false;
                    bad += " " + cell.name + "@" + fmt("%g", q);
                }
            } catch (const std::exception& e) {
                ok = false;
                bad += " " + cell.name + "@" + fmt("%g", q) + " unresolvable";
            }
        }
    }
    report(7, "VaR round trip", ok,
           std::to_string(checked) + " round trips, max |cdf(VaR)-q| " + fmt("%.2e", worst) + "; " +
               std::to_string(in_atom) + " quantiles inside the zero atom returned 0" + bad);
}

void mse_decay() {
    bool ok = true;
    std::string detail;
    double worst_at_upper = 0.0;
    const auto grid = default_grid();
    for (const auto& cell : oracle::reference_cells()) {
        const CompoundModel m(cell.frequency, cell.severity);
        std::vector<long long> caps;
        for (long long c = m.bounds().n_mode; c <= 1000; ++c) caps.push_back(c);
        const auto curve = truncation_study(m, caps, grid);
        for (std::size_t i = 1; i < curve.size(); ++i) {
            if (curve[i].mse > curve[i - 1].mse) {
                ok = false;
                detail += " " + cell.name + " rises at cap " + std::to_string(curve[i].cap);
                break;
            }
        }
        const std::vector<long long> upper{m.bounds().n_upper};
        const double at_upper = truncation_study(m, upper, grid).front().mse;
        worst_at_upper = std::max(worst_at_upper, at_upper);
        if (at_upper > kMseTol) {
            ok = false;
            detail += " " + cell.name + " MSE(n_upper)=" + fmt("%.2e", at_upper);
        }
    }
    report(8, "truncation MSE decay", ok, "max MSE(n_upper) " + fmt("%.2e", worst_at_upper) + detail);
}

void aggregation() {
    const std::vector<CompoundModel> cells{CompoundModel(Poisson{0.1}, kSev), CompoundModel(Poisson{10.0}, kSev)};
    const AggregateModel a(cells);
    const auto cfg = sim_config();
    const auto e = empirical_cdf(simulate_aggregate_years(cells, cfg), cfg);
    const SeBands b = se_bands(e, [&](double z) { return a.cdf(z); });
    const bool mc_ok = b.within3 >= kWithin3Fraction && b.within5 >= 1.0;

    double worst = 0.0;
    for (const auto& cell : oracle::reference_cells()) {
        const CompoundModel m(cell.frequency, cell.severity);
        const AggregateModel single({m});
        for (double z : default_grid()) worst = std::max(worst, std::abs(single.cdf(z) - m.cdf(z)));
        for (double z : {0.0, 1e-3, 0.5, 1e4, 1e8}) worst = std::max(worst, std::abs(single.cdf(z) - m.cdf(z)));
    }
    report(9, "aggregation", mc_ok && worst <= kReductionTol,
           "bivariate Poisson within 3 SE " + fmt("%.3f", b.within3) + ", within 5 SE " + fmt("%.3f", b.within5) +
               "; single-cell max |diff| " + fmt("%.2e", worst));
}

void timing() {
    bool ok = true;
    double worst = 0.0;
    std::string detail;
    for (const auto& cell : oracle::reference_cells()) {
        const CompoundModel m(cell.frequency, cell.severity);
        auto cfg = sim_config();
        cfg.block_size = 50'000;
        const TimingResult t = timing_study(m, cfg, 1000);
        worst = std::max(worst, t.ratio());
        if (!(t.ratio() < kTimingRatio)) {
            ok = false;
            detail += " " + cell.name + " ratio " + fmt("%.3f", t.ratio());
        }
    }
    report(10, "timing", ok, "max closed-form/MC time ratio " + fmt("%.4f", worst) + detail);
}

}  // namespace

int main() {
    truncation_regression();
    closed_form_vs_monte_carlo();
    normalization();
    sampler_correctness();
    convolution_closure();
    tail_asymptotic();
    var_round_trip();
    mse_decay();
    aggregation();
    timing();
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
