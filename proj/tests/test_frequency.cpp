#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "levyrisk/frequency.hpp"
#include "support/oracles.hpp"

using namespace levyrisk;

TEST(LogPmf, ZeroCountExamples) {
    EXPECT_NEAR(log_pmf(Poisson{0.1}, 0), -0.1, 1e-15);
    EXPECT_NEAR(log_pmf(BetaBinomial{12, 1.0, 5.0}, 0), std::log(5.0 / 17.0), 1e-13);
    EXPECT_NEAR(log_pmf(PoissonGamma{1.0, 0.1}, 0), std::log(0.1 / 1.1), 1e-13);
}

TEST(LogPmf, Errors) {
    EXPECT_THROW(log_pmf(Binomial{12, 0.1}, 13), std::domain_error);
    EXPECT_THROW(log_pmf(BetaBinomial{12, 1.0, 5.0}, 13), std::domain_error);
    EXPECT_THROW(log_pmf(Poisson{1.0}, -1), std::domain_error);
    EXPECT_THROW(validate(Binomial{0, 0.5}), std::invalid_argument);
    EXPECT_THROW(validate(NegBinomial{2, 1.0}), std::invalid_argument);
    EXPECT_THROW(validate(PoissonGamma{1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(validate(BetaNegBinomial{0, 1.0, 1.0}), std::invalid_argument);
}

TEST(Pmf, BinomialSumsToOne) {
    double s = 0.0;
    for (long long n = 0; n <= 12; ++n) s += pmf(Binomial{12, 0.1}, n);
    EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(Pmf, NegBinomialDirectAndSampled) {
    EXPECT_NEAR(pmf(NegBinomial{2, 0.1}, 1), 2.0 * 0.81 * 0.1, 1e-15);
    std::mt19937_64 rng(8);
    const int draws = 1000000;
    int hits = 0;
    for (int i = 0; i < draws; ++i) hits += sample_count(NegBinomial{2, 0.1}, rng) == 1;
    const double se = std::sqrt(0.162 * 0.838 / draws);
    EXPECT_NEAR(hits / static_cast<double>(draws), 0.162, 3.0 * se);
}

TEST(Pmf, PoissonMode) {
    long long best = 0;
    for (long long n = 1; n < 60; ++n) {
        if (pmf(Poisson{10.0}, n) > pmf(Poisson{10.0}, best)) best = n;
    }
    EXPECT_TRUE(best == 9 || best == 10);
}

TEST(ZeroProb, ClosedForms) {
    EXPECT_NEAR(zero_prob(Binomial{12, 0.1}), std::pow(0.9, 12), 1e-15);
    EXPECT_NEAR(zero_prob(Binomial{12, 0.1}), 0.28243, 1e-5);
    EXPECT_NEAR(zero_prob(Poisson{0.1}), 0.904837, 1e-6);
    EXPECT_NEAR(zero_prob(NegBinomial{2, 0.1}), 0.81, 1e-15);
    EXPECT_NEAR(zero_prob(PoissonGamma{2.0, 3.0}), std::pow(3.0 / 4.0, 2.0), 1e-14);
    EXPECT_NEAR(zero_prob(BetaBinomial{12, 1.0, 5.0}), 5.0 / 17.0, 1e-14);
}

TEST(ZeroProb, BetaNegBinomialMatchesMixingComposition) {
    // P(N=0) = E[(1-p)^r] with p ~ Be(1,5): B(1,7)/B(1,5) = 5/7.
    EXPECT_NEAR(zero_prob(BetaNegBinomial{2, 1.0, 5.0}), 5.0 / 7.0, 1e-14);
    std::mt19937_64 rng(21);
    std::gamma_distribution<double> ga(1.0, 1.0), gb(5.0, 1.0);
    const int draws = 1000000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = ga(rng), y = gb(rng);
        const double v = std::pow(y / (x + y), 2.0);
        s += v;
        ss += v * v;
    }
    const double m = s / draws;
    const double se = std::sqrt((ss / draws - m * m) / draws);
    EXPECT_NEAR(zero_prob(BetaNegBinomial{2, 1.0, 5.0}), m, 3.0 * se);
}

TEST(SampleCount, BinomialBoundedAndPoissonMean) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100000; ++i) {
        const long long n = sample_count(Binomial{12, 0.6}, rng);
        EXPECT_GE(n, 0);
        EXPECT_LE(n, 12);
    }
    const int draws = 1000000;
    double s = 0.0;
    for (int i = 0; i < draws; ++i) s += static_cast<double>(sample_count(Poisson{10.0}, rng));
    EXPECT_NEAR(s / draws, 10.0, 3.0 * std::sqrt(10.0 / draws));
}

TEST(SampleCount, PoissonGammaEmpiricalPmf) {
    std::mt19937_64 rng(6);
    const FrequencyModel f = PoissonGamma{1.0, 0.1};
    const int draws = 1000000;
    std::map<long long, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[sample_count(f, rng)];
    double sup = 0.0;
    for (long long n = 0; n < 200; ++n) sup = std::max(sup, std::abs(counts[n] / double(draws) - pmf(f, n)));
    EXPECT_LT(sup, 0.002);
}

TEST(Invariants, NormalizationOverReferenceCells) {
    for (const auto& cell : oracle::reference_cells()) {
        const double mu = mean(cell.frequency);
        if (!std::isfinite(mu)) continue;  // infinite-mean law, see HeavyTail test
        long long cap;
        if (const auto m = support_max(cell.frequency)) {
            cap = *m;
        } else {
            cap = static_cast<long long>(10.0 * mu + 200.0);
            // Beta-mixed negative binomial decays polynomially; extend the cap.
            if (std::holds_alternative<BetaNegBinomial>(cell.frequency)) cap = 20000;
        }
        double s = zero_prob(cell.frequency);
        for (long long n = 1; n <= cap; ++n) s += pmf(cell.frequency, n);
        EXPECT_NEAR(s, 1.0, 1e-10) << cell.name;
    }
}

TEST(Invariants, BetaNegBinomialHeavyTail) {
    // r = 10, p ~ Be(5, 1): P(N = n) ~ 50 n^-2, so the tail beyond N is ~ 50 / N.
    const FrequencyModel f = BetaNegBinomial{10, 5.0, 1.0};
    EXPECT_FALSE(std::isfinite(mean(f)));
    const double n = 1e5;
    EXPECT_NEAR(pmf(f, 100000) * n * n, 50.0, 0.05);
}

TEST(Invariants, CompositionalConsistency) {
    const std::vector<FrequencyModel> models{BetaBinomial{12, 1.0, 5.0}, BetaBinomial{12, 5.0, 1.0},
                                             BetaNegBinomial{2, 1.0, 5.0}, PoissonGamma{1.0, 10.0},
                                             PoissonGamma{1.0, 0.1}};
    std::mt19937_64 rng(31);
    const int draws = 1000000;
    for (const auto& f : models) {
        std::map<long long, int> counts;
        for (int i = 0; i < draws; ++i) ++counts[sample_count(f, rng)];
        for (long long n = 0; n <= 12; ++n) {
            const double p = pmf(f, n);
            if (p < 1e-4) continue;
            const double se = std::sqrt(p * (1.0 - p) / draws);
            EXPECT_NEAR(counts[n] / double(draws), p, 3.0 * se) << kind_name(f) << " n=" << n;
        }
    }
}

TEST(Invariants, BetaBinomialBinomialLimit) {
    const double p = 0.3, c = 1e4;
    double sup = 0.0;
    for (long long n = 0; n <= 12; ++n) {
        sup = std::max(sup, std::abs(pmf(BetaBinomial{12, c * p, c * (1.0 - p)}, n) - pmf(Binomial{12, p}, n)));
    }
    EXPECT_LT(sup, 0.01);
}

TEST(Invariants, PoissonGammaIsNegBinomialTermForTerm) {
    for (double b : {0.1, 0.5, 10.0}) {
        for (long long r : {1LL, 3LL}) {
            const FrequencyModel pg = PoissonGamma{static_cast<double>(r), b};
            const FrequencyModel nb = NegBinomial{r, 1.0 / (1.0 + b)};
            for (long long n = 0; n < 300; ++n) EXPECT_EQ(log_pmf(pg, n), log_pmf(nb, n)) << n;
        }
    }
}
