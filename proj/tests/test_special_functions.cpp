#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "levyrisk/special_functions.hpp"
#include "support/oracles.hpp"

using namespace levyrisk;

namespace {
constexpr double kRel = 1e-12;
}

TEST(Erfc, KnownValues) {
    EXPECT_EQ(levyrisk::erfc(0.0), 1.0);
    const double x = 0.7071067811865476;
    EXPECT_NEAR(levyrisk::erfc(x), oracle::erfc_by_quadrature(x), 1e-13);
    EXPECT_NEAR(levyrisk::erfc(x), 0.31731050786, 1e-11);
    EXPECT_LT(levyrisk::erfc(30.0), 1e-12);
    EXPECT_GE(levyrisk::erfc(30.0), 0.0);
}

TEST(Erfc, ReflectionAndMonotone) {
    for (double x = -4.0; x <= 4.0; x += 0.25) {
        EXPECT_NEAR(levyrisk::erfc(-x), 2.0 - levyrisk::erfc(x), 1e-15);
        EXPECT_GT(levyrisk::erfc(x), levyrisk::erfc(x + 0.25));
    }
}

TEST(Erfc, MatchesQuadratureOracle) {
    for (double x : {0.1, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        EXPECT_NEAR(levyrisk::erfc(x), oracle::erfc_by_quadrature(x), 1e-13 + kRel * levyrisk::erfc(x)) << x;
    }
}

TEST(ErfcInv, KnownValues) {
    EXPECT_EQ(erfc_inv(1.0), 0.0);
    const double ref = oracle::bisect_increasing([](double x) { return -levyrisk::erfc(x); }, -0.5, 0.0, 5.0);
    EXPECT_NEAR(erfc_inv(0.5), ref, 1e-14);
    EXPECT_NEAR(erfc_inv(0.5), 0.4769362762, 1e-10);
    EXPECT_NEAR(erfc_inv(1.5), -erfc_inv(0.5), 1e-15);
}

TEST(ErfcInv, DomainErrors) {
    EXPECT_THROW(erfc_inv(0.0), std::domain_error);
    EXPECT_THROW(erfc_inv(2.0), std::domain_error);
    EXPECT_THROW(erfc_inv(-0.1), std::domain_error);
    EXPECT_THROW(erfc_inv(std::nan("")), std::domain_error);
}

TEST(ErfcInv, RoundTripProperty) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        double p = u(rng);
        if (p == 0.0) continue;
        EXPECT_NEAR(levyrisk::erfc(erfc_inv(p)), p, kRel * p) << p;
    }
}

TEST(ErfcInv, DeepTail) {
    for (double p : {1e-5, 1e-11, 1e-20, 1e-100, 1e-300}) {
        const double x = erfc_inv(p);
        EXPECT_NEAR(levyrisk::erfc(x) / p, 1.0, 1e-11) << p;
    }
}

TEST(LnGamma, KnownValues) {
    EXPECT_EQ(ln_gamma(1.0), 0.0);
    EXPECT_NEAR(ln_gamma(5.0), std::log(24.0), kRel * std::log(24.0));
    EXPECT_NEAR(ln_gamma(0.5), 0.5 * std::log(M_PI), kRel);
    EXPECT_THROW(ln_gamma(0.0), std::domain_error);
    EXPECT_THROW(ln_gamma(-1.5), std::domain_error);
}

TEST(LnGamma, RecurrenceProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 200.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        const double lhs = ln_gamma(x + 1.0);
        const double rhs = ln_gamma(x) + std::log(x);
        EXPECT_NEAR(lhs, rhs, 1e-13 + kRel * std::abs(lhs)) << x;
    }
}

TEST(LnGamma, AgreesWithFactorials) {
    double lf = 0.0;
    for (int n = 1; n <= 170; ++n) {
        lf += std::log(static_cast<double>(n));
        EXPECT_NEAR(ln_gamma(n + 1.0), lf, 1e-13 + kRel * lf) << n;
    }
}

TEST(LnBeta, KnownValues) {
    EXPECT_NEAR(ln_beta(1.0, 5.0), std::log(1.0 / 5.0), 1e-14);
    EXPECT_NEAR(ln_beta(1.0, 17.0), std::log(1.0 / 17.0), 1e-14);
    const double quad =
        oracle::integrate([](double t) { return std::pow(t, 1.5) * std::pow(1.0 - t, 2.5); }, 0.0, 1.0, 1e-15);
    EXPECT_NEAR(ln_beta(2.5, 3.5), std::log(quad), 1e-10);
    EXPECT_THROW(ln_beta(0.0, 1.0), std::domain_error);
    EXPECT_THROW(ln_beta(1.0, -2.0), std::domain_error);
}

TEST(LnBeta, SymmetricExactly) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 50.0);
    for (int i = 0; i < 500; ++i) {
        const double a = u(rng), b = u(rng);
        EXPECT_EQ(ln_beta(a, b), ln_beta(b, a));
    }
}
