#pragma once

// A point mass at zero plus a finite nonnegative mixture of Levy laws. This is
// the evaluated form of both a single risk cell and an aggregate of cells.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "levyrisk/stable.hpp"

namespace levyrisk {

struct MixtureComponent {
    long long n = 0;       // number of losses behind this component
    double weight = 0.0;   // probability of this count (vector)
    double gamma_n = 0.0;  // scale of the summed loss
    double delta_n = 0.0;  // support boundary of the summed loss

    LevyParams law() const { return {gamma_n, delta_n}; }
    StableParams stable(ParamForm form = ParamForm::S0) const { return law().stable(form); }
};

class QuantileUnresolvable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LevyMixture {
public:
    LevyMixture() = default;

    LevyMixture(double atom, std::vector<MixtureComponent> components)
        : atom_(atom), components_(std::move(components)) {
        if (!(atom_ >= 0.0 && atom_ <= 1.0)) throw std::invalid_argument("LevyMixture: atom must lie in [0,1]");
        retained_ = atom_;
        sqrt_scale_mass_ = 0.0;
        for (const auto& c : components_) {
            if (!(c.weight >= 0.0)) throw std::invalid_argument("LevyMixture: negative weight");
            if (!(c.gamma_n > 0.0)) throw std::invalid_argument("LevyMixture: nonpositive scale");
            retained_ += c.weight;
            sqrt_scale_mass_ += c.weight * std::sqrt(c.gamma_n);
        }
    }

    double atom() const noexcept { return atom_; }
    const std::vector<MixtureComponent>& components() const noexcept { return components_; }

    /// atom + sum of retained weights.
    double retained_mass() const noexcept { return retained_; }
    double mass_dropped() const noexcept { return std::max(0.0, 1.0 - retained_); }

    /// sum_n weight_n sqrt(gamma_n); drives the power-law tail.
    double sqrt_scale_mass() const noexcept { return sqrt_scale_mass_; }

    /// Density of the continuous part.
    double density(double z) const {
        double s = 0.0;
        for (const auto& c : components_) {
            if (z > c.delta_n && c.weight > 0.0) s += c.weight * levy_pdf(c.law(), z);
        }
        return s;
    }

    /// P(Z <= z).
    double cdf(double z) const {
        double s = z >= 0.0 ? atom_ : 0.0;
        for (const auto& c : components_) {
            if (z > c.delta_n && c.weight > 0.0) s += c.weight * levy_cdf(c.law(), z);
        }
        return s;
    }

    /// P(Z > z) over the retained mass (equals retained_mass() - cdf(z) but
    /// keeps relative accuracy deep in the tail).
    double survival(double z) const {
        double s = z >= 0.0 ? 0.0 : atom_;
        for (const auto& c : components_) {
            if (c.weight > 0.0) s += c.weight * levy_survival(c.law(), z);
        }
        return s;
    }

    /// Smallest z with cdf(z) >= q, located to |cdf(z) - q| <= 1e-9.
    double quantile(double q) const {
        if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile: q must lie in (0,1)");
        if (q >= retained_ - 1e-12) {
            throw QuantileUnresolvable("quantile " + std::to_string(q) +
                                       " is not resolvable: retained mass is " + std::to_string(retained_) +
                                       "; raise the truncation cap");
        }
        double lo = 0.0;
        for (const auto& c : components_) lo = std::min(lo, c.delta_n);

        const double at_zero = cdf(0.0);
        double below_zero = at_zero - atom_;  // continuous mass at or below 0
        if (at_zero >= q) {
            if (below_zero < q) return 0.0;  // q falls inside the atom
            return bisect(q, lo, 0.0);
        }
        // Invert the power-law tail for an initial bracket, then expand.
        const double c05 = stable_tail_constant(0.5);
        double hi = std::pow(2.0 * c05 * sqrt_scale_mass_ / (1.0 - q), 2.0);
        double max_loc = 0.0;
        for (const auto& c : components_) max_loc = std::max(max_loc, c.delta_n);
        hi = std::max(hi, 1.0) + max_loc;
        for (int i = 0; i < 2000 && cdf(hi) < q; ++i) hi *= 2.0;
        if (cdf(hi) < q) throw QuantileUnresolvable("quantile: failed to bracket");
        return bisect(q, 0.0, hi);
    }

private:
    double bisect(double q, double lo, double hi) const {
        // Invariant: cdf(lo) < q <= cdf(hi).
        for (int i = 0; i < 400; ++i) {
            const double mid = lo + 0.5 * (hi - lo);
            if (mid <= lo || mid >= hi) break;
            if (cdf(mid) < q) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return hi;
    }

    double atom_ = 1.0;
    std::vector<MixtureComponent> components_;
    double retained_ = 1.0;
    double sqrt_scale_mass_ = 0.0;
};

}  // namespace levyrisk
