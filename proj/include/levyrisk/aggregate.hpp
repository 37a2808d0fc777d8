#pragma once

// Institution-wide loss from J independent risk cells. Conditional on the
// count vector (n_1, ..., n_J) the total is a sum of independent Levy laws,
// hence Levy with sqrt(scale) = sum_j n_j sqrt(gamma_j); the weights multiply.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "levyrisk/compound.hpp"
#include "levyrisk/mixture.hpp"

namespace levyrisk {

class ComponentBudgetExceeded : public std::runtime_error {
public:
    ComponentBudgetExceeded(const std::string& what, long long suggested_cap)
        : std::runtime_error(what), suggested_cap_(suggested_cap) {}
    long long suggested_cap() const noexcept { return suggested_cap_; }

private:
    long long suggested_cap_;
};

struct AggregateComponent {
    std::vector<long long> counts;  // n_j, bound to cell j
    double weight = 0.0;
    double gamma = 0.0;
    double delta = 0.0;  // support boundary
};

namespace detail {

// Sum of independent Levy laws, invariant under reordering of the inputs.
inline LevyParams sum_of_independent(std::vector<StableParams>& parts) {
    std::sort(parts.begin(), parts.end(), [](const StableParams& a, const StableParams& b) {
        return std::tie(a.gamma, a.delta) < std::tie(b.gamma, b.delta);
    });
    return LevyParams::from_stable(convolve_params(parts));
}

inline void canonical_order(std::vector<MixtureComponent>& comps) {
    std::sort(comps.begin(), comps.end(), [](const MixtureComponent& a, const MixtureComponent& b) {
        return std::tie(a.gamma_n, a.delta_n, a.weight, a.n) < std::tie(b.gamma_n, b.delta_n, b.weight, b.n);
    });
}

}  // namespace detail

/// Sum of two independent mixtures (pairwise building block).
inline LevyMixture combine(const LevyMixture& x, const LevyMixture& y) {
    std::vector<MixtureComponent> out;
    out.reserve((x.components().size() + 1) * (y.components().size() + 1));
    for (const auto& c : x.components()) out.push_back({c.n, c.weight * y.atom(), c.gamma_n, c.delta_n});
    for (const auto& c : y.components()) out.push_back({c.n, x.atom() * c.weight, c.gamma_n, c.delta_n});
    std::vector<StableParams> parts(2);
    for (const auto& a : x.components()) {
        for (const auto& b : y.components()) {
            parts[0] = a.stable(ParamForm::S0);
            parts[1] = b.stable(ParamForm::S0);
            const LevyParams law = detail::sum_of_independent(parts);
            out.push_back({a.n + b.n, a.weight * b.weight, law.gamma, law.delta});
        }
    }
    detail::canonical_order(out);
    return LevyMixture(x.atom() * y.atom(), std::move(out));
}

class AggregateModel {
public:
    static constexpr long long kDefaultBudget = 10'000'000;

    explicit AggregateModel(std::vector<CompoundModel> cells, long long budget = kDefaultBudget)
        : cells_(std::move(cells)), budget_(budget) {
        if (cells_.empty()) throw std::invalid_argument("AggregateModel: at least one cell required");
        enumerate();
    }

    const std::vector<CompoundModel>& cells() const noexcept { return cells_; }
    const LevyMixture& mixture() const noexcept { return mixture_; }
    const std::vector<AggregateComponent>& components() const noexcept { return components_; }
    long long budget() const noexcept { return budget_; }

    double zero_prob() const noexcept { return mixture_.atom(); }
    double mass_dropped() const noexcept { return mixture_.mass_dropped(); }
    double density(double z) const { return mixture_.density(z); }
    double cdf(double z) const { return mixture_.cdf(z); }
    double survival(double z) const { return mixture_.survival(z); }
    double value_at_risk(double q) const { return mixture_.quantile(q); }

    /// Number of nonzero count vectors the given cells would generate.
    static long long component_count(const std::vector<CompoundModel>& cells) {
        long double total = 1.0L;
        for (const auto& c : cells) total *= static_cast<long double>(c.bounds().n_upper - c.bounds().n_lower + 2);
        total -= 1.0L;
        return total > 9e18L ? INT64_MAX : static_cast<long long>(total);
    }

private:
    void enumerate() {
        const long long count = component_count(cells_);
        if (count > budget_) {
            // Shrink every cell's range evenly until the product fits.
            const double per_cell = std::pow(static_cast<double>(budget_), 1.0 / static_cast<double>(cells_.size()));
            const long long cap = std::max(1LL, static_cast<long long>(per_cell) - 2);
            throw ComponentBudgetExceeded("aggregate: " + std::to_string(count) + " components exceed budget " +
                                              std::to_string(budget_) + "; reduce per-cell max_terms to about " +
                                              std::to_string(cap),
                                          cap);
        }
        const std::size_t J = cells_.size();

        // Per-cell tables over the retained counts {0} U [n_lower, n_upper].
        struct Entry {
            long long n;
            double log_w;
            StableParams law;  // S0, n-fold sum; unused when n == 0
        };
        std::vector<std::vector<Entry>> tables(J);
        std::vector<double> log_zero;
        for (std::size_t j = 0; j < J; ++j) {
            const auto& cell = cells_[j];
            tables[j].push_back({0, log_pmf(cell.frequency(), 0), {}});
            log_zero.push_back(tables[j].back().log_w);
            for (long long n = cell.bounds().n_lower; n <= cell.bounds().n_upper; ++n) {
                tables[j].push_back({n, log_pmf(cell.frequency(), n),
                                     convolve_identical(cell.severity().stable(ParamForm::S0), n)});
            }
        }

        std::sort(log_zero.begin(), log_zero.end());
        double log_atom = 0.0;
        for (double t : log_zero) log_atom += t;

        components_.clear();
        components_.reserve(static_cast<std::size_t>(count));
        std::vector<std::size_t> idx(J, 0);
        std::vector<double> log_terms;
        std::vector<StableParams> parts;
        for (;;) {
            // Advance the odometer; the all-zero vector is skipped.
            std::size_t k = 0;
            while (k < J && ++idx[k] == tables[k].size()) idx[k++] = 0;
            if (k == J) break;

            AggregateComponent comp;
            comp.counts.resize(J);
            log_terms.clear();
            parts.clear();
            for (std::size_t j = 0; j < J; ++j) {
                const Entry& e = tables[j][idx[j]];
                comp.counts[j] = e.n;
                log_terms.push_back(e.log_w);
                if (e.n > 0) parts.push_back(e.law);
            }
            std::sort(log_terms.begin(), log_terms.end());
            double lw = 0.0;
            for (double t : log_terms) lw += t;
            comp.weight = std::exp(lw);
            const LevyParams law = detail::sum_of_independent(parts);
            comp.gamma = law.gamma;
            comp.delta = law.delta;
            components_.push_back(std::move(comp));
        }

        std::vector<MixtureComponent> flat;
        flat.reserve(components_.size());
        for (const auto& c : components_) {
            long long total = 0;
            for (long long n : c.counts) total += n;
            flat.push_back({total, c.weight, c.gamma, c.delta});
        }
        detail::canonical_order(flat);
        mixture_ = LevyMixture(std::exp(log_atom), std::move(flat));
    }

    std::vector<CompoundModel> cells_;
    long long budget_;
    std::vector<AggregateComponent> components_;
    LevyMixture mixture_;
};

}  // namespace levyrisk
