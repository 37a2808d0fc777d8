#pragma once

// One risk cell: annual loss Z = X_1 + ... + X_N with N from a counting law
// and iid Levy severities. Given N = n the sum is again Levy, so Z is a zero
// atom plus a countable Levy mixture; the series is truncated to the range
// chosen by truncation_bounds.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "levyrisk/frequency.hpp"
#include "levyrisk/mixture.hpp"
#include "levyrisk/stable.hpp"
#include "levyrisk/truncation.hpp"

namespace levyrisk {

/// Law of the sum of n iid copies of `severity`, computed in S0 and returned as
/// support-boundary parameters: scale n^2 gamma, boundary n delta.
inline LevyParams sum_of_iid(const LevyParams& severity, long long n) {
    return LevyParams::from_stable(convolve_identical(severity.stable(ParamForm::S0), n));
}

/// Expected shortfall is infinite for Levy severities (the mean does not exist).
struct ExpectedShortfall {
    bool divergent = true;
};

class CompoundModel {
public:
    CompoundModel(FrequencyModel frequency, LevyParams severity, TruncationOptions options = {})
        : frequency_(std::move(frequency)), severity_(severity) {
        validate(frequency_);
        severity_.validate();
        bounds_ = truncation_bounds(frequency_, severity_.gamma, options);
        build();
    }

    /// Explicit retained range, e.g. N_L = 1, N_U = 1000 for reference evaluations.
    CompoundModel(FrequencyModel frequency, LevyParams severity, TruncationBounds bounds)
        : frequency_(std::move(frequency)), severity_(severity), bounds_(bounds) {
        validate(frequency_);
        severity_.validate();
        if (!(bounds_.n_lower >= 1 && bounds_.n_lower <= bounds_.n_upper)) {
            throw std::invalid_argument("CompoundModel: need 1 <= n_lower <= n_upper");
        }
        if (const auto m = support_max(frequency_)) bounds_.n_upper = std::min(bounds_.n_upper, *m);
        bounds_.n_mode = std::clamp(bounds_.n_mode, bounds_.n_lower, bounds_.n_upper);
        build();
    }

    /// Same cell evaluated with counts 1..cap.
    CompoundModel with_cap(long long cap) const {
        TruncationBounds b = bounds_;
        b.n_lower = 1;
        b.n_upper = cap;
        b.capped = false;
        return CompoundModel(frequency_, severity_, b);
    }

    const FrequencyModel& frequency() const noexcept { return frequency_; }
    const LevyParams& severity() const noexcept { return severity_; }
    const TruncationBounds& bounds() const noexcept { return bounds_; }
    const LevyMixture& mixture() const noexcept { return mixture_; }
    const std::vector<MixtureComponent>& components() const noexcept { return mixture_.components(); }

    double zero_prob() const noexcept { return mixture_.atom(); }
    double mass_dropped() const noexcept { return mixture_.mass_dropped(); }

    double density(double z) const { return mixture_.density(z); }
    double cdf(double z) const { return mixture_.cdf(z); }
    double survival(double z) const { return mixture_.survival(z); }

    double value_at_risk(double q) const { return mixture_.quantile(q); }

    /// 2 z^-1/2 c_{1/2} sum_n P(N = n) sqrt(gamma_n); flagged when z is not
    /// far beyond the bulk of the retained components.
    TailEstimate tail_prob_asymptotic(double z) const {
        const double c05 = stable_tail_constant(0.5);
        const double mass = mixture_.sqrt_scale_mass();
        const LevyParams mode_law = sum_of_iid(severity_, bounds_.n_mode);
        const bool far = z > mode_law.delta + 100.0 * mode_law.gamma;
        if (!(z > 0.0)) return {mass > 0.0 ? 1.0 : 0.0, false};
        return {2.0 * c05 * mass / std::sqrt(z), far};
    }

    ExpectedShortfall expected_shortfall(double) const { return {}; }

private:
    void build() {
        std::vector<MixtureComponent> comps;
        comps.reserve(static_cast<std::size_t>(bounds_.n_upper - bounds_.n_lower + 1));
        for (long long n = bounds_.n_lower; n <= bounds_.n_upper; ++n) {
            const LevyParams law = sum_of_iid(severity_, n);
            comps.push_back({n, pmf(frequency_, n), law.gamma, law.delta});
        }
        mixture_ = LevyMixture(zero_prob_of(frequency_), std::move(comps));
    }

    static double zero_prob_of(const FrequencyModel& f) { return levyrisk::zero_prob(f); }

    FrequencyModel frequency_;
    LevyParams severity_;
    TruncationBounds bounds_;
    LevyMixture mixture_;
};

}  // namespace levyrisk
