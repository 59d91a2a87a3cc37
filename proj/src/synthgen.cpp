#include "rainbc/synthgen.hpp"

#include <algorithm>
#include <stdexcept>

namespace rainbc::synth {

double uniform01(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

struct ChainState {
    bool wet = false;
    bool initialised = false;
};

// One step of the occurrence chain; both series consume the same uniform.
bool step_state(const ChainState& prev, const PeriodDynamics& dyn,
                double mult, double u) {
    double p;
    if (!prev.initialised) {
        // unconditional start: stationary probability of the first period
        const double pw = clamp01(dyn.p_wet_given_wet * mult);
        const double pd = clamp01(dyn.p_wet_given_dry * mult);
        const double denom = 1.0 - pw + pd;
        p = denom > 1e-12 ? pd / denom : pd;
    } else {
        p = clamp01((prev.wet ? dyn.p_wet_given_wet : dyn.p_wet_given_dry) *
                    mult);
    }
    return u < p;
}

}  // namespace

SynthPair generate(const SynthSpec& spec) {
    spec.scheme.validate();
    if (spec.years <= 0)
        throw std::invalid_argument("SynthSpec: years must be positive");
    for (int id : spec.scheme.period_ids()) {
        if (!spec.periods.count(id))
            throw std::invalid_argument(
                "SynthSpec: missing dynamics for period " + std::to_string(id));
    }

    const Date start{spec.start_year, 1, 1};
    const Date end{spec.start_year + spec.years, 1, 1};
    const std::size_t n_days =
        static_cast<std::size_t>(end.to_days() - start.to_days());

    const double mult =
        spec.inflation ? spec.inflation->wet_probability_multiplier : 1.0;
    const double amt_scale = spec.inflation ? spec.inflation->intensity_scale : 1.0;

    std::vector<std::optional<double>> truth_vals(n_days), model_vals(n_days);
    ChainState truth_prev, model_prev;
    Date d = start;
    for (std::size_t t = 0; t < n_days; ++t) {
        const auto& dyn = spec.periods.at(spec.scheme.period_of_month(d.month));
        const double u_occ = uniform01(spec.seed, 2 * t);
        const double u_amt = uniform01(spec.seed, 2 * t + 1);

        const bool truth_wet = step_state(truth_prev, dyn, 1.0, u_occ);
        const bool model_wet = step_state(model_prev, dyn, mult, u_occ);

        // Amount intensity conditions on each chain's own previous state;
        // the first day has none and uses the dry-lag intensity.
        const auto& truth_gamma = (truth_prev.initialised && truth_prev.wet)
                                      ? dyn.wet_lag_excess
                                      : dyn.dry_lag_excess;
        const auto& model_gamma = (model_prev.initialised && model_prev.wet)
                                      ? dyn.wet_lag_excess
                                      : dyn.dry_lag_excess;
        truth_vals[t] = truth_wet
                            ? spec.t_x + stats::gamma_inv_cdf(truth_gamma, u_amt)
                            : 0.0;
        model_vals[t] =
            model_wet
                ? spec.t_x + amt_scale * stats::gamma_inv_cdf(model_gamma, u_amt)
                : 0.0;

        truth_prev = {truth_wet, true};
        model_prev = {model_wet, true};
        if (d.day < days_in_month(d.year, d.month)) {
            ++d.day;
        } else {
            d.day = 1;
            d.month = d.month == 12 ? 1 : d.month + 1;
            if (d.month == 1) ++d.year;
        }
    }
    return SynthPair{DailySeries(start, std::move(truth_vals)),
                     DailySeries(start, std::move(model_vals))};
}

}  // namespace rainbc::synth
