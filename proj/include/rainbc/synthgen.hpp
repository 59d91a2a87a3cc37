#ifndef RAINBC_SYNTHGEN_HPP
#define RAINBC_SYNTHGEN_HPP

#include <cstdint>
#include <map>
#include <optional>

#include "rainbc/series.hpp"
#include "rainbc/stats.hpp"

namespace rainbc::synth {

/// First-order chain dynamics and lag-conditional excess intensities for one
/// calibration period.
struct PeriodDynamics {
    double p_wet_given_wet = 0.5;
    double p_wet_given_dry = 0.2;
    stats::GammaParams wet_lag_excess{1.0, 8.0};
    stats::GammaParams dry_lag_excess{1.0, 8.0};
};

/// Derives the model-like series from the same latent draws as the truth.
struct Inflation {
    double wet_probability_multiplier = 1.0;
    double intensity_scale = 1.0;
};

struct SynthSpec {
    PeriodScheme scheme = PeriodScheme::default_scheme();
    std::map<int, PeriodDynamics> periods;  // keyed by period id
    int start_year = 1979;
    int years = 10;
    std::uint64_t seed = 0;
    double t_x = 0.85;
    std::optional<Inflation> inflation;
};

struct SynthPair {
    DailySeries truth;
    DailySeries model;
};

/// Deterministic given the seed. Truth and model share one latent uniform
/// stream, so their wet/dry sequences stay correlated.
SynthPair generate(const SynthSpec& spec);

/// Counter-based uniform in [0,1): splitmix64 finalizer over seed + counter.
double uniform01(std::uint64_t seed, std::uint64_t counter);

}  // namespace rainbc::synth

#endif
