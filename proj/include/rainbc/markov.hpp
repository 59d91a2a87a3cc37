#ifndef RAINBC_MARKOV_HPP
#define RAINBC_MARKOV_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rainbc/conventional.hpp"
#include "rainbc/series.hpp"
#include "rainbc/stats.hpp"

namespace rainbc::bc {

/// Target occurrence probabilities estimated from observations for one
/// period: unconditional, wet-lag conditional and dry-lag conditional.
struct TransitionTargets {
    double p0 = 0.0;
    std::optional<double> pw;  // absent when no wet-lag pairs exist
    std::optional<double> pd;
    std::size_t n0 = 0;
    std::size_t nw = 0;
    std::size_t nd = 0;
};

struct CalibrationConfig {
    double epsilon = 0.01;
    double lambda = 0.4;  // damping on threshold updates
    int max_iterations = 50;
    std::size_t min_conditional_n = 10;
    std::size_t min_fit_n = 10;
    bool literal_eq17 = false;  // keep the printed wet-threshold excess
    bool literal_eq4 = false;   // conventional QM literal mapping
};

struct PeriodMcThresholds {
    double t0 = 0.0;
    double tw = 0.0;
    double td = 0.0;
    TransitionTargets targets;
    std::optional<double> achieved_pw;
    std::optional<double> achieved_pd;
    std::optional<double> achieved_p0;  // generated unconditional wet fraction
    double achieved_p0_exceedance = 0.0;
    int iterations = 0;
    bool converged = false;
    bool tw_frozen = false;  // frozen at t0 (absent target or thin sample)
    bool td_frozen = false;
    std::vector<std::string> warnings;
};

struct McThresholds {
    double t_x = 0.85;
    std::map<int, PeriodMcThresholds> periods;
};

/// Amount parameters for one period: scaling factors for the intensity form,
/// or six Gamma fits (obs/model x wet-lag/dry-lag/all) for the mapping form.
struct PeriodMcAmounts {
    std::optional<double> s;
    std::optional<double> sw;
    std::optional<double> sd;
    std::optional<stats::GammaParams> g_obs_wet, g_obs_dry, g_obs_all;
    std::optional<stats::GammaParams> g_model_wet, g_model_dry, g_model_all;
    bool wet_uses_unconditional = false;
    bool dry_uses_unconditional = false;
    std::vector<std::string> warnings;
};

struct McAmountParams {
    Method method = Method::McLoci;
    std::map<int, PeriodMcAmounts> periods;
};

struct McParams {
    McThresholds thresholds;
    McAmountParams amounts;
    std::vector<std::string> warnings;
};

/// Counts rain-day transitions in one period. The lagged states must come
/// from the full series so block-leading days keep their true previous day.
TransitionTargets estimate_transition_targets(
    const IndicatorSeries& obs_indicator,
    const std::vector<WetState>& obs_lagged, const PeriodScheme& scheme,
    int period);

/// Recursive rain-day indicator over the whole series: the first day of a
/// sequence and any day following a missing day test against t0, days after a
/// wet day against tw, after a dry day against td. State carries across
/// period boundaries.
IndicatorSeries generate_indicator(const DailySeries& model,
                                   const McThresholds& thresholds,
                                   const PeriodScheme& scheme,
                                   WetState carry_in = WetState::Missing);

/// Damped fixed-point iteration for one period's conditional thresholds.
PeriodMcThresholds calibrate_period_thresholds(const DailySeries& model,
                                               const TransitionTargets& targets,
                                               const PeriodScheme& scheme,
                                               int period,
                                               const CalibrationConfig& cfg);

McThresholds calibrate_mc_thresholds(
    const DailySeries& model, const std::map<int, TransitionTargets>& targets,
    const PeriodScheme& scheme, const CalibrationConfig& cfg, double t_x);

/// Stationary unconditional wet probability pd / (1 - pw + pd).
double stationarity_p0(double pw, double pd);

McAmountParams compute_mc_loci_scales(const DailySeries& obs,
                                      const DailySeries& model,
                                      const std::vector<WetState>& obs_lagged,
                                      const std::vector<WetState>& model_lagged,
                                      const McThresholds& thresholds,
                                      const PeriodScheme& scheme);

McAmountParams fit_mc_qm_gammas(const DailySeries& obs,
                                const DailySeries& model,
                                const std::vector<WetState>& obs_lagged,
                                const std::vector<WetState>& model_lagged,
                                const McThresholds& thresholds,
                                const PeriodScheme& scheme,
                                std::size_t min_fit_n);

ApplyResult apply_mc_loci(const DailySeries& model,
                          const McThresholds& thresholds,
                          const McAmountParams& amounts,
                          const PeriodScheme& scheme,
                          const CalibrationConfig& cfg = {});

ApplyResult apply_mc_qm(const DailySeries& model,
                        const McThresholds& thresholds,
                        const McAmountParams& amounts,
                        const PeriodScheme& scheme,
                        const CalibrationConfig& cfg = {});

/// Full calibration: pairwise masking, target estimation, threshold
/// iteration and amount parameters for the requested MC method.
McParams calibrate_mc(const DailySeries& obs, const DailySeries& model,
                      const PeriodScheme& scheme, double t_x, Method method,
                      const CalibrationConfig& cfg);

/// Masks each series to missing wherever the other lacks a value
/// (dates aligned; non-overlapping days end up missing).
std::pair<DailySeries, DailySeries> pairwise_mask(const DailySeries& a,
                                                  const DailySeries& b);

}  // namespace rainbc::bc

#endif
