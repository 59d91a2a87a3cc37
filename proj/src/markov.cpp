#include "rainbc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rainbc::bc {

TransitionTargets estimate_transition_targets(
    const IndicatorSeries& obs_indicator,
    const std::vector<WetState>& obs_lagged, const PeriodScheme& scheme,
    int period) {
    TransitionTargets t;
    std::size_t wet0 = 0, ww = 0, wd = 0;
    for (const auto& b : period_blocks(obs_indicator, scheme, period)) {
        for (std::size_t i = b.offset; i < b.offset + b.length; ++i) {
            const WetState cur = obs_indicator[i];
            if (cur == WetState::Missing) continue;
            ++t.n0;
            if (cur == WetState::Wet) ++wet0;
            switch (obs_lagged[i]) {
                case WetState::Wet:
                    ++t.nw;
                    if (cur == WetState::Wet) ++ww;
                    break;
                case WetState::Dry:
                    ++t.nd;
                    if (cur == WetState::Wet) ++wd;
                    break;
                case WetState::Missing: break;
            }
        }
    }
    t.p0 = t.n0 ? static_cast<double>(wet0) / static_cast<double>(t.n0) : 0.0;
    if (t.nw) t.pw = static_cast<double>(ww) / static_cast<double>(t.nw);
    if (t.nd) t.pd = static_cast<double>(wd) / static_cast<double>(t.nd);
    return t;
}

namespace {

struct Thresholds3 {
    double t0 = 0.0, tw = 0.0, td = 0.0;
};

// One generation pass over a period's blocks: conditional counts and the
// conditional value samples the quantile update needs. Each block starts
// with a Missing previous state (unconditional rule).
struct PassResult {
    std::size_t nw = 0, wet_after_wet = 0;
    std::size_t nd = 0, wet_after_dry = 0;
    std::size_t n_all = 0, wet_all = 0;
    std::vector<double> sample_wet_lag;
    std::vector<double> sample_dry_lag;

    std::optional<double> phat_w() const {
        if (!nw) return std::nullopt;
        return static_cast<double>(wet_after_wet) / static_cast<double>(nw);
    }
    std::optional<double> phat_d() const {
        if (!nd) return std::nullopt;
        return static_cast<double>(wet_after_dry) / static_cast<double>(nd);
    }
    std::optional<double> phat_0() const {
        if (!n_all) return std::nullopt;
        return static_cast<double>(wet_all) / static_cast<double>(n_all);
    }
};

PassResult generation_pass(
    const std::vector<std::vector<std::optional<double>>>& blocks,
    const Thresholds3& th) {
    PassResult r;
    for (const auto& block : blocks) {
        WetState prev = WetState::Missing;
        for (const auto& v : block) {
            if (!v) {
                prev = WetState::Missing;
                continue;
            }
            if (prev == WetState::Wet) {
                ++r.nw;
                r.sample_wet_lag.push_back(*v);
            } else if (prev == WetState::Dry) {
                ++r.nd;
                r.sample_dry_lag.push_back(*v);
            }
            const double cutoff = prev == WetState::Wet   ? th.tw
                                  : prev == WetState::Dry ? th.td
                                                          : th.t0;
            const WetState state =
                *v > cutoff ? WetState::Wet : WetState::Dry;
            ++r.n_all;
            if (state == WetState::Wet) {
                ++r.wet_all;
                if (prev == WetState::Wet) ++r.wet_after_wet;
                if (prev == WetState::Dry) ++r.wet_after_dry;
            }
            prev = state;
        }
    }
    return r;
}

bool within(std::optional<double> phat, std::optional<double> target,
            double eps) {
    if (!target) return true;  // nothing to match
    if (!phat) return false;
    return std::fabs(*phat - *target) < eps;
}

// Change between successive estimates; infinite when presence flips.
double estimate_change(std::optional<double> now, std::optional<double> prev) {
    if (!now && !prev) return 0.0;
    if (!now || !prev) return std::numeric_limits<double>::infinity();
    return std::fabs(*now - *prev);
}

}  // namespace

PeriodMcThresholds calibrate_period_thresholds(const DailySeries& model,
                                               const TransitionTargets& targets,
                                               const PeriodScheme& scheme,
                                               int period,
                                               const CalibrationConfig& cfg) {
    const auto blocks = subset_period(model, scheme, period);
    std::vector<double> present;
    for (const auto& block : blocks)
        for (const auto& v : block)
            if (v) present.push_back(*v);
    if (present.empty())
        throw std::invalid_argument("period " + std::to_string(period) +
                                    ": no model values to calibrate");

    PeriodMcThresholds r;
    r.targets = targets;
    const auto t0r = stats::threshold_for_frequency(present, targets.p0);
    r.t0 = t0r.threshold;
    r.achieved_p0_exceedance = t0r.achieved_exceedance;
    r.tw = r.t0;
    r.td = r.t0;

    auto freeze = [&](bool wet_side, const char* why) {
        bool& frozen = wet_side ? r.tw_frozen : r.td_frozen;
        double& t = wet_side ? r.tw : r.td;
        if (frozen) return;
        frozen = true;
        t = r.t0;
        r.warnings.push_back(std::string(wet_side ? "tw" : "td") +
                             " frozen at t0: " + why);
    };
    if (!targets.pw) freeze(true, "no wet-lag observations");
    if (!targets.pd) freeze(false, "no dry-lag observations");

    std::optional<double> prev_pw, prev_pd;
    int quiet_steps = 0;  // successive iterations with negligible movement
    bool stopped = false;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const auto pass = generation_pass(blocks, {r.t0, r.tw, r.td});
        r.iterations = it;
        r.achieved_pw = pass.phat_w();
        r.achieved_pd = pass.phat_d();
        r.achieved_p0 = pass.phat_0();

        if (targets.pw && pass.nw < cfg.min_conditional_n)
            freeze(true, "conditioning sample below minimum");
        if (targets.pd && pass.nd < cfg.min_conditional_n)
            freeze(false, "conditioning sample below minimum");

        if (within(r.achieved_pw, targets.pw, cfg.epsilon) &&
            within(r.achieved_pd, targets.pd, cfg.epsilon)) {
            r.converged = true;
            stopped = true;
            break;
        }
        // A single damped step can be small while still in transit, so the
        // stall exit needs a sustained plateau.
        if (estimate_change(r.achieved_pw, prev_pw) < cfg.epsilon / 2.0 &&
            estimate_change(r.achieved_pd, prev_pd) < cfg.epsilon / 2.0)
            ++quiet_steps;
        else
            quiet_steps = 0;
        if (quiet_steps >= 3) {
            r.warnings.push_back("iteration stalled before reaching tolerance");
            stopped = true;
            break;
        }
        prev_pw = r.achieved_pw;
        prev_pd = r.achieved_pd;

        if (!r.tw_frozen && targets.pw && !pass.sample_wet_lag.empty()) {
            const double t_new = std::max(
                0.0, stats::empirical_quantile(pass.sample_wet_lag,
                                               1.0 - *targets.pw));
            r.tw = (1.0 - cfg.lambda) * r.tw + cfg.lambda * t_new;
        }
        if (!r.td_frozen && targets.pd && !pass.sample_dry_lag.empty()) {
            const double t_new = std::max(
                0.0, stats::empirical_quantile(pass.sample_dry_lag,
                                               1.0 - *targets.pd));
            r.td = (1.0 - cfg.lambda) * r.td + cfg.lambda * t_new;
        }
    }
    if (!stopped)
        r.warnings.push_back("no convergence within " +
                             std::to_string(cfg.max_iterations) +
                             " iterations");
    return r;
}

McThresholds calibrate_mc_thresholds(
    const DailySeries& model, const std::map<int, TransitionTargets>& targets,
    const PeriodScheme& scheme, const CalibrationConfig& cfg, double t_x) {
    McThresholds out;
    out.t_x = t_x;
    for (const auto& [period, t] : targets) {
        try {
            out.periods.emplace(
                period, calibrate_period_thresholds(model, t, scheme, period, cfg));
        } catch (const std::invalid_argument&) {
            // no model data in this period; leave it uncovered
        }
    }
    return out;
}

IndicatorSeries generate_indicator(const DailySeries& model,
                                   const McThresholds& thresholds,
                                   const PeriodScheme& scheme,
                                   WetState carry_in) {
    std::vector<WetState> states(model.size(), WetState::Missing);
    WetState prev = carry_in;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!model.present(i)) {
            states[i] = WetState::Missing;
            prev = WetState::Missing;
            continue;
        }
        const int m = scheme.period_of_month(model.date_at(i).month);
        const auto it = thresholds.periods.find(m);
        if (it == thresholds.periods.end())
            throw std::invalid_argument("generate_indicator: period " +
                                        std::to_string(m) + " has no thresholds");
        const auto& p = it->second;
        const double cutoff = prev == WetState::Wet   ? p.tw
                              : prev == WetState::Dry ? p.td
                                                      : p.t0;
        states[i] = model.value(i) > cutoff ? WetState::Wet : WetState::Dry;
        prev = states[i];
    }
    return IndicatorSeries(model.start_date(), std::move(states));
}

double stationarity_p0(double pw, double pd) {
    const double denom = 1.0 - pw + pd;
    if (denom == 0.0)
        throw std::domain_error("stationarity_p0: zero denominator");
    return pd / denom;
}

namespace {

struct AmountSamples {
    // threshold excesses partitioned by the lagged state
    std::vector<double> obs_wet, obs_dry, obs_all;
    std::vector<double> model_wet, model_dry, model_all;
};

AmountSamples collect_amount_samples(const DailySeries& obs,
                                     const DailySeries& model,
                                     const std::vector<WetState>& obs_lagged,
                                     const std::vector<WetState>& model_lagged,
                                     const PeriodMcThresholds& th, double t_x,
                                     const PeriodScheme& scheme, int period) {
    AmountSamples s;
    for (const auto& b : period_blocks(obs, scheme, period)) {
        for (std::size_t i = b.offset; i < b.offset + b.length; ++i) {
            if (!obs.present(i)) continue;
            const double x = obs.value(i);
            if (x <= t_x) continue;
            s.obs_all.push_back(x - t_x);
            if (obs_lagged[i] == WetState::Wet) s.obs_wet.push_back(x - t_x);
            if (obs_lagged[i] == WetState::Dry) s.obs_dry.push_back(x - t_x);
        }
    }
    for (const auto& b : period_blocks(model, scheme, period)) {
        for (std::size_t i = b.offset; i < b.offset + b.length; ++i) {
            if (!model.present(i)) continue;
            const double y = model.value(i);
            if (y > th.t0) s.model_all.push_back(y - th.t0);
            if (model_lagged[i] == WetState::Wet && y > th.tw)
                s.model_wet.push_back(y - th.tw);
            if (model_lagged[i] == WetState::Dry && y > th.td)
                s.model_dry.push_back(y - th.td);
        }
    }
    return s;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Scaling factors with the stated fallbacks: conditional scales fall back to
// the unconditional one, which itself falls back to 1.
void fill_scales(const AmountSamples& s, PeriodMcAmounts& out) {
    const double obs_all = mean_of(s.obs_all);
    const double model_all = mean_of(s.model_all);
    if (s.obs_all.empty() || s.model_all.empty() || model_all <= 0.0) {
        out.warnings.push_back(
            "no data for unconditional scale; scale set to 1");
        out.s = 1.0;
    } else {
        out.s = obs_all / model_all;
    }
    if (s.obs_wet.empty() || s.model_wet.empty()) {
        out.warnings.push_back(
            "empty wet-lag partition; sw falls back to unconditional scale");
        out.sw = *out.s;
        out.wet_uses_unconditional = true;
    } else {
        out.sw = mean_of(s.obs_wet) / mean_of(s.model_wet);
    }
    if (s.obs_dry.empty() || s.model_dry.empty()) {
        out.warnings.push_back(
            "empty dry-lag partition; sd falls back to unconditional scale");
        out.sd = *out.s;
        out.dry_uses_unconditional = true;
    } else {
        out.sd = mean_of(s.obs_dry) / mean_of(s.model_dry);
    }
}

}  // namespace

McAmountParams compute_mc_loci_scales(const DailySeries& obs,
                                      const DailySeries& model,
                                      const std::vector<WetState>& obs_lagged,
                                      const std::vector<WetState>& model_lagged,
                                      const McThresholds& thresholds,
                                      const PeriodScheme& scheme) {
    McAmountParams out;
    out.method = Method::McLoci;
    for (const auto& [period, th] : thresholds.periods) {
        const auto samples = collect_amount_samples(
            obs, model, obs_lagged, model_lagged, th, thresholds.t_x, scheme,
            period);
        PeriodMcAmounts p;
        fill_scales(samples, p);
        out.periods.emplace(period, std::move(p));
    }
    return out;
}

McAmountParams fit_mc_qm_gammas(const DailySeries& obs,
                                const DailySeries& model,
                                const std::vector<WetState>& obs_lagged,
                                const std::vector<WetState>& model_lagged,
                                const McThresholds& thresholds,
                                const PeriodScheme& scheme,
                                std::size_t min_fit_n) {
    McAmountParams out;
    out.method = Method::McQm;
    for (const auto& [period, th] : thresholds.periods) {
        const auto samples = collect_amount_samples(
            obs, model, obs_lagged, model_lagged, th, thresholds.t_x, scheme,
            period);
        PeriodMcAmounts p;
        try {
            p.g_obs_all = stats::gamma_fit(samples.obs_all, min_fit_n);
            p.g_model_all = stats::gamma_fit(samples.model_all, min_fit_n);
        } catch (const stats::FitError& e) {
            p.warnings.push_back(
                std::string("unconditional gamma fit failed (") + e.what() +
                "); period falls back to intensity scaling");
            fill_scales(samples, p);
            out.periods.emplace(period, std::move(p));
            continue;
        }
        try {
            p.g_obs_wet = stats::gamma_fit(samples.obs_wet, min_fit_n);
            p.g_model_wet = stats::gamma_fit(samples.model_wet, min_fit_n);
        } catch (const stats::FitError&) {
            p.warnings.push_back(
                "wet-lag partition too small; using unconditional CDFs");
            p.g_obs_wet = p.g_obs_all;
            p.g_model_wet = p.g_model_all;
            p.wet_uses_unconditional = true;
        }
        try {
            p.g_obs_dry = stats::gamma_fit(samples.obs_dry, min_fit_n);
            p.g_model_dry = stats::gamma_fit(samples.model_dry, min_fit_n);
        } catch (const stats::FitError&) {
            p.warnings.push_back(
                "dry-lag partition too small; using unconditional CDFs");
            p.g_obs_dry = p.g_obs_all;
            p.g_model_dry = p.g_model_all;
            p.dry_uses_unconditional = true;
        }
        out.periods.emplace(period, std::move(p));
    }
    return out;
}

namespace {

enum class Branch { Unconditional, AfterWet, AfterDry };

// Shared recursion over the model series: the first days up to the dry-season
// start and any day whose previous corrected value is missing take the
// unconditional branch; afterwards the previous corrected value selects the
// state-conditional branch. Corrected state carries across period boundaries.
template <typename DayFn>
ApplyResult apply_mc_impl(const DailySeries& model,
                          const McThresholds& thresholds,
                          const McAmountParams& amounts,
                          const PeriodScheme& scheme, DayFn&& day_value) {
    ApplyResult r{model, {}};
    std::size_t init_idx = 0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (model.date_at(i).month == scheme.dry_season_start_month) {
            init_idx = i;
            break;
        }
    }
    std::set<int> warned;
    double prev_value = 0.0;
    bool prev_present = false;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!model.present(i)) {
            r.series.set_missing(i);
            prev_present = false;
            continue;
        }
        const int m = scheme.period_of_month(model.date_at(i).month);
        const auto th_it = thresholds.periods.find(m);
        const auto am_it = amounts.periods.find(m);
        if (th_it == thresholds.periods.end() ||
            am_it == amounts.periods.end()) {
            if (warned.insert(m).second)
                r.warnings.push_back("period " + std::to_string(m) +
                                     " has no parameters; days left missing");
            r.series.set_missing(i);
            prev_present = false;
            continue;
        }
        Branch branch = Branch::Unconditional;
        if (i > init_idx && prev_present)
            branch = prev_value > thresholds.t_x ? Branch::AfterWet
                                                 : Branch::AfterDry;
        const double out = day_value(th_it->second, am_it->second, branch,
                                     model.value(i), model.date_at(i),
                                     r.warnings);
        r.series.set(i, out);
        prev_value = out;
        prev_present = true;
    }
    return r;
}

double scale_branch_value(const PeriodMcThresholds& th,
                          const PeriodMcAmounts& am, Branch branch, double y,
                          double t_x, bool literal_eq17) {
    switch (branch) {
        case Branch::Unconditional:
            return y < th.t0 ? 0.0 : t_x + *am.s * (y - th.t0);
        case Branch::AfterWet:
            return y <= th.tw ? 0.0 : t_x + *am.sw * (y - th.tw);
        case Branch::AfterDry:
            if (y <= th.td) return 0.0;
            // printed form subtracts the wet threshold; floor keeps the
            // series non-negative when tw exceeds td
            return literal_eq17
                       ? std::max(0.0, t_x + *am.sd * (y - th.tw))
                       : t_x + *am.sd * (y - th.td);
    }
    return 0.0;
}

double qm_map(const stats::GammaParams& from, const stats::GammaParams& to,
              double excess, const Date& date,
              std::vector<std::string>& warnings) {
    double u = stats::gamma_cdf(from, excess);
    if (u > kCdfCeiling) {
        u = kCdfCeiling;
        warnings.push_back("extreme value on " + to_iso(date) +
                           ": model CDF saturated, mapped through ceiling");
    }
    return stats::gamma_inv_cdf(to, u);
}

}  // namespace

ApplyResult apply_mc_loci(const DailySeries& model,
                          const McThresholds& thresholds,
                          const McAmountParams& amounts,
                          const PeriodScheme& scheme,
                          const CalibrationConfig& cfg) {
    return apply_mc_impl(
        model, thresholds, amounts, scheme,
        [&](const PeriodMcThresholds& th, const PeriodMcAmounts& am,
            Branch branch, double y, const Date&,
            std::vector<std::string>&) -> double {
            return scale_branch_value(th, am, branch, y, thresholds.t_x,
                                      cfg.literal_eq17);
        });
}

ApplyResult apply_mc_qm(const DailySeries& model,
                        const McThresholds& thresholds,
                        const McAmountParams& amounts,
                        const PeriodScheme& scheme,
                        const CalibrationConfig& cfg) {
    return apply_mc_impl(
        model, thresholds, amounts, scheme,
        [&](const PeriodMcThresholds& th, const PeriodMcAmounts& am,
            Branch branch, double y, const Date& date,
            std::vector<std::string>& warnings) -> double {
            if (!am.g_obs_all) {
                // period fell back to scaling during calibration
                return scale_branch_value(th, am, branch, y, thresholds.t_x,
                                          cfg.literal_eq17);
            }
            switch (branch) {
                case Branch::Unconditional:
                    return y <= th.t0 ? 0.0
                                      : qm_map(*am.g_model_all, *am.g_obs_all,
                                               y - th.t0, date, warnings) +
                                            thresholds.t_x;
                case Branch::AfterWet:
                    return y <= th.tw ? 0.0
                                      : qm_map(*am.g_model_wet, *am.g_obs_wet,
                                               y - th.tw, date, warnings) +
                                            thresholds.t_x;
                case Branch::AfterDry:
                    return y <= th.td ? 0.0
                                      : qm_map(*am.g_model_dry, *am.g_obs_dry,
                                               y - th.td, date, warnings) +
                                            thresholds.t_x;
            }
            return 0.0;
        });
}

std::pair<DailySeries, DailySeries> pairwise_mask(const DailySeries& a,
                                                  const DailySeries& b) {
    const std::int64_t start =
        std::max(a.start_date().to_days(), b.start_date().to_days());
    const std::int64_t end =
        std::min(a.start_date().to_days() + static_cast<std::int64_t>(a.size()),
                 b.start_date().to_days() + static_cast<std::int64_t>(b.size()));
    const std::size_t n =
        end > start ? static_cast<std::size_t>(end - start) : 0;
    std::vector<std::optional<double>> av(n), bv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ia = static_cast<std::size_t>(
            start - a.start_date().to_days() + static_cast<std::int64_t>(i));
        const auto ib = static_cast<std::size_t>(
            start - b.start_date().to_days() + static_cast<std::int64_t>(i));
        if (a.present(ia) && b.present(ib)) {
            av[i] = a.value(ia);
            bv[i] = b.value(ib);
        }
    }
    const Date d = Date::from_days(start);
    return {DailySeries(d, std::move(av)), DailySeries(d, std::move(bv))};
}

McParams calibrate_mc(const DailySeries& obs, const DailySeries& model,
                      const PeriodScheme& scheme, double t_x, Method method,
                      const CalibrationConfig& cfg) {
    scheme.validate();
    if (method != Method::McLoci && method != Method::McQm)
        throw std::invalid_argument("calibrate_mc: method must be mc-loci or mc-qm");
    McParams out;
    auto [obs_m, model_m] = pairwise_mask(obs, model);

    const auto obs_ind = rain_indicator(obs_m, t_x);
    const auto obs_lag = lagged_states(obs_ind);

    std::map<int, TransitionTargets> targets;
    for (int m : scheme.period_ids()) {
        auto t = estimate_transition_targets(obs_ind, obs_lag, scheme, m);
        if (t.n0 == 0) {
            out.warnings.push_back("period " + std::to_string(m) +
                                   ": no usable observation days, skipped");
            continue;
        }
        targets.emplace(m, t);
    }
    out.thresholds = calibrate_mc_thresholds(model_m, targets, scheme, cfg, t_x);
    for (const auto& [m, t] : targets) {
        if (!out.thresholds.periods.count(m))
            out.warnings.push_back("period " + std::to_string(m) +
                                   ": no model values, skipped");
    }

    // Mask days in periods without thresholds so the full-series indicator
    // can be generated for the amount partitions.
    DailySeries model_gen = model_m;
    for (std::size_t i = 0; i < model_gen.size(); ++i) {
        const int m = scheme.period_of_month(model_gen.date_at(i).month);
        if (!out.thresholds.periods.count(m)) model_gen.set_missing(i);
    }
    const auto gen = generate_indicator(model_gen, out.thresholds, scheme);
    const auto gen_lag = lagged_states(gen);

    out.amounts =
        method == Method::McLoci
            ? compute_mc_loci_scales(obs_m, model_gen, obs_lag, gen_lag,
                                     out.thresholds, scheme)
            : fit_mc_qm_gammas(obs_m, model_gen, obs_lag, gen_lag,
                               out.thresholds, scheme, cfg.min_fit_n);
    return out;
}

}  // namespace rainbc::bc
