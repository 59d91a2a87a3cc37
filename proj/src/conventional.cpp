#include "rainbc/conventional.hpp"

#include <cmath>
#include <set>

namespace rainbc::bc {

std::string method_name(Method m) {
    switch (m) {
        case Method::Loci: return "loci";
        case Method::Qm: return "qm";
        case Method::McLoci: return "mc-loci";
        case Method::McQm: return "mc-qm";
    }
    return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
    if (name == "loci") return Method::Loci;
    if (name == "qm") return Method::Qm;
    if (name == "mc-loci") return Method::McLoci;
    if (name == "mc-qm") return Method::McQm;
    return std::nullopt;
}

namespace {

// Pairwise-complete (obs, model) values of one period, blocks flattened.
void period_pairs(const DailySeries& obs, const DailySeries& model,
                  const PeriodScheme& scheme, int period,
                  std::vector<double>& x, std::vector<double>& y) {
    x.clear();
    y.clear();
    // Index the model by date offset so the two series may start on
    // different days.
    const std::int64_t shift = obs.start_date().to_days() -
                               model.start_date().to_days();
    for (const auto& b : period_blocks(obs, scheme, period)) {
        for (std::size_t i = b.offset; i < b.offset + b.length; ++i) {
            const std::int64_t j = static_cast<std::int64_t>(i) + shift;
            if (j < 0 || j >= static_cast<std::int64_t>(model.size())) continue;
            const auto& xv = obs.at(i);
            const auto& yv = model.at(static_cast<std::size_t>(j));
            if (xv && yv) {
                x.push_back(*xv);
                y.push_back(*yv);
            }
        }
    }
}

double mean_excess(const std::vector<double>& v, double threshold,
                   std::size_t* count = nullptr) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double val : v) {
        if (val > threshold) {
            sum += val - threshold;
            ++n;
        }
    }
    if (count) *count = n;
    return n ? sum / static_cast<double>(n) : 0.0;
}

std::vector<double> excesses(const std::vector<double>& v, double threshold) {
    std::vector<double> out;
    for (double val : v)
        if (val > threshold) out.push_back(val - threshold);
    return out;
}

// Shared first step: the per-period threshold matching observed frequency.
bool calibrate_threshold(const std::vector<double>& x,
                         const std::vector<double>& y, double t_x,
                         PeriodConvParams& p) {
    if (x.empty() || y.empty()) return false;
    std::size_t wet = 0;
    for (double v : x)
        if (v > t_x) ++wet;
    p.target_exceedance = static_cast<double>(wet) / static_cast<double>(x.size());
    const auto tr = stats::threshold_for_frequency(y, p.target_exceedance);
    p.threshold_ty = tr.threshold;
    p.achieved_exceedance = tr.achieved_exceedance;
    return true;
}

void calibrate_scale(const std::vector<double>& x, const std::vector<double>& y,
                     double t_x, PeriodConvParams& p) {
    std::size_t n_obs = 0, n_model = 0;
    const double num = mean_excess(x, t_x, &n_obs);
    const double den = mean_excess(y, p.threshold_ty, &n_model);
    if (n_obs == 0) {
        p.warnings.push_back("no observed rain days; scale set to 1");
        p.scale = 1.0;
    } else if (n_model == 0 || den <= 0.0) {
        p.warnings.push_back("no model values above threshold; scale set to 1");
        p.scale = 1.0;
    } else {
        p.scale = num / den;
    }
}

}  // namespace

ConvParams calibrate_loci(const DailySeries& obs, const DailySeries& model,
                          const PeriodScheme& scheme, double t_x) {
    scheme.validate();
    ConvParams params;
    params.method = Method::Loci;
    params.t_x = t_x;
    std::vector<double> x, y;
    for (int m : scheme.period_ids()) {
        period_pairs(obs, model, scheme, m, x, y);
        PeriodConvParams p;
        if (!calibrate_threshold(x, y, t_x, p)) {
            params.warnings.push_back("period " + std::to_string(m) +
                                      ": no pairwise-complete days, skipped");
            continue;
        }
        calibrate_scale(x, y, t_x, p);
        params.periods.emplace(m, std::move(p));
    }
    return params;
}

ConvParams calibrate_qm(const DailySeries& obs, const DailySeries& model,
                        const PeriodScheme& scheme, double t_x,
                        const ConvOptions& opt) {
    scheme.validate();
    ConvParams params;
    params.method = Method::Qm;
    params.t_x = t_x;
    params.literal_eq4 = opt.literal_eq4;
    std::vector<double> x, y;
    for (int m : scheme.period_ids()) {
        period_pairs(obs, model, scheme, m, x, y);
        PeriodConvParams p;
        if (!calibrate_threshold(x, y, t_x, p)) {
            params.warnings.push_back("period " + std::to_string(m) +
                                      ": no pairwise-complete days, skipped");
            continue;
        }
        // Literal mode fits the raw values above the thresholds; the default
        // fits threshold excesses and adds T_X back on application.
        const std::vector<double> xs =
            opt.literal_eq4 ? [&] {
                std::vector<double> v;
                for (double val : x)
                    if (val > t_x) v.push_back(val);
                return v;
            }()
                            : excesses(x, t_x);
        const std::vector<double> ys =
            opt.literal_eq4 ? [&] {
                std::vector<double> v;
                for (double val : y)
                    if (val > p.threshold_ty) v.push_back(val);
                return v;
            }()
                            : excesses(y, p.threshold_ty);
        try {
            p.gamma_obs = stats::gamma_fit(xs, opt.min_fit_n);
            p.gamma_model = stats::gamma_fit(ys, opt.min_fit_n);
        } catch (const stats::FitError& e) {
            p.gamma_obs.reset();
            p.gamma_model.reset();
            p.warnings.push_back(std::string("gamma fit failed (") + e.what() +
                                 "); falling back to intensity scaling");
            calibrate_scale(x, y, t_x, p);
        }
        params.periods.emplace(m, std::move(p));
    }
    return params;
}

namespace {

// The "uncovered period" contract: never silently raw.
void missing_period_warning(std::vector<std::string>& warnings, int period) {
    warnings.push_back("period " + std::to_string(period) +
                       " has no parameters; days left missing");
}

}  // namespace

ApplyResult apply_loci(const DailySeries& model, const ConvParams& params,
                       const PeriodScheme& scheme) {
    ApplyResult r{model, {}};
    std::set<int> warned;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!model.present(i)) continue;
        const int m = scheme.period_of_month(model.date_at(i).month);
        const auto it = params.periods.find(m);
        if (it == params.periods.end() || !it->second.scale) {
            if (warned.insert(m).second)
                missing_period_warning(r.warnings, m);
            r.series.set_missing(i);
            continue;
        }
        const auto& p = it->second;
        const double y = model.value(i);
        r.series.set(i, y < p.threshold_ty
                            ? 0.0
                            : params.t_x + *p.scale * (y - p.threshold_ty));
    }
    return r;
}

ApplyResult apply_qm(const DailySeries& model, const ConvParams& params,
                     const PeriodScheme& scheme) {
    ApplyResult r{model, {}};
    std::set<int> warned;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!model.present(i)) continue;
        const int m = scheme.period_of_month(model.date_at(i).month);
        const auto it = params.periods.find(m);
        if (it == params.periods.end()) {
            if (warned.insert(m).second)
                missing_period_warning(r.warnings, m);
            r.series.set_missing(i);
            continue;
        }
        const auto& p = it->second;
        const double y = model.value(i);
        if (!p.gamma_obs || !p.gamma_model) {
            // per-period fallback to the scaling form
            if (!p.scale) {
                if (warned.insert(m).second)
                    missing_period_warning(r.warnings, m);
                r.series.set_missing(i);
                continue;
            }
            r.series.set(i, y < p.threshold_ty
                                ? 0.0
                                : params.t_x + *p.scale * (y - p.threshold_ty));
            continue;
        }
        if (params.literal_eq4) {
            if (y < p.threshold_ty) {
                r.series.set(i, 0.0);
            } else {
                double u = stats::gamma_cdf(*p.gamma_model, y);
                if (u > kCdfCeiling) {
                    u = kCdfCeiling;
                    r.warnings.push_back(
                        "extreme value on " + to_iso(model.date_at(i)) +
                        ": model CDF saturated, mapped through ceiling");
                }
                r.series.set(i, stats::gamma_inv_cdf(*p.gamma_obs, u));
            }
            continue;
        }
        if (y <= p.threshold_ty) {
            r.series.set(i, 0.0);
        } else {
            double u = stats::gamma_cdf(*p.gamma_model, y - p.threshold_ty);
            if (u > kCdfCeiling) {
                u = kCdfCeiling;
                r.warnings.push_back(
                    "extreme value on " + to_iso(model.date_at(i)) +
                    ": model CDF saturated, mapped through ceiling");
            }
            r.series.set(i, stats::gamma_inv_cdf(*p.gamma_obs, u) + params.t_x);
        }
    }
    return r;
}

}  // namespace rainbc::bc
