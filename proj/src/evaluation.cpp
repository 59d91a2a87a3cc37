#include "rainbc/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace rainbc::eval {

RainCategory categorize(double mm) {
    if (mm < kCategoryBounds[0]) return RainCategory::Dry;
    if (mm < kCategoryBounds[1]) return RainCategory::Light;
    if (mm < kCategoryBounds[2]) return RainCategory::Moderate;
    if (mm < kCategoryBounds[3]) return RainCategory::Heavy;
    return RainCategory::Violent;
}

std::string category_name(RainCategory c) {
    switch (c) {
        case RainCategory::Dry: return "dry";
        case RainCategory::Light: return "light";
        case RainCategory::Moderate: return "moderate";
        case RainCategory::Heavy: return "heavy";
        case RainCategory::Violent: return "violent";
    }
    return "?";
}

MonthlyClimatology monthly_climatology(const DailySeries& series,
                                       const IndicatorSeries& indicator,
                                       double t_x, double completeness) {
    (void)t_x;  // the indicator already encodes the threshold
    struct Acc {
        std::vector<double> rain_days, total, mean_per_rain_day, max_daily;
    };
    std::array<Acc, 12> acc;

    std::size_t i = 0;
    const std::size_t n = series.size();
    while (i < n) {
        const Date d = series.date_at(i);
        const int month_total_days = days_in_month(d.year, d.month);
        const std::size_t month_len = static_cast<std::size_t>(
            std::min<std::int64_t>(static_cast<std::int64_t>(n - i),
                                   month_total_days - d.day + 1));
        std::size_t present = 0, wet = 0;
        double total = 0.0, wet_total = 0.0, max_daily = 0.0;
        for (std::size_t k = i; k < i + month_len; ++k) {
            if (!series.present(k)) continue;
            ++present;
            const double v = series.value(k);
            total += v;
            max_daily = std::max(max_daily, v);
            if (indicator[k] == WetState::Wet) {
                ++wet;
                wet_total += v;
            }
        }
        // partial first/last months are judged against the full month length
        if (static_cast<double>(present) >=
            completeness * static_cast<double>(month_total_days)) {
            auto& a = acc[static_cast<std::size_t>(d.month - 1)];
            a.rain_days.push_back(static_cast<double>(wet));
            a.total.push_back(total);
            a.max_daily.push_back(max_daily);
            if (wet > 0)
                a.mean_per_rain_day.push_back(wet_total /
                                              static_cast<double>(wet));
        }
        i += month_len;
    }

    MonthlyClimatology out;
    auto mean_opt = [](const std::vector<double>& v) -> std::optional<double> {
        if (v.empty()) return std::nullopt;
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    for (std::size_t m = 0; m < 12; ++m) {
        out.rain_days[m] = mean_opt(acc[m].rain_days);
        out.total[m] = mean_opt(acc[m].total);
        out.mean_per_rain_day[m] = mean_opt(acc[m].mean_per_rain_day);
        out.max_daily[m] = mean_opt(acc[m].max_daily);
        out.years_used[m] = static_cast<int>(acc[m].rain_days.size());
    }
    return out;
}

namespace {

// Longest dry run within [first, last] indices; missing days break runs.
double longest_dry_run(const IndicatorSeries& ind, std::size_t first,
                       std::size_t last) {
    double best = 0.0;
    double run = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        if (ind[i] == WetState::Dry) {
            run += 1.0;
            best = std::max(best, run);
        } else {
            run = 0.0;
        }
    }
    return best;
}

}  // namespace

std::vector<AnnualSummary> annual_summaries(const DailySeries& series,
                                            const IndicatorSeries& indicator,
                                            int annual_year_start_month,
                                            double spell_completeness) {
    std::vector<AnnualSummary> out;
    if (series.empty()) return out;
    const Date first = series.start_date();
    const Date last = series.date_at(series.size() - 1);

    // first annual year whose window intersects the series
    int y = first.year;
    if (first.month < annual_year_start_month) --y;
    for (; ; ++y) {
        const Date year_start{y, annual_year_start_month, 1};
        const Date year_end = Date{y + 1, annual_year_start_month, 1}.plus_days(-1);
        if (year_start > last) break;
        if (year_end < first) continue;

        AnnualSummary s;
        s.start_year = y;
        const std::int64_t total_days =
            year_end.to_days() - year_start.to_days() + 1;
        const Date lo = std::max(year_start, first);
        const Date hi = std::min(year_end, last);
        const std::size_t i0 = *series.index_of(lo);
        const std::size_t i1 = *series.index_of(hi);

        std::size_t present = 0, wet = 0;
        double total = 0.0, wet_total = 0.0, max_daily = 0.0;
        for (std::size_t i = i0; i <= i1; ++i) {
            if (!series.present(i)) continue;
            ++present;
            const double v = series.value(i);
            total += v;
            max_daily = std::max(max_daily, v);
            if (indicator[i] == WetState::Wet) {
                ++wet;
                wet_total += v;
            }
        }
        s.completeness =
            static_cast<double>(present) / static_cast<double>(total_days);
        if (present > 0) {
            s.rain_days = static_cast<double>(wet);
            s.total = total;
            s.max_daily = max_daily;
            if (wet > 0) s.mean_per_rain_day = wet_total / static_cast<double>(wet);
        }

        // Oct 1 .. Mar 31 window of this annual year
        const int oct_year =
            annual_year_start_month <= 10 ? y : y + 1;
        const Date w_lo_full{oct_year, 10, 1};
        const Date w_hi_full{oct_year + 1, 3, 31};
        const Date w_lo = std::max(w_lo_full, first);
        const Date w_hi = std::min(w_hi_full, last);
        if (w_lo <= w_hi) {
            const std::size_t j0 = *series.index_of(w_lo);
            const std::size_t j1 = *series.index_of(w_hi);
            std::size_t w_present = 0;
            for (std::size_t i = j0; i <= j1; ++i)
                if (series.present(i)) ++w_present;
            const std::int64_t w_days =
                w_hi_full.to_days() - w_lo_full.to_days() + 1;
            s.window_completeness =
                static_cast<double>(w_present) / static_cast<double>(w_days);
            if (s.window_completeness >= spell_completeness)
                s.longest_dry_spell = longest_dry_run(indicator, j0, j1);
        }
        out.push_back(std::move(s));
    }
    return out;
}

SpellSamples spell_lengths(const IndicatorSeries& indicator) {
    SpellSamples out;
    if (indicator.size() == 0) return out;
    const Date first = indicator.start_date();
    const Date last =
        first.plus_days(static_cast<std::int64_t>(indicator.size()) - 1);

    int y = first.year;
    if (first.month < 10) --y;  // window starting the previous October
    for (; ; ++y) {
        const Date w_lo_full{y, 10, 1};
        const Date w_hi_full{y + 1, 3, 31};
        if (w_lo_full > last) break;
        const Date w_lo = std::max(w_lo_full, first);
        const Date w_hi = std::min(w_hi_full, last);
        if (w_lo > w_hi) continue;
        const std::size_t j0 = static_cast<std::size_t>(w_lo.to_days() -
                                                        first.to_days());
        const std::size_t j1 = static_cast<std::size_t>(w_hi.to_days() -
                                                        first.to_days());
        std::size_t i = j0;
        while (i <= j1) {
            const WetState s = indicator[i];
            if (s == WetState::Missing) {
                ++i;
                continue;
            }
            std::size_t j = i + 1;
            while (j <= j1 && indicator[j] == s) ++j;
            const double len = static_cast<double>(j - i);
            (s == WetState::Wet ? out.wet : out.dry).push_back(len);
            i = j;
        }
    }
    return out;
}

Detection2x2 detection_2x2(const IndicatorSeries& gauge,
                           const IndicatorSeries& model) {
    Detection2x2 d;
    const std::size_t n = std::min(gauge.size(), model.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (gauge[i] == WetState::Missing || model[i] == WetState::Missing)
            continue;
        const bool g = gauge[i] == WetState::Wet;
        const bool m = model[i] == WetState::Wet;
        if (m && g) ++d.hits;
        else if (!m && g) ++d.misses;
        else if (m && !g) ++d.false_alarms;
        else ++d.correct_negatives;
    }
    const double h = static_cast<double>(d.hits);
    const double miss = static_cast<double>(d.misses);
    const double f = static_cast<double>(d.false_alarms);
    const double c = static_cast<double>(d.correct_negatives);
    if (d.hits + d.misses > 0) d.pod = h / (h + miss);
    if (d.hits + d.false_alarms > 0) d.far = f / (h + f);
    const double denom = (h + miss) * (miss + c) + (h + f) * (f + c);
    if (denom > 0) d.hss = 2.0 * (h * c - f * miss) / denom;
    return d;
}

CategoricalDetection detection_categorical(const DailySeries& gauge,
                                           const DailySeries& model) {
    CategoricalDetection d;
    const std::size_t n = std::min(gauge.size(), model.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!gauge.present(i) || !model.present(i)) continue;
        const auto gi = static_cast<std::size_t>(categorize(gauge.value(i)));
        const auto mi = static_cast<std::size_t>(categorize(model.value(i)));
        ++d.counts[mi][gi];
        ++d.n;
    }
    if (d.n == 0) return d;
    const double n_total = static_cast<double>(d.n);
    double diag = 0.0, chance = 0.0;
    for (std::size_t i = 0; i < kNCategories; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < kNCategories; ++j) {
            row += static_cast<double>(d.counts[i][j]);
            col += static_cast<double>(d.counts[j][i]);
        }
        if (col > 0)
            d.pod[i] = static_cast<double>(d.counts[i][i]) / col;
        diag += static_cast<double>(d.counts[i][i]);
        chance += row * col / n_total;
    }
    if (n_total - chance != 0.0) d.hss = (diag - chance) / (n_total - chance);
    return d;
}

namespace {

// Pairs values keyed by month/year where both sides are defined.
stats::ComparisonMetrics metrics_from_pairs(const std::vector<double>& model,
                                            const std::vector<double>& obs) {
    return stats::comparison_metrics(model, obs);
}

void add_monthly_metric(
    std::map<std::string, stats::ComparisonMetrics>& out,
    const std::string& key,
    const std::array<std::optional<double>, 12>& model,
    const std::array<std::optional<double>, 12>& gauge) {
    std::vector<double> mv, gv;
    for (std::size_t m = 0; m < 12; ++m) {
        if (model[m] && gauge[m]) {
            mv.push_back(*model[m]);
            gv.push_back(*gauge[m]);
        }
    }
    if (!mv.empty()) out.emplace(key, metrics_from_pairs(mv, gv));
}

template <typename Getter>
void add_annual_metric(std::map<std::string, stats::ComparisonMetrics>& out,
                       const std::string& key,
                       const std::vector<AnnualSummary>& model,
                       const std::vector<AnnualSummary>& gauge, Getter get) {
    std::vector<double> mv, gv;
    std::size_t gi = 0;
    for (const auto& ms : model) {
        while (gi < gauge.size() && gauge[gi].start_year < ms.start_year) ++gi;
        if (gi >= gauge.size()) break;
        if (gauge[gi].start_year != ms.start_year) continue;
        const auto a = get(ms);
        const auto b = get(gauge[gi]);
        if (a && b) {
            mv.push_back(*a);
            gv.push_back(*b);
        }
    }
    if (!mv.empty()) out.emplace(key, metrics_from_pairs(mv, gv));
}

DailySeries apply_mask(const DailySeries& s, const Date& start, std::size_t n,
                       const std::vector<bool>& keep) {
    std::vector<std::optional<double>> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        const auto idx = s.index_of(start.plus_days(static_cast<std::int64_t>(i)));
        if (idx && s.present(*idx)) vals[i] = s.value(*idx);
    }
    return DailySeries(start, std::move(vals));
}

}  // namespace

EvalReport evaluate_all(
    const DailySeries& gauge,
    const std::vector<std::pair<std::string, DailySeries>>& sources,
    const PeriodScheme& scheme, const EvalConfig& cfg) {
    EvalReport report;

    // Common range and mask: a day is usable only when every series has it.
    std::int64_t lo = gauge.start_date().to_days();
    std::int64_t hi = lo + static_cast<std::int64_t>(gauge.size());
    for (const auto& [name, s] : sources) {
        lo = std::max(lo, s.start_date().to_days());
        hi = std::min(hi, s.start_date().to_days() +
                              static_cast<std::int64_t>(s.size()));
    }
    if (hi <= lo) {
        report.notes.push_back("no common date range between sources");
        return report;
    }
    const Date start = Date::from_days(lo);
    const std::size_t n = static_cast<std::size_t>(hi - lo);
    std::vector<bool> keep(n, true);
    auto mask_with = [&](const DailySeries& s) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!keep[i]) continue;
            const auto idx =
                s.index_of(start.plus_days(static_cast<std::int64_t>(i)));
            if (!idx || !s.present(*idx)) keep[i] = false;
        }
    };
    mask_with(gauge);
    for (const auto& [name, s] : sources) mask_with(s);

    report.mask_start = start;
    report.mask_days = n;
    report.usable_days = static_cast<std::size_t>(
        std::count(keep.begin(), keep.end(), true));

    const DailySeries g = apply_mask(gauge, start, n, keep);
    const auto g_ind = rain_indicator(g, cfg.t_x);
    const auto g_lag = lagged_states(g_ind);

    report.gauge_climatology =
        monthly_climatology(g, g_ind, cfg.t_x, cfg.monthly_completeness);
    report.gauge_annual = annual_summaries(
        g, g_ind, scheme.annual_year_start_month, cfg.spell_completeness);
    report.gauge_spells = spell_lengths(g_ind);

    seasonal::SeasonalModelSpec occ0{0, seasonal::SeasonalModelSpec::Response::Occurrence,
                                     cfg.n_harmonics, cfg.day_origin_month};
    seasonal::SeasonalModelSpec occ1 = occ0;
    occ1.order = 1;
    seasonal::SeasonalModelSpec amt0{0, seasonal::SeasonalModelSpec::Response::Amount,
                                     cfg.n_harmonics, cfg.day_origin_month};
    seasonal::SeasonalModelSpec amt1 = amt0;
    amt1.order = 1;

    auto fit_all_models = [&](const DailySeries& s, const IndicatorSeries& ind,
                              const std::vector<WetState>& lag,
                              std::optional<seasonal::FittedCurves>& o0,
                              std::optional<seasonal::FittedCurves>& o1,
                              std::optional<seasonal::FittedCurves>& a0,
                              std::optional<seasonal::FittedCurves>& a1,
                              std::vector<std::string>& notes,
                              const std::string& label) {
        auto guard = [&](auto&& fn, const char* what)
            -> std::optional<seasonal::FittedCurves> {
            try {
                return fn();
            } catch (const stats::FitError& e) {
                notes.push_back(label + ": " + what + " absent (" + e.what() +
                                ")");
                return std::nullopt;
            }
        };
        o0 = guard([&] { return fit_occurrence_model(ind, lag, occ0); },
                   "occurrence order-0");
        o1 = guard([&] { return fit_occurrence_model(ind, lag, occ1); },
                   "occurrence order-1");
        a0 = guard([&] { return fit_amount_model(s, ind, lag, amt0, cfg.t_x); },
                   "amount order-0");
        a1 = guard([&] { return fit_amount_model(s, ind, lag, amt1, cfg.t_x); },
                   "amount order-1");
    };
    fit_all_models(g, g_ind, g_lag, report.gauge_occ0, report.gauge_occ1,
                   report.gauge_amt0, report.gauge_amt1, report.notes, "gauge");

    for (const auto& [name, raw] : sources) {
        SourceEval se;
        se.name = name;
        const DailySeries s = apply_mask(raw, start, n, keep);
        const auto ind = rain_indicator(s, cfg.t_x);
        const auto lag = lagged_states(ind);

        se.climatology =
            monthly_climatology(s, ind, cfg.t_x, cfg.monthly_completeness);
        se.annual = annual_summaries(s, ind, scheme.annual_year_start_month,
                                     cfg.spell_completeness);
        se.spells = spell_lengths(ind);

        add_monthly_metric(se.climatology_metrics, "rain_days",
                           se.climatology.rain_days,
                           report.gauge_climatology.rain_days);
        add_monthly_metric(se.climatology_metrics, "total",
                           se.climatology.total, report.gauge_climatology.total);
        add_monthly_metric(se.climatology_metrics, "mean_per_rain_day",
                           se.climatology.mean_per_rain_day,
                           report.gauge_climatology.mean_per_rain_day);
        add_monthly_metric(se.climatology_metrics, "max_daily",
                           se.climatology.max_daily,
                           report.gauge_climatology.max_daily);

        add_annual_metric(se.annual_metrics, "rain_days", se.annual,
                          report.gauge_annual,
                          [](const AnnualSummary& a) { return a.rain_days; });
        add_annual_metric(se.annual_metrics, "total", se.annual,
                          report.gauge_annual,
                          [](const AnnualSummary& a) { return a.total; });
        add_annual_metric(se.annual_metrics, "mean_per_rain_day", se.annual,
                          report.gauge_annual, [](const AnnualSummary& a) {
                              return a.mean_per_rain_day;
                          });
        add_annual_metric(se.annual_metrics, "max_daily", se.annual,
                          report.gauge_annual,
                          [](const AnnualSummary& a) { return a.max_daily; });
        add_annual_metric(se.annual_metrics, "longest_dry_spell", se.annual,
                          report.gauge_annual, [](const AnnualSummary& a) {
                              return a.longest_dry_spell;
                          });

        if (!report.gauge_spells.wet.empty() && !se.spells.wet.empty())
            se.wet_spell_ks =
                stats::ks_two_sample(report.gauge_spells.wet, se.spells.wet);
        if (!report.gauge_spells.dry.empty() && !se.spells.dry.empty())
            se.dry_spell_ks =
                stats::ks_two_sample(report.gauge_spells.dry, se.spells.dry);

        fit_all_models(s, ind, lag, se.occ0, se.occ1, se.amt0, se.amt1,
                       se.notes, name);
        if (se.occ0 && report.gauge_occ0)
            se.occurrence_rmse.order0 =
                seasonal::rmse_curve(*se.occ0, *report.gauge_occ0)[0];
        if (se.occ1 && report.gauge_occ1) {
            const auto r = seasonal::rmse_curve(*se.occ1, *report.gauge_occ1);
            se.occurrence_rmse.order1_wet = r[0];
            se.occurrence_rmse.order1_dry = r[1];
        }
        if (se.amt0 && report.gauge_amt0)
            se.amount_rmse.order0 =
                seasonal::rmse_curve(*se.amt0, *report.gauge_amt0)[0];
        if (se.amt1 && report.gauge_amt1) {
            const auto r = seasonal::rmse_curve(*se.amt1, *report.gauge_amt1);
            se.amount_rmse.order1_wet = r[0];
            se.amount_rmse.order1_dry = r[1];
        }

        se.detection = detection_2x2(g_ind, ind);
        se.categorical = detection_categorical(g, s);
        report.sources.push_back(std::move(se));
    }
    return report;
}

}  // namespace rainbc::eval
