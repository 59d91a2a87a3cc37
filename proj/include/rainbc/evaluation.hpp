#ifndef RAINBC_EVALUATION_HPP
#define RAINBC_EVALUATION_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rainbc/seasonal.hpp"
#include "rainbc/series.hpp"
#include "rainbc/stats.hpp"

namespace rainbc::eval {

enum class RainCategory { Dry = 0, Light, Moderate, Heavy, Violent };
inline constexpr std::array<double, 4> kCategoryBounds = {0.85, 5.0, 20.0, 40.0};
inline constexpr std::size_t kNCategories = 5;

RainCategory categorize(double mm);
std::string category_name(RainCategory c);

struct EvalConfig {
    double t_x = 0.85;
    double monthly_completeness = 0.8;
    double spell_completeness = 0.9;
    int n_harmonics = 3;
    int day_origin_month = 8;
};

/// Month-year statistics averaged over qualifying years, per calendar month.
struct MonthlyClimatology {
    std::array<std::optional<double>, 12> rain_days{};
    std::array<std::optional<double>, 12> total{};
    std::array<std::optional<double>, 12> mean_per_rain_day{};
    std::array<std::optional<double>, 12> max_daily{};
    std::array<int, 12> years_used{};
};

MonthlyClimatology monthly_climatology(const DailySeries& series,
                                       const IndicatorSeries& indicator,
                                       double t_x,
                                       double completeness = 0.8);

struct AnnualSummary {
    int start_year = 0;  // annual year label (year containing the start month)
    std::optional<double> rain_days;
    std::optional<double> total;
    std::optional<double> mean_per_rain_day;
    std::optional<double> max_daily;
    std::optional<double> longest_dry_spell;  // within Oct 1 - Mar 31
    double completeness = 0.0;
    double window_completeness = 0.0;  // Oct-Mar share of present days
};

std::vector<AnnualSummary> annual_summaries(const DailySeries& series,
                                            const IndicatorSeries& indicator,
                                            int annual_year_start_month = 8,
                                            double spell_completeness = 0.9);

struct SpellSamples {
    std::vector<double> wet;
    std::vector<double> dry;
};

/// Maximal same-state runs inside each Oct-Mar window; runs truncated at the
/// window edges are kept, missing days end a run.
SpellSamples spell_lengths(const IndicatorSeries& indicator);

struct Detection2x2 {
    std::size_t hits = 0, misses = 0, false_alarms = 0, correct_negatives = 0;
    std::optional<double> pod;
    std::optional<double> far;
    std::optional<double> hss;
};

Detection2x2 detection_2x2(const IndicatorSeries& gauge,
                           const IndicatorSeries& model);

struct CategoricalDetection {
    // counts[model category][gauge category]
    std::array<std::array<std::size_t, kNCategories>, kNCategories> counts{};
    std::array<std::optional<double>, kNCategories> pod{};
    std::optional<double> hss;
    std::size_t n = 0;
};

CategoricalDetection detection_categorical(const DailySeries& gauge,
                                           const DailySeries& model);

struct SeasonalRmse {
    std::optional<double> order0;
    std::optional<double> order1_wet;
    std::optional<double> order1_dry;
};

struct SourceEval {
    std::string name;
    MonthlyClimatology climatology;
    std::vector<AnnualSummary> annual;
    /// keyed by statistic: rain_days, total, mean_per_rain_day, max_daily,
    /// longest_dry_spell (annual only)
    std::map<std::string, stats::ComparisonMetrics> climatology_metrics;
    std::map<std::string, stats::ComparisonMetrics> annual_metrics;
    std::optional<stats::KsResult> wet_spell_ks;
    std::optional<stats::KsResult> dry_spell_ks;
    SeasonalRmse occurrence_rmse;
    SeasonalRmse amount_rmse;
    std::optional<seasonal::FittedCurves> occ0, occ1, amt0, amt1;
    SpellSamples spells;
    Detection2x2 detection;
    CategoricalDetection categorical;
    std::vector<std::string> notes;
};

struct EvalReport {
    Date mask_start;
    std::size_t mask_days = 0;
    std::size_t usable_days = 0;  // present on the common mask
    MonthlyClimatology gauge_climatology;
    std::vector<AnnualSummary> gauge_annual;
    SpellSamples gauge_spells;
    std::optional<seasonal::FittedCurves> gauge_occ0, gauge_occ1, gauge_amt0,
        gauge_amt1;
    std::vector<SourceEval> sources;
    std::vector<std::string> notes;
};

/// Runs the full battery against the gauge on the common mask: every day
/// missing in any series is masked out everywhere.
EvalReport evaluate_all(
    const DailySeries& gauge,
    const std::vector<std::pair<std::string, DailySeries>>& sources,
    const PeriodScheme& scheme, const EvalConfig& cfg);

}  // namespace rainbc::eval

#endif
