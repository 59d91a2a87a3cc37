#ifndef RAINBC_SERIES_HPP
#define RAINBC_SERIES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rainbc/date.hpp"

namespace rainbc {

enum class WetState : std::uint8_t { Dry = 0, Wet = 1, Missing = 2 };

/// Daily rainfall in mm on consecutive calendar days. Gaps are carried as
/// missing entries, never omitted, so index arithmetic equals date arithmetic.
class DailySeries {
public:
    DailySeries() = default;
    DailySeries(Date start, std::vector<std::optional<double>> values);

    Date start_date() const { return start_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    Date date_at(std::size_t i) const {
        return start_.plus_days(static_cast<std::int64_t>(i));
    }
    /// Index of a date, or nullopt when outside the covered range.
    std::optional<std::size_t> index_of(const Date& d) const;

    bool present(std::size_t i) const { return values_[i].has_value(); }
    double value(std::size_t i) const { return *values_[i]; }
    const std::optional<double>& at(std::size_t i) const { return values_[i]; }

    void set(std::size_t i, std::optional<double> v);
    void set_missing(std::size_t i) { values_[i].reset(); }

    const std::vector<std::optional<double>>& values() const { return values_; }

    std::size_t count_present() const;

    /// Sub-series covering [first, first+len); must lie inside the range.
    DailySeries slice(std::size_t first, std::size_t len) const;

private:
    Date start_;
    std::vector<std::optional<double>> values_;
};

/// Wet/dry/missing state per day, aligned with its source DailySeries.
class IndicatorSeries {
public:
    IndicatorSeries() = default;
    IndicatorSeries(Date start, std::vector<WetState> states)
        : start_(start), states_(std::move(states)) {}

    Date start_date() const { return start_; }
    std::size_t size() const { return states_.size(); }
    WetState operator[](std::size_t i) const { return states_[i]; }
    const std::vector<WetState>& states() const { return states_; }

private:
    Date start_;
    std::vector<WetState> states_;
};

/// Maps calendar months onto calibration periods. Period ids must cover
/// 1..n_periods() without gaps.
struct PeriodScheme {
    std::array<int, 12> month_to_period{};  // [0] = January
    int dry_season_start_month = 4;
    int annual_year_start_month = 8;

    int period_of_month(int month) const {
        return month_to_period[static_cast<std::size_t>(month - 1)];
    }
    int n_periods() const;
    std::vector<int> period_ids() const;

    /// Throws std::invalid_argument when ids do not cover 1..M.
    void validate() const;

    /// Oct..Apr each their own period, May-Sep pooled (8 periods).
    static PeriodScheme default_scheme();
    /// Plain calendar months, 12 periods.
    static PeriodScheme monthly();
};

/// Wet iff value > threshold, Dry iff present and <= threshold.
IndicatorSeries rain_indicator(const DailySeries& series, double threshold_mm);

/// states[t] of the previous day; element 0 is Missing. Computed on the full
/// series so period subsetting later keeps the true previous-day state.
std::vector<WetState> lagged_states(const IndicatorSeries& indicator);

struct IndexBlock {
    std::size_t offset = 0;
    std::size_t length = 0;
    bool operator==(const IndexBlock&) const = default;
};

/// Maximal runs of consecutive days belonging to the given period; runs never
/// cross a period boundary.
std::vector<IndexBlock> period_blocks(const Date& start, std::size_t n_days,
                                      const PeriodScheme& scheme, int period);

std::vector<IndexBlock> period_blocks(const DailySeries& series,
                                      const PeriodScheme& scheme, int period);
std::vector<IndexBlock> period_blocks(const IndicatorSeries& indicator,
                                      const PeriodScheme& scheme, int period);

/// Per-block value slices of a series (the values, missing included).
std::vector<std::vector<std::optional<double>>> subset_period(
    const DailySeries& series, const PeriodScheme& scheme, int period);
std::vector<std::vector<WetState>> subset_period(
    const IndicatorSeries& indicator, const PeriodScheme& scheme, int period);

}  // namespace rainbc

#endif
