#include "rainbc/series.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace rainbc {

DailySeries::DailySeries(Date start, std::vector<std::optional<double>> values)
    : start_(start), values_(std::move(values)) {
    for (const auto& v : values_) {
        if (v && (*v < 0.0 || !std::isfinite(*v)))
            throw std::invalid_argument(
                "DailySeries: rainfall values must be finite and >= 0");
    }
}

std::optional<std::size_t> DailySeries::index_of(const Date& d) const {
    const std::int64_t off = d.to_days() - start_.to_days();
    if (off < 0 || off >= static_cast<std::int64_t>(values_.size()))
        return std::nullopt;
    return static_cast<std::size_t>(off);
}

void DailySeries::set(std::size_t i, std::optional<double> v) {
    if (v && (*v < 0.0 || !std::isfinite(*v)))
        throw std::invalid_argument(
            "DailySeries: rainfall values must be finite and >= 0");
    values_[i] = v;
}

std::size_t DailySeries::count_present() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(),
                      [](const auto& v) { return v.has_value(); }));
}

DailySeries DailySeries::slice(std::size_t first, std::size_t len) const {
    if (first + len > values_.size())
        throw std::out_of_range("DailySeries::slice out of range");
    std::vector<std::optional<double>> vals(values_.begin() + first,
                                            values_.begin() + first + len);
    return DailySeries(date_at(first), std::move(vals));
}

int PeriodScheme::n_periods() const {
    return *std::max_element(month_to_period.begin(), month_to_period.end());
}

std::vector<int> PeriodScheme::period_ids() const {
    std::set<int> ids(month_to_period.begin(), month_to_period.end());
    return std::vector<int>(ids.begin(), ids.end());
}

void PeriodScheme::validate() const {
    std::set<int> ids(month_to_period.begin(), month_to_period.end());
    const int m = *ids.rbegin();
    if (*ids.begin() != 1 || static_cast<int>(ids.size()) != m)
        throw std::invalid_argument(
            "PeriodScheme: period ids must cover 1..M without gaps");
    if (dry_season_start_month < 1 || dry_season_start_month > 12 ||
        annual_year_start_month < 1 || annual_year_start_month > 12)
        throw std::invalid_argument("PeriodScheme: months must be in 1..12");
}

PeriodScheme PeriodScheme::default_scheme() {
    PeriodScheme s;
    // Jan..Apr = 1..4, May-Sep pooled = 5, Oct = 6, Nov = 7, Dec = 8.
    s.month_to_period = {1, 2, 3, 4, 5, 5, 5, 5, 5, 6, 7, 8};
    s.dry_season_start_month = 4;
    s.annual_year_start_month = 8;
    return s;
}

PeriodScheme PeriodScheme::monthly() {
    PeriodScheme s;
    for (int m = 1; m <= 12; ++m)
        s.month_to_period[static_cast<std::size_t>(m - 1)] = m;
    s.dry_season_start_month = 4;
    s.annual_year_start_month = 8;
    return s;
}

IndicatorSeries rain_indicator(const DailySeries& series, double threshold_mm) {
    std::vector<WetState> states(series.size(), WetState::Missing);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.present(i)) continue;
        states[i] =
            series.value(i) > threshold_mm ? WetState::Wet : WetState::Dry;
    }
    return IndicatorSeries(series.start_date(), std::move(states));
}

std::vector<WetState> lagged_states(const IndicatorSeries& indicator) {
    std::vector<WetState> lag(indicator.size(), WetState::Missing);
    for (std::size_t i = 1; i < indicator.size(); ++i) lag[i] = indicator[i - 1];
    return lag;
}

std::vector<IndexBlock> period_blocks(const Date& start, std::size_t n_days,
                                      const PeriodScheme& scheme, int period) {
    std::vector<IndexBlock> blocks;
    Date d = start;
    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t i = 0; i < n_days; ++i) {
        const bool member = scheme.period_of_month(d.month) == period;
        if (member && !in_run) {
            run_start = i;
            in_run = true;
        } else if (!member && in_run) {
            blocks.push_back({run_start, i - run_start});
            in_run = false;
        }
        // advance one day without a full from_days round trip per iteration
        if (d.day < days_in_month(d.year, d.month)) {
            ++d.day;
        } else {
            d.day = 1;
            if (d.month == 12) {
                d.month = 1;
                ++d.year;
            } else {
                ++d.month;
            }
        }
    }
    if (in_run) blocks.push_back({run_start, n_days - run_start});
    return blocks;
}

std::vector<IndexBlock> period_blocks(const DailySeries& series,
                                      const PeriodScheme& scheme, int period) {
    return period_blocks(series.start_date(), series.size(), scheme, period);
}

std::vector<IndexBlock> period_blocks(const IndicatorSeries& indicator,
                                      const PeriodScheme& scheme, int period) {
    return period_blocks(indicator.start_date(), indicator.size(), scheme,
                         period);
}

std::vector<std::vector<std::optional<double>>> subset_period(
    const DailySeries& series, const PeriodScheme& scheme, int period) {
    std::vector<std::vector<std::optional<double>>> out;
    for (const auto& b : period_blocks(series, scheme, period)) {
        out.emplace_back(series.values().begin() + static_cast<long>(b.offset),
                         series.values().begin() +
                             static_cast<long>(b.offset + b.length));
    }
    return out;
}

std::vector<std::vector<WetState>> subset_period(
    const IndicatorSeries& indicator, const PeriodScheme& scheme, int period) {
    std::vector<std::vector<WetState>> out;
    for (const auto& b : period_blocks(indicator, scheme, period)) {
        out.emplace_back(
            indicator.states().begin() + static_cast<long>(b.offset),
            indicator.states().begin() + static_cast<long>(b.offset + b.length));
    }
    return out;
}

}  // namespace rainbc
