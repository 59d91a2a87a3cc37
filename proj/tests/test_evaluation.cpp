#include <doctest.h>

#include <cmath>

#include "rainbc/evaluation.hpp"
#include "rainbc/synthgen.hpp"

using namespace rainbc;
using namespace rainbc::eval;

namespace {

synth::SynthSpec seasonal_spec(std::uint64_t seed, int years) {
    synth::SynthSpec spec;
    spec.years = years;
    spec.seed = seed;
    const std::map<int, std::pair<double, double>> probs = {
        {1, {0.68, 0.30}}, {2, {0.65, 0.28}}, {3, {0.55, 0.22}},
        {4, {0.45, 0.15}}, {5, {0.30, 0.10}}, {6, {0.40, 0.12}},
        {7, {0.55, 0.20}}, {8, {0.65, 0.28}}};
    for (const auto& [m, pq] : probs) {
        synth::PeriodDynamics d;
        d.p_wet_given_wet = pq.first;
        d.p_wet_given_dry = pq.second;
        d.wet_lag_excess = {1.2, 9.0};
        d.dry_lag_excess = {0.8, 6.0};
        spec.periods.emplace(m, d);
    }
    spec.inflation = synth::Inflation{1.8, 0.5};
    return spec;
}

}  // namespace

TEST_CASE("rain categories use half-open bounds") {
    CHECK(categorize(0.0) == RainCategory::Dry);
    CHECK(categorize(0.84) == RainCategory::Dry);
    CHECK(categorize(0.85) == RainCategory::Light);
    CHECK(categorize(4.9) == RainCategory::Light);
    CHECK(categorize(5.0) == RainCategory::Moderate);
    CHECK(categorize(19.99) == RainCategory::Moderate);
    CHECK(categorize(20.0) == RainCategory::Heavy);
    CHECK(categorize(39.99) == RainCategory::Heavy);
    CHECK(categorize(40.0) == RainCategory::Violent);
    CHECK(categorize(400.0) == RainCategory::Violent);
}

TEST_CASE("monthly climatology on a constant series") {
    // two years of 1 mm every day
    const std::size_t n = 731;
    DailySeries s({2000, 1, 1}, std::vector<std::optional<double>>(n, 1.0));
    const auto ind = rain_indicator(s, 0.85);
    const auto c = monthly_climatology(s, ind, 0.85);
    CHECK(*c.rain_days[0] == 31.0);   // January
    CHECK(*c.mean_per_rain_day[0] == doctest::Approx(1.0));
    CHECK(*c.total[0] == 31.0);
    CHECK(*c.max_daily[0] == 1.0);
    CHECK(c.years_used[0] == 2);
}

TEST_CASE("monthly climatology degenerate and averaging cases") {
    DailySeries zeros({2000, 1, 1}, std::vector<std::optional<double>>(366, 0.0));
    const auto czero =
        monthly_climatology(zeros, rain_indicator(zeros, 0.85), 0.85);
    CHECK(*czero.rain_days[0] == 0.0);
    CHECK(*czero.total[0] == 0.0);
    CHECK(!czero.mean_per_rain_day[0].has_value());  // no rain days

    // two Januaries with totals 60 and 100
    std::vector<std::optional<double>> vals(731, 0.0);
    for (int d = 0; d < 30; ++d) vals[static_cast<std::size_t>(d)] = 2.0;
    for (int d = 0; d < 25; ++d) vals[static_cast<std::size_t>(366 + d)] = 4.0;
    DailySeries two({2000, 1, 1}, std::move(vals));
    const auto c = monthly_climatology(two, rain_indicator(two, 0.85), 0.85);
    CHECK(*c.total[0] == doctest::Approx(80.0));

    // an incomplete month-year is excluded
    std::vector<std::optional<double>> gappy(731, 1.0);
    for (int d = 0; d < 20; ++d) gappy[static_cast<std::size_t>(d)].reset();
    DailySeries g({2000, 1, 1}, std::move(gappy));
    const auto cg = monthly_climatology(g, rain_indicator(g, 0.85), 0.85, 0.8);
    CHECK(cg.years_used[0] == 1);  // the gappy January fails 80% completeness
}

TEST_CASE("annual summaries and the Oct-Mar dry spell window") {
    // annual year Aug 2000 - Jul 2001; all dry
    const Date start{2000, 8, 1};
    const std::size_t n = 365;
    DailySeries s(start, std::vector<std::optional<double>>(n, 0.0));
    const auto ind = rain_indicator(s, 0.85);
    const auto years = annual_summaries(s, ind, 8, 0.9);
    REQUIRE(years.size() == 1);
    CHECK(years[0].start_year == 2000);
    CHECK(*years[0].rain_days == 0.0);
    // Oct 1 2000 .. Mar 31 2001 inclusive = 182 days (2001 not a leap year)
    CHECK(*years[0].longest_dry_spell == 182.0);

    // leap year window: Oct 2003 .. Mar 2004 has 183 days
    DailySeries s2({2003, 8, 1}, std::vector<std::optional<double>>(366, 0.0));
    const auto years2 =
        annual_summaries(s2, rain_indicator(s2, 0.85), 8, 0.9);
    REQUIRE(!years2.empty());
    CHECK(*years2[0].longest_dry_spell == 183.0);
}

TEST_CASE("dry spells split at wet and missing days") {
    // W D D D W inside the window, rest wet
    std::vector<std::optional<double>> vals(365, 5.0);
    const Date start{2000, 8, 1};
    DailySeries s(start, vals);
    const auto oct1 = *s.index_of({2000, 10, 1});
    s.set(oct1 + 1, 0.0);
    s.set(oct1 + 2, 0.0);
    s.set(oct1 + 3, 0.0);
    const auto years = annual_summaries(s, rain_indicator(s, 0.85), 8, 0.9);
    REQUIRE(years.size() == 1);
    CHECK(*years[0].longest_dry_spell == 3.0);

    // a missing day inside the dry run splits it
    s.set_missing(oct1 + 2);
    const auto years2 = annual_summaries(s, rain_indicator(s, 0.85), 8, 0.9);
    CHECK(*years2[0].longest_dry_spell == 1.0);

    // too many missing days excludes the year from spell metrics
    for (std::size_t i = oct1; i < oct1 + 60; ++i) s.set_missing(i);
    const auto years3 = annual_summaries(s, rain_indicator(s, 0.85), 8, 0.9);
    CHECK(!years3[0].longest_dry_spell.has_value());
}

TEST_CASE("spell_lengths run extraction") {
    // Oct 2000 window: W W D D D W then all missing
    std::vector<std::optional<double>> vals(365);
    const Date start{2000, 8, 1};
    DailySeries s(start, vals);
    const auto oct1 = *s.index_of({2000, 10, 1});
    const double pattern[] = {5, 5, 0, 0, 0, 5};
    for (std::size_t i = 0; i < 6; ++i) s.set(oct1 + i, pattern[i]);
    const auto spells = spell_lengths(rain_indicator(s, 0.85));
    REQUIRE(spells.wet.size() == 2);
    REQUIRE(spells.dry.size() == 1);
    CHECK(spells.wet[0] == 2.0);
    CHECK(spells.wet[1] == 1.0);
    CHECK(spells.dry[0] == 3.0);

    // missing breaks a wet run into two spells of one day
    DailySeries s2(start, std::vector<std::optional<double>>(365));
    s2.set(oct1, 5.0);
    s2.set(oct1 + 2, 5.0);
    const auto spells2 = spell_lengths(rain_indicator(s2, 0.85));
    REQUIRE(spells2.wet.size() == 2);
    CHECK(spells2.wet[0] == 1.0);
    CHECK(spells2.wet[1] == 1.0);
}

TEST_CASE("spells plus missing days cover the window") {
    const auto pair = synth::generate(seasonal_spec(3, 3));
    DailySeries s = pair.truth;
    for (std::size_t i = 0; i < s.size(); i += 13) s.set_missing(i);
    const auto ind = rain_indicator(s, 0.85);
    const auto spells = spell_lengths(ind);
    double spell_days = 0.0;
    for (double w : spells.wet) spell_days += w;
    for (double d : spells.dry) spell_days += d;
    // count window days and missing days inside windows directly
    std::size_t window_days = 0, missing_days = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto d = s.date_at(i);
        const bool in_window = d.month >= 10 || d.month <= 3;
        if (!in_window) continue;
        ++window_days;
        if (!s.present(i)) ++missing_days;
    }
    CHECK(spell_days + static_cast<double>(missing_days) ==
          static_cast<double>(window_days));
}

TEST_CASE("detection_2x2 scores") {
    // perfect forecast with both classes present
    std::vector<WetState> g{WetState::Wet, WetState::Dry, WetState::Wet,
                            WetState::Dry};
    const IndicatorSeries gi({2000, 1, 1}, g);
    const auto perfect = detection_2x2(gi, gi);
    CHECK(*perfect.pod == 1.0);
    CHECK(*perfect.far == 0.0);
    CHECK(*perfect.hss == 1.0);

    // H=8, M=2 -> POD 0.8
    std::vector<WetState> gauge(10, WetState::Wet), model(10, WetState::Wet);
    model[0] = model[1] = WetState::Dry;
    const auto pod = detection_2x2(IndicatorSeries({2000, 1, 1}, gauge),
                                   IndicatorSeries({2000, 1, 1}, model));
    CHECK(*pod.pod == doctest::Approx(0.8));

    // H=0, M=5, F=5, C=0 -> HSS = -1
    std::vector<WetState> g2, m2;
    for (int i = 0; i < 5; ++i) {
        g2.push_back(WetState::Wet);
        m2.push_back(WetState::Dry);
    }
    for (int i = 0; i < 5; ++i) {
        g2.push_back(WetState::Dry);
        m2.push_back(WetState::Wet);
    }
    const auto anti = detection_2x2(IndicatorSeries({2000, 1, 1}, g2),
                                    IndicatorSeries({2000, 1, 1}, m2));
    CHECK(*anti.hss == doctest::Approx(-1.0));

    // missing days are excluded
    std::vector<WetState> g3{WetState::Wet, WetState::Missing};
    std::vector<WetState> m3{WetState::Wet, WetState::Wet};
    const auto part = detection_2x2(IndicatorSeries({2000, 1, 1}, g3),
                                    IndicatorSeries({2000, 1, 1}, m3));
    CHECK(part.hits == 1);
    CHECK(part.hits + part.misses + part.false_alarms +
              part.correct_negatives ==
          1);
}

TEST_CASE("categorical detection matches a brute-force HSS") {
    const auto pair = synth::generate(seasonal_spec(5, 10));
    const auto det = detection_categorical(pair.truth, pair.model);
    // brute-force evaluation of the K-category formula from the counts
    const double n = static_cast<double>(det.n);
    double diag = 0, chance = 0;
    for (std::size_t i = 0; i < kNCategories; ++i) {
        double row = 0, col = 0;
        for (std::size_t j = 0; j < kNCategories; ++j) {
            row += static_cast<double>(det.counts[i][j]);
            col += static_cast<double>(det.counts[j][i]);
        }
        diag += static_cast<double>(det.counts[i][i]);
        chance += row * col / n;
    }
    CHECK(*det.hss ==
          doctest::Approx((diag - chance) / (n - chance)).epsilon(1e-12));

    // perfect self-comparison
    const auto self = detection_categorical(pair.truth, pair.truth);
    CHECK(*self.hss == 1.0);
    for (std::size_t c = 0; c < kNCategories; ++c) {
        if (self.pod[c]) CHECK(*self.pod[c] == 1.0);
    }
}

TEST_CASE("evaluate_all self-comparison yields ideal values") {
    const auto pair = synth::generate(seasonal_spec(17, 12));
    EvalConfig cfg;
    const auto report = evaluate_all(
        pair.truth, {{"self", pair.truth}}, PeriodScheme::default_scheme(), cfg);
    REQUIRE(report.sources.size() == 1);
    const auto& s = report.sources[0];
    for (const auto& [k, m] : s.climatology_metrics) {
        CHECK(m.mean_error == 0.0);
        CHECK(m.rmse == 0.0);
        if (m.correlation) CHECK(*m.correlation == doctest::Approx(1.0));
        if (m.sd_ratio) CHECK(*m.sd_ratio == doctest::Approx(1.0));
    }
    REQUIRE(s.wet_spell_ks.has_value());
    CHECK(s.wet_spell_ks->d_statistic == 0.0);
    CHECK(s.wet_spell_ks->p_value == 1.0);
    CHECK(*s.detection.pod == 1.0);
    CHECK(*s.detection.far == 0.0);
    CHECK(*s.detection.hss == 1.0);
    CHECK(*s.categorical.hss == 1.0);
    if (s.occurrence_rmse.order0) CHECK(*s.occurrence_rmse.order0 == 0.0);
    if (s.amount_rmse.order0) CHECK(*s.amount_rmse.order0 == 0.0);
}

TEST_CASE("evaluate_all applies one common mask to every source") {
    const auto pair = synth::generate(seasonal_spec(19, 6));
    DailySeries a = pair.model;
    DailySeries b = pair.model;
    // distinct missing patterns
    for (std::size_t i = 0; i < a.size(); i += 11) a.set_missing(i);
    for (std::size_t i = 5; i < b.size(); i += 13) b.set_missing(i);
    EvalConfig cfg;
    const auto report = evaluate_all(pair.truth, {{"a", a}, {"b", b}},
                                     PeriodScheme::default_scheme(), cfg);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.present(i) && b.present(i)) ++expected;
    CHECK(report.usable_days == expected);
    // both sources were masked identically, so their detection tables have
    // the same number of compared days
    const auto& sa = report.sources[0].detection;
    const auto& sb = report.sources[1].detection;
    CHECK(sa.hits + sa.misses + sa.false_alarms + sa.correct_negatives ==
          sb.hits + sb.misses + sb.false_alarms + sb.correct_negatives);
}

TEST_CASE("detection scores stay inside their documented ranges") {
    // sweep a family of synthetic confusion patterns
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<WetState> g, m;
        for (std::size_t i = 0; i < 200; ++i) {
            g.push_back(synth::uniform01(seed, 2 * i) < 0.4 ? WetState::Wet
                                                            : WetState::Dry);
            m.push_back(synth::uniform01(seed, 2 * i + 1) < 0.5 ? WetState::Wet
                                                                : WetState::Dry);
        }
        const auto d = detection_2x2(IndicatorSeries({2000, 1, 1}, g),
                                     IndicatorSeries({2000, 1, 1}, m));
        if (d.pod) {
            CHECK(*d.pod >= 0.0);
            CHECK(*d.pod <= 1.0);
        }
        if (d.far) {
            CHECK(*d.far >= 0.0);
            CHECK(*d.far <= 1.0);
        }
        if (d.hss) CHECK(*d.hss <= 1.0);
    }
}

TEST_CASE("evaluate_all notes a missing common range instead of failing") {
    DailySeries g({2000, 1, 1}, std::vector<std::optional<double>>(10, 1.0));
    DailySeries far({2010, 1, 1}, std::vector<std::optional<double>>(10, 1.0));
    const auto report = evaluate_all(g, {{"far", far}},
                                     PeriodScheme::default_scheme(), {});
    CHECK(report.sources.empty());
    CHECK(!report.notes.empty());
}
