#include <doctest.h>

#include <cmath>

#include "rainbc/conventional.hpp"
#include "rainbc/synthgen.hpp"

using namespace rainbc;
using bc::ConvParams;

namespace {

constexpr double kTx = 0.85;

// January series padded to the full month with missing days.
DailySeries january(std::vector<std::optional<double>> vals) {
    vals.resize(31);
    return DailySeries({2000, 1, 1}, std::move(vals));
}

synth::SynthSpec inflated_spec(std::uint64_t seed, int years = 30) {
    synth::SynthSpec spec;
    spec.years = years;
    spec.seed = seed;
    for (int m : spec.scheme.period_ids()) {
        synth::PeriodDynamics d;
        d.p_wet_given_wet = 0.55;
        d.p_wet_given_dry = 0.2;
        d.wet_lag_excess = {1.1, 9.0};
        d.dry_lag_excess = {0.9, 5.0};
        spec.periods.emplace(m, d);
    }
    spec.inflation = synth::Inflation{1.6, 0.55};
    return spec;
}

// Distinct values everywhere: dry days get drizzle below the rain threshold,
// so order statistics have no tie mass at zero.
DailySeries with_drizzle(const DailySeries& s, std::uint64_t seed) {
    std::vector<std::optional<double>> vals(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.present(i)) continue;
        const double v = s.value(i);
        vals[i] = v == 0.0 ? 0.01 + 0.8 * synth::uniform01(seed, i) : v;
    }
    return DailySeries(s.start_date(), std::move(vals));
}

}  // namespace

TEST_CASE("calibrate_loci reproduces the scale ratio") {
    // obs mean excess 6.0 over T_X, model mean excess 3.0 over its threshold
    const auto obs = january({0.0, 0.0, 0.0, 0.0, 6.85, 4.85, 8.85});
    const auto model = january({0.0, 0.5, 1.0, 2.0, 5.0, 6.0, 4.0});
    const auto params = bc::calibrate_loci(obs, model, PeriodScheme::monthly(), kTx);
    const auto& p = params.periods.at(1);
    CHECK(p.threshold_ty == 2.0);
    CHECK(*p.scale == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.target_exceedance == doctest::Approx(3.0 / 7.0));
}

TEST_CASE("calibrate_loci self-calibration identity") {
    const auto obs = with_drizzle(synth::generate(inflated_spec(31)).truth, 7);
    const auto params =
        bc::calibrate_loci(obs, obs, PeriodScheme::default_scheme(), kTx);
    for (const auto& [m, p] : params.periods) {
        CHECK(p.threshold_ty <= kTx);
        // distinct values: the threshold sits one order statistic below T_X
        CHECK(p.threshold_ty > 0.6);
        CHECK(std::fabs(p.achieved_exceedance - p.target_exceedance) <= 1e-12);
        CHECK(*p.scale == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("calibrate_loci matches a direct recomputation of the ratio") {
    const auto pair = synth::generate(inflated_spec(57));
    const auto scheme = PeriodScheme::default_scheme();
    const auto params = bc::calibrate_loci(pair.truth, pair.model, scheme, kTx);
    for (const auto& [m, p] : params.periods) {
        // independent direct-summation oracle from the raw arrays
        double obs_sum = 0.0, model_sum = 0.0;
        std::size_t obs_n = 0, model_n = 0;
        for (const auto& b : period_blocks(pair.truth, scheme, m)) {
            for (std::size_t i = b.offset; i < b.offset + b.length; ++i) {
                if (!pair.truth.present(i) || !pair.model.present(i)) continue;
                const double x = pair.truth.value(i);
                const double y = pair.model.value(i);
                if (x > kTx) {
                    obs_sum += x - kTx;
                    ++obs_n;
                }
                if (y > p.threshold_ty) {
                    model_sum += y - p.threshold_ty;
                    ++model_n;
                }
            }
        }
        const double expected = (obs_sum / static_cast<double>(obs_n)) /
                                (model_sum / static_cast<double>(model_n));
        CHECK(*p.scale == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("apply_loci branch arithmetic") {
    ConvParams params;
    params.method = bc::Method::Loci;
    params.t_x = kTx;
    bc::PeriodConvParams p;
    p.threshold_ty = 2.0;
    p.scale = 1.5;
    params.periods.emplace(1, p);
    const auto scheme = PeriodScheme::monthly();

    const auto r =
        bc::apply_loci(january({4.0, 1.0, 2.0, std::nullopt}), params, scheme);
    CHECK(r.series.value(0) == doctest::Approx(0.85 + 1.5 * 2.0));  // 3.85
    CHECK(r.series.value(1) == 0.0);                   // below threshold
    CHECK(r.series.value(2) == doctest::Approx(kTx));  // exactly at threshold
    CHECK(!r.series.present(3));
}

TEST_CASE("loci fallback scale on degenerate periods") {
    // no observed wet day in the period
    const auto obs = january({0.0, 0.0, 0.1, 0.2});
    const auto model = january({0.0, 1.0, 2.0, 3.0});
    const auto params = bc::calibrate_loci(obs, model, PeriodScheme::monthly(), kTx);
    const auto& p = params.periods.at(1);
    CHECK(*p.scale == 1.0);
    CHECK(!p.warnings.empty());
}

TEST_CASE("calibrate_qm fits threshold excesses") {
    const auto obs =
        with_drizzle(synth::generate(inflated_spec(11, 60)).truth, 13);
    const auto scheme = PeriodScheme::default_scheme();
    const auto params = bc::calibrate_qm(obs, obs, scheme, kTx);
    for (const auto& [m, p] : params.periods) {
        REQUIRE(p.gamma_obs.has_value());
        REQUIRE(p.gamma_model.has_value());
        // same sample up to threshold granularity
        CHECK(p.gamma_obs->shape ==
              doctest::Approx(p.gamma_model->shape).epsilon(0.12));
        CHECK(p.gamma_obs->scale ==
              doctest::Approx(p.gamma_model->scale).epsilon(0.12));
    }
}

TEST_CASE("calibrate_qm recovers a known excess distribution") {
    // truth excesses are Gamma(0.9, 10) regardless of the previous state
    synth::SynthSpec spec;
    spec.years = 40;
    spec.seed = 1234;
    for (int m : spec.scheme.period_ids()) {
        synth::PeriodDynamics d;
        d.p_wet_given_wet = 0.65;
        d.p_wet_given_dry = 0.35;
        d.wet_lag_excess = {0.9, 10.0};
        d.dry_lag_excess = {0.9, 10.0};
        spec.periods.emplace(m, d);
    }
    const auto pair = synth::generate(spec);
    const auto params =
        bc::calibrate_qm(pair.truth, pair.truth, PeriodScheme::monthly(), kTx);
    std::size_t checked = 0;
    for (const auto& [m, p] : params.periods) {
        if (!p.gamma_obs) continue;
        ++checked;
        CHECK(p.gamma_obs->shape == doctest::Approx(0.9).epsilon(0.08));
        CHECK(p.gamma_obs->scale == doctest::Approx(10.0).epsilon(0.12));
    }
    CHECK(checked == 12);
}

TEST_CASE("calibrate_qm falls back to scaling on thin periods") {
    // 4 wet days against min_fit_n = 10
    const auto obs = january({0.0, 2.0, 3.0, 4.0, 5.0, 0.0, 0.0});
    const auto model = january({0.0, 1.0, 2.0, 3.0, 4.0, 0.5, 0.2});
    const auto params = bc::calibrate_qm(obs, model, PeriodScheme::monthly(), kTx);
    const auto& p = params.periods.at(1);
    CHECK(!p.gamma_obs.has_value());
    CHECK(p.scale.has_value());
    CHECK(!p.warnings.empty());
}

TEST_CASE("apply_qm identity and scale-family mapping") {
    ConvParams params;
    params.method = bc::Method::Qm;
    params.t_x = kTx;
    bc::PeriodConvParams p;
    p.threshold_ty = 2.0;
    p.gamma_obs = stats::GammaParams{1.3, 7.0};
    p.gamma_model = stats::GammaParams{1.3, 7.0};
    params.periods.emplace(1, p);
    const auto scheme = PeriodScheme::monthly();

    // identical CDFs: the map is the identity on excesses
    const auto r = bc::apply_qm(january({5.0, 2.0, 1.0}), params, scheme);
    CHECK(r.series.value(0) == doctest::Approx(5.0 - 2.0 + kTx).epsilon(1e-10));
    CHECK(r.series.value(1) == 0.0);  // dry branch uses <=
    CHECK(r.series.value(2) == 0.0);

    // obs scale doubled: corrected excess doubles the model excess
    params.periods.at(1).gamma_obs = stats::GammaParams{1.3, 14.0};
    const auto r2 = bc::apply_qm(january({5.0, 9.5}), params, scheme);
    CHECK(r2.series.value(0) ==
          doctest::Approx(2.0 * (5.0 - 2.0) + kTx).epsilon(1e-8));
    CHECK(r2.series.value(1) ==
          doctest::Approx(2.0 * (9.5 - 2.0) + kTx).epsilon(1e-8));
}

TEST_CASE("apply_qm literal form maps raw values") {
    ConvParams params;
    params.method = bc::Method::Qm;
    params.t_x = kTx;
    params.literal_eq4 = true;
    bc::PeriodConvParams p;
    p.threshold_ty = 2.0;
    p.gamma_obs = stats::GammaParams{1.3, 7.0};
    p.gamma_model = stats::GammaParams{1.3, 7.0};
    params.periods.emplace(1, p);

    const auto r =
        bc::apply_qm(january({5.0, 1.9}), params, PeriodScheme::monthly());
    CHECK(r.series.value(0) == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(r.series.value(1) == 0.0);
}

TEST_CASE("frequency matching and mean matching on calibration data") {
    const auto pair = synth::generate(inflated_spec(99, 40));
    const auto scheme = PeriodScheme::default_scheme();
    const auto params = bc::calibrate_loci(pair.truth, pair.model, scheme, kTx);
    const auto corrected = bc::apply_loci(pair.model, params, scheme).series;

    for (const auto& [m, p] : params.periods) {
        std::size_t obs_wet = 0, corr_wet = 0;
        double obs_excess = 0.0, corr_excess = 0.0;
        for (const auto& b : period_blocks(pair.truth, scheme, m)) {
            for (std::size_t i = b.offset; i < b.offset + b.length; ++i) {
                if (!pair.truth.present(i) || !pair.model.present(i)) continue;
                if (pair.truth.value(i) > kTx) {
                    ++obs_wet;
                    obs_excess += pair.truth.value(i) - kTx;
                }
                if (corrected.value(i) > kTx) {
                    ++corr_wet;
                    corr_excess += corrected.value(i) - kTx;
                }
            }
        }
        // Eq. 1 contract: wet counts within one order-statistic step
        CHECK(std::fabs(static_cast<double>(obs_wet) -
                        static_cast<double>(corr_wet)) <= 1.0 + 1e-9);
        // Eq. 2 contract: corrected mean excess equals the observed one
        const double lhs = corr_excess / static_cast<double>(corr_wet);
        const double rhs = obs_excess / static_cast<double>(obs_wet);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("corrections are monotone and nonnegative") {
    ConvParams loci;
    loci.method = bc::Method::Loci;
    loci.t_x = kTx;
    bc::PeriodConvParams p;
    p.threshold_ty = 1.7;
    p.scale = 2.3;
    p.gamma_obs = stats::GammaParams{0.8, 11.0};
    p.gamma_model = stats::GammaParams{1.6, 4.0};
    loci.periods.emplace(1, p);
    ConvParams qm = loci;
    qm.method = bc::Method::Qm;

    std::vector<std::optional<double>> ascending;
    for (int i = 0; i < 31; ++i) ascending.push_back(0.2 * i);
    const DailySeries series({2000, 1, 1}, ascending);
    const auto scheme = PeriodScheme::monthly();

    for (const auto* params : {&loci, &qm}) {
        const auto r = params->method == bc::Method::Loci
                           ? bc::apply_loci(series, *params, scheme)
                           : bc::apply_qm(series, *params, scheme);
        double prev = -1.0;
        for (std::size_t i = 0; i < r.series.size(); ++i) {
            const double v = r.series.value(i);
            CHECK(v >= 0.0);
            CHECK(v >= prev);
            prev = v;
            // wet exactly above the period threshold
            CHECK((v > kTx) == (series.value(i) > 1.7));
        }
    }
}

TEST_CASE("apply_qm clamps a saturated model CDF and warns") {
    ConvParams params;
    params.method = bc::Method::Qm;
    params.t_x = kTx;
    bc::PeriodConvParams p;
    p.threshold_ty = 1.0;
    p.gamma_obs = stats::GammaParams{1.0, 5.0};
    p.gamma_model = stats::GammaParams{1.0, 0.05};  // tiny scale saturates fast
    params.periods.emplace(1, p);

    const auto r =
        bc::apply_qm(january({300.0}), params, PeriodScheme::monthly());
    REQUIRE(r.series.present(0));
    CHECK(std::isfinite(r.series.value(0)));
    CHECK(!r.warnings.empty());
    CHECK(r.warnings[0].find("saturated") != std::string::npos);
}
