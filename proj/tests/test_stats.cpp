#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rainbc/stats.hpp"
#include "rainbc/synthgen.hpp"

using namespace rainbc;
using namespace rainbc::stats;

namespace {

// Independent oracle: smallest order statistic covering at least p of the
// sample, found by scanning every order statistic.
double quantile_bruteforce(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    for (std::size_t k = 1; k <= v.size(); ++k) {
        if (static_cast<double>(k) / n >= p - 1e-12) return v[k - 1];
    }
    return v.back();
}

std::vector<double> gamma_sample(const GammaParams& g, std::size_t n,
                                 std::uint64_t seed) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = gamma_inv_cdf(g, synth::uniform01(seed, i));
    return out;
}

// Adaptive Simpson quadrature of the Gamma density: an independent route to
// the CDF used to validate the incomplete-gamma evaluation.
double gamma_pdf(const GammaParams& g, double x) {
    if (x <= 0.0) return 0.0;
    const double z = x / g.scale;
    return std::exp((g.shape - 1.0) * std::log(z) - z - std::lgamma(g.shape)) /
           g.scale;
}

double simpson(const GammaParams& g, double a, double b, double fa, double fb,
               double fm, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = gamma_pdf(g, lm), frm = gamma_pdf(g, rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson(g, a, m, fa, fm, flm, eps / 2.0, depth - 1) +
           simpson(g, m, b, fm, fb, frm, eps / 2.0, depth - 1);
}

// For shape < 1 the density is singular at zero; substituting w = z^shape
// turns the standardized integral into (1/Gamma(a+1)) * int_0^{x^a}
// exp(-w^(1/a)) dw with a bounded integrand.
double sub_integrand(double a, double w) {
    return w > 0.0 ? std::exp(-std::pow(w, 1.0 / a)) : 1.0;
}

double simpson_sub(double a, double lo, double hi, double flo, double fhi,
                   double fm, double eps, int depth) {
    const double m = 0.5 * (lo + hi);
    const double flm = sub_integrand(a, 0.5 * (lo + m));
    const double frm = sub_integrand(a, 0.5 * (m + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    const double left = (m - lo) / 6.0 * (flo + 4.0 * flm + fm);
    const double right = (hi - m) / 6.0 * (fm + 4.0 * frm + fhi);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return simpson_sub(a, lo, m, flo, fm, flm, eps / 2.0, depth - 1) +
           simpson_sub(a, m, hi, fm, fhi, frm, eps / 2.0, depth - 1);
}

double gamma_cdf_quadrature(const GammaParams& g, double x) {
    if (x <= 0.0) return 0.0;
    const double a = g.shape;
    const double z = x / g.scale;
    if (a < 1.0) {
        const double hi = std::pow(z, a);
        const double integral =
            simpson_sub(a, 0.0, hi, sub_integrand(a, 0.0), sub_integrand(a, hi),
                        sub_integrand(a, 0.5 * hi), 1e-13, 48);
        return integral / std::exp(std::lgamma(a + 1.0));
    }
    return simpson(g, 0.0, x, gamma_pdf(g, 0.0), gamma_pdf(g, x),
                   gamma_pdf(g, 0.5 * x), 1e-13, 48);
}

}  // namespace

TEST_CASE("empirical_quantile order statistic convention") {
    CHECK(empirical_quantile(std::vector<double>{1, 2, 3, 4, 5}, 0.5) == 3);
    CHECK(empirical_quantile(std::vector<double>{7}, 0.0) == 7);
    CHECK(empirical_quantile(std::vector<double>{7}, 1.0) == 7);
    CHECK(empirical_quantile(std::vector<double>{1, 2, 3, 4}, 0.9) ==
          quantile_bruteforce({1, 2, 3, 4}, 0.9));
    CHECK(empirical_quantile(std::vector<double>{1, 2, 3, 4}, 0.9) == 4);
    CHECK(empirical_quantile(std::vector<double>{5, 1, 9}, 0.0) == 1);
    CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 0.5),
                    std::invalid_argument);

    // monotone in p, and equal to the brute-force scan throughout
    std::vector<double> sample;
    for (std::size_t i = 0; i < 57; ++i)
        sample.push_back(synth::uniform01(11, i) * 40.0);
    double prev = -1.0;
    for (double p = 0.0; p <= 1.0; p += 0.01) {
        const double q = empirical_quantile(sample, p);
        CHECK(q == quantile_bruteforce(sample, p));
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("threshold_for_frequency exceedance contract") {
    // 10 distinct values, 3 above the 7th order statistic
    std::vector<double> v{0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.5, 7.5, 9.0};
    const auto r = threshold_for_frequency(v, 0.3);
    CHECK(r.threshold == 5.0);
    CHECK(r.achieved_exceedance == doctest::Approx(0.3));

    // heavy tie mass at zero: threshold floors at 0, achieved below target
    std::vector<double> tied{0, 0, 0, 0, 0, 0, 0, 1.0, 2.0, 3.0};
    const auto rt = threshold_for_frequency(tied, 0.5);
    CHECK(rt.threshold == 0.0);
    std::size_t above = 0;
    for (double x : tied)
        if (x > rt.threshold) ++above;
    CHECK(rt.achieved_exceedance ==
          static_cast<double>(above) / static_cast<double>(tied.size()));
    CHECK(rt.achieved_exceedance < 0.5);

    // target 0 demands no exceedances: threshold is the maximum
    const auto r0 = threshold_for_frequency(v, 0.0);
    CHECK(r0.threshold == 9.0);
    CHECK(r0.achieved_exceedance == 0.0);

    // distinct samples: achieved within one order-statistic step of target
    std::vector<double> big;
    for (std::size_t i = 0; i < 301; ++i)
        big.push_back(synth::uniform01(23, i) * 100.0);
    for (double p : {0.05, 0.2, 0.33, 0.5, 0.77}) {
        const auto rr = threshold_for_frequency(big, p);
        CHECK(std::fabs(rr.achieved_exceedance - p) <=
              1.0 / static_cast<double>(big.size()) + 1e-12);
    }
}

TEST_CASE("gamma cdf against quadrature and the exponential special case") {
    // shape 1 is the exponential distribution
    const GammaParams expo{1.0, 2.0};
    CHECK(gamma_cdf(expo, 2.0) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
    CHECK(gamma_cdf(expo, 0.0) == 0.0);
    CHECK(gamma_cdf(expo, -3.0) == 0.0);

    for (const GammaParams g : {GammaParams{0.8, 8.0}, GammaParams{2.3, 7.1},
                                GammaParams{5.0, 0.5}}) {
        for (double x : {0.3, 1.0, 4.0, 10.0, 30.0}) {
            CHECK(gamma_cdf(g, x) ==
                  doctest::Approx(gamma_cdf_quadrature(g, x)).epsilon(1e-9));
        }
    }
}

TEST_CASE("gamma inverse cdf round trips") {
    const GammaParams g{2.3, 7.1};
    CHECK(gamma_inv_cdf(g, gamma_cdf(g, 10.0)) == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(gamma_inv_cdf(g, 0.0) == 0.0);
    CHECK_THROWS_AS(gamma_inv_cdf(g, 1.0), std::invalid_argument);

    for (const GammaParams gp : {GammaParams{0.5, 3.0}, GammaParams{1.7, 0.9},
                                 GammaParams{6.0, 12.0}}) {
        double prev = 0.0;
        for (double u = 0.02; u < 1.0; u += 0.02) {
            const double x = gamma_inv_cdf(gp, u);
            CHECK(x >= prev);  // monotone in u
            prev = x;
            CHECK(gamma_cdf(gp, x) == doctest::Approx(u).epsilon(1e-9));
        }
        for (double x : {0.05, 0.8, 2.5, 9.0}) {
            CHECK(gamma_inv_cdf(gp, gamma_cdf(gp, x)) ==
                  doctest::Approx(x).epsilon(1e-8));
        }
    }
}

TEST_CASE("gamma_fit recovers known parameters") {
    const auto s1 = gamma_sample({0.8, 8.0}, 10000, 101);
    const auto f1 = gamma_fit(s1);
    CHECK(f1.shape == doctest::Approx(0.8).epsilon(0.05));
    CHECK(f1.scale == doctest::Approx(8.0).epsilon(0.05));

    const auto s2 = gamma_sample({1.0, 5.0}, 10000, 202);
    double mean = 0.0;
    for (double v : s2) mean += v;
    mean /= static_cast<double>(s2.size());
    CHECK(mean == doctest::Approx(5.0).epsilon(0.05));  // shape*scale
    const auto f2 = gamma_fit(s2);
    CHECK(f2.shape * f2.scale == doctest::Approx(mean).epsilon(1e-9));

    CHECK_THROWS_AS(gamma_fit(std::vector<double>{1.0, 2.0, 3.0}), FitError);
    CHECK_THROWS_AS(gamma_fit(std::vector<double>(20, 4.2)), FitError);
    CHECK_THROWS_AS(gamma_fit(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 0}),
                    std::invalid_argument);
}

TEST_CASE("digamma equation residual vanishes at the fit") {
    const auto s = gamma_sample({2.5, 4.0}, 5000, 303);
    const auto f = gamma_fit(s);
    double sum = 0.0, sum_log = 0.0;
    for (double v : s) {
        sum += v;
        sum_log += std::log(v);
    }
    const double n = static_cast<double>(s.size());
    const double resid = std::log(f.shape) - digamma(f.shape) -
                         (std::log(sum / n) - sum_log / n);
    CHECK(std::fabs(resid) < 1e-9);
}

TEST_CASE("ks_two_sample exact statistic") {
    std::vector<double> a{1, 2, 3, 4};
    CHECK(ks_two_sample(a, a).d_statistic == 0.0);
    CHECK(ks_two_sample(a, a).p_value == 1.0);

    CHECK(ks_two_sample(std::vector<double>{1, 2}, std::vector<double>{3, 4})
              .d_statistic == 1.0);
    CHECK(ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4})
              .d_statistic == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_two_sample(std::vector<double>{}, a),
                    std::invalid_argument);
}

TEST_CASE("ks_two_sample properties") {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < 80; ++i) a.push_back(synth::uniform01(5, i) * 10);
    for (std::size_t i = 0; i < 121; ++i)
        b.push_back(synth::uniform01(6, i) * 12 + 1);

    const auto ab = ks_two_sample(a, b);
    const auto ba = ks_two_sample(b, a);
    CHECK(ab.d_statistic == ba.d_statistic);  // symmetric
    CHECK(ab.p_value == ba.p_value);

    // invariant under a strictly increasing transform of both samples
    auto cube = [](std::vector<double> v) {
        for (double& x : v) x = x * x * x + 2 * x;
        return v;
    };
    CHECK(ks_two_sample(cube(a), cube(b)).d_statistic == ab.d_statistic);

    // brute-force oracle: evaluate both ECDFs at every merged point
    std::vector<double> merged = a;
    merged.insert(merged.end(), b.begin(), b.end());
    double d = 0.0;
    for (double x : merged) {
        const double fa =
            static_cast<double>(std::count_if(a.begin(), a.end(),
                                              [&](double v) { return v <= x; })) /
            static_cast<double>(a.size());
        const double fb =
            static_cast<double>(std::count_if(b.begin(), b.end(),
                                              [&](double v) { return v <= x; })) /
            static_cast<double>(b.size());
        d = std::max(d, std::fabs(fa - fb));
    }
    CHECK(ab.d_statistic == doctest::Approx(d).epsilon(1e-12));

    // p monotone decreasing in D at fixed sizes
    const auto close = ks_two_sample(a, a);
    CHECK(close.p_value >= ab.p_value);
}

TEST_CASE("comparison_metrics ideal values and signs") {
    std::vector<double> x{1, 4, 2, 8, 5, 1, 9};
    const auto self = comparison_metrics(x, x);
    CHECK(self.mean_error == 0.0);
    CHECK(self.rmse == 0.0);
    CHECK(*self.correlation == doctest::Approx(1.0));
    CHECK(*self.sd_ratio == doctest::Approx(1.0));

    std::vector<double> shifted;
    for (double v : x) shifted.push_back(v + 2.0);
    const auto sh = comparison_metrics(shifted, x);
    CHECK(sh.mean_error == doctest::Approx(2.0));
    CHECK(sh.rmse == doctest::Approx(2.0));
    CHECK(*sh.correlation == doctest::Approx(1.0));
    CHECK(*sh.sd_ratio == doctest::Approx(1.0));

    const auto anti = comparison_metrics(std::vector<double>{1, 2, 3},
                                         std::vector<double>{3, 2, 1});
    CHECK(*anti.correlation == doctest::Approx(-1.0));

    // zero variance: correlation and sd_ratio absent
    const auto flat = comparison_metrics(std::vector<double>{2, 2, 2},
                                         std::vector<double>{2, 2, 2});
    CHECK(!flat.correlation.has_value());
    CHECK(!flat.sd_ratio.has_value());
}

TEST_CASE("pairwise_complete drops half-missing days") {
    std::vector<std::optional<double>> a{1.0, std::nullopt, 3.0, 4.0};
    std::vector<std::optional<double>> b{2.0, 5.0, std::nullopt, 6.0};
    std::vector<double> ao, bo;
    pairwise_complete(a, b, ao, bo);
    CHECK(ao == std::vector<double>{1.0, 4.0});
    CHECK(bo == std::vector<double>{2.0, 6.0});
}
