#include "rainbc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rainbc::stats {

namespace {

// Guard against FP noise in p*n landing just above an exact integer.
std::size_t ceil_rank(double p, std::size_t n) {
    const double k = std::ceil(p * static_cast<double>(n) - 1e-9);
    if (k < 1.0) return 1;
    if (k > static_cast<double>(n)) return n;
    return static_cast<std::size_t>(k);
}

}  // namespace

double empirical_quantile(std::span<const double> sample, double p) {
    if (sample.empty())
        throw std::invalid_argument("empirical_quantile: empty sample");
    std::vector<double> work(sample.begin(), sample.end());
    const std::size_t k = ceil_rank(p, work.size());
    std::nth_element(work.begin(), work.begin() + static_cast<long>(k - 1),
                     work.end());
    return work[k - 1];
}

ThresholdResult threshold_for_frequency(std::span<const double> values,
                                        double target_p) {
    if (values.empty())
        throw std::invalid_argument("threshold_for_frequency: empty sample");
    const double q = empirical_quantile(values, 1.0 - target_p);
    ThresholdResult r;
    r.threshold = std::max(q, 0.0);
    std::size_t above = 0;
    for (double v : values)
        if (v > r.threshold) ++above;
    r.achieved_exceedance =
        static_cast<double>(above) / static_cast<double>(values.size());
    return r;
}

double digamma(double x) {
    // Recurrence up to x >= 10, then the asymptotic series.
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 -
                      inv2 * (1.0 / 120.0 -
                              inv2 * (1.0 / 252.0 -
                                      inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    return result;
}

double trigamma(double x) {
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += inv * (1.0 +
                     inv * (0.5 +
                            inv * (1.0 / 6.0 -
                                   inv2 * (1.0 / 30.0 -
                                           inv2 * (1.0 / 42.0 - inv2 / 30.0)))));
    return result;
}

namespace {

// Regularized lower incomplete gamma P(a, x): series for x < a+1,
// Lentz continued fraction for the complement otherwise.
double reg_lower_gamma(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

}  // namespace

GammaParams gamma_fit(std::span<const double> sample, std::size_t min_fit_n) {
    if (sample.size() < min_fit_n)
        throw FitError(FitError::Kind::InsufficientData,
                       "gamma_fit: sample of " + std::to_string(sample.size()) +
                           " below minimum " + std::to_string(min_fit_n));
    double sum = 0.0, sum_log = 0.0;
    for (double v : sample) {
        if (v <= 0.0)
            throw std::invalid_argument("gamma_fit: values must be > 0");
        sum += v;
        sum_log += std::log(v);
    }
    const double n = static_cast<double>(sample.size());
    const double mean = sum / n;
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    var /= n;
    if (var <= mean * mean * 1e-15)
        throw FitError(FitError::Kind::Degenerate,
                       "gamma_fit: all values identical");

    // Profile likelihood in the shape k: solve log(k) - digamma(k) = s with
    // s = log(mean) - mean(log x); scale follows as mean/k.
    const double s = std::log(mean) - sum_log / n;
    double k = mean * mean / var;  // method-of-moments seed
    if (k <= 0.0 || !std::isfinite(k))
        throw FitError(FitError::Kind::Degenerate, "gamma_fit: bad moment seed");
    for (int it = 0; it < 100; ++it) {
        const double f = std::log(k) - digamma(k) - s;
        const double fp = 1.0 / k - trigamma(k);
        double step = f / fp;
        double k_new = k - step;
        while (k_new <= 0.0) {  // halve into the positive domain
            step *= 0.5;
            k_new = k - step;
        }
        const double rel = std::fabs(k_new - k) / k_new;
        k = k_new;
        if (rel < 1e-10) break;
    }
    return GammaParams{k, mean / k};
}

double gamma_cdf(const GammaParams& params, double x) {
    if (x <= 0.0) return 0.0;
    return reg_lower_gamma(params.shape, x / params.scale);
}

double gamma_inv_cdf(const GammaParams& params, double u) {
    if (u < 0.0 || u >= 1.0)
        throw std::invalid_argument("gamma_inv_cdf: u must lie in [0,1)");
    if (u == 0.0) return 0.0;
    const double a = params.shape;

    // Bracket in the standardized variable z = x / scale.
    double lo = 0.0;
    double hi = std::max(a, 1.0);
    while (reg_lower_gamma(a, hi) < u) {
        hi *= 2.0;
        if (hi > 1e12)
            throw std::runtime_error("gamma_inv_cdf: bracket failed");
    }
    const double lg = std::lgamma(a);
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = reg_lower_gamma(a, z) - u;
        if (f > 0.0)
            hi = z;
        else
            lo = z;
        // Newton step with the density, bisection when it escapes the bracket.
        const double pdf = std::exp((a - 1.0) * std::log(z) - z - lg);
        double z_new = pdf > 0.0 ? z - f / pdf : 0.5 * (lo + hi);
        if (!(z_new > lo && z_new < hi)) z_new = 0.5 * (lo + hi);
        if (std::fabs(z_new - z) <= 1e-14 * std::max(z, 1e-300)) {
            z = z_new;
            break;
        }
        z = z_new;
    }
    return z * params.scale;
}

namespace {

double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double n1 = static_cast<double>(sa.size());
    const double n2 = static_cast<double>(sb.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / n1 -
                                  static_cast<double>(j) / n2));
    }
    KsResult r;
    r.d_statistic = d;
    r.n1 = sa.size();
    r.n2 = sb.size();
    const double ne = n1 * n2 / (n1 + n2);
    r.p_value = kolmogorov_q(std::sqrt(ne) * d);
    return r;
}

ComparisonMetrics comparison_metrics(std::span<const double> model,
                                     std::span<const double> obs) {
    if (model.size() != obs.size())
        throw std::invalid_argument("comparison_metrics: length mismatch");
    if (model.empty())
        throw std::invalid_argument("comparison_metrics: empty input");
    const std::size_t n = model.size();
    const double dn = static_cast<double>(n);
    ComparisonMetrics m;
    m.n = n;
    double se = 0.0, sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = model[i] - obs[i];
        se += e;
        sse += e * e;
    }
    m.mean_error = se / dn;
    m.rmse = std::sqrt(sse / dn);
    if (n < 2) return m;

    const double mu_y = std::accumulate(model.begin(), model.end(), 0.0) / dn;
    const double mu_x = std::accumulate(obs.begin(), obs.end(), 0.0) / dn;
    double syy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = model[i] - mu_y;
        const double dx = obs[i] - mu_x;
        syy += dy * dy;
        sxx += dx * dx;
        sxy += dy * dx;
    }
    if (syy > 0.0 && sxx > 0.0) {
        m.correlation = sxy / std::sqrt(syy * sxx);
        m.sd_ratio = std::sqrt(syy / sxx);  // same n-1 divisor cancels
    } else if (sxx > 0.0) {
        m.sd_ratio = 0.0;
    }
    return m;
}

void pairwise_complete(const std::vector<std::optional<double>>& a,
                       const std::vector<std::optional<double>>& b,
                       std::vector<double>& a_out, std::vector<double>& b_out) {
    a_out.clear();
    b_out.clear();
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] && b[i]) {
            a_out.push_back(*a[i]);
            b_out.push_back(*b[i]);
        }
    }
}

}  // namespace rainbc::stats
