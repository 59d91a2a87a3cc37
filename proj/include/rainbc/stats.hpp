#ifndef RAINBC_STATS_HPP
#define RAINBC_STATS_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace rainbc::stats {

class FitError : public std::runtime_error {
public:
    enum class Kind { InsufficientData, Degenerate, NoConvergence };
    FitError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

/// Inverse-ECDF quantile: the order statistic x_(k) with k = ceil(p*n)
/// clamped to [1, n]; p = 0 returns the minimum.
double empirical_quantile(std::span<const double> sample, double p);

struct ThresholdResult {
    double threshold = 0.0;
    /// Fraction of the sample strictly above the returned threshold.
    double achieved_exceedance = 0.0;
};

/// Smallest order statistic whose exceedance fraction does not exceed
/// target_p, floored at 0 (quantile at 1 - target_p).
ThresholdResult threshold_for_frequency(std::span<const double> values,
                                        double target_p);

struct GammaParams {
    double shape = 1.0;
    double scale = 1.0;  // mm
};

/// Maximum-likelihood Gamma fit; shape solved by Newton iteration on the
/// digamma equation seeded by the method-of-moments estimate.
GammaParams gamma_fit(std::span<const double> sample, std::size_t min_fit_n = 10);

/// Regularized lower incomplete gamma at x / scale; 0 for x <= 0.
double gamma_cdf(const GammaParams& params, double x);

/// Numerical inverse of gamma_cdf; u must lie in [0, 1).
double gamma_inv_cdf(const GammaParams& params, double u);

// digamma/trigamma, exposed so tests can cross-check the Newton equation
double digamma(double x);
double trigamma(double x);

struct KsResult {
    double d_statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Exact sup-distance between the two ECDFs; p-value from the asymptotic
/// Kolmogorov distribution with effective n = n1*n2/(n1+n2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ComparisonMetrics {
    double mean_error = 0.0;
    double rmse = 0.0;
    std::optional<double> correlation;  // absent when a side has zero variance
    std::optional<double> sd_ratio;
    std::size_t n = 0;
};

/// Mean error and RMSE with 1/N normalization; Pearson correlation; ratio of
/// sample standard deviations (model over obs).
ComparisonMetrics comparison_metrics(std::span<const double> model,
                                     std::span<const double> obs);

/// Pairwise deletion: keeps indices where both entries are present.
void pairwise_complete(const std::vector<std::optional<double>>& a,
                       const std::vector<std::optional<double>>& b,
                       std::vector<double>& a_out, std::vector<double>& b_out);

}  // namespace rainbc::stats

#endif
