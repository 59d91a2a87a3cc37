#ifndef RAINBC_CONVENTIONAL_HPP
#define RAINBC_CONVENTIONAL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rainbc/series.hpp"
#include "rainbc/stats.hpp"

namespace rainbc::bc {

enum class Method { Loci, Qm, McLoci, McQm };

std::string method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

struct PeriodConvParams {
    double threshold_ty = 0.0;
    double target_exceedance = 0.0;
    double achieved_exceedance = 0.0;
    std::optional<double> scale;  // LOCI scale, or QM per-period fallback
    std::optional<stats::GammaParams> gamma_obs;
    std::optional<stats::GammaParams> gamma_model;
    std::vector<std::string> warnings;
};

struct ConvParams {
    Method method = Method::Loci;
    double t_x = 0.85;
    /// Maps model values (not threshold excesses) straight through the fitted
    /// CDFs, reproducing the printed form of the quantile-mapping equation.
    bool literal_eq4 = false;
    std::map<int, PeriodConvParams> periods;
    std::vector<std::string> warnings;
};

struct ConvOptions {
    std::size_t min_fit_n = 10;
    bool literal_eq4 = false;
};

/// Threshold per period so corrected exceedance matches the observed rain-day
/// frequency, plus the mean-intensity scale. Calibration uses pairwise-complete
/// days only.
ConvParams calibrate_loci(const DailySeries& obs, const DailySeries& model,
                          const PeriodScheme& scheme, double t_x);

/// Same thresholds; Gamma CDFs fitted to threshold excesses on each side.
/// Periods with too few excesses fall back to the scaling form.
ConvParams calibrate_qm(const DailySeries& obs, const DailySeries& model,
                        const PeriodScheme& scheme, double t_x,
                        const ConvOptions& opt = {});

struct ApplyResult {
    DailySeries series;
    std::vector<std::string> warnings;
};

ApplyResult apply_loci(const DailySeries& model, const ConvParams& params,
                       const PeriodScheme& scheme);
ApplyResult apply_qm(const DailySeries& model, const ConvParams& params,
                     const PeriodScheme& scheme);

/// Clamp for model CDF values that saturate to 1 numerically.
inline constexpr double kCdfCeiling = 1.0 - 1e-12;

}  // namespace rainbc::bc

#endif
