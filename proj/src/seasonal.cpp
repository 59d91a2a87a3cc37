#include "rainbc/seasonal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rainbc::seasonal {

std::vector<double> fourier_design(int day, int n_harmonics) {
    if (day < 1 || day > 366)
        throw std::invalid_argument("fourier_design: day must be in 1..366");
    std::vector<double> row;
    row.reserve(1 + 2 * static_cast<std::size_t>(n_harmonics));
    row.push_back(1.0);
    const double base = 2.0 * std::numbers::pi * day / 366.0;
    for (int k = 1; k <= n_harmonics; ++k) {
        row.push_back(std::sin(k * base));
        row.push_back(std::cos(k * base));
    }
    return row;
}

int day_of_cycle(const Date& d, int origin_month) {
    int offset = 0;
    int m = origin_month;
    while (m != d.month) {
        offset += m == 2 ? 29 : days_in_month(2001, m);  // 2001 is non-leap
        m = m == 12 ? 1 : m + 1;
    }
    return offset + d.day;
}

namespace {

// Solve the symmetric positive-definite system in place (p is small).
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                   std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) {
        double diag = a[j * p + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * p + k] * a[j * p + k];
        if (diag <= 0.0)
            throw stats::FitError(stats::FitError::Kind::Degenerate,
                                  "normal equations not positive definite");
        const double l = std::sqrt(diag);
        a[j * p + j] = l;
        for (std::size_t i = j + 1; i < p; ++i) {
            double v = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * p + k] * a[j * p + k];
            a[i * p + j] = v / l;
        }
    }
    // forward then back substitution
    for (std::size_t i = 0; i < p; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= a[i * p + k] * b[k];
        b[i] = v / a[i * p + i];
    }
    for (std::size_t ii = p; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t k = ii + 1; k < p; ++k) v -= a[k * p + ii] * b[k];
        b[ii] = v / a[ii * p + ii];
    }
    return b;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::string trace_message(const std::string& what,
                          const std::vector<double>& grad_trace) {
    std::ostringstream os;
    os << what << "; gradient norms:";
    for (double g : grad_trace) os << ' ' << g;
    return os.str();
}

constexpr double kGradTol = 1e-8;
constexpr int kMaxIter = 100;

}  // namespace

double logistic_loglik(const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y,
                       const std::vector<double>& beta) {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double eta = dot(x[i], beta);
        // log(1+e^eta) computed stably on both sides
        const double log1pe =
            eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
        ll += y[i] * eta - log1pe;
    }
    return ll;
}

std::vector<double> logistic_gradient(const std::vector<std::vector<double>>& x,
                                      const std::vector<double>& y,
                                      const std::vector<double>& beta) {
    std::vector<double> g(beta.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double eta = dot(x[i], beta);
        const double mu = 1.0 / (1.0 + std::exp(-eta));
        const double r = y[i] - mu;
        for (std::size_t j = 0; j < g.size(); ++j) g[j] += x[i][j] * r;
    }
    return g;
}

GlmFit logistic_irls(const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y) {
    const std::size_t n = x.size();
    const std::size_t p = x.empty() ? 0 : x[0].size();
    if (n == 0 || p == 0)
        throw stats::FitError(stats::FitError::Kind::InsufficientData,
                              "logistic fit: empty design");
    GlmFit fit;
    fit.coef.assign(p, 0.0);
    std::vector<double> grad_trace;
    for (int it = 1; it <= kMaxIter; ++it) {
        std::vector<double> xtwx(p * p, 0.0), xtwz(p, 0.0);
        double grad_sq = 0.0;
        std::vector<double> grad(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = dot(x[i], fit.coef);
            const double mu = 1.0 / (1.0 + std::exp(-eta));
            const double w = std::max(mu * (1.0 - mu), 1e-10);
            const double z = eta + (y[i] - mu) / w;
            for (std::size_t j = 0; j < p; ++j) {
                grad[j] += x[i][j] * (y[i] - mu);
                xtwz[j] += x[i][j] * w * z;
                for (std::size_t k = 0; k <= j; ++k)
                    xtwx[j * p + k] += x[i][j] * w * x[i][k];
            }
        }
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = j + 1; k < p; ++k)
                xtwx[j * p + k] = xtwx[k * p + j];
        for (double g : grad) grad_sq += g * g;
        fit.gradient_norm = std::sqrt(grad_sq);
        fit.iterations = it;
        grad_trace.push_back(fit.gradient_norm);
        if (fit.gradient_norm < kGradTol) return fit;

        fit.coef = cholesky_solve(std::move(xtwx), std::move(xtwz), p);
        for (double c : fit.coef) {
            if (!std::isfinite(c) || std::fabs(c) > 1e3)
                throw stats::FitError(
                    stats::FitError::Kind::NoConvergence,
                    trace_message("logistic fit diverged (separation?)",
                                  grad_trace));
        }
    }
    throw stats::FitError(
        stats::FitError::Kind::NoConvergence,
        trace_message("logistic fit did not converge", grad_trace));
}

GlmFit gamma_log_irls(const std::vector<std::vector<double>>& x,
                      const std::vector<double>& y) {
    const std::size_t n = x.size();
    const std::size_t p = x.empty() ? 0 : x[0].size();
    if (n == 0 || p == 0)
        throw stats::FitError(stats::FitError::Kind::InsufficientData,
                              "gamma fit: empty design");
    GlmFit fit;
    fit.coef.assign(p, 0.0);
    std::vector<double> grad_trace;
    for (int it = 1; it <= kMaxIter; ++it) {
        // log link with Gamma variance gives unit working weights
        std::vector<double> xtx(p * p, 0.0), xtz(p, 0.0), grad(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = std::clamp(dot(x[i], fit.coef), -500.0, 500.0);
            const double mu = std::exp(eta);
            const double r = (y[i] - mu) / mu;
            const double z = eta + r;
            for (std::size_t j = 0; j < p; ++j) {
                grad[j] += x[i][j] * r;
                xtz[j] += x[i][j] * z;
                for (std::size_t k = 0; k <= j; ++k)
                    xtx[j * p + k] += x[i][j] * x[i][k];
            }
        }
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = j + 1; k < p; ++k)
                xtx[j * p + k] = xtx[k * p + j];
        double grad_sq = 0.0;
        for (double g : grad) grad_sq += g * g;
        fit.gradient_norm = std::sqrt(grad_sq);
        fit.iterations = it;
        grad_trace.push_back(fit.gradient_norm);
        if (fit.gradient_norm < kGradTol) {
            double pearson = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double mu = std::exp(dot(x[i], fit.coef));
                const double r = (y[i] - mu) / mu;
                pearson += r * r;
            }
            fit.dispersion =
                n > p ? pearson / static_cast<double>(n - p) : 0.0;
            return fit;
        }
        fit.coef = cholesky_solve(std::move(xtx), std::move(xtz), p);
        for (double c : fit.coef) {
            if (!std::isfinite(c) || std::fabs(c) > 1e3)
                throw stats::FitError(
                    stats::FitError::Kind::NoConvergence,
                    trace_message("gamma fit diverged", grad_trace));
        }
    }
    throw stats::FitError(stats::FitError::Kind::NoConvergence,
                          trace_message("gamma fit did not converge", grad_trace));
}

namespace {

struct Dataset {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
};

void require_sample(const Dataset& d, std::size_t p, const char* label) {
    if (d.y.size() < 10 * p)
        throw stats::FitError(stats::FitError::Kind::InsufficientData,
                              std::string(label) + ": " +
                                  std::to_string(d.y.size()) +
                                  " usable days for " + std::to_string(p) +
                                  " parameters");
}

std::vector<double> curve_from(const GlmFit& fit, int n_harmonics,
                               bool logistic) {
    std::vector<double> out(366);
    for (int d = 1; d <= 366; ++d) {
        const auto row = fourier_design(d, n_harmonics);
        double eta = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) eta += row[j] * fit.coef[j];
        out[static_cast<std::size_t>(d - 1)] =
            logistic ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta);
    }
    return out;
}

}  // namespace

FittedCurves fit_occurrence_model(const IndicatorSeries& indicator,
                                  const std::vector<WetState>& lagged,
                                  const SeasonalModelSpec& spec) {
    const std::size_t p = 1 + 2 * static_cast<std::size_t>(spec.n_harmonics);
    Dataset all, wet, dry;
    for (std::size_t i = 0; i < indicator.size(); ++i) {
        if (indicator[i] == WetState::Missing) continue;
        const double y = indicator[i] == WetState::Wet ? 1.0 : 0.0;
        auto row = fourier_design(
            day_of_cycle(indicator.start_date().plus_days(
                             static_cast<std::int64_t>(i)),
                         spec.day_origin_month),
            spec.n_harmonics);
        if (spec.order == 0) {
            all.x.push_back(std::move(row));
            all.y.push_back(y);
        } else {
            if (lagged[i] == WetState::Wet) {
                wet.x.push_back(std::move(row));
                wet.y.push_back(y);
            } else if (lagged[i] == WetState::Dry) {
                dry.x.push_back(std::move(row));
                dry.y.push_back(y);
            }
        }
    }
    FittedCurves out;
    out.order = spec.order;
    out.response = SeasonalModelSpec::Response::Occurrence;
    if (spec.order == 0) {
        require_sample(all, p, "occurrence model");
        out.fit_all = logistic_irls(all.x, all.y);
        out.all = curve_from(out.fit_all, spec.n_harmonics, true);
    } else {
        require_sample(wet, p, "occurrence model, wet-lag curve");
        require_sample(dry, p, "occurrence model, dry-lag curve");
        out.fit_wet = logistic_irls(wet.x, wet.y);
        out.fit_dry = logistic_irls(dry.x, dry.y);
        out.wet = curve_from(out.fit_wet, spec.n_harmonics, true);
        out.dry = curve_from(out.fit_dry, spec.n_harmonics, true);
    }
    return out;
}

FittedCurves fit_amount_model(const DailySeries& series,
                              const IndicatorSeries& indicator,
                              const std::vector<WetState>& lagged,
                              const SeasonalModelSpec& spec, double t_x) {
    const std::size_t p = 1 + 2 * static_cast<std::size_t>(spec.n_harmonics);
    Dataset all, wet, dry;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.present(i) || series.value(i) <= t_x) continue;
        (void)indicator;
        const double y = series.value(i);
        auto row = fourier_design(
            day_of_cycle(series.date_at(i), spec.day_origin_month),
            spec.n_harmonics);
        if (spec.order == 0) {
            all.x.push_back(std::move(row));
            all.y.push_back(y);
        } else {
            if (lagged[i] == WetState::Wet) {
                wet.x.push_back(std::move(row));
                wet.y.push_back(y);
            } else if (lagged[i] == WetState::Dry) {
                dry.x.push_back(std::move(row));
                dry.y.push_back(y);
            }
        }
    }
    FittedCurves out;
    out.order = spec.order;
    out.response = SeasonalModelSpec::Response::Amount;
    if (spec.order == 0) {
        require_sample(all, p, "amount model");
        out.fit_all = gamma_log_irls(all.x, all.y);
        out.all = curve_from(out.fit_all, spec.n_harmonics, false);
    } else {
        require_sample(wet, p, "amount model, wet-lag curve");
        require_sample(dry, p, "amount model, dry-lag curve");
        out.fit_wet = gamma_log_irls(wet.x, wet.y);
        out.fit_dry = gamma_log_irls(dry.x, dry.y);
        out.wet = curve_from(out.fit_wet, spec.n_harmonics, false);
        out.dry = curve_from(out.fit_dry, spec.n_harmonics, false);
    }
    return out;
}

std::string curves_csv(const FittedCurves& curves) {
    std::string out = "d,state,fitted\n";
    auto rows = [&out](const char* state, const std::vector<double>& v) {
        char buf[48];
        for (std::size_t d = 0; d < v.size(); ++d) {
            std::snprintf(buf, sizeof(buf), "%zu,%s,%.10g\n", d + 1, state,
                          v[d]);
            out += buf;
        }
    };
    if (curves.order == 0) {
        rows("all", curves.all);
    } else {
        rows("W", curves.wet);
        rows("D", curves.dry);
    }
    return out;
}

std::vector<double> rmse_curve(const FittedCurves& a, const FittedCurves& b) {
    if (a.order != b.order || a.response != b.response)
        throw std::invalid_argument("rmse_curve: order/response mismatch");
    auto rmse = [](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < 366; ++i) {
            const double d = u[i] - v[i];
            s += d * d;
        }
        return std::sqrt(s / 366.0);
    };
    if (a.order == 0) return {rmse(a.all, b.all)};
    return {rmse(a.wet, b.wet), rmse(a.dry, b.dry)};
}

}  // namespace rainbc::seasonal
