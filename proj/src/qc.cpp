#include "rainbc/qc.hpp"

#include <algorithm>
#include <cstdio>

namespace rainbc::qc {

std::string test_name(QcTest t) {
    switch (t) {
        case QcTest::Range: return "Range";
        case QcTest::FlatLine: return "FlatLine";
        case QcTest::MaxConsecutiveRain: return "MaxConsecutiveRain";
        case QcTest::FalseZeros: return "FalseZeros";
    }
    return "?";
}

std::string action_name(QcAction a) {
    return a == QcAction::SetMissing ? "SetMissing" : "FlaggedOnly";
}

namespace {

std::string fmt_mm(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

QcResult run_qc(const DailySeries& series, const QcConfig& cfg) {
    QcResult r{series, {}};
    DailySeries& s = r.series;
    const std::size_t n = s.size();

    // Range first so the remaining tests see the cleaned values.
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.present(i)) continue;
        const double v = s.value(i);
        if (v > cfg.max_rain_mm || v < 0.0) {
            r.flags.push_back({s.date_at(i), QcTest::Range, QcAction::SetMissing,
                               "value " + fmt_mm(v) + " outside [0, " +
                                   fmt_mm(cfg.max_rain_mm) + "]"});
            s.set_missing(i);
        }
    }

    // Flat line: runs of identical positive values. Zero runs are legitimate
    // dry spells in this climate and are not flagged.
    for (std::size_t i = 0; i < n;) {
        if (!s.present(i) || s.value(i) <= 0.0) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && s.present(j) && s.value(j) == s.value(i)) ++j;
        if (j - i >= static_cast<std::size_t>(cfg.flatline_min_run)) {
            r.flags.push_back({s.date_at(i), QcTest::FlatLine,
                               QcAction::FlaggedOnly,
                               "value " + fmt_mm(s.value(i)) + " repeated " +
                                   std::to_string(j - i) + " days"});
        }
        i = j;
    }

    // Maximum consecutive rain days (any recorded rainfall counts).
    for (std::size_t i = 0; i < n;) {
        if (!s.present(i) || s.value(i) <= 0.0) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && s.present(j) && s.value(j) > 0.0) ++j;
        if (j - i > static_cast<std::size_t>(cfg.max_consecutive_rain_days)) {
            r.flags.push_back({s.date_at(i), QcTest::MaxConsecutiveRain,
                               QcAction::FlaggedOnly,
                               std::to_string(j - i) +
                                   " consecutive rain days"});
        }
        i = j;
    }

    // False zeros: an entire month in the rainy period recorded as zeros.
    // A month with missing days still qualifies when all present values are 0.
    std::size_t i = 0;
    while (i < n) {
        Date d = s.date_at(i);
        const std::size_t month_len = static_cast<std::size_t>(
            std::min<std::int64_t>(static_cast<std::int64_t>(n - i),
                                   days_in_month(d.year, d.month) - d.day + 1));
        if (cfg.false_zero_months.count(d.month)) {
            std::size_t present = 0, zeros = 0;
            for (std::size_t k = i; k < i + month_len; ++k) {
                if (!s.present(k)) continue;
                ++present;
                if (s.value(k) == 0.0) ++zeros;
            }
            if (present > 0 && zeros == present) {
                char label[16];
                std::snprintf(label, sizeof(label), "%04d-%02d", d.year, d.month);
                r.flags.push_back(
                    {d, QcTest::FalseZeros, cfg.false_zero_action,
                     std::string("month ") + label + ": all " +
                         std::to_string(present) + " present values are zero"});
                if (cfg.false_zero_action == QcAction::SetMissing) {
                    for (std::size_t k = i; k < i + month_len; ++k)
                        if (s.present(k)) s.set_missing(k);
                }
            }
        }
        i += month_len;
    }

    std::sort(r.flags.begin(), r.flags.end(), [](const QcFlag& a, const QcFlag& b) {
        if (a.date != b.date) return a.date < b.date;
        return static_cast<int>(a.test) < static_cast<int>(b.test);
    });
    return r;
}

}  // namespace rainbc::qc
