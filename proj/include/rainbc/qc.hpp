#ifndef RAINBC_QC_HPP
#define RAINBC_QC_HPP

#include <set>
#include <string>
#include <vector>

#include "rainbc/series.hpp"

namespace rainbc::qc {

enum class QcTest { Range, FlatLine, MaxConsecutiveRain, FalseZeros };
enum class QcAction { FlaggedOnly, SetMissing };

struct QcFlag {
    Date date;
    QcTest test = QcTest::Range;
    QcAction action = QcAction::FlaggedOnly;
    std::string detail;
};

struct QcConfig {
    double max_rain_mm = 400.0;
    int flatline_min_run = 5;  // identical positive values
    int max_consecutive_rain_days = 30;
    std::set<int> false_zero_months = {11, 12, 1, 2, 3};
    QcAction false_zero_action = QcAction::SetMissing;
};

struct QcResult {
    DailySeries series;
    std::vector<QcFlag> flags;
};

/// Applies range, flat-line, maximum-consecutive-rain and false-zeros tests.
/// Values are only ever changed to missing, never altered.
QcResult run_qc(const DailySeries& series, const QcConfig& cfg);

std::string test_name(QcTest t);
std::string action_name(QcAction a);

}  // namespace rainbc::qc

#endif
