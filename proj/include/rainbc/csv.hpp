#ifndef RAINBC_CSV_HPP
#define RAINBC_CSV_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include "rainbc/qc.hpp"
#include "rainbc/series.hpp"

namespace rainbc::io {

class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& msg, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg),
          line_number(line) {}
    std::size_t line_number;
};

struct ParsedStation {
    DailySeries series;
    /// Range flags produced in lenient mode when negative values are dropped.
    std::vector<qc::QcFlag> flags;
};

/// Parses `date,rain` CSV text. Days absent between the first and last date
/// become missing; an empty rain field or `NA` is missing. Duplicate or
/// malformed dates raise CsvError. Negative rain raises CsvError unless
/// lenient_negatives is set, in which case the value becomes missing and a
/// Range flag is recorded.
ParsedStation parse_station_csv(std::string_view text,
                                bool lenient_negatives = false);

/// `date,rain` text for a series; missing values are written as empty fields.
std::string station_csv(const DailySeries& series);

/// `date,test,action,detail` report.
std::string qc_flags_csv(const std::vector<qc::QcFlag>& flags);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace rainbc::io

#endif
