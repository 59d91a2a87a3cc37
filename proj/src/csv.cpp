#include "rainbc/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace rainbc::io {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
        --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::string fmt_rain(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

ParsedStation parse_station_csv(std::string_view text, bool lenient_negatives) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto next_line = [&](std::string& out) -> bool {
        if (pos >= text.size()) return false;
        const std::size_t nl = text.find('\n', pos);
        out = std::string(text.substr(
            pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        return true;
    };

    std::string line;
    if (!next_line(line)) throw CsvError("empty file", 1);
    const auto header = split_fields(line);
    std::ptrdiff_t date_col = -1, rain_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "date") date_col = static_cast<std::ptrdiff_t>(i);
        if (header[i] == "rain") rain_col = static_cast<std::ptrdiff_t>(i);
    }
    if (date_col < 0 || rain_col < 0)
        throw CsvError("header must contain `date` and `rain` columns", line_no);

    struct Row {
        std::optional<double> value;
        std::size_t line;
    };
    std::map<std::int64_t, Row> rows;  // keyed by day number
    std::vector<qc::QcFlag> flags;
    while (next_line(line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (static_cast<std::size_t>(std::max(date_col, rain_col)) >=
            fields.size())
            throw CsvError("too few fields", line_no);
        const auto date = parse_iso_date(fields[static_cast<std::size_t>(date_col)]);
        if (!date)
            throw CsvError("malformed date `" +
                               fields[static_cast<std::size_t>(date_col)] +
                               "` (expected YYYY-MM-DD)",
                           line_no);
        const std::int64_t key = date->to_days();
        if (rows.count(key))
            throw CsvError("duplicate date " + to_iso(*date), line_no);

        const std::string& raw = fields[static_cast<std::size_t>(rain_col)];
        std::optional<double> value;
        if (!raw.empty() && raw != "NA") {
            char* end = nullptr;
            const double v = std::strtod(raw.c_str(), &end);
            if (end == raw.c_str() || *end != '\0')
                throw CsvError("malformed rain value `" + raw + "`", line_no);
            if (v < 0.0) {
                if (!lenient_negatives)
                    throw CsvError("negative rain " + raw + " on " +
                                       to_iso(*date) +
                                       "; re-run with lenient parsing to drop "
                                       "it through QC",
                                   line_no);
                flags.push_back({*date, qc::QcTest::Range,
                                 qc::QcAction::SetMissing,
                                 "negative value " + raw + " dropped at parse"});
            } else {
                value = v;
            }
        }
        rows[key] = Row{value, line_no};
    }
    if (rows.empty()) throw CsvError("no data rows", line_no);

    const std::int64_t first = rows.begin()->first;
    const std::int64_t last = rows.rbegin()->first;
    std::vector<std::optional<double>> values(
        static_cast<std::size_t>(last - first + 1));
    for (const auto& [day, row] : rows)
        values[static_cast<std::size_t>(day - first)] = row.value;
    return ParsedStation{DailySeries(Date::from_days(first), std::move(values)),
                         std::move(flags)};
}

std::string station_csv(const DailySeries& series) {
    std::string out = "date,rain\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += to_iso(series.date_at(i));
        out += ',';
        if (series.present(i)) out += fmt_rain(series.value(i));
        out += '\n';
    }
    return out;
}

std::string qc_flags_csv(const std::vector<qc::QcFlag>& flags) {
    std::string out = "date,test,action,detail\n";
    for (const auto& f : flags) {
        out += to_iso(f.date) + ',' + qc::test_name(f.test) + ',' +
               qc::action_name(f.action) + ',' + f.detail + '\n';
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace rainbc::io
