#ifndef RAINBC_SVG_HPP
#define RAINBC_SVG_HPP

#include <string>
#include <vector>

namespace rainbc::plot {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Each writer emits `<base>.svg` and `<base>.csv`; the CSV holds exactly the
/// plotted numbers (long format: series,x,y).
void write_line_chart(const std::string& base, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool step = false);

/// Grouped bars; each series supplies one y per group label.
void write_bar_chart(const std::string& base, const std::string& title,
                     const std::vector<std::string>& groups,
                     const std::vector<Series>& series);

void write_scatter(const std::string& base, const std::string& title,
                   const std::string& x_label, const std::string& y_label,
                   const std::vector<Series>& series, bool diagonal = false);

}  // namespace rainbc::plot

#endif
