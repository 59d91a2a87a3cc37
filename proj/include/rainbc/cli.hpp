#ifndef RAINBC_CLI_HPP
#define RAINBC_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rainbc/config.hpp"

namespace rainbc::cli {

/// A named series location; `{station}` in the pattern expands per station.
struct SourceArg {
    std::string label;
    std::string pattern;
};

int cmd_qc(const RunConfig& cfg, const std::string& out_dir, int jobs);
int cmd_calibrate(const RunConfig& cfg, bc::Method method,
                  const std::string& out_dir, int jobs);
int cmd_correct(const RunConfig& cfg, bc::Method method,
                const std::string& params_dir, const std::string& out_dir,
                int jobs);
int cmd_crossval(const RunConfig& cfg, bc::Method method,
                 const std::string& out_dir, int jobs);
int cmd_evaluate(const RunConfig& cfg, const std::vector<SourceArg>& sources,
                 const std::vector<SourceArg>& mc_param_patterns,
                 const std::string& out_dir, int jobs);
int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override);

std::string expand_pattern(const std::string& pattern,
                           const std::string& station);

}  // namespace rainbc::cli

#endif
