#ifndef RAINBC_CONFIG_HPP
#define RAINBC_CONFIG_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "rainbc/crossval.hpp"
#include "rainbc/evaluation.hpp"
#include "rainbc/markov.hpp"
#include "rainbc/qc.hpp"
#include "rainbc/synthgen.hpp"

namespace rainbc {

struct StationConfig {
    std::string name;
    std::string gauge_csv;
    std::string model_csv;
};

/// One JSON document drives every subcommand; `--print-default-config`
/// emits the fully defaulted form.
struct RunConfig {
    std::vector<StationConfig> stations;
    double t_x = 0.85;
    PeriodScheme scheme = PeriodScheme::default_scheme();
    cv::BlockScheme blocks = cv::BlockScheme::default_blocks();
    bc::CalibrationConfig calibration;
    qc::QcConfig qc;
    eval::EvalConfig evaluation;
    std::string output_dir = "out";
    int jobs = 1;
};

nlohmann::ordered_json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::ordered_json& j);
RunConfig load_config(const std::string& path);

/// Synthetic-data run description for the `synth` subcommand.
struct SynthRun {
    std::vector<std::pair<std::string, std::uint64_t>> stations;  // name, seed
    synth::SynthSpec spec;  // seed field overridden per station
};

SynthRun synth_run_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json synth_run_to_json(const SynthRun& r);

}  // namespace rainbc

#endif
