#ifndef RAINBC_PARAMS_IO_HPP
#define RAINBC_PARAMS_IO_HPP

#include <json.hpp>

#include "rainbc/conventional.hpp"
#include "rainbc/evaluation.hpp"
#include "rainbc/markov.hpp"

namespace rainbc::io {

using json = nlohmann::ordered_json;

json conv_params_to_json(const bc::ConvParams& p);
bc::ConvParams conv_params_from_json(const json& j);

json mc_params_to_json(const bc::McParams& p);
bc::McParams mc_params_from_json(const json& j);

json eval_report_to_json(const eval::EvalReport& report);

/// Canonical text form used for all JSON artifacts (2-space indent, newline).
std::string dump_json(const json& j);

}  // namespace rainbc::io

#endif
