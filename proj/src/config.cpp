#include "rainbc/config.hpp"

#include "rainbc/csv.hpp"

namespace rainbc {

using json = nlohmann::ordered_json;

namespace {

json scheme_to_json(const PeriodScheme& s) {
    json j;
    json map = json::object();
    for (int m = 1; m <= 12; ++m)
        map[std::to_string(m)] = s.period_of_month(m);
    j["month_to_period"] = std::move(map);
    j["dry_season_start_month"] = s.dry_season_start_month;
    j["annual_year_start_month"] = s.annual_year_start_month;
    return j;
}

PeriodScheme scheme_from_json(const json& j) {
    PeriodScheme s = PeriodScheme::default_scheme();
    if (j.contains("month_to_period")) {
        for (const auto& [k, v] : j.at("month_to_period").items()) {
            const int m = std::stoi(k);
            if (m < 1 || m > 12)
                throw std::invalid_argument("period scheme: bad month " + k);
            s.month_to_period[static_cast<std::size_t>(m - 1)] = v.get<int>();
        }
    }
    s.dry_season_start_month =
        j.value("dry_season_start_month", s.dry_season_start_month);
    s.annual_year_start_month =
        j.value("annual_year_start_month", s.annual_year_start_month);
    s.validate();
    return s;
}

Date date_from_json(const json& j) {
    const auto d = parse_iso_date(j.get<std::string>());
    if (!d) throw std::invalid_argument("bad date: " + j.get<std::string>());
    return *d;
}

}  // namespace

json config_to_json(const RunConfig& c) {
    json j;
    json stations = json::array();
    for (const auto& s : c.stations) {
        stations.push_back(json{{"name", s.name},
                                {"gauge_csv", s.gauge_csv},
                                {"model_csv", s.model_csv}});
    }
    j["stations"] = std::move(stations);
    j["t_x"] = c.t_x;
    j["period_scheme"] = scheme_to_json(c.scheme);
    json blocks = json::array();
    for (const auto& b : c.blocks.blocks)
        blocks.push_back(json{{"start", to_iso(b.start)}, {"end", to_iso(b.end)}});
    j["blocks"] = std::move(blocks);
    j["calibration"] = json{{"epsilon", c.calibration.epsilon},
                            {"lambda", c.calibration.lambda},
                            {"max_iterations", c.calibration.max_iterations},
                            {"min_conditional_n", c.calibration.min_conditional_n},
                            {"min_fit_n", c.calibration.min_fit_n},
                            {"literal_eq17", c.calibration.literal_eq17},
                            {"qm_literal_eq4", c.calibration.literal_eq4}};
    j["qc"] = json{{"max_rain_mm", c.qc.max_rain_mm},
                   {"flatline_min_run", c.qc.flatline_min_run},
                   {"max_consecutive_rain_days", c.qc.max_consecutive_rain_days},
                   {"false_zero_months",
                    std::vector<int>(c.qc.false_zero_months.begin(),
                                     c.qc.false_zero_months.end())},
                   {"false_zero_action",
                    qc::action_name(c.qc.false_zero_action)}};
    j["evaluation"] = json{{"monthly_completeness", c.evaluation.monthly_completeness},
                           {"spell_completeness", c.evaluation.spell_completeness},
                           {"n_harmonics", c.evaluation.n_harmonics},
                           {"day_origin_month", c.evaluation.day_origin_month}};
    j["output_dir"] = c.output_dir;
    j["jobs"] = c.jobs;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    if (j.contains("stations")) {
        for (const auto& s : j.at("stations")) {
            c.stations.push_back(StationConfig{s.at("name").get<std::string>(),
                                               s.value("gauge_csv", ""),
                                               s.value("model_csv", "")});
        }
    }
    c.t_x = j.value("t_x", c.t_x);
    if (j.contains("period_scheme"))
        c.scheme = scheme_from_json(j.at("period_scheme"));
    if (j.contains("blocks")) {
        c.blocks.blocks.clear();
        for (const auto& b : j.at("blocks"))
            c.blocks.blocks.push_back(
                cv::Block{date_from_json(b.at("start")), date_from_json(b.at("end"))});
        c.blocks.validate();
    }
    if (j.contains("calibration")) {
        const auto& cj = j.at("calibration");
        c.calibration.epsilon = cj.value("epsilon", c.calibration.epsilon);
        c.calibration.lambda = cj.value("lambda", c.calibration.lambda);
        c.calibration.max_iterations =
            cj.value("max_iterations", c.calibration.max_iterations);
        c.calibration.min_conditional_n =
            cj.value("min_conditional_n", c.calibration.min_conditional_n);
        c.calibration.min_fit_n = cj.value("min_fit_n", c.calibration.min_fit_n);
        c.calibration.literal_eq17 =
            cj.value("literal_eq17", c.calibration.literal_eq17);
        c.calibration.literal_eq4 =
            cj.value("qm_literal_eq4", c.calibration.literal_eq4);
    }
    if (j.contains("qc")) {
        const auto& qj = j.at("qc");
        c.qc.max_rain_mm = qj.value("max_rain_mm", c.qc.max_rain_mm);
        c.qc.flatline_min_run =
            qj.value("flatline_min_run", c.qc.flatline_min_run);
        c.qc.max_consecutive_rain_days =
            qj.value("max_consecutive_rain_days", c.qc.max_consecutive_rain_days);
        if (qj.contains("false_zero_months")) {
            c.qc.false_zero_months.clear();
            for (const auto& m : qj.at("false_zero_months"))
                c.qc.false_zero_months.insert(m.get<int>());
        }
        if (qj.contains("false_zero_action")) {
            c.qc.false_zero_action =
                qj.at("false_zero_action").get<std::string>() == "FlaggedOnly"
                    ? qc::QcAction::FlaggedOnly
                    : qc::QcAction::SetMissing;
        }
    }
    if (j.contains("evaluation")) {
        const auto& ej = j.at("evaluation");
        c.evaluation.monthly_completeness =
            ej.value("monthly_completeness", c.evaluation.monthly_completeness);
        c.evaluation.spell_completeness =
            ej.value("spell_completeness", c.evaluation.spell_completeness);
        c.evaluation.n_harmonics = ej.value("n_harmonics", c.evaluation.n_harmonics);
        c.evaluation.day_origin_month =
            ej.value("day_origin_month", c.evaluation.day_origin_month);
    }
    c.evaluation.t_x = c.t_x;
    c.output_dir = j.value("output_dir", c.output_dir);
    c.jobs = j.value("jobs", c.jobs);

    if (c.t_x < 0.0) throw std::invalid_argument("config: t_x must be >= 0");
    if (c.calibration.epsilon <= 0.0)
        throw std::invalid_argument("config: calibration.epsilon must be > 0");
    if (c.calibration.lambda <= 0.0 || c.calibration.lambda > 1.0)
        throw std::invalid_argument("config: calibration.lambda must be in (0,1]");
    if (c.calibration.max_iterations < 1)
        throw std::invalid_argument("config: calibration.max_iterations must be >= 1");
    if (c.qc.max_rain_mm <= 0.0 || c.qc.flatline_min_run <= 0 ||
        c.qc.max_consecutive_rain_days <= 0)
        throw std::invalid_argument("config: qc limits must be positive");
    return c;
}

RunConfig load_config(const std::string& path) {
    return config_from_json(json::parse(io::read_file(path)));
}

SynthRun synth_run_from_json(const json& j) {
    SynthRun r;
    r.spec.years = j.value("years", 10);
    r.spec.start_year = j.value("start_year", 1979);
    r.spec.t_x = j.value("t_x", 0.85);
    r.spec.seed = j.value("seed", 0ull);
    if (j.contains("period_scheme"))
        r.spec.scheme = scheme_from_json(j.at("period_scheme"));
    for (const auto& [k, pj] : j.at("periods").items()) {
        synth::PeriodDynamics d;
        d.p_wet_given_wet = pj.at("pw").get<double>();
        d.p_wet_given_dry = pj.at("pd").get<double>();
        if (pj.contains("wet_lag"))
            d.wet_lag_excess = {pj.at("wet_lag").at("shape").get<double>(),
                                pj.at("wet_lag").at("scale").get<double>()};
        if (pj.contains("dry_lag"))
            d.dry_lag_excess = {pj.at("dry_lag").at("shape").get<double>(),
                                pj.at("dry_lag").at("scale").get<double>()};
        r.spec.periods.emplace(std::stoi(k), d);
    }
    if (j.contains("inflation")) {
        synth::Inflation inf;
        inf.wet_probability_multiplier =
            j.at("inflation").value("wet_probability_multiplier", 1.0);
        inf.intensity_scale = j.at("inflation").value("intensity_scale", 1.0);
        r.spec.inflation = inf;
    }
    if (j.contains("stations")) {
        for (const auto& s : j.at("stations"))
            r.stations.emplace_back(s.at("name").get<std::string>(),
                                    s.value("seed", r.spec.seed));
    } else {
        r.stations.emplace_back("synth", r.spec.seed);
    }
    return r;
}

json synth_run_to_json(const SynthRun& r) {
    json j;
    json stations = json::array();
    for (const auto& [name, seed] : r.stations)
        stations.push_back(json{{"name", name}, {"seed", seed}});
    j["stations"] = std::move(stations);
    j["years"] = r.spec.years;
    j["start_year"] = r.spec.start_year;
    j["t_x"] = r.spec.t_x;
    j["seed"] = r.spec.seed;
    j["period_scheme"] = scheme_to_json(r.spec.scheme);
    json periods = json::object();
    for (const auto& [id, d] : r.spec.periods) {
        periods[std::to_string(id)] =
            json{{"pw", d.p_wet_given_wet},
                 {"pd", d.p_wet_given_dry},
                 {"wet_lag", {{"shape", d.wet_lag_excess.shape},
                              {"scale", d.wet_lag_excess.scale}}},
                 {"dry_lag", {{"shape", d.dry_lag_excess.shape},
                              {"scale", d.dry_lag_excess.scale}}}};
    }
    j["periods"] = std::move(periods);
    if (r.spec.inflation) {
        j["inflation"] =
            json{{"wet_probability_multiplier",
                  r.spec.inflation->wet_probability_multiplier},
                 {"intensity_scale", r.spec.inflation->intensity_scale}};
    }
    return j;
}

}  // namespace rainbc
