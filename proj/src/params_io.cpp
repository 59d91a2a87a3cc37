#include "rainbc/params_io.hpp"

namespace rainbc::io {

namespace {

json gamma_json(const stats::GammaParams& g) {
    return json{{"shape", g.shape}, {"scale", g.scale}};
}

stats::GammaParams gamma_from(const json& j) {
    return {j.at("shape").get<double>(), j.at("scale").get<double>()};
}

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

void put_opt_gamma(json& j, const char* key,
                   const std::optional<stats::GammaParams>& g) {
    if (g) j[key] = gamma_json(*g);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return j.at(key).get<T>();
}

std::optional<stats::GammaParams> get_opt_gamma(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return gamma_from(j.at(key));
}

}  // namespace

json conv_params_to_json(const bc::ConvParams& p) {
    json j;
    j["method"] = bc::method_name(p.method);
    j["t_x"] = p.t_x;
    if (p.method == bc::Method::Qm) j["literal_eq4"] = p.literal_eq4;
    json periods = json::object();
    for (const auto& [id, pp] : p.periods) {
        json pj;
        pj["threshold_ty"] = pp.threshold_ty;
        pj["target_exceedance"] = pp.target_exceedance;
        pj["achieved_exceedance"] = pp.achieved_exceedance;
        put_opt(pj, "scale", pp.scale);
        put_opt_gamma(pj, "gamma_obs", pp.gamma_obs);
        put_opt_gamma(pj, "gamma_model", pp.gamma_model);
        if (!pp.warnings.empty()) pj["warnings"] = pp.warnings;
        periods[std::to_string(id)] = std::move(pj);
    }
    j["periods"] = std::move(periods);
    j["warnings"] = p.warnings;
    return j;
}

bc::ConvParams conv_params_from_json(const json& j) {
    bc::ConvParams p;
    const auto m = bc::method_from_name(j.at("method").get<std::string>());
    if (!m || (*m != bc::Method::Loci && *m != bc::Method::Qm))
        throw std::invalid_argument("conv params: bad method");
    p.method = *m;
    p.t_x = j.at("t_x").get<double>();
    p.literal_eq4 = j.value("literal_eq4", false);
    for (const auto& [key, pj] : j.at("periods").items()) {
        bc::PeriodConvParams pp;
        pp.threshold_ty = pj.at("threshold_ty").get<double>();
        pp.target_exceedance = pj.value("target_exceedance", 0.0);
        pp.achieved_exceedance = pj.value("achieved_exceedance", 0.0);
        pp.scale = get_opt<double>(pj, "scale");
        pp.gamma_obs = get_opt_gamma(pj, "gamma_obs");
        pp.gamma_model = get_opt_gamma(pj, "gamma_model");
        if (pj.contains("warnings"))
            pp.warnings = pj.at("warnings").get<std::vector<std::string>>();
        p.periods.emplace(std::stoi(key), std::move(pp));
    }
    if (j.contains("warnings"))
        p.warnings = j.at("warnings").get<std::vector<std::string>>();
    return p;
}

json mc_params_to_json(const bc::McParams& p) {
    json j;
    j["method"] = bc::method_name(p.amounts.method);
    j["t_x"] = p.thresholds.t_x;
    json periods = json::object();
    for (const auto& [id, th] : p.thresholds.periods) {
        json pj;
        pj["t0"] = th.t0;
        pj["tw"] = th.tw;
        pj["td"] = th.td;
        pj["p0"] = th.targets.p0;
        put_opt(pj, "pw", th.targets.pw);
        put_opt(pj, "pd", th.targets.pd);
        pj["n0"] = th.targets.n0;
        pj["nw"] = th.targets.nw;
        pj["nd"] = th.targets.nd;
        put_opt(pj, "achieved_pw", th.achieved_pw);
        put_opt(pj, "achieved_pd", th.achieved_pd);
        put_opt(pj, "achieved_p0", th.achieved_p0);
        pj["achieved_p0_exceedance"] = th.achieved_p0_exceedance;
        pj["iterations"] = th.iterations;
        pj["converged"] = th.converged;
        pj["tw_frozen"] = th.tw_frozen;
        pj["td_frozen"] = th.td_frozen;
        std::vector<std::string> warnings = th.warnings;
        const auto am = p.amounts.periods.find(id);
        if (am != p.amounts.periods.end()) {
            const auto& a = am->second;
            put_opt(pj, "s", a.s);
            put_opt(pj, "sw", a.sw);
            put_opt(pj, "sd", a.sd);
            put_opt_gamma(pj, "gamma_obs_wet", a.g_obs_wet);
            put_opt_gamma(pj, "gamma_obs_dry", a.g_obs_dry);
            put_opt_gamma(pj, "gamma_obs_all", a.g_obs_all);
            put_opt_gamma(pj, "gamma_model_wet", a.g_model_wet);
            put_opt_gamma(pj, "gamma_model_dry", a.g_model_dry);
            put_opt_gamma(pj, "gamma_model_all", a.g_model_all);
            pj["wet_uses_unconditional"] = a.wet_uses_unconditional;
            pj["dry_uses_unconditional"] = a.dry_uses_unconditional;
            warnings.insert(warnings.end(), a.warnings.begin(), a.warnings.end());
        }
        if (!warnings.empty()) pj["warnings"] = warnings;
        periods[std::to_string(id)] = std::move(pj);
    }
    j["periods"] = std::move(periods);
    j["warnings"] = p.warnings;
    return j;
}

bc::McParams mc_params_from_json(const json& j) {
    bc::McParams p;
    const auto m = bc::method_from_name(j.at("method").get<std::string>());
    if (!m || (*m != bc::Method::McLoci && *m != bc::Method::McQm))
        throw std::invalid_argument("mc params: bad method");
    p.amounts.method = *m;
    p.thresholds.t_x = j.at("t_x").get<double>();
    for (const auto& [key, pj] : j.at("periods").items()) {
        const int id = std::stoi(key);
        bc::PeriodMcThresholds th;
        th.t0 = pj.at("t0").get<double>();
        th.tw = pj.at("tw").get<double>();
        th.td = pj.at("td").get<double>();
        th.targets.p0 = pj.at("p0").get<double>();
        th.targets.pw = get_opt<double>(pj, "pw");
        th.targets.pd = get_opt<double>(pj, "pd");
        th.targets.n0 = pj.value("n0", 0u);
        th.targets.nw = pj.value("nw", 0u);
        th.targets.nd = pj.value("nd", 0u);
        th.achieved_pw = get_opt<double>(pj, "achieved_pw");
        th.achieved_pd = get_opt<double>(pj, "achieved_pd");
        th.achieved_p0 = get_opt<double>(pj, "achieved_p0");
        th.achieved_p0_exceedance = pj.value("achieved_p0_exceedance", 0.0);
        th.iterations = pj.value("iterations", 0);
        th.converged = pj.value("converged", false);
        th.tw_frozen = pj.value("tw_frozen", false);
        th.td_frozen = pj.value("td_frozen", false);
        // threshold and amount warnings were merged on write; keep them on
        // the threshold side so a reload serializes identically
        if (pj.contains("warnings"))
            th.warnings = pj.at("warnings").get<std::vector<std::string>>();
        p.thresholds.periods.emplace(id, std::move(th));

        bc::PeriodMcAmounts a;
        a.s = get_opt<double>(pj, "s");
        a.sw = get_opt<double>(pj, "sw");
        a.sd = get_opt<double>(pj, "sd");
        a.g_obs_wet = get_opt_gamma(pj, "gamma_obs_wet");
        a.g_obs_dry = get_opt_gamma(pj, "gamma_obs_dry");
        a.g_obs_all = get_opt_gamma(pj, "gamma_obs_all");
        a.g_model_wet = get_opt_gamma(pj, "gamma_model_wet");
        a.g_model_dry = get_opt_gamma(pj, "gamma_model_dry");
        a.g_model_all = get_opt_gamma(pj, "gamma_model_all");
        a.wet_uses_unconditional = pj.value("wet_uses_unconditional", false);
        a.dry_uses_unconditional = pj.value("dry_uses_unconditional", false);
        p.amounts.periods.emplace(id, std::move(a));
    }
    if (j.contains("warnings"))
        p.warnings = j.at("warnings").get<std::vector<std::string>>();
    return p;
}

namespace {

json metrics_json(const stats::ComparisonMetrics& m) {
    json j;
    j["n"] = m.n;
    j["mean_error"] = m.mean_error;
    j["rmse"] = m.rmse;
    put_opt(j, "correlation", m.correlation);
    put_opt(j, "sd_ratio", m.sd_ratio);
    return j;
}

json ks_json(const stats::KsResult& k) {
    return json{{"d", k.d_statistic},
                {"p_value", k.p_value},
                {"n1", k.n1},
                {"n2", k.n2}};
}

json climatology_json(const eval::MonthlyClimatology& c) {
    json j;
    auto arr = [](const std::array<std::optional<double>, 12>& a) {
        json out = json::array();
        for (const auto& v : a)
            out.push_back(v ? json(*v) : json(nullptr));
        return out;
    };
    j["rain_days"] = arr(c.rain_days);
    j["total"] = arr(c.total);
    j["mean_per_rain_day"] = arr(c.mean_per_rain_day);
    j["max_daily"] = arr(c.max_daily);
    j["years_used"] = c.years_used;
    return j;
}

json annual_json(const std::vector<eval::AnnualSummary>& years) {
    json out = json::array();
    for (const auto& y : years) {
        json j;
        j["start_year"] = y.start_year;
        put_opt(j, "rain_days", y.rain_days);
        put_opt(j, "total", y.total);
        put_opt(j, "mean_per_rain_day", y.mean_per_rain_day);
        put_opt(j, "max_daily", y.max_daily);
        put_opt(j, "longest_dry_spell", y.longest_dry_spell);
        j["completeness"] = y.completeness;
        j["window_completeness"] = y.window_completeness;
        out.push_back(std::move(j));
    }
    return out;
}

json curves_json(const std::optional<seasonal::FittedCurves>& c) {
    if (!c) return nullptr;
    json j;
    j["order"] = c->order;
    if (c->order == 0) {
        j["all"] = c->all;
    } else {
        j["wet"] = c->wet;
        j["dry"] = c->dry;
    }
    return j;
}

json seasonal_rmse_json(const eval::SeasonalRmse& r) {
    json j;
    put_opt(j, "order0", r.order0);
    put_opt(j, "order1_wet", r.order1_wet);
    put_opt(j, "order1_dry", r.order1_dry);
    return j;
}

json detection_json(const eval::Detection2x2& d) {
    json j;
    j["hits"] = d.hits;
    j["misses"] = d.misses;
    j["false_alarms"] = d.false_alarms;
    j["correct_negatives"] = d.correct_negatives;
    put_opt(j, "pod", d.pod);
    put_opt(j, "far", d.far);
    put_opt(j, "hss", d.hss);
    return j;
}

json categorical_json(const eval::CategoricalDetection& d) {
    json j;
    json counts = json::array();
    for (const auto& row : d.counts) counts.push_back(row);
    j["counts"] = std::move(counts);
    json pod = json::array();
    for (const auto& p : d.pod) pod.push_back(p ? json(*p) : json(nullptr));
    j["pod"] = std::move(pod);
    put_opt(j, "hss", d.hss);
    j["n"] = d.n;
    return j;
}

}  // namespace

json eval_report_to_json(const eval::EvalReport& report) {
    json j;
    j["mask_start"] = to_iso(report.mask_start);
    j["mask_days"] = report.mask_days;
    j["usable_days"] = report.usable_days;
    json gauge;
    gauge["climatology"] = climatology_json(report.gauge_climatology);
    gauge["annual"] = annual_json(report.gauge_annual);
    gauge["curves"]["occurrence_order0"] = curves_json(report.gauge_occ0);
    gauge["curves"]["occurrence_order1"] = curves_json(report.gauge_occ1);
    gauge["curves"]["amount_order0"] = curves_json(report.gauge_amt0);
    gauge["curves"]["amount_order1"] = curves_json(report.gauge_amt1);
    j["gauge"] = std::move(gauge);

    json sources = json::array();
    for (const auto& s : report.sources) {
        json sj;
        sj["name"] = s.name;
        sj["climatology"] = climatology_json(s.climatology);
        sj["annual"] = annual_json(s.annual);
        json cm = json::object();
        for (const auto& [k, v] : s.climatology_metrics)
            cm[k] = metrics_json(v);
        sj["climatology_metrics"] = std::move(cm);
        json am = json::object();
        for (const auto& [k, v] : s.annual_metrics) am[k] = metrics_json(v);
        sj["annual_metrics"] = std::move(am);
        if (s.wet_spell_ks) sj["wet_spell_ks"] = ks_json(*s.wet_spell_ks);
        if (s.dry_spell_ks) sj["dry_spell_ks"] = ks_json(*s.dry_spell_ks);
        sj["occurrence_rmse"] = seasonal_rmse_json(s.occurrence_rmse);
        sj["amount_rmse"] = seasonal_rmse_json(s.amount_rmse);
        sj["curves"]["occurrence_order0"] = curves_json(s.occ0);
        sj["curves"]["occurrence_order1"] = curves_json(s.occ1);
        sj["curves"]["amount_order0"] = curves_json(s.amt0);
        sj["curves"]["amount_order1"] = curves_json(s.amt1);
        sj["detection"] = detection_json(s.detection);
        sj["categorical"] = categorical_json(s.categorical);
        if (!s.notes.empty()) sj["notes"] = s.notes;
        sources.push_back(std::move(sj));
    }
    j["sources"] = std::move(sources);
    if (!report.notes.empty()) j["notes"] = report.notes;
    return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace rainbc::io
