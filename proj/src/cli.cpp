#include "rainbc/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <thread>

#include "rainbc/csv.hpp"
#include "rainbc/params_io.hpp"
#include "rainbc/svg.hpp"

namespace rainbc::cli {

namespace fs = std::filesystem;
using io::json;

std::string expand_pattern(const std::string& pattern,
                           const std::string& station) {
    std::string out = pattern;
    const std::string key = "{station}";
    for (std::size_t pos = out.find(key); pos != std::string::npos;
         pos = out.find(key)) {
        out.replace(pos, key.size(), station);
    }
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct StationOutcome {
    std::vector<std::string> warnings;
    std::optional<std::string> error;
};

/// Runs fn(i) over stations, up to `jobs` at a time; messages are collected
/// and printed in station order so output stays deterministic.
int for_each_station(const RunConfig& cfg, int jobs,
                     const std::function<void(std::size_t, StationOutcome&)>& fn) {
    const std::size_t n = cfg.stations.size();
    std::vector<StationOutcome> outcomes(n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i, outcomes[i]);
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i, outcomes[i]);
                } catch (const std::exception& e) {
                    outcomes[i].error = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs && static_cast<std::size_t>(t) < n; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    int hard_errors = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& name = cfg.stations[i].name;
        for (const auto& w : outcomes[i].warnings)
            std::cerr << "warning [" << name << "]: " << w << "\n";
        if (outcomes[i].error) {
            std::cerr << "error [" << name << "]: " << *outcomes[i].error << "\n";
            ++hard_errors;
        }
    }
    return hard_errors == 0 ? 0 : 1;
}

DailySeries load_series(const std::string& path) {
    return io::parse_station_csv(io::read_file(path)).series;
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

json params_json_for(const RunConfig& cfg, bc::Method method,
                     const DailySeries& gauge, const DailySeries& model) {
    switch (method) {
        case bc::Method::Loci:
            return io::conv_params_to_json(
                bc::calibrate_loci(gauge, model, cfg.scheme, cfg.t_x));
        case bc::Method::Qm: {
            bc::ConvOptions opt;
            opt.min_fit_n = cfg.calibration.min_fit_n;
            opt.literal_eq4 = cfg.calibration.literal_eq4;
            return io::conv_params_to_json(
                bc::calibrate_qm(gauge, model, cfg.scheme, cfg.t_x, opt));
        }
        case bc::Method::McLoci:
        case bc::Method::McQm:
            return io::mc_params_to_json(bc::calibrate_mc(
                gauge, model, cfg.scheme, cfg.t_x, method, cfg.calibration));
    }
    throw std::logic_error("unreachable");
}

bc::ApplyResult apply_from_json(const RunConfig& cfg, bc::Method method,
                                const json& params, const DailySeries& model) {
    switch (method) {
        case bc::Method::Loci:
            return bc::apply_loci(model, io::conv_params_from_json(params),
                                  cfg.scheme);
        case bc::Method::Qm:
            return bc::apply_qm(model, io::conv_params_from_json(params),
                                cfg.scheme);
        case bc::Method::McLoci: {
            const auto p = io::mc_params_from_json(params);
            return bc::apply_mc_loci(model, p.thresholds, p.amounts, cfg.scheme,
                                     cfg.calibration);
        }
        case bc::Method::McQm: {
            const auto p = io::mc_params_from_json(params);
            return bc::apply_mc_qm(model, p.thresholds, p.amounts, cfg.scheme,
                                   cfg.calibration);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

int cmd_qc(const RunConfig& cfg, const std::string& out_dir, int jobs) {
    ensure_dir(out_dir);
    return for_each_station(cfg, jobs, [&](std::size_t i, StationOutcome& out) {
        const auto& st = cfg.stations[i];
        const auto parsed = io::parse_station_csv(io::read_file(st.gauge_csv),
                                                  /*lenient_negatives=*/true);
        auto result = qc::run_qc(parsed.series, cfg.qc);
        // parse-time Range flags join the report
        result.flags.insert(result.flags.begin(), parsed.flags.begin(),
                            parsed.flags.end());
        io::write_file(out_dir + "/" + st.name + ".clean.csv",
                       io::station_csv(result.series));
        io::write_file(out_dir + "/" + st.name + ".qcflags.csv",
                       io::qc_flags_csv(result.flags));
        if (!result.flags.empty())
            out.warnings.push_back(std::to_string(result.flags.size()) +
                                   " QC flag(s) raised");
    });
}

int cmd_calibrate(const RunConfig& cfg, bc::Method method,
                  const std::string& out_dir, int jobs) {
    ensure_dir(out_dir);
    return for_each_station(cfg, jobs, [&](std::size_t i, StationOutcome& out) {
        const auto& st = cfg.stations[i];
        const auto gauge = load_series(st.gauge_csv);
        const auto model = load_series(st.model_csv);
        const json j = params_json_for(cfg, method, gauge, model);
        io::write_file(out_dir + "/" + st.name + ".params.json",
                       io::dump_json(j));
        if (j.contains("warnings"))
            for (const auto& w : j.at("warnings"))
                out.warnings.push_back(w.get<std::string>());
    });
}

int cmd_correct(const RunConfig& cfg, bc::Method method,
                const std::string& params_dir, const std::string& out_dir,
                int jobs) {
    ensure_dir(out_dir);
    return for_each_station(cfg, jobs, [&](std::size_t i, StationOutcome& out) {
        const auto& st = cfg.stations[i];
        const auto model = load_series(st.model_csv);
        const json params = json::parse(
            io::read_file(params_dir + "/" + st.name + ".params.json"));
        const auto applied = apply_from_json(cfg, method, params, model);
        io::write_file(out_dir + "/" + st.name + ".corrected.csv",
                       io::station_csv(applied.series));
        out.warnings = applied.warnings;
    });
}

int cmd_crossval(const RunConfig& cfg, bc::Method method,
                 const std::string& out_dir, int jobs) {
    ensure_dir(out_dir);
    return for_each_station(cfg, jobs, [&](std::size_t i, StationOutcome& out) {
        const auto& st = cfg.stations[i];
        const auto gauge = load_series(st.gauge_csv);
        const auto model = load_series(st.model_csv);
        const auto result = cv::run_crossval(gauge, model, method, cfg.blocks,
                                             cfg.scheme, cfg.calibration, cfg.t_x);
        io::write_file(out_dir + "/" + st.name + ".crossval.csv",
                       io::station_csv(result.corrected));
        for (std::size_t f = 0; f < result.folds.size(); ++f) {
            const auto& fold = result.folds[f];
            json j;
            if (fold.conv) j = io::conv_params_to_json(*fold.conv);
            else if (fold.mc) j = io::mc_params_to_json(*fold.mc);
            else j = json::object();
            j["fold"] = f;
            j["block_start"] = to_iso(fold.block.start);
            j["block_end"] = to_iso(fold.block.end);
            j["failed"] = fold.failed;
            io::write_file(out_dir + "/" + st.name + ".fold" +
                               std::to_string(f) + ".params.json",
                           io::dump_json(j));
        }
        out.warnings = result.warnings;
    });
}

namespace {

plot::Series monthly_series(const std::string& name,
                            const std::array<std::optional<double>, 12>& vals) {
    plot::Series s{name, {}};
    for (std::size_t m = 0; m < 12; ++m)
        if (vals[m]) s.points.emplace_back(static_cast<double>(m + 1), *vals[m]);
    return s;
}

plot::Series annual_series(
    const std::string& name, const std::vector<eval::AnnualSummary>& years,
    const std::function<std::optional<double>(const eval::AnnualSummary&)>& get) {
    plot::Series s{name, {}};
    for (const auto& y : years)
        if (const auto v = get(y))
            s.points.emplace_back(static_cast<double>(y.start_year), *v);
    return s;
}

plot::Series ecdf_series(const std::string& name, std::vector<double> sample) {
    plot::Series s{name, {}};
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (i + 1 < sample.size() && sample[i + 1] == sample[i]) continue;
        s.points.emplace_back(sample[i], static_cast<double>(i + 1) / n);
    }
    return s;
}

plot::Series curve_series(const std::string& name,
                          const std::vector<double>& curve) {
    plot::Series s{name, {}};
    for (std::size_t d = 0; d < curve.size(); ++d)
        s.points.emplace_back(static_cast<double>(d + 1), curve[d]);
    return s;
}

void emit_station_plots(const eval::EvalReport& rep, const std::string& dir) {
    using plot::Series;
    struct MonthlyStat {
        const char* file;
        const char* title;
        std::array<std::optional<double>, 12> eval::MonthlyClimatology::*field;
    };
    const MonthlyStat monthly_stats[] = {
        {"climatology_rain_days", "Mean number of rain days",
         &eval::MonthlyClimatology::rain_days},
        {"climatology_total", "Mean total rainfall",
         &eval::MonthlyClimatology::total},
        {"climatology_mean_per_rain_day", "Mean rainfall per rain day",
         &eval::MonthlyClimatology::mean_per_rain_day},
        {"climatology_max_daily", "Mean maximum daily rainfall",
         &eval::MonthlyClimatology::max_daily},
    };
    for (const auto& st : monthly_stats) {
        std::vector<Series> series{
            monthly_series("gauge", rep.gauge_climatology.*(st.field))};
        for (const auto& s : rep.sources)
            series.push_back(monthly_series(s.name, s.climatology.*(st.field)));
        plot::write_line_chart(dir + "/" + st.file, st.title, "month", "value",
                               series);
    }

    struct AnnualStat {
        const char* file;
        const char* title;
        std::optional<double> eval::AnnualSummary::*field;
    };
    const AnnualStat annual_stats[] = {
        {"annual_rain_days", "Annual number of rain days",
         &eval::AnnualSummary::rain_days},
        {"annual_total", "Annual total rainfall", &eval::AnnualSummary::total},
        {"annual_dry_spell", "Longest dry spell (Oct-Mar)",
         &eval::AnnualSummary::longest_dry_spell},
    };
    for (const auto& st : annual_stats) {
        auto get = [&st](const eval::AnnualSummary& a) { return a.*(st.field); };
        std::vector<Series> series{annual_series("gauge", rep.gauge_annual, get)};
        for (const auto& s : rep.sources)
            series.push_back(annual_series(s.name, s.annual, get));
        plot::write_line_chart(dir + "/" + st.file, st.title, "year", "value",
                               series);
    }

    std::vector<Series> wet{ecdf_series("gauge", rep.gauge_spells.wet)};
    std::vector<Series> dry{ecdf_series("gauge", rep.gauge_spells.dry)};
    for (const auto& s : rep.sources) {
        wet.push_back(ecdf_series(s.name, s.spells.wet));
        dry.push_back(ecdf_series(s.name, s.spells.dry));
    }
    plot::write_line_chart(dir + "/spell_ecdf_wet",
                           "Wet spell lengths (Oct-Mar)", "days",
                           "cumulative frequency", wet, /*step=*/true);
    plot::write_line_chart(dir + "/spell_ecdf_dry",
                           "Dry spell lengths (Oct-Mar)", "days",
                           "cumulative frequency", dry, /*step=*/true);

    struct CurvePick {
        const char* file;
        const char* title;
        std::optional<seasonal::FittedCurves> eval::SourceEval::*src;
        const std::optional<seasonal::FittedCurves>* gauge;
    };
    const CurvePick picks[] = {
        {"seasonal_occurrence_order0", "Probability of rain by cycle day",
         &eval::SourceEval::occ0, &rep.gauge_occ0},
        {"seasonal_occurrence_order1",
         "Probability of rain by cycle day (conditional)",
         &eval::SourceEval::occ1, &rep.gauge_occ1},
        {"seasonal_amount_order0", "Mean rainfall per rain day by cycle day",
         &eval::SourceEval::amt0, &rep.gauge_amt0},
        {"seasonal_amount_order1",
         "Mean rainfall per rain day by cycle day (conditional)",
         &eval::SourceEval::amt1, &rep.gauge_amt1},
    };
    for (const auto& pick : picks) {
        std::vector<Series> series;
        auto add = [&](const std::string& name,
                       const std::optional<seasonal::FittedCurves>& c) {
            if (!c) return;
            if (c->order == 0) {
                series.push_back(curve_series(name, c->all));
            } else {
                series.push_back(curve_series(name + " (wet)", c->wet));
                series.push_back(curve_series(name + " (dry)", c->dry));
            }
        };
        add("gauge", *pick.gauge);
        for (const auto& s : rep.sources) add(s.name, s.*(pick.src));
        if (!series.empty())
            plot::write_line_chart(dir + "/" + pick.file, pick.title,
                                   "cycle day", "fitted value", series);
    }

    // fitted curves in their flat d,state,fitted form
    auto write_curves = [&](const std::string& name,
                            const std::optional<seasonal::FittedCurves>& c,
                            const char* kind) {
        if (!c) return;
        io::write_file(dir + "/curves_" + name + "_" + kind + ".csv",
                       seasonal::curves_csv(*c));
    };
    write_curves("gauge", rep.gauge_occ0, "occurrence_order0");
    write_curves("gauge", rep.gauge_occ1, "occurrence_order1");
    write_curves("gauge", rep.gauge_amt0, "amount_order0");
    write_curves("gauge", rep.gauge_amt1, "amount_order1");
    for (const auto& s : rep.sources) {
        write_curves(s.name, s.occ0, "occurrence_order0");
        write_curves(s.name, s.occ1, "occurrence_order1");
        write_curves(s.name, s.amt0, "amount_order0");
        write_curves(s.name, s.amt1, "amount_order1");
    }

    std::vector<std::string> det_groups{"POD", "FAR", "HSS"};
    std::vector<Series> det_bars;
    for (const auto& s : rep.sources) {
        Series bar{s.name, {}};
        bar.points.emplace_back(0.0, s.detection.pod.value_or(0.0));
        bar.points.emplace_back(1.0, s.detection.far.value_or(0.0));
        bar.points.emplace_back(2.0, s.detection.hss.value_or(0.0));
        det_bars.push_back(std::move(bar));
    }
    plot::write_bar_chart(dir + "/detection_occurrence",
                          "Rain day detection skill", det_groups, det_bars);

    std::vector<std::string> cat_groups{"dry", "light", "moderate", "heavy",
                                        "violent", "HSS"};
    std::vector<Series> cat_bars;
    for (const auto& s : rep.sources) {
        Series bar{s.name, {}};
        for (std::size_t c = 0; c < eval::kNCategories; ++c)
            bar.points.emplace_back(static_cast<double>(c),
                                    s.categorical.pod[c].value_or(0.0));
        bar.points.emplace_back(5.0, s.categorical.hss.value_or(0.0));
        cat_bars.push_back(std::move(bar));
    }
    plot::write_bar_chart(dir + "/detection_categorical",
                          "Rainfall category detection skill", cat_groups,
                          cat_bars);
}

void emit_calibration_scatter(const std::vector<json>& fold_params,
                              const std::string& base) {
    plot::Series p0{"p0", {}}, pw{"pw", {}}, pd{"pd", {}};
    for (const auto& j : fold_params) {
        if (!j.contains("periods")) continue;
        for (const auto& [id, pj] : j.at("periods").items()) {
            if (pj.contains("achieved_p0"))
                p0.points.emplace_back(pj.at("p0").get<double>(),
                                       pj.at("achieved_p0").get<double>());
            if (pj.contains("pw") && pj.contains("achieved_pw"))
                pw.points.emplace_back(pj.at("pw").get<double>(),
                                       pj.at("achieved_pw").get<double>());
            if (pj.contains("pd") && pj.contains("achieved_pd"))
                pd.points.emplace_back(pj.at("pd").get<double>(),
                                       pj.at("achieved_pd").get<double>());
        }
    }
    plot::write_scatter(base, "Calibrated versus target probabilities",
                        "target", "calibrated", {p0, pw, pd},
                        /*diagonal=*/true);
}

std::string metric_row(const std::string& station, const std::string& source,
                       const std::string& component, const std::string& stat,
                       const stats::ComparisonMetrics& m) {
    auto opt = [&](const std::optional<double>& v) {
        return v ? fmt(*v) : std::string();
    };
    return station + ',' + source + ',' + component + ',' + stat + ',' +
           std::to_string(m.n) + ',' + fmt(m.mean_error) + ',' + fmt(m.rmse) +
           ',' + opt(m.correlation) + ',' + opt(m.sd_ratio) + '\n';
}

}  // namespace

int cmd_evaluate(const RunConfig& cfg, const std::vector<SourceArg>& sources,
                 const std::vector<SourceArg>& mc_param_patterns,
                 const std::string& out_dir, int jobs) {
    ensure_dir(out_dir);
    const std::size_t n = cfg.stations.size();
    std::vector<eval::EvalReport> reports(n);

    const int rc = for_each_station(cfg, jobs, [&](std::size_t i,
                                                   StationOutcome& out) {
        const auto& st = cfg.stations[i];
        const auto gauge = load_series(st.gauge_csv);
        std::vector<std::pair<std::string, DailySeries>> inputs;
        inputs.emplace_back("raw", load_series(st.model_csv));
        for (const auto& src : sources)
            inputs.emplace_back(src.label,
                                load_series(expand_pattern(src.pattern, st.name)));
        auto report = eval::evaluate_all(gauge, inputs, cfg.scheme, cfg.evaluation);
        const std::string dir = out_dir + "/" + st.name;
        ensure_dir(dir);
        io::write_file(dir + "/report.json",
                       io::dump_json(io::eval_report_to_json(report)));
        emit_station_plots(report, dir);

        for (const auto& mp : mc_param_patterns) {
            std::vector<json> folds;
            const std::string pattern = expand_pattern(mp.pattern, st.name);
            for (int f = 0; f < 64; ++f) {
                std::string path = pattern;
                const std::string key = "{fold}";
                for (std::size_t pos = path.find(key); pos != std::string::npos;
                     pos = path.find(key))
                    path.replace(pos, key.size(), std::to_string(f));
                if (path == pattern && f > 0) break;  // no {fold} placeholder
                if (!fs::exists(path)) {
                    if (path == pattern) break;
                    continue;
                }
                folds.push_back(json::parse(io::read_file(path)));
                if (path == pattern) break;
            }
            if (!folds.empty())
                emit_calibration_scatter(
                    folds, dir + "/calibration_scatter_" + mp.label);
            else
                out.warnings.push_back("no parameter files matched " + pattern);
        }
        out.warnings.insert(out.warnings.end(), report.notes.begin(),
                            report.notes.end());
        reports[i] = std::move(report);
    });

    // combined flat tables across stations
    std::string metrics =
        "station,source,component,statistic,n,mean_error,rmse,correlation,"
        "sd_ratio\n";
    std::string spells = "station,source,spell,d,p_value,n_gauge,n_source\n";
    std::string curves =
        "station,source,response,order,state,rmse_curve\n";
    std::string detection =
        "station,source,pod,far,hss,cat_pod_dry,cat_pod_light,cat_pod_moderate,"
        "cat_pod_heavy,cat_pod_violent,cat_hss\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto& st = cfg.stations[i].name;
        for (const auto& s : reports[i].sources) {
            for (const auto& [k, m] : s.climatology_metrics)
                metrics += metric_row(st, s.name, "climatology", k, m);
            for (const auto& [k, m] : s.annual_metrics)
                metrics += metric_row(st, s.name, "annual", k, m);
            auto spell_row = [&](const char* which,
                                 const std::optional<stats::KsResult>& ks) {
                if (!ks) return;
                spells += st + ',' + s.name + ',' + which + ',' +
                          fmt(ks->d_statistic) + ',' + fmt(ks->p_value) + ',' +
                          std::to_string(ks->n1) + ',' + std::to_string(ks->n2) +
                          '\n';
            };
            spell_row("wet", s.wet_spell_ks);
            spell_row("dry", s.dry_spell_ks);
            auto curve_row = [&](const char* response, int order,
                                 const char* state,
                                 const std::optional<double>& v) {
                if (!v) return;
                curves += st + ',' + s.name + ',' + response + ',' +
                          std::to_string(order) + ',' + state + ',' + fmt(*v) +
                          '\n';
            };
            curve_row("occurrence", 0, "all", s.occurrence_rmse.order0);
            curve_row("occurrence", 1, "W", s.occurrence_rmse.order1_wet);
            curve_row("occurrence", 1, "D", s.occurrence_rmse.order1_dry);
            curve_row("amount", 0, "all", s.amount_rmse.order0);
            curve_row("amount", 1, "W", s.amount_rmse.order1_wet);
            curve_row("amount", 1, "D", s.amount_rmse.order1_dry);
            auto opt = [&](const std::optional<double>& v) {
                return v ? fmt(*v) : std::string();
            };
            detection += st + ',' + s.name + ',' + opt(s.detection.pod) + ',' +
                         opt(s.detection.far) + ',' + opt(s.detection.hss);
            for (std::size_t c = 0; c < eval::kNCategories; ++c)
                detection += ',' + opt(s.categorical.pod[c]);
            detection += ',' + opt(s.categorical.hss) + '\n';
        }
    }
    io::write_file(out_dir + "/metrics.csv", metrics);
    io::write_file(out_dir + "/spells.csv", spells);
    io::write_file(out_dir + "/seasonal_rmse.csv", curves);
    io::write_file(out_dir + "/detection.csv", detection);
    return rc;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
    ensure_dir(out_dir);
    auto run = synth_run_from_json(json::parse(io::read_file(spec_path)));
    for (const auto& [name, seed] : run.stations) {
        synth::SynthSpec spec = run.spec;
        spec.seed = seed_override ? *seed_override + seed : seed;
        const auto pair = synth::generate(spec);
        io::write_file(out_dir + "/" + name + ".truth.csv",
                       io::station_csv(pair.truth));
        io::write_file(out_dir + "/" + name + ".model.csv",
                       io::station_csv(pair.model));
    }
    return 0;
}

}  // namespace rainbc::cli
