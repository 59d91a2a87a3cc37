#include <CLI11.hpp>
#include <iostream>

#include "rainbc/cli.hpp"
#include "rainbc/params_io.hpp"

namespace {

rainbc::bc::Method parse_method(const std::string& name) {
    const auto m = rainbc::bc::method_from_name(name);
    if (!m) throw CLI::ValidationError("--method", "unknown method " + name);
    return *m;
}

std::vector<rainbc::cli::SourceArg> parse_sources(
    const std::vector<std::string>& raw, const char* flag) {
    std::vector<rainbc::cli::SourceArg> out;
    for (const auto& s : raw) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CLI::ValidationError(flag, "expected LABEL=PATTERN, got " + s);
        out.push_back({s.substr(0, eq), s.substr(eq + 1)});
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "rainbc - daily rainfall bias correction (LOCI, QM and their "
        "Markov-chain variants)"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir;
    std::string method_name = "loci";
    std::string params_dir;
    std::string spec_path;
    std::vector<std::string> source_args;
    std::vector<std::string> mc_param_args;
    int jobs = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool print_default = false;

    app.add_flag("--print-default-config", print_default,
                 "Print the fully defaulted config JSON and exit");

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        auto* opt = cmd->add_option("--config", config_path, "Run config JSON");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--jobs", jobs, "Concurrent stations (default: config)");
    };

    auto* qc = app.add_subcommand("qc", "Quality-control station CSVs");
    add_common(qc);

    auto* calibrate =
        app.add_subcommand("calibrate", "Full-period calibration to JSON");
    add_common(calibrate);
    calibrate->add_option("--method", method_name, "loci|qm|mc-loci|mc-qm")
        ->required();

    auto* correct =
        app.add_subcommand("correct", "Apply stored parameters to model CSVs");
    add_common(correct);
    correct->add_option("--method", method_name)->required();
    correct->add_option("--params", params_dir, "Directory with params JSONs")
        ->required();

    auto* crossval =
        app.add_subcommand("crossval", "Block cross-validated correction");
    add_common(crossval);
    crossval->add_option("--method", method_name)->required();

    auto* evaluate = app.add_subcommand(
        "evaluate", "Full evaluation battery against the gauge data");
    add_common(evaluate);
    evaluate->add_option(
        "--source", source_args,
        "LABEL=PATTERN series to evaluate; {station} expands per station");
    evaluate->add_option(
        "--mc-params", mc_param_args,
        "LABEL=PATTERN of MC parameter JSONs for the calibration scatter; "
        "{station} and {fold} expand");

    auto* synth =
        app.add_subcommand("synth", "Generate synthetic truth/model CSV pairs");
    synth->add_option("--spec", spec_path, "Synthetic spec JSON")->required();
    synth->add_option("--out", out_dir, "Output directory");
    synth->add_option("--seed", seed, "Seed offset added to station seeds")
        ->each([&](const std::string&) { seed_set = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_default) {
            std::cout << rainbc::io::dump_json(
                rainbc::config_to_json(rainbc::RunConfig{}));
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cout << app.help();
            return 0;
        }
        if (synth->parsed()) {
            return rainbc::cli::cmd_synth(
                spec_path, out_dir.empty() ? "." : out_dir,
                seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
        }
        const auto cfg = rainbc::load_config(config_path);
        const int effective_jobs = jobs > 0 ? jobs : cfg.jobs;
        const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
        if (qc->parsed()) return rainbc::cli::cmd_qc(cfg, dir, effective_jobs);
        if (calibrate->parsed())
            return rainbc::cli::cmd_calibrate(cfg, parse_method(method_name),
                                              dir, effective_jobs);
        if (correct->parsed())
            return rainbc::cli::cmd_correct(cfg, parse_method(method_name),
                                            params_dir, dir, effective_jobs);
        if (crossval->parsed())
            return rainbc::cli::cmd_crossval(cfg, parse_method(method_name),
                                             dir, effective_jobs);
        if (evaluate->parsed())
            return rainbc::cli::cmd_evaluate(
                cfg, parse_sources(source_args, "--source"),
                parse_sources(mc_param_args, "--mc-params"), dir,
                effective_jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
