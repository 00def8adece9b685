// qeilab command-line driver.
//
//   qeilab <analysis> --config <path> [--seed N] [--out DIR] [--plots]
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 4 a verified inequality failed to hold.

#include "qeilab/analyses.hpp"
#include "qeilab/quadrature.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <iostream>
#include <string>

namespace {

void error_record(const std::string& type, const std::string& what) {
    nlohmann::ordered_json j;
    j["error"] = {{"type", type}, {"what", what}};
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qeilab -- numerical laboratory for averaged energy inequalities, "
        "mass-tower nuclearity, and splitting geometry"};

    std::string analysis;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool plots = false;

    app.add_option("analysis", analysis,
                   "one of: tower-report qei-report negstate-verify testfn-build distal-demo")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file")->required();
    CLI::Option* seed_opt = app.add_option("--seed", seed, "override the configured RNG seed");
    CLI::Option* out_opt = app.add_option("--out", out_dir, "override the output directory");
    CLI::Option* plots_flag = app.add_flag("--plots", plots, "emit SVG plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        qeilab::cli::RunConfig cfg = qeilab::cli::parse_config(config_path);
        const qeilab::cli::Analysis requested = qeilab::cli::parse_analysis(analysis);
        if (cfg.analysis_specified && cfg.analysis != requested)
            throw qeilab::cli::ConfigError("config: file requests analysis '" +
                                           qeilab::cli::analysis_name(cfg.analysis) +
                                           "' but the command line names '" + analysis + "'");
        cfg.analysis = requested;
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (out_opt->count() > 0) cfg.output.dir = out_dir;
        if (plots_flag->count() > 0) cfg.output.plots = true;

        const qeilab::cli::RunArtifacts art = qeilab::cli::run(cfg);

        nlohmann::ordered_json receipt;
        receipt["analysis"] = analysis;
        receipt["ok"] = art.theorem_ok;
        receipt["files"] = art.files_written;
        std::cout << receipt.dump(2) << "\n";
        return art.theorem_ok ? 0 : 4;
    } catch (const qeilab::cli::ConfigError& e) {
        error_record("config", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        error_record("config", e.what());
        return 2;
    } catch (const qeilab::NumericError& e) {
        error_record("numeric", e.what());
        return 3;
    } catch (const std::exception& e) {
        error_record("runtime", e.what());
        return 3;
    }
}
