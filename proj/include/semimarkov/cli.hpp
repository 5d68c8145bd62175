#pragma once

// Command-line front end. run_cli is the whole program minus main(), so the
// test suite can drive subcommands in-process. Exit codes: 0 success, 1
// runtime failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_impl.hpp"

namespace semimarkov {

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"Hidden Markov / hidden semi-Markov toolkit for labeled multivariate "
                 "time series with autoregressive Gaussian emissions"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate series from a two-state scenario grid");
    std::string sim_config, sim_out;
    std::uint64_t sim_seed = 1;
    std::size_t sim_n = 3, sim_len = 1000;
    sim->add_option("--config", sim_config, "Scenario grid JSON (defaults to the full grid)");
    sim->add_option("--out", sim_out, "Output directory")->required();
    sim->add_option("--seed", sim_seed, "Master seed (default 1)");
    sim->add_option("--n-series", sim_n, "Series per cell (default 3)");
    sim->add_option("--length", sim_len, "Observations per series (default 1000)");

    // features
    auto* feat = app.add_subcommand("features", "Summarize raw tri-axial accelerometer data");
    std::string feat_in, feat_out;
    FeatureConfig feat_cfg;
    feat->add_option("--input", feat_in, "Raw CSV: t,surge,sway,heave[,label]")->required();
    feat->add_option("--out", feat_out, "Feature CSV output path")->required();
    feat->add_option("--rate", feat_cfg.rate, "Samples per second / per window (default 40)");
    feat->add_option("--static-window", feat_cfg.static_window,
                     "Running-mean width for the static component (default 40)");
    feat->add_option("--floor", feat_cfg.floor, "Clamp before log features (default 1e-8)");

    // fit
    auto* fit = app.add_subcommand("fit", "Sample the posterior (or find the MAP) from labeled series");
    std::vector<std::string> fit_series;
    std::string fit_config, fit_out, fit_report;
    int fit_draws = 0;
    std::uint64_t fit_seed = 0;
    bool fit_map = false;
    fit->add_option("--series", fit_series, "Labeled series CSV files")->required()->expected(-1);
    fit->add_option("--config", fit_config, "JSON: {spec, priors?, sampler?, n_draws?, seed?}")
        ->required();
    fit->add_option("--out", fit_out, "Output JSON (posterior draws, or MAP with --map)")
        ->required();
    fit->add_option("--report", fit_report, "Diagnostics text path (default <out>.report.txt)");
    fit->add_option("--draws", fit_draws, "Override n_draws from the config");
    auto* fit_seed_opt = fit->add_option("--seed", fit_seed, "Override seed from the config");
    fit->add_flag("--map", fit_map, "Posterior mode instead of sampling");

    // decode
    auto* dec = app.add_subcommand("decode", "State probabilities and paths for a series");
    std::string dec_series, dec_draws, dec_params, dec_out;
    int dec_maxdur = 0;
    dec->add_option("--series", dec_series, "Series CSV")->required();
    auto* dec_draws_opt = dec->add_option("--draws", dec_draws, "Posterior draws JSON from fit");
    auto* dec_params_opt =
        dec->add_option("--params", dec_params, "Single {spec, params} JSON (MAP or simulator)");
    dec_draws_opt->excludes(dec_params_opt);
    dec->add_option("--out", dec_out, "Decoded CSV output path")->required();
    dec->add_option("--max-duration", dec_maxdur,
                    "Sojourn truncation for decoding (default 0 = automatic)");

    // cv
    auto* cv = app.add_subcommand("cv", "Leave-one-series-out cross-validation");
    std::vector<std::string> cv_series;
    std::string cv_config, cv_out, cv_plot;
    int cv_pred_draws = 30;
    std::size_t cv_fold_limit = 0;
    std::uint64_t cv_seed = 1;
    cv->add_option("--series", cv_series, "Labeled series CSV files (>= 2)")
        ->required()
        ->expected(-1);
    cv->add_option("--config", cv_config, "Same JSON schema as fit")->required();
    cv->add_option("--out", cv_out, "Output directory")->required();
    cv->add_option("--pred-draws", cv_pred_draws, "Posterior draws per fold (default 30)");
    cv->add_option("--fold-limit", cv_fold_limit, "Evaluate only this many folds (0 = all)");
    cv->add_option("--seed", cv_seed, "Master seed (default 1)");
    cv->add_option("--plot", cv_plot, "Optional JSON report for plotting");

    // study
    auto* study = app.add_subcommand("study", "Simulation study over the scenario grid");
    std::string study_scale = "desk", study_out, study_grid, study_plot;
    std::uint64_t study_seed = 1;
    study->add_option("--scale", study_scale, "desk or paper (default desk)")
        ->check(CLI::IsMember({"desk", "paper"}));
    study->add_option("--out", study_out, "Study table CSV path")->required();
    study->add_option("--grid", study_grid, "Scenario grid JSON (defaults to the full grid)");
    study->add_option("--seed", study_seed, "Master seed (default 1)");
    study->add_option("--plot", study_plot, "Optional JSON series for plotting");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("semimarkov");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed())
            cli_detail::cmd_simulate(sim_config, sim_out, sim_seed, sim_n, sim_len, out);
        else if (feat->parsed())
            cli_detail::cmd_features(feat_in, feat_out, feat_cfg, out, err);
        else if (fit->parsed())
            cli_detail::cmd_fit(fit_series, fit_config, fit_out, fit_report, fit_draws,
                                fit_seed_opt->count() > 0, fit_seed, fit_map, out);
        else if (dec->parsed())
            cli_detail::cmd_decode(dec_series, dec_draws, dec_params, dec_out, dec_maxdur, out);
        else if (cv->parsed())
            cli_detail::cmd_cv(cv_series, cv_config, cv_out, cv_plot, cv_pred_draws,
                               cv_fold_limit, cv_seed, out);
        else if (study->parsed())
            cli_detail::cmd_study(study_scale, study_out, study_grid, study_plot, study_seed,
                                  out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace semimarkov
