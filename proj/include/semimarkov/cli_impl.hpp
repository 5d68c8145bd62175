#pragma once

// Bodies of the CLI subcommands; split out so cli.hpp stays readable.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "evaluate.hpp"
#include "features.hpp"
#include "fit.hpp"
#include "io.hpp"
#include "model.hpp"
#include "simulate.hpp"

namespace semimarkov::cli_detail {

namespace fs = std::filesystem;

struct SeriesSet {
    std::vector<LabeledSeries> set;
    std::vector<std::string> label_names;  // non-empty when labels came in as strings
    std::uint64_t hash = 14695981039346656037ULL;
};

// Reads several series files as one data set. String labels get one joint
// mapping across all files (sorted unique names -> 1..K); mixing integer and
// string label columns across files is refused.
inline SeriesSet read_series_set(const std::vector<std::string>& paths) {
    SeriesSet out;
    std::vector<SeriesCsv> raw;
    raw.reserve(paths.size());
    bool any_named = false, any_int = false;
    for (const std::string& p : paths) {
        raw.push_back(read_series_csv(p));
        if (!raw.back().label_names.empty())
            any_named = true;
        else if (!raw.back().series.labels.empty())
            any_int = true;
    }
    if (any_named && any_int)
        throw std::runtime_error("series files mix integer and string label columns");
    if (any_named) {
        for (const SeriesCsv& r : raw)
            out.label_names.insert(out.label_names.end(), r.label_names.begin(),
                                   r.label_names.end());
        std::sort(out.label_names.begin(), out.label_names.end());
        out.label_names.erase(std::unique(out.label_names.begin(), out.label_names.end()),
                              out.label_names.end());
    }
    for (SeriesCsv& r : raw) {
        if (any_named && !r.series.labels.empty()) {
            for (int& l : r.series.labels) {
                const std::string& name = r.label_names[static_cast<std::size_t>(l - 1)];
                auto it = std::lower_bound(out.label_names.begin(), out.label_names.end(), name);
                l = static_cast<int>(it - out.label_names.begin()) + 1;
            }
        }
        out.hash = series_hash(r.series, out.hash);
        out.set.push_back(std::move(r.series));
    }
    return out;
}

struct FitConfig {
    ModelSpec spec;
    Priors priors;
    SamplerConfig sampler;
    int n_draws = 1000;
    std::uint64_t seed = 1;
    Json raw;
};

inline FitConfig load_fit_config(const std::string& path) {
    FitConfig c;
    c.raw = read_json_file(path);
    c.spec = c.raw.at("spec").get<ModelSpec>();
    c.priors = c.raw.contains("priors") ? c.raw.at("priors").get<Priors>()
                                        : default_priors(c.spec);
    if (c.raw.contains("sampler")) c.sampler = c.raw.at("sampler").get<SamplerConfig>();
    c.n_draws = c.raw.value("n_draws", 1000);
    c.seed = c.raw.value("seed", std::uint64_t{1});
    return c;
}

inline void cmd_simulate(const std::string& config_path, const std::string& out_dir,
                         std::uint64_t seed, std::size_t n_series, std::size_t length,
                         std::ostream& out) {
    ScenarioConfig gc;
    if (!config_path.empty()) gc = read_json_file(config_path).get<ScenarioConfig>();
    std::vector<Scenario> grid = scenario_grid(gc);
    fs::create_directories(out_dir);
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const Scenario& sc = grid[c];
        fs::path cell_dir = fs::path(out_dir) / sc.name;
        fs::create_directories(cell_dir);
        std::uint64_t cell_seed = derive_seed(seed, c);
        for (std::size_t s = 0; s < n_series; ++s) {
            LabeledSeries series =
                simulate_series(sc.spec, sc.params, length, derive_seed(cell_seed, s),
                                sc.name + "_s" + std::to_string(s));
            write_series_csv((cell_dir / ("series_" + std::to_string(s) + ".csv")).string(),
                             series);
        }
        write_json_file((cell_dir / "params.json").string(),
                        Json{{"spec", sc.spec}, {"params", sc.params}});
    }
    Json config{{"grid", gc}, {"n_series", n_series}, {"length", length}};
    write_json_file((fs::path(out_dir) / "manifest.json").string(),
                    make_manifest(config, seed));
    out << "wrote " << grid.size() << " cells x " << n_series << " series to " << out_dir
        << '\n';
}

inline void cmd_features(const std::string& in_path, const std::string& out_path,
                         const FeatureConfig& cfg, std::ostream& out, std::ostream& err) {
    RawAccel raw = read_accel_csv(in_path);
    FeatureSeries fsers = window_features(raw, cfg);
    for (const std::string& w : fsers.warnings) err << "warning: " << w << '\n';
    {
        std::ofstream os = open_out(out_path);
        write_features_csv(os, fsers);
    }
    std::uint64_t in_hash = fnv1a(raw.t.data(), raw.t.size() * sizeof(double));
    in_hash = fnv1a(raw.surge.data(), raw.surge.size() * sizeof(double), in_hash);
    in_hash = fnv1a(raw.sway.data(), raw.sway.size() * sizeof(double), in_hash);
    in_hash = fnv1a(raw.heave.data(), raw.heave.size() * sizeof(double), in_hash);
    Json config{{"features", cfg}, {"input_hash", hash_hex(in_hash)}};
    write_json_file(out_path + ".manifest.json", make_manifest(config, 0));
    out << "wrote " << fsers.x.rows() << " windows to " << out_path << '\n';
}

inline void cmd_fit(const std::vector<std::string>& series_paths, const std::string& config_path,
                    const std::string& out_path, std::string report_path, int draws_override,
                    bool seed_overridden, std::uint64_t seed_override, bool map_mode,
                    std::ostream& out) {
    SeriesSet data = read_series_set(series_paths);
    FitConfig cfg = load_fit_config(config_path);
    if (draws_override > 0) cfg.n_draws = draws_override;
    if (seed_overridden) cfg.seed = seed_override;
    if (report_path.empty()) report_path = out_path + ".report.txt";

    std::ofstream report = open_out(report_path);
    report << "model: " << to_string(cfg.spec.family) << ", " << cfg.spec.n_states
           << " states, ar order " << cfg.spec.ar_order << ", obs dim " << cfg.spec.obs_dim
           << '\n';
    report << "series:";
    for (const LabeledSeries& s : data.set) report << ' ' << s.id << " (T=" << s.x.rows() << ")";
    report << '\n';
    if (!data.label_names.empty()) {
        report << "label map:";
        for (std::size_t i = 0; i < data.label_names.size(); ++i)
            report << ' ' << (i + 1) << '=' << data.label_names[i];
        report << '\n';
    }

    if (map_mode) {
        std::vector<std::string> warnings;
        Params p = map_fit(data.set, cfg.priors, cfg.spec, &warnings);
        write_json_file(out_path, Json{{"spec", cfg.spec}, {"params", p}});
        report << "map fit\n";
        for (const std::string& w : warnings) report << "warning: " << w << '\n';
        out << "wrote MAP parameters to " << out_path << '\n';
    } else {
        PosteriorDraws pd =
            sample_posterior(data.set, cfg.priors, cfg.spec, cfg.n_draws, cfg.seed, cfg.sampler);
        write_json_file(out_path, Json(pd));
        report << "draws: " << pd.draws.size() << " (burn-in " << cfg.sampler.burn_in
               << ", thin " << cfg.sampler.thin << ", seed " << pd.seed << ")\n";
        report << "acceptance rates (after burn-in):\n";
        for (const auto& [block, rate] : pd.acceptance)
            report << "  " << block << ": " << fmt_double(rate) << '\n';
        for (const std::string& w : pd.warnings) report << "warning: " << w << '\n';
        out << "wrote " << pd.draws.size() << " posterior draws to " << out_path << '\n';
    }
    Json config{{"config", cfg.raw},
                {"series_hash", hash_hex(data.hash)},
                {"n_draws", cfg.n_draws},
                {"map", map_mode}};
    write_json_file(out_path + ".manifest.json", make_manifest(config, cfg.seed));
}

inline void cmd_decode(const std::string& series_path, const std::string& draws_path,
                       const std::string& params_path, const std::string& out_path,
                       int max_duration, std::ostream& out) {
    if (draws_path.empty() && params_path.empty())
        throw std::runtime_error("decode needs --draws or --params");
    SeriesCsv sc = read_series_csv(series_path);
    DecodeResult result;
    Json model_json;
    if (!draws_path.empty()) {
        model_json = read_json_file(draws_path);
        PosteriorDraws pd = model_json.get<PosteriorDraws>();
        std::vector<Params> ps(pd.draws.begin(), pd.draws.end());
        result = decode(sc.series, ps, pd.spec, DecodeMode::Both, max_duration).pooled;
    } else {
        model_json = read_json_file(params_path);
        ModelSpec spec = model_json.at("spec").get<ModelSpec>();
        Params p = model_json.at("params").get<Params>();
        result = decode_one(sc.series, p, spec, DecodeMode::Both, max_duration);
    }
    {
        std::ofstream os = open_out(out_path);
        write_decode_csv(os, result);
    }
    Json config{{"series_hash", hash_hex(series_hash(sc.series))},
                {"model_hash", hash_hex(config_hash(model_json))},
                {"max_duration", max_duration}};
    Json manifest = make_manifest(config, 0);
    manifest["loglik_evidence"] = result.loglik_evidence;
    write_json_file(out_path + ".manifest.json", manifest);
    out << "decoded " << sc.series.x.rows() << " observations to " << out_path
        << " (log evidence " << fmt_double(result.loglik_evidence) << ")\n";
}

inline void cmd_cv(const std::vector<std::string>& series_paths, const std::string& config_path,
                   const std::string& out_dir, const std::string& plot_path, int pred_draws,
                   std::size_t fold_limit, std::uint64_t seed, std::ostream& out) {
    SeriesSet data = read_series_set(series_paths);
    FitConfig cfg = load_fit_config(config_path);
    EvalReport rep =
        loocv(data.set, cfg.priors, cfg.spec, pred_draws, seed, cfg.sampler, fold_limit);
    fs::create_directories(out_dir);
    {
        std::ofstream os = open_out((fs::path(out_dir) / "cv.csv").string());
        write_cv_csv(os, rep);
    }
    {
        std::ofstream os = open_out((fs::path(out_dir) / "cv_summary.csv").string());
        write_cv_summary_csv(os, rep);
    }
    if (!plot_path.empty()) write_json_file(plot_path, Json(rep));
    Json config{{"config", cfg.raw},
                {"series_hash", hash_hex(data.hash)},
                {"pred_draws", pred_draws},
                {"fold_limit", fold_limit}};
    write_json_file((fs::path(out_dir) / "manifest.json").string(), make_manifest(config, seed));
    out << "cross-validated " << rep.folds.size() << " folds; median local accuracy "
        << fmt_double(rep.acc_local.median) << '\n';
}

inline void cmd_study(const std::string& scale_name, const std::string& out_path,
                      const std::string& grid_path, const std::string& plot_path,
                      std::uint64_t seed, std::ostream& out) {
    StudyScale scale = scale_name == "paper" ? paper_scale() : desk_scale();
    ScenarioConfig gc;
    if (!grid_path.empty()) gc = read_json_file(grid_path).get<ScenarioConfig>();
    std::vector<StudyRow> rows = run_simulation_study(scale, seed, gc);
    {
        std::ofstream os = open_out(out_path);
        write_study_csv(os, rows);
    }
    if (!plot_path.empty()) write_json_file(plot_path, Json(rows));
    Json config{{"grid", gc}, {"scale", scale}, {"scale_name", scale_name}};
    write_json_file(out_path + ".manifest.json", make_manifest(config, seed));
    out << "wrote " << rows.size() << " study rows to " << out_path << '\n';
}

}  // namespace semimarkov::cli_detail
