#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "decode.hpp"
#include "fit.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "simulate.hpp"

namespace semimarkov {

inline double accuracy(const std::vector<int>& path, const std::vector<int>& labels) {
    if (path.size() != labels.size() || path.empty())
        throw std::invalid_argument("accuracy: length mismatch or empty input");
    std::size_t hits = 0;
    for (std::size_t t = 0; t < path.size(); ++t)
        if (path[t] == labels[t]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(path.size());
}

// -sum_t log p_t(true label), probabilities floored at 1e-12.
inline double cross_entropy_total(const Matrix& probs, const std::vector<int>& labels) {
    if (probs.rows() != labels.size() || probs.rows() == 0)
        throw std::invalid_argument("cross_entropy: length mismatch or empty input");
    double ce = 0.0;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (labels[t] < 1 || static_cast<std::size_t>(labels[t]) > probs.cols())
            throw std::invalid_argument("cross_entropy: label outside 1..n_states");
        ce -= std::log(std::max(probs(t, static_cast<std::size_t>(labels[t] - 1)), 1e-12));
    }
    return ce;
}

inline double cross_entropy_mean(const Matrix& probs, const std::vector<int>& labels) {
    return cross_entropy_total(probs, labels) / static_cast<double>(labels.size());
}

struct MetricSummary {
    double median = 0.0, q1 = 0.0, q3 = 0.0;
};

inline MetricSummary summarize(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("summarize: empty sample");
    std::sort(v.begin(), v.end());
    return {median_sorted(v), quantile_sorted(v, 0.25), quantile_sorted(v, 0.75)};
}

inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 14695981039346656037ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t series_hash(const LabeledSeries& s, std::uint64_t h = 14695981039346656037ULL) {
    h = fnv1a(s.id.data(), s.id.size(), h);
    h = fnv1a(s.x.data().data(), s.x.data().size() * sizeof(double), h);
    if (!s.labels.empty()) h = fnv1a(s.labels.data(), s.labels.size() * sizeof(int), h);
    return h;
}

struct FoldReport {
    std::string held_out_id;
    std::uint64_t train_hash = 0;  // hash of the training series actually fitted
    std::vector<double> acc_local, acc_global, ce_total, ce_mean;  // one entry per draw
    MetricSummary acc_local_s, acc_global_s, ce_total_s, ce_mean_s;
};

struct EvalReport {
    std::vector<FoldReport> folds;
    MetricSummary acc_local, acc_global, ce_total, ce_mean;  // pooled over folds x draws
};

namespace detail {

inline void pool_metrics(EvalReport& r) {
    std::vector<double> al, ag, ct, cm;
    for (const FoldReport& f : r.folds) {
        al.insert(al.end(), f.acc_local.begin(), f.acc_local.end());
        ag.insert(ag.end(), f.acc_global.begin(), f.acc_global.end());
        ct.insert(ct.end(), f.ce_total.begin(), f.ce_total.end());
        cm.insert(cm.end(), f.ce_mean.begin(), f.ce_mean.end());
    }
    r.acc_local = summarize(al);
    r.acc_global = summarize(ag);
    r.ce_total = summarize(ct);
    r.ce_mean = summarize(cm);
}

}  // namespace detail

// Leave-one-series-out cross-validation: each fold refits the posterior on
// the remaining series, decodes the held-out one under every posterior draw,
// and scores both decoders per draw. fold_limit > 0 evaluates only that many
// folds, chosen by a seeded shuffle (the desk-scale setting).
inline EvalReport loocv(const std::vector<LabeledSeries>& set, const Priors& pr,
                        const ModelSpec& spec, int n_pred_draws, std::uint64_t seed,
                        const SamplerConfig& cfg = {}, std::size_t fold_limit = 0,
                        int max_duration = 0) {
    if (set.size() < 2)
        throw std::invalid_argument("loocv: needs at least two series");
    for (const LabeledSeries& s : set)
        if (s.labels.empty())
            throw std::invalid_argument("loocv: all series must be labeled");

    std::vector<std::size_t> fold_ids(set.size());
    std::iota(fold_ids.begin(), fold_ids.end(), 0);
    if (fold_limit > 0 && fold_limit < set.size()) {
        std::mt19937_64 shuffler(derive_seed(seed, 0xf01d5));
        std::shuffle(fold_ids.begin(), fold_ids.end(), shuffler);
        fold_ids.resize(fold_limit);
        std::sort(fold_ids.begin(), fold_ids.end());
    }

    EvalReport report;
    report.folds.resize(fold_ids.size());
    parallel_for(fold_ids.size(), [&](std::size_t fi) {
        std::size_t k = fold_ids[fi];
        std::vector<LabeledSeries> train;
        train.reserve(set.size() - 1);
        std::uint64_t h = 14695981039346656037ULL;
        for (std::size_t i = 0; i < set.size(); ++i)
            if (i != k) {
                train.push_back(set[i]);
                h = series_hash(set[i], h);
            }
        FoldReport& fr = report.folds[fi];
        fr.held_out_id = set[k].id;
        fr.train_hash = h;

        PosteriorDraws post =
            sample_posterior(train, pr, spec, n_pred_draws, derive_seed(seed, k), cfg);
        for (const Params& p : post.draws) {
            DecodeResult d = decode_one(set[k], p, spec, DecodeMode::Both, max_duration);
            fr.acc_local.push_back(accuracy(d.local_path, set[k].labels));
            fr.acc_global.push_back(accuracy(d.global_path, set[k].labels));
            fr.ce_total.push_back(cross_entropy_total(d.local_probs, set[k].labels));
            fr.ce_mean.push_back(cross_entropy_mean(d.local_probs, set[k].labels));
        }
        fr.acc_local_s = summarize(fr.acc_local);
        fr.acc_global_s = summarize(fr.acc_global);
        fr.ce_total_s = summarize(fr.ce_total);
        fr.ce_mean_s = summarize(fr.ce_mean);
    });
    detail::pool_metrics(report);
    return report;
}

// Posterior-predictive check: per draw, decode locally, sample a state for
// every time point from the local occupancy probabilities, generate a new
// observation from that state's emission law (conditioning on the observed
// lags), and report the per-dimension RMSE against the observed series.
struct RmseReport {
    Matrix per_draw;  // n_draws x obs_dim
    std::vector<MetricSummary> per_dim;
};

inline RmseReport rmse_posterior_predictive(const LabeledSeries& s,
                                            const std::vector<Params>& draws,
                                            const ModelSpec& spec, std::uint64_t seed,
                                            int max_duration = 0) {
    if (draws.empty()) throw std::invalid_argument("rmse_posterior_predictive: empty draw set");
    std::size_t T = s.x.rows();
    std::size_t dim = static_cast<std::size_t>(spec.obs_dim);
    std::size_t ar = static_cast<std::size_t>(spec.ar_order);
    RmseReport out;
    out.per_draw = Matrix(draws.size(), dim, 0.0);

    for (std::size_t di = 0; di < draws.size(); ++di) {
        const Params& p = draws[di];
        DecodeResult dec = decode_one(s, p, spec, DecodeMode::Local, max_duration);
        Rng rng(derive_seed(seed, di));
        std::vector<double> sq(dim, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            int st = rng.categorical(dec.local_probs.row_vec(t));
            const StateEmission& e = p.emissions[static_cast<std::size_t>(st)];
            for (std::size_t d = 0; d < dim; ++d) {
                double xhat;
                if (t < ar) {
                    xhat = detail::initial_emission(e, d, rng);
                } else {
                    double mu = e.mean[d];
                    for (std::size_t l = 0; l < ar; ++l) mu += e.ar(l, d) * s.x(t - 1 - l, d);
                    xhat = rng.normal(mu, std::sqrt(e.var[d]));
                }
                sq[d] += sqr(xhat - s.x(t, d));
            }
        }
        for (std::size_t d = 0; d < dim; ++d)
            out.per_draw(di, d) = std::sqrt(sq[d] / static_cast<double>(T));
    }
    out.per_dim.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<double> col(draws.size());
        for (std::size_t di = 0; di < draws.size(); ++di) col[di] = out.per_draw(di, d);
        out.per_dim[d] = summarize(col);
    }
    return out;
}

// ----------------------------------------------------------------------------
// Simulation study: simulate each grid cell, cross-validate under both the
// semi-Markov model and its Markov competitor, and tabulate the pooled
// decoding metrics per cell and model.
// ----------------------------------------------------------------------------

struct StudyScale {
    std::size_t n_series = 3;
    std::size_t series_length = 1000;
    std::size_t fold_limit = 2;  // 0 = all folds
    int n_pred_draws = 10;
    SamplerConfig sampler{};
};

inline StudyScale desk_scale() { return {}; }

inline StudyScale paper_scale() {
    StudyScale s;
    s.n_series = 10;
    s.series_length = 3000;
    s.fold_limit = 0;
    s.n_pred_draws = 30;
    return s;
}

struct StudyRow {
    std::string cell;
    std::string overlap;
    double sojourn_avg = 0.0, sojourn_diff = 0.0, k1 = 0.0, k2 = 0.0;
    std::string model;  // hmm | hsmm
    MetricSummary acc_fb, acc_viterbi, ce_mean;
};

inline std::vector<StudyRow> run_simulation_study(const StudyScale& scale,
                                                  std::uint64_t master_seed,
                                                  const ScenarioConfig& grid_cfg = {}) {
    std::vector<Scenario> grid = scenario_grid(grid_cfg);
    std::vector<StudyRow> rows(grid.size() * 2);

    parallel_for(grid.size(), [&](std::size_t c) {
        const Scenario& sc = grid[c];
        std::uint64_t cell_seed = derive_seed(master_seed, c);
        std::vector<LabeledSeries> data;
        data.reserve(scale.n_series);
        for (std::size_t s = 0; s < scale.n_series; ++s)
            data.push_back(simulate_series(sc.spec, sc.params, scale.series_length,
                                           derive_seed(cell_seed, s),
                                           sc.name + "_s" + std::to_string(s)));

        ModelSpec hmm_spec;
        hmm_spec.family = ModelFamily::Hmm;
        hmm_spec.n_states = sc.spec.n_states;
        hmm_spec.obs_dim = sc.spec.obs_dim;
        hmm_spec.ar_order = sc.spec.ar_order;

        const ModelSpec* specs[2] = {&sc.spec, &hmm_spec};
        const char* names[2] = {"hsmm", "hmm"};
        for (int mi = 0; mi < 2; ++mi) {
            EvalReport rep = loocv(data, default_priors(*specs[mi]), *specs[mi],
                                   scale.n_pred_draws, derive_seed(cell_seed, 1000 + mi),
                                   scale.sampler, scale.fold_limit);
            StudyRow& row = rows[c * 2 + mi];
            row.cell = sc.name;
            row.overlap = sc.overlap;
            row.sojourn_avg = sc.sojourn_avg;
            row.sojourn_diff = sc.sojourn_diff;
            row.k1 = sc.k1;
            row.k2 = sc.k2;
            row.model = names[mi];
            row.acc_fb = rep.acc_local;
            row.acc_viterbi = rep.acc_global;
            row.ce_mean = rep.ce_mean;
        }
    });
    return rows;
}

}  // namespace semimarkov
