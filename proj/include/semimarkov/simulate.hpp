#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace semimarkov {

namespace detail {

// First ar_order observations of a run of simulation: drawn from the state's
// stationary marginal when the order is 1 and the coefficient is stable,
// otherwise from N(mean, var) as a neutral fallback.
inline double initial_emission(const StateEmission& e, std::size_t d, Rng& rng) {
    double mu = e.mean[d];
    double sd = std::sqrt(e.var[d]);
    if (e.ar.rows() == 1) {
        double w = e.ar(0, d);
        if (std::abs(w) < 1.0) {
            mu = e.mean[d] / (1.0 - w);
            sd = std::sqrt(e.var[d] / (1.0 - w * w));
        }
    }
    return rng.normal(mu, sd);
}

}  // namespace detail

// Draws a labeled series of length T. For semi-Markov models the state chain
// alternates via the conditional transition matrix with sojourns from each
// state's duration law; the final run is cut off at T. Markov models step
// the chain one transition at a time, which realizes the same geometric runs.
inline LabeledSeries simulate_series(const ModelSpec& spec, const Params& p, std::size_t T,
                                     std::uint64_t seed, std::string id = "sim") {
    validate_params(p, spec);
    if (T == 0) throw std::invalid_argument("simulate_series: T must be >= 1");
    Rng rng(seed);
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    std::size_t dim = static_cast<std::size_t>(spec.obs_dim);
    std::size_t ar = static_cast<std::size_t>(spec.ar_order);

    LabeledSeries s;
    s.id = std::move(id);
    s.labels.reserve(T);

    if (spec.family == ModelFamily::Hmm) {
        int c = rng.categorical(p.delta);
        s.labels.push_back(c + 1);
        for (std::size_t t = 1; t < T; ++t) {
            c = rng.categorical(p.tpm.row_vec(static_cast<std::size_t>(c)));
            s.labels.push_back(c + 1);
        }
    } else if (J == 1) {
        s.labels.assign(T, 1);
    } else {
        int c = rng.categorical(p.delta);
        while (s.labels.size() < T) {
            const SojournDist& d = p.sojourns[static_cast<std::size_t>(c)];
            long long u = d.family == SojournFamily::Geometric
                              ? rng.geometric_trials(d.stay)
                              : 1 + rng.negbinomial(d.m, d.k);
            for (long long i = 0; i < u && s.labels.size() < T; ++i) s.labels.push_back(c + 1);
            if (s.labels.size() < T)
                c = rng.categorical(p.tpm.row_vec(static_cast<std::size_t>(c)));
        }
    }

    s.x = Matrix(T, dim);
    for (std::size_t t = 0; t < T; ++t) {
        const StateEmission& e = p.emissions[static_cast<std::size_t>(s.labels[t] - 1)];
        for (std::size_t d = 0; d < dim; ++d) {
            if (t < ar) {
                s.x(t, d) = detail::initial_emission(e, d, rng);
            } else {
                double mu = e.mean[d];
                for (std::size_t l = 0; l < ar; ++l) mu += e.ar(l, d) * s.x(t - 1 - l, d);
                s.x(t, d) = rng.normal(mu, std::sqrt(e.var[d]));
            }
        }
    }
    return s;
}

// ----------------------------------------------------------------------------
// Two-state simulation-study grid: emission overlap x mean sojourn x sojourn
// difference x dispersion pair. State 1 emits N(0,1); state 2 N(mu2,1) with
// mu2 in {0.3, 1, 3} for high/medium/low overlap. Sojourn means are
// avg +- diff/2 and each dispersion pair (k1, k2) is either "one geometric"
// (k1 = 1) or "none geometric".
// ----------------------------------------------------------------------------

struct Scenario {
    std::string name;
    std::string overlap;  // high | medium | low
    double mu2 = 0.0;
    double sojourn_avg = 0.0;
    double sojourn_diff = 0.0;
    double m1 = 0.0, m2 = 0.0, k1 = 0.0, k2 = 0.0;
    ModelSpec spec;
    Params params;
};

struct ScenarioConfig {
    std::vector<std::string> overlaps = {"high", "medium", "low"};
    std::vector<double> avgs = {90.0, 40.0, 20.0};
    std::vector<double> diffs = {3.0, 15.0, 30.0};
    std::vector<std::pair<double, double>> dispersions = {
        {1.0, 10.0}, {1.0, 30.0}, {30.0, 50.0}, {80.0, 100.0}};
};

inline double overlap_mean(const std::string& overlap) {
    if (overlap == "high") return 0.3;
    if (overlap == "medium") return 1.0;
    if (overlap == "low") return 3.0;
    throw std::invalid_argument("overlap must be one of high|medium|low");
}

namespace detail {

inline std::string num_slug(double v) {
    char buf[32];
    if (v == static_cast<long long>(v))
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    else
        std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

inline std::vector<Scenario> scenario_grid(const ScenarioConfig& cfg = {}) {
    std::vector<Scenario> grid;
    for (const std::string& ov : cfg.overlaps) {
        double mu2 = overlap_mean(ov);
        for (double avg : cfg.avgs)
            for (double diff : cfg.diffs)
                for (const auto& [k1, k2] : cfg.dispersions) {
                    Scenario sc;
                    sc.overlap = ov;
                    sc.mu2 = mu2;
                    sc.sojourn_avg = avg;
                    sc.sojourn_diff = diff;
                    sc.m1 = avg + diff / 2.0;
                    sc.m2 = avg - diff / 2.0;
                    sc.k1 = k1;
                    sc.k2 = k2;
                    if (!(sc.m2 > 0.0))
                        throw std::invalid_argument(
                            "scenario_grid: avg - diff/2 must be > 0 (infeasible cell)");
                    sc.spec.family = ModelFamily::Hsmm;
                    sc.spec.n_states = 2;
                    sc.spec.obs_dim = 1;
                    sc.spec.ar_order = 0;
                    sc.spec.sojourn_family = SojournFamily::NegBinomial;
                    sc.spec.max_duration = 0;
                    sc.params.delta = {0.5, 0.5};
                    sc.params.tpm = Matrix(2, 2, 0.0);
                    sc.params.tpm(0, 1) = 1.0;
                    sc.params.tpm(1, 0) = 1.0;
                    StateEmission e1{{0.0}, Matrix(0, 0), {1.0}};
                    StateEmission e2{{mu2}, Matrix(0, 0), {1.0}};
                    sc.params.emissions = {e1, e2};
                    sc.params.sojourns = {SojournDist::negbinomial(sc.m1, k1),
                                          SojournDist::negbinomial(sc.m2, k2)};
                    sc.name = "ov-" + ov + "_avg-" + detail::num_slug(avg) + "_diff-" +
                              detail::num_slug(diff) + "_k-" + detail::num_slug(k1) + "-" +
                              detail::num_slug(k2);
                    grid.push_back(std::move(sc));
                }
    }
    return grid;
}

}  // namespace semimarkov
