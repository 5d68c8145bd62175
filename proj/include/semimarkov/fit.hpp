#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "likelihood.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "optimize.hpp"
#include "rng.hpp"

namespace semimarkov {

// Per-state supervised data: y holds the rows emitted in the state (only
// those with full lag history), lags holds the p stacked lagged rows per
// observation, column-packed as (lag, dim) -> lag*obs_dim + dim.
struct StateObs {
    Matrix y;
    Matrix lags;
};

// Everything the conditional posteriors need from the labels: initial-state
// counts tau, transition counts nu (all consecutive pairs for a Markov
// model, run switches only for a semi-Markov one), per-state observations,
// and per-state sojourn samples. All runs count as complete sojourns since
// switches are assumed at both ends of each series.
struct SufficientStats {
    std::vector<double> init_counts;               // tau, per state
    Matrix trans_counts;                           // nu, J x J
    std::vector<StateObs> obs;                     // per state
    std::vector<std::vector<long long>> sojourns;  // per state run lengths
};

inline SufficientStats sufficient_stats(const std::vector<LabeledSeries>& set,
                                        const ModelSpec& spec) {
    if (set.empty()) throw std::invalid_argument("sufficient_stats: empty series set");
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    std::size_t dim = static_cast<std::size_t>(spec.obs_dim);
    std::size_t p = static_cast<std::size_t>(spec.ar_order);

    SufficientStats st;
    st.init_counts.assign(J, 0.0);
    st.trans_counts = Matrix(J, J, 0.0);
    st.sojourns.assign(J, {});
    std::vector<std::size_t> counts(J, 0);

    for (const LabeledSeries& s : set) {
        validate_series(s, spec);
        if (s.labels.empty())
            throw std::invalid_argument("sufficient_stats: series " + s.id + " has no labels");
        for (std::size_t t = p; t < s.x.rows(); ++t) ++counts[s.labels[t] - 1];
    }
    for (std::size_t j = 0; j < J; ++j) {
        st.obs.push_back({Matrix(counts[j], dim), Matrix(counts[j], p * dim)});
        counts[j] = 0;
    }

    for (const LabeledSeries& s : set) {
        st.init_counts[s.labels[0] - 1] += 1.0;
        if (spec.family == ModelFamily::Hmm) {
            for (std::size_t t = 1; t < s.x.rows(); ++t)
                st.trans_counts(s.labels[t - 1] - 1, s.labels[t] - 1) += 1.0;
        }
        std::vector<Run> runs = run_length_encode(s.labels);
        for (std::size_t r = 0; r < runs.size(); ++r) {
            st.sojourns[runs[r].state - 1].push_back(static_cast<long long>(runs[r].length));
            if (spec.family == ModelFamily::Hsmm && r > 0)
                st.trans_counts(runs[r - 1].state - 1, runs[r].state - 1) += 1.0;
        }
        for (std::size_t t = p; t < s.x.rows(); ++t) {
            std::size_t j = static_cast<std::size_t>(s.labels[t] - 1);
            std::size_t row = counts[j]++;
            for (std::size_t d = 0; d < dim; ++d) {
                st.obs[j].y(row, d) = s.x(t, d);
                for (std::size_t l = 0; l < p; ++l)
                    st.obs[j].lags(row, l * dim + d) = s.x(t - 1 - l, d);
            }
        }
    }
    return st;
}

// Closed-form Dirichlet posteriors: concentration = prior + count. For a
// semi-Markov model the diagonal is outside the support and its
// concentration is reported as 0.
struct DirichletPosteriors {
    std::vector<double> delta;  // J
    Matrix tpm;                 // J x J
};

inline DirichletPosteriors dirichlet_posteriors(const SufficientStats& st, const Priors& pr,
                                                const ModelSpec& spec) {
    std::size_t J = st.init_counts.size();
    DirichletPosteriors post;
    post.delta.resize(J);
    for (std::size_t j = 0; j < J; ++j) post.delta[j] = pr.delta_dirichlet[j] + st.init_counts[j];
    post.tpm = Matrix(J, J, 0.0);
    for (std::size_t i = 0; i < J; ++i)
        for (std::size_t j = 0; j < J; ++j) {
            if (spec.family == ModelFamily::Hsmm && i == j) continue;
            post.tpm(i, j) = pr.tpm_dirichlet(i, j) + st.trans_counts(i, j);
        }
    return post;
}

// Entries with concentration 0 are outside the support and get zero mass.
inline std::vector<double> dirichlet_mean(const std::vector<double>& alpha) {
    double a0 = 0.0;
    for (double a : alpha) a0 += a;
    if (!(a0 > 0.0)) throw std::invalid_argument("dirichlet_mean: empty support");
    std::vector<double> m(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) m[i] = alpha[i] / a0;
    return m;
}

// Interior mode (alpha_i - 1)/(alpha_0 - K) when every in-support
// concentration exceeds 1; otherwise the boundary projection with negative
// terms clamped to zero, falling back to the mean in the all-flat case.
inline std::vector<double> dirichlet_mode(const std::vector<double>& alpha) {
    std::vector<double> m(alpha.size(), 0.0);
    double tot = 0.0;
    for (double a : alpha)
        if (a > 0.0) tot += std::max(a - 1.0, 0.0);
    if (tot <= 0.0) return dirichlet_mean(alpha);
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 0.0) m[i] = std::max(alpha[i] - 1.0, 0.0) / tot;
    return m;
}

struct SamplerConfig {
    int burn_in = 1000;
    int thin = 1;
    double target_accept = 0.35;
    double adapt_rate = 1.0;
};

struct PosteriorDraws {
    ModelSpec spec;
    std::vector<Params> draws;
    std::map<std::string, double> acceptance;  // per Metropolis block, after burn-in
    std::vector<std::string> warnings;
    std::uint64_t seed = 0;
};

namespace detail {

// Adaptive random-walk Metropolis on an unconstrained vector. The proposal
// scale follows a Robbins-Monro recursion toward the target acceptance rate
// during burn-in and is frozen afterwards. Returns the retained draws and
// the post-burn-in acceptance fraction.
inline std::vector<std::vector<double>> adaptive_rwm(
    const std::function<double(const std::vector<double>&)>& log_target,
    std::vector<double> theta, int n_draws, const SamplerConfig& cfg, Rng& rng,
    double* acceptance_out) {
    double lp = log_target(theta);
    if (!std::isfinite(lp))
        throw std::runtime_error("adaptive_rwm: initial point has zero posterior mass");
    double log_scale = std::log(2.38 / std::sqrt(static_cast<double>(theta.size())));
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(n_draws));
    std::vector<double> prop(theta.size());
    long long accepted = 0, post_iters = 0;
    int total = cfg.burn_in + n_draws * cfg.thin;
    for (int iter = 1; iter <= total; ++iter) {
        double s = std::exp(log_scale);
        for (std::size_t i = 0; i < theta.size(); ++i) prop[i] = theta[i] + s * rng.normal();
        double lp_new = log_target(prop);
        double alpha = lp_new == neg_inf ? 0.0 : std::min(1.0, std::exp(lp_new - lp));
        if (rng.uniform() < alpha) {
            theta = prop;
            lp = lp_new;
            if (iter > cfg.burn_in) ++accepted;
        }
        if (iter <= cfg.burn_in) {
            double gamma = cfg.adapt_rate / std::pow(static_cast<double>(iter), 0.6);
            log_scale += gamma * (alpha - cfg.target_accept);
        } else {
            ++post_iters;
            if ((iter - cfg.burn_in) % cfg.thin == 0) out.push_back(theta);
        }
    }
    if (acceptance_out)
        *acceptance_out =
            post_iters > 0 ? static_cast<double>(accepted) / static_cast<double>(post_iters) : 0.0;
    return out;
}

// Unconstrained emission coordinates: [mean (dim), ar (p*dim), log sd (dim)].
inline std::vector<double> pack_emission(const StateEmission& e) {
    std::size_t dim = e.mean.size(), p = e.ar.rows();
    std::vector<double> th;
    th.reserve(dim * 2 + p * dim);
    for (double v : e.mean) th.push_back(v);
    for (std::size_t l = 0; l < p; ++l)
        for (std::size_t d = 0; d < dim; ++d) th.push_back(e.ar(l, d));
    for (double v : e.var) th.push_back(0.5 * std::log(v));
    return th;
}

inline StateEmission unpack_emission(const std::vector<double>& th, std::size_t dim,
                                     std::size_t p) {
    StateEmission e;
    e.mean.assign(th.begin(), th.begin() + static_cast<long>(dim));
    e.ar = Matrix(p, dim);
    for (std::size_t l = 0; l < p; ++l)
        for (std::size_t d = 0; d < dim; ++d) e.ar(l, d) = th[dim + l * dim + d];
    e.var.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) e.var[d] = std::exp(2.0 * th[dim + p * dim + d]);
    return e;
}

// Log conditional posterior of one state's emission block on the
// unconstrained scale (log-sd Jacobian included).
struct EmissionTarget {
    const StateObs* data;
    const EmissionPrior* prior;
    std::size_t dim, p;

    double operator()(const std::vector<double>& th) const {
        std::size_t n = data->y.rows();
        double lp = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double lsd = th[dim + p * dim + d];
            double sd = std::exp(lsd);
            lp += normal_logpdf(th[d], prior->mean_loc[d], prior->mean_scale[d]);
            lp += truncnormal_pos_logpdf(sd, prior->sd_loc[d], prior->sd_scale[d]) + lsd;
            double inv2v = 0.5 / (sd * sd);
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                double mu = th[d];
                for (std::size_t l = 0; l < p; ++l)
                    mu += th[dim + l * dim + d] * data->lags(r, l * dim + d);
                acc += sqr(data->y(r, d) - mu);
            }
            lp -= acc * inv2v + static_cast<double>(n) * (0.5 * log_two_pi + lsd);
        }
        for (std::size_t l = 0; l < p; ++l)
            for (std::size_t d = 0; d < dim; ++d)
                lp += normal_logpdf(th[dim + l * dim + d], prior->ar_loc, prior->ar_scale);
        return lp;
    }
};

// Negative-binomial sojourn block on (log m, log k); the log-normal priors
// reduce to normal densities on the log scale.
struct NbSojournTarget {
    const std::vector<long long>* runs;
    const SojournPrior* prior;

    double operator()(const std::vector<double>& th) const {
        double lp = normal_logpdf(th[0], prior->log_m_loc, prior->log_m_scale) +
                    normal_logpdf(th[1], prior->log_k_loc, prior->log_k_scale);
        SojournDist d = SojournDist::negbinomial(std::exp(th[0]), std::exp(th[1]));
        if (!std::isfinite(d.m) || !std::isfinite(d.k)) return neg_inf;
        for (long long u : *runs) lp += sojourn_logpmf(d, u);
        return lp;
    }
};

// Geometric sojourn block on log of the implied mean m = stay/(1-stay).
struct GeomSojournTarget {
    double sum_excess = 0.0;  // sum of (u - 1)
    double n_runs = 0.0;
    const SojournPrior* prior;

    double operator()(const std::vector<double>& th) const {
        double m = std::exp(th[0]);
        if (!std::isfinite(m)) return neg_inf;
        double stay = m / (1.0 + m);
        double lp = normal_logpdf(th[0], prior->log_m_loc, prior->log_m_scale);
        if (sum_excess > 0.0) lp += sum_excess * std::log(stay);
        return lp + n_runs * std::log1p(-stay);
    }
};

inline StateEmission draw_emission_prior(const EmissionPrior& pr, std::size_t dim, std::size_t p,
                                         Rng& rng) {
    StateEmission e;
    e.mean.resize(dim);
    e.var.resize(dim);
    e.ar = Matrix(p, dim);
    for (std::size_t d = 0; d < dim; ++d) {
        e.mean[d] = rng.normal(pr.mean_loc[d], pr.mean_scale[d]);
        double sd;
        do {
            sd = rng.normal(pr.sd_loc[d], pr.sd_scale[d]);
        } while (!(sd > 0.0));
        e.var[d] = sd * sd;
    }
    for (std::size_t l = 0; l < p; ++l)
        for (std::size_t d = 0; d < dim; ++d) e.ar(l, d) = rng.normal(pr.ar_loc, pr.ar_scale);
    return e;
}

inline SojournDist draw_sojourn_prior(const SojournPrior& pr, SojournFamily family, Rng& rng) {
    double m = std::exp(rng.normal(pr.log_m_loc, pr.log_m_scale));
    if (family == SojournFamily::Geometric) return SojournDist::geometric(m / (1.0 + m));
    double k = std::exp(rng.normal(pr.log_k_loc, pr.log_k_scale));
    return SojournDist::negbinomial(m, k);
}

// Moment-based starting points keep the chains out of the far tails.
inline std::vector<double> emission_start(const StateObs& data, std::size_t dim, std::size_t p) {
    std::size_t n = data.y.rows();
    std::vector<double> th(2 * dim + p * dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += data.y(r, d);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) ss += sqr(data.y(r, d) - mean);
        double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 1.0;
        th[d] = mean;
        th[dim + p * dim + d] = std::log(std::max(sd, 1e-3));
    }
    return th;
}

inline std::vector<double> nb_sojourn_start(const std::vector<long long>& runs) {
    double mean = 0.0;
    for (long long u : runs) mean += static_cast<double>(u);
    mean /= static_cast<double>(runs.size());
    double var = 0.0;
    for (long long u : runs) var += sqr(static_cast<double>(u) - mean);
    var = runs.size() > 1 ? var / static_cast<double>(runs.size() - 1) : mean;
    double m = std::max(mean - 1.0, 0.25);
    double k = var > m ? m * m / (var - m) : 100.0;
    k = std::min(std::max(k, 0.1), 500.0);
    return {std::log(m), std::log(k)};
}

}  // namespace detail

// Supervised posterior sampling. The initial distribution and transition
// rows are conjugate Dirichlet blocks drawn exactly; each state's emission
// block and (for semi-Markov models) sojourn block runs its own adaptive
// random-walk Metropolis chain on unconstrained coordinates. States absent
// from the labels fall back to prior draws, with a warning.
inline PosteriorDraws sample_posterior(const std::vector<LabeledSeries>& set, const Priors& pr,
                                       const ModelSpec& spec, int n_draws, std::uint64_t seed,
                                       const SamplerConfig& cfg = {}) {
    if (n_draws < 1) throw std::invalid_argument("sample_posterior: n_draws must be >= 1");
    validate_spec(spec);
    validate_priors(pr, spec);
    SufficientStats st = sufficient_stats(set, spec);
    DirichletPosteriors post = dirichlet_posteriors(st, pr, spec);
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    std::size_t dim = static_cast<std::size_t>(spec.obs_dim);
    std::size_t p = static_cast<std::size_t>(spec.ar_order);
    std::size_t nd = static_cast<std::size_t>(n_draws);

    PosteriorDraws out;
    out.spec = spec;
    out.seed = seed;
    out.draws.assign(nd, Params{});
    for (Params& d : out.draws) {
        d.emissions.resize(J);
        if (spec.family == ModelFamily::Hsmm) d.sojourns.resize(J);
    }

    {
        Rng rng(derive_seed(seed, 0));
        for (std::size_t r = 0; r < nd; ++r) {
            out.draws[r].delta = rng.dirichlet(post.delta);
            out.draws[r].tpm = Matrix(J, J, 0.0);
            if (J == 1) {
                out.draws[r].tpm(0, 0) = 1.0;
                continue;
            }
            for (std::size_t i = 0; i < J; ++i) {
                std::vector<double> row = rng.dirichlet(post.tpm.row_vec(i));
                for (std::size_t j = 0; j < J; ++j) out.draws[r].tpm(i, j) = row[j];
            }
        }
    }

    for (std::size_t j = 0; j < J; ++j) {
        Rng rng(derive_seed(seed, 1 + j));
        std::string key = "emission[" + std::to_string(j + 1) + "]";
        if (st.obs[j].y.rows() == 0) {
            out.warnings.push_back("state " + std::to_string(j + 1) +
                                   " has no labeled observations; emissions drawn from prior");
            for (std::size_t r = 0; r < nd; ++r)
                out.draws[r].emissions[j] = detail::draw_emission_prior(pr.emission[j], dim, p, rng);
            continue;
        }
        detail::EmissionTarget target{&st.obs[j], &pr.emission[j], dim, p};
        double acc = 0.0;
        auto chain = detail::adaptive_rwm(target, detail::emission_start(st.obs[j], dim, p),
                                          n_draws, cfg, rng, &acc);
        out.acceptance[key] = acc;
        for (std::size_t r = 0; r < nd; ++r)
            out.draws[r].emissions[j] = detail::unpack_emission(chain[r], dim, p);
    }

    if (spec.family == ModelFamily::Hsmm) {
        for (std::size_t j = 0; j < J; ++j) {
            Rng rng(derive_seed(seed, 1 + J + j));
            std::string key = "sojourn[" + std::to_string(j + 1) + "]";
            if (st.sojourns[j].empty()) {
                out.warnings.push_back("state " + std::to_string(j + 1) +
                                       " has no labeled runs; sojourns drawn from prior");
                for (std::size_t r = 0; r < nd; ++r)
                    out.draws[r].sojourns[j] =
                        detail::draw_sojourn_prior(pr.sojourn[j], spec.sojourn_family, rng);
                continue;
            }
            double acc = 0.0;
            if (spec.sojourn_family == SojournFamily::NegBinomial) {
                detail::NbSojournTarget target{&st.sojourns[j], &pr.sojourn[j]};
                auto chain = detail::adaptive_rwm(target, detail::nb_sojourn_start(st.sojourns[j]),
                                                  n_draws, cfg, rng, &acc);
                for (std::size_t r = 0; r < nd; ++r)
                    out.draws[r].sojourns[j] =
                        SojournDist::negbinomial(std::exp(chain[r][0]), std::exp(chain[r][1]));
            } else {
                detail::GeomSojournTarget target{0.0, 0.0, &pr.sojourn[j]};
                for (long long u : st.sojourns[j])
                    target.sum_excess += static_cast<double>(u - 1);
                target.n_runs = static_cast<double>(st.sojourns[j].size());
                std::vector<double> start = {
                    std::log(std::max(target.sum_excess / target.n_runs, 0.25))};
                auto chain = detail::adaptive_rwm(target, start, n_draws, cfg, rng, &acc);
                for (std::size_t r = 0; r < nd; ++r) {
                    double m = std::exp(chain[r][0]);
                    out.draws[r].sojourns[j] = SojournDist::geometric(m / (1.0 + m));
                }
            }
            out.acceptance[key] = acc;
        }
    }
    return out;
}

// Posterior mode: closed-form Dirichlet modes plus quasi-Newton maximization
// of each Metropolis block's conditional on the same unconstrained scales.
inline Params map_fit(const std::vector<LabeledSeries>& set, const Priors& pr,
                      const ModelSpec& spec, std::vector<std::string>* warnings = nullptr) {
    validate_spec(spec);
    validate_priors(pr, spec);
    SufficientStats st = sufficient_stats(set, spec);
    DirichletPosteriors post = dirichlet_posteriors(st, pr, spec);
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    std::size_t dim = static_cast<std::size_t>(spec.obs_dim);
    std::size_t p = static_cast<std::size_t>(spec.ar_order);

    Params fit;
    fit.delta = dirichlet_mode(post.delta);
    fit.tpm = Matrix(J, J, 0.0);
    if (J == 1)
        fit.tpm(0, 0) = 1.0;
    else
        for (std::size_t i = 0; i < J; ++i) {
            std::vector<double> row = dirichlet_mode(post.tpm.row_vec(i));
            for (std::size_t j = 0; j < J; ++j) fit.tpm(i, j) = row[j];
        }

    fit.emissions.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        if (st.obs[j].y.rows() == 0) {
            if (warnings)
                warnings->push_back("state " + std::to_string(j + 1) +
                                    " has no labeled observations; emission set from prior center");
            StateEmission e;
            e.mean = pr.emission[j].mean_loc;
            e.ar = Matrix(p, dim, pr.emission[j].ar_loc);
            e.var.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) e.var[d] = sqr(pr.emission[j].sd_scale[d]);
            fit.emissions[j] = e;
            continue;
        }
        detail::EmissionTarget target{&st.obs[j], &pr.emission[j], dim, p};
        auto neg = [&target](const std::vector<double>& th) { return -target(th); };
        OptimResult r = minimize_bfgs(neg, detail::emission_start(st.obs[j], dim, p));
        fit.emissions[j] = detail::unpack_emission(r.x, dim, p);
    }

    if (spec.family == ModelFamily::Hsmm) {
        fit.sojourns.resize(J);
        for (std::size_t j = 0; j < J; ++j) {
            if (st.sojourns[j].empty()) {
                if (warnings)
                    warnings->push_back("state " + std::to_string(j + 1) +
                                        " has no labeled runs; sojourn set from prior center");
                double m = std::exp(pr.sojourn[j].log_m_loc);
                fit.sojourns[j] = spec.sojourn_family == SojournFamily::Geometric
                                      ? SojournDist::geometric(m / (1.0 + m))
                                      : SojournDist::negbinomial(m, std::exp(pr.sojourn[j].log_k_loc));
                continue;
            }
            if (spec.sojourn_family == SojournFamily::NegBinomial) {
                detail::NbSojournTarget target{&st.sojourns[j], &pr.sojourn[j]};
                auto neg = [&target](const std::vector<double>& th) { return -target(th); };
                OptimResult r = minimize_bfgs(neg, detail::nb_sojourn_start(st.sojourns[j]));
                fit.sojourns[j] = SojournDist::negbinomial(std::exp(r.x[0]), std::exp(r.x[1]));
            } else {
                detail::GeomSojournTarget target{0.0, 0.0, &pr.sojourn[j]};
                for (long long u : st.sojourns[j]) target.sum_excess += static_cast<double>(u - 1);
                target.n_runs = static_cast<double>(st.sojourns[j].size());
                auto neg = [&target](const std::vector<double>& th) { return -target(th); };
                OptimResult r = minimize_bfgs(
                    neg, {std::log(std::max(target.sum_excess / target.n_runs, 0.25))});
                double m = std::exp(r.x[0]);
                fit.sojourns[j] = SojournDist::geometric(m / (1.0 + m));
            }
        }
    }
    validate_params(fit, spec);
    return fit;
}

}  // namespace semimarkov
