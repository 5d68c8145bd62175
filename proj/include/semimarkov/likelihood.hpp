#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "model.hpp"

namespace semimarkov {

// Maximal block of constant label; state is 1-based.
struct Run {
    int state;
    std::size_t start;
    std::size_t length;
};

inline std::vector<Run> run_length_encode(const std::vector<int>& labels) {
    std::vector<Run> runs;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (!runs.empty() && runs.back().state == labels[t])
            ++runs.back().length;
        else
            runs.push_back({labels[t], t, 1});
    }
    return runs;
}

// Dirichlet log density; indices where alpha is skipped (HSMM diagonal) are
// excluded from both the value and the normalizing constant.
inline double dirichlet_logpdf(const std::vector<double>& x, const std::vector<double>& alpha,
                               int skip = -1) {
    if (x.size() != alpha.size()) throw std::invalid_argument("dirichlet_logpdf: size mismatch");
    double a0 = 0.0, lp = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (static_cast<int>(i) == skip) continue;
        a0 += alpha[i];
        lp -= std::lgamma(alpha[i]);
        if (x[i] > 0.0) {
            lp += (alpha[i] - 1.0) * std::log(x[i]);
        } else if (alpha[i] != 1.0) {
            return neg_inf;
        }
    }
    return lp + std::lgamma(a0);
}

inline double lognormal_logpdf(double x, double loc, double scale) {
    if (!(x > 0.0)) return neg_inf;
    double lx = std::log(x);
    return normal_logpdf(lx, loc, scale) - lx;
}

// Complete-data log-likelihood of one labeled series.
//
// HSMM: log delta_{c1} + log d_{c1}(u1)
//       + sum over later runs r of [log gamma_{c_{r-1} c_r} + log d_{c_r}(u_r)]
//       + sum over t >= p of log f_{c_t}(x_t | lags).
// Runs are complete at both ends (switches are assumed at t=1 and t=T), so
// every run contributes its full pmf term.
//
// HMM: the same decomposition collapses to the chain rule
//       log delta_{c1} + sum_t log gamma_{c_{t-1} c_t} + emissions,
// the sojourn terms being the self-transition products with the exit
// probability folded into the off-diagonal transition entries.
//
// The first p observations are conditioned on and contribute no emission
// term; their labels still enter through the run decomposition.
inline double complete_data_loglik(const LabeledSeries& s, const Params& p,
                                   const ModelSpec& spec) {
    validate_params(p, spec);
    validate_series(s, spec);
    if (s.labels.empty())
        throw std::invalid_argument("complete_data_loglik: series has no labels");

    std::size_t T = s.x.rows();
    std::size_t ar = static_cast<std::size_t>(spec.ar_order);
    double ll = 0.0;
    for (std::size_t t = ar; t < T; ++t)
        ll += emission_logpdf(p.emissions[s.labels[t] - 1], s.x, t);

    if (spec.family == ModelFamily::Hmm) {
        ll += std::log(p.delta[s.labels[0] - 1]);
        for (std::size_t t = 1; t < T; ++t)
            ll += std::log(p.tpm(s.labels[t - 1] - 1, s.labels[t] - 1));
        return ll;
    }

    std::vector<Run> runs = run_length_encode(s.labels);
    if (spec.max_duration > 0)
        for (const Run& r : runs)
            if (r.length > static_cast<std::size_t>(spec.max_duration))
                throw std::invalid_argument(
                    "complete_data_loglik: label run exceeds max_duration");
    ll += std::log(p.delta[runs[0].state - 1]);
    ll += sojourn_logpmf(p.sojourns[runs[0].state - 1], static_cast<long long>(runs[0].length));
    for (std::size_t r = 1; r < runs.size(); ++r) {
        ll += std::log(p.tpm(runs[r - 1].state - 1, runs[r].state - 1));
        ll += sojourn_logpmf(p.sojourns[runs[r].state - 1],
                             static_cast<long long>(runs[r].length));
    }
    return ll;
}

inline double complete_data_loglik(const std::vector<LabeledSeries>& set, const Params& p,
                                   const ModelSpec& spec) {
    if (set.empty()) throw std::invalid_argument("complete_data_loglik: empty series set");
    double ll = 0.0;
    for (const LabeledSeries& s : set) ll += complete_data_loglik(s, p, spec);
    return ll;
}

namespace detail {

// Soft support check: false means "impossible", never throws for value
// problems (structural mismatches still throw via validate_* callers).
inline bool params_in_support(const Params& p, const ModelSpec& spec) {
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    if (p.delta.size() != J || p.tpm.rows() != J || p.tpm.cols() != J) return false;
    for (double v : p.delta)
        if (!(v >= 0.0) || !(v <= 1.0)) return false;
    for (std::size_t i = 0; i < J; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            double v = p.tpm(i, j);
            if (!(v >= 0.0) || !(v <= 1.0)) return false;
        }
        if (spec.family == ModelFamily::Hsmm && J > 1 && p.tpm(i, i) != 0.0) return false;
    }
    for (const StateEmission& e : p.emissions)
        for (double v : e.var)
            if (!(v > 0.0) || !std::isfinite(v)) return false;
    if (spec.family == ModelFamily::Hsmm) {
        for (const SojournDist& d : p.sojourns) {
            if (d.family == SojournFamily::Geometric) {
                if (!(d.stay >= 0.0) || !(d.stay < 1.0)) return false;
            } else if (!(d.m > 0.0) || !(d.k > 0.0) || !std::isfinite(d.m) || !std::isfinite(d.k)) {
                return false;
            }
        }
    }
    return true;
}

inline double emission_prior_logpdf(const StateEmission& e, const EmissionPrior& pr) {
    double lp = 0.0;
    for (std::size_t d = 0; d < e.mean.size(); ++d) {
        lp += normal_logpdf(e.mean[d], pr.mean_loc[d], pr.mean_scale[d]);
        lp += truncnormal_pos_logpdf(std::sqrt(e.var[d]), pr.sd_loc[d], pr.sd_scale[d]);
    }
    for (std::size_t l = 0; l < e.ar.rows(); ++l)
        for (std::size_t d = 0; d < e.ar.cols(); ++d)
            lp += normal_logpdf(e.ar(l, d), pr.ar_loc, pr.ar_scale);
    return lp;
}

// Log-normal priors on the sojourn mean/dispersion pair. A geometric sojourn
// is priced through its implied negative-binomial mean stay/(1-stay).
inline double sojourn_prior_logpdf(const SojournDist& d, const SojournPrior& pr) {
    if (d.family == SojournFamily::Geometric) {
        double m = d.stay / (1.0 - d.stay);
        return lognormal_logpdf(m, pr.log_m_loc, pr.log_m_scale);
    }
    return lognormal_logpdf(d.m, pr.log_m_loc, pr.log_m_scale) +
           lognormal_logpdf(d.k, pr.log_k_loc, pr.log_k_scale);
}

}  // namespace detail

// Joint log density of data and parameters up to the model-evidence constant.
// Out-of-support parameter values yield -inf rather than an exception so the
// samplers and optimizers can treat them as ordinary rejections.
inline double log_posterior(const std::vector<LabeledSeries>& set, const Params& p,
                            const Priors& pr, const ModelSpec& spec) {
    validate_priors(pr, spec);
    if (!detail::params_in_support(p, spec)) return neg_inf;
    std::size_t J = static_cast<std::size_t>(spec.n_states);

    double lp = dirichlet_logpdf(p.delta, pr.delta_dirichlet);
    for (std::size_t i = 0; i < J; ++i) {
        if (J == 1) break;
        int skip = spec.family == ModelFamily::Hsmm ? static_cast<int>(i) : -1;
        lp += dirichlet_logpdf(p.tpm.row_vec(i), pr.tpm_dirichlet.row_vec(i), skip);
    }
    for (std::size_t j = 0; j < J; ++j) {
        lp += detail::emission_prior_logpdf(p.emissions[j], pr.emission[j]);
        if (spec.family == ModelFamily::Hsmm)
            lp += detail::sojourn_prior_logpdf(p.sojourns[j], pr.sojourn[j]);
    }
    if (lp == neg_inf || !std::isfinite(lp)) return neg_inf;

    for (const LabeledSeries& s : set) {
        double ll = complete_data_loglik(s, p, spec);
        if (ll == neg_inf) return neg_inf;
        lp += ll;
    }
    return lp;
}

}  // namespace semimarkov
