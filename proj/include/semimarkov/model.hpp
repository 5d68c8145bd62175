#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "numeric.hpp"

namespace semimarkov {

enum class ModelFamily { Hmm, Hsmm };
enum class SojournFamily { Geometric, NegBinomial };

inline std::string to_string(ModelFamily f) { return f == ModelFamily::Hmm ? "hmm" : "hsmm"; }
inline std::string to_string(SojournFamily f) {
    return f == SojournFamily::Geometric ? "geometric" : "negbinomial";
}

// Structural description of a model; parameter values live in Params.
// max_duration is the decoding truncation of the sojourn support; 0 means
// "choose automatically at decode time" (smallest value covering 0.999 of
// each state's fitted pmf, capped at the series length).
struct ModelSpec {
    ModelFamily family = ModelFamily::Hmm;
    int ar_order = 0;
    int n_states = 1;
    int obs_dim = 1;
    SojournFamily sojourn_family = SojournFamily::Geometric;
    int max_duration = 0;
};

// Sojourn-time distribution on {1, 2, ...}.
//
// Geometric: pmf(u) = stay^(u-1) (1-stay), the run-length law implied by a
// self-transition probability.
//
// NegBinomial: the count pmf with mean m and dispersion k evaluated at u-1,
// i.e. the distribution is shifted onto {1, 2, ...}. With k = 1 this is the
// geometric with success probability 1/(m+1); the mean sojourn is m+1.
struct SojournDist {
    SojournFamily family = SojournFamily::Geometric;
    double stay = 0.5;  // geometric only
    double m = 1.0;     // negbinomial only
    double k = 1.0;     // negbinomial only

    static SojournDist geometric(double stay) {
        SojournDist d;
        d.family = SojournFamily::Geometric;
        d.stay = stay;
        return d;
    }
    static SojournDist negbinomial(double m, double k) {
        SojournDist d;
        d.family = SojournFamily::NegBinomial;
        d.m = m;
        d.k = k;
        return d;
    }
};

inline double sojourn_logpmf(const SojournDist& d, long long u) {
    if (u < 1) throw std::invalid_argument("sojourn_logpmf: u must be >= 1");
    if (d.family == SojournFamily::Geometric) {
        if (!(d.stay >= 0.0) || !(d.stay < 1.0))
            throw std::invalid_argument("sojourn_logpmf: stay must be in [0,1)");
        if (d.stay == 0.0) return u == 1 ? 0.0 : neg_inf;
        return static_cast<double>(u - 1) * std::log(d.stay) + std::log1p(-d.stay);
    }
    if (!(d.m > 0.0) || !(d.k > 0.0))
        throw std::invalid_argument("sojourn_logpmf: m and k must be > 0");
    double y = static_cast<double>(u - 1);
    double lp = std::lgamma(y + d.k) - std::lgamma(d.k) - std::lgamma(y + 1.0);
    lp += d.k * std::log(d.k / (d.k + d.m));
    if (y > 0.0) lp += y * std::log(d.m / (d.k + d.m));
    return lp;
}

inline double sojourn_pmf(const SojournDist& d, long long u) {
    return std::exp(sojourn_logpmf(d, u));
}

inline double sojourn_mean(const SojournDist& d) {
    if (d.family == SojournFamily::Geometric) return 1.0 / (1.0 - d.stay);
    return d.m + 1.0;
}

// pmf restricted to {1..max_duration} and renormalized; element u-1 holds
// log pmf(u). Throws if the retained mass is zero.
inline std::vector<double> truncated_sojourn_logpmf(const SojournDist& d, int max_duration) {
    if (max_duration < 1)
        throw std::invalid_argument("truncated_sojourn_logpmf: max_duration must be >= 1");
    std::vector<double> lp(static_cast<std::size_t>(max_duration));
    for (int u = 1; u <= max_duration; ++u) lp[u - 1] = sojourn_logpmf(d, u);
    double z = log_sum_exp(lp);
    if (z == neg_inf)
        throw std::invalid_argument("truncated_sojourn_logpmf: zero mass on {1..D}");
    for (double& x : lp) x -= z;
    return lp;
}

// log Pr(sojourn >= u) under the full (untruncated) distribution. Closed form
// for the geometric; for the negative binomial the cdf is accumulated in
// linear space, falling back to a log-space tail sum once the cdf is too
// close to 1 for log1p.
inline double sojourn_log_survivor(const SojournDist& d, long long u) {
    if (u < 1) throw std::invalid_argument("sojourn_log_survivor: u must be >= 1");
    if (u == 1) return 0.0;
    if (d.family == SojournFamily::Geometric) {
        if (d.stay == 0.0) return neg_inf;
        return static_cast<double>(u - 1) * std::log(d.stay);
    }
    double cdf = 0.0;
    for (long long v = 1; v < u; ++v) cdf += sojourn_pmf(d, v);
    if (1.0 - cdf > 1e-12) return std::log1p(-cdf);
    LogSumAcc acc;
    for (long long v = u; v < u + 1000000; ++v) {
        double lp = sojourn_logpmf(d, v);
        acc.add(lp);
        if (lp < acc.value() - 45.0) break;
    }
    return acc.value();
}

// State-dependent emission block: diagonal Gaussian around an AR(p) mean.
// ar(l, d) is the lag-(l+1) coefficient for dimension d (diagonal coefficient
// matrices, so dimensions do not interact).
struct StateEmission {
    std::vector<double> mean;  // obs_dim
    Matrix ar;                 // ar_order x obs_dim
    std::vector<double> var;   // obs_dim
};

// Log density of the current row given p lagged rows. window has p+1 rows,
// the last of which is the current observation.
inline double emission_logpdf_window(const StateEmission& e, const Matrix& window) {
    std::size_t p = e.ar.rows();
    if (window.rows() != p + 1 || window.cols() != e.mean.size())
        throw std::invalid_argument("emission_logpdf_window: window must be (p+1) x obs_dim");
    double lp = 0.0;
    std::size_t cur = p;
    for (std::size_t d = 0; d < e.mean.size(); ++d) {
        double mu = e.mean[d];
        for (std::size_t l = 0; l < p; ++l) mu += e.ar(l, d) * window(cur - 1 - l, d);
        if (!(e.var[d] > 0.0)) return neg_inf;
        lp += normal_logpdf(window(cur, d), mu, std::sqrt(e.var[d]));
    }
    return lp;
}

// Same density evaluated in place on a series; t is 0-based and must have
// p rows of history available.
inline double emission_logpdf(const StateEmission& e, const Matrix& x, std::size_t t) {
    std::size_t p = e.ar.rows();
    if (t < p) throw std::invalid_argument("emission_logpdf: insufficient lag history at t");
    if (x.cols() != e.mean.size())
        throw std::invalid_argument("emission_logpdf: dimension mismatch");
    double lp = 0.0;
    for (std::size_t d = 0; d < e.mean.size(); ++d) {
        double mu = e.mean[d];
        for (std::size_t l = 0; l < p; ++l) mu += e.ar(l, d) * x(t - 1 - l, d);
        if (!(e.var[d] > 0.0)) return neg_inf;
        lp += normal_logpdf(x(t, d), mu, std::sqrt(e.var[d]));
    }
    return lp;
}

struct Params {
    std::vector<double> delta;          // n_states
    Matrix tpm;                         // n_states x n_states
    std::vector<StateEmission> emissions;
    std::vector<SojournDist> sojourns;  // per state; empty for HMM
};

// One observed series: x is T x obs_dim; labels are 1-based states, empty
// when the series is unlabeled.
struct LabeledSeries {
    std::string id;
    Matrix x;
    std::vector<int> labels;
};

inline void validate_spec(const ModelSpec& s) {
    if (s.n_states < 1) throw std::invalid_argument("spec: n_states must be >= 1");
    if (s.obs_dim < 1) throw std::invalid_argument("spec: obs_dim must be >= 1");
    if (s.ar_order < 0) throw std::invalid_argument("spec: ar_order must be >= 0");
    if (s.max_duration < 0) throw std::invalid_argument("spec: max_duration must be >= 0");
    if (s.family == ModelFamily::Hmm && s.sojourn_family != SojournFamily::Geometric)
        throw std::invalid_argument("spec: HMM sojourns are geometric by construction");
}

inline void validate_params(const Params& p, const ModelSpec& spec, double tol = 1e-8) {
    validate_spec(spec);
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    std::size_t dim = static_cast<std::size_t>(spec.obs_dim);
    std::size_t ar = static_cast<std::size_t>(spec.ar_order);
    if (p.delta.size() != J) throw std::invalid_argument("params: delta size != n_states");
    double dsum = 0.0;
    for (double v : p.delta) {
        if (v < -tol || v > 1.0 + tol) throw std::invalid_argument("params: delta entry outside [0,1]");
        dsum += v;
    }
    if (std::abs(dsum - 1.0) > tol) throw std::invalid_argument("params: delta does not sum to 1");
    if (p.tpm.rows() != J || p.tpm.cols() != J)
        throw std::invalid_argument("params: tpm must be n_states x n_states");
    for (std::size_t i = 0; i < J; ++i) {
        double rsum = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            double v = p.tpm(i, j);
            if (v < -tol || v > 1.0 + tol)
                throw std::invalid_argument("params: tpm entry outside [0,1]");
            rsum += v;
        }
        if (std::abs(rsum - 1.0) > tol)
            throw std::invalid_argument("params: tpm row does not sum to 1");
        if (spec.family == ModelFamily::Hsmm && J > 1 && p.tpm(i, i) != 0.0)
            throw std::invalid_argument("params: hsmm tpm diagonal must be exactly 0");
    }
    if (p.emissions.size() != J) throw std::invalid_argument("params: one emission block per state");
    for (const StateEmission& e : p.emissions) {
        if (e.mean.size() != dim || e.var.size() != dim)
            throw std::invalid_argument("params: emission dimension mismatch");
        if (e.ar.rows() != ar || (ar > 0 && e.ar.cols() != dim))
            throw std::invalid_argument("params: ar coefficient shape mismatch");
        for (double v : e.var)
            if (!(v > 0.0)) throw std::invalid_argument("params: variances must be > 0");
    }
    if (spec.family == ModelFamily::Hsmm) {
        if (p.sojourns.size() != J)
            throw std::invalid_argument("params: one sojourn distribution per state");
        for (const SojournDist& d : p.sojourns) {
            if (d.family != spec.sojourn_family)
                throw std::invalid_argument("params: sojourn family does not match spec");
            if (d.family == SojournFamily::Geometric) {
                if (!(d.stay >= 0.0) || !(d.stay < 1.0))
                    throw std::invalid_argument("params: geometric stay must be in [0,1)");
            } else if (!(d.m > 0.0) || !(d.k > 0.0)) {
                throw std::invalid_argument("params: negbinomial m, k must be > 0");
            }
        }
    }
    if (spec.family == ModelFamily::Hmm && !p.sojourns.empty())
        throw std::invalid_argument("params: HMM carries no explicit sojourn distributions");
}

inline void validate_series(const LabeledSeries& s, const ModelSpec& spec) {
    if (s.x.rows() == 0) throw std::invalid_argument("series: empty");
    if (s.x.cols() != static_cast<std::size_t>(spec.obs_dim))
        throw std::invalid_argument("series: obs_dim mismatch");
    if (!s.labels.empty()) {
        if (s.labels.size() != s.x.rows())
            throw std::invalid_argument("series: label length != series length");
        for (int c : s.labels)
            if (c < 1 || c > spec.n_states)
                throw std::invalid_argument("series: label outside 1..n_states");
    }
}

// Prior hyperparameters. Emission means are normal, standard deviations are
// normal truncated to (0, inf), AR coefficients are normal, and the sojourn
// mean/dispersion are log-normal.
struct EmissionPrior {
    std::vector<double> mean_loc, mean_scale;  // obs_dim
    std::vector<double> sd_loc, sd_scale;      // obs_dim
    double ar_loc = 0.0, ar_scale = 10.0;
};

struct SojournPrior {
    double log_m_loc = 0.0, log_m_scale = 1.5;
    double log_k_loc = 0.0, log_k_scale = 1.5;
};

struct Priors {
    std::vector<double> delta_dirichlet;  // n_states
    Matrix tpm_dirichlet;                 // n_states x n_states
    std::vector<EmissionPrior> emission;  // per state
    std::vector<SojournPrior> sojourn;    // per state
};

inline Priors default_priors(const ModelSpec& spec) {
    validate_spec(spec);
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    std::size_t dim = static_cast<std::size_t>(spec.obs_dim);
    Priors pr;
    pr.delta_dirichlet.assign(J, 1.0);
    pr.tpm_dirichlet = Matrix(J, J, 1.0);
    EmissionPrior ep;
    ep.mean_loc.assign(dim, 0.0);
    ep.mean_scale.assign(dim, 10.0);
    ep.sd_loc.assign(dim, 0.0);
    ep.sd_scale.assign(dim, 10.0);
    pr.emission.assign(J, ep);
    SojournPrior sp;
    sp.log_m_loc = std::log(10.0);
    sp.log_m_scale = 1.5;
    sp.log_k_loc = std::log(10.0);
    sp.log_k_scale = 1.5;
    pr.sojourn.assign(J, sp);
    return pr;
}

inline void validate_priors(const Priors& pr, const ModelSpec& spec) {
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    std::size_t dim = static_cast<std::size_t>(spec.obs_dim);
    if (pr.delta_dirichlet.size() != J)
        throw std::invalid_argument("priors: delta_dirichlet size != n_states");
    for (double a : pr.delta_dirichlet)
        if (!(a > 0.0)) throw std::invalid_argument("priors: dirichlet concentrations must be > 0");
    if (pr.tpm_dirichlet.rows() != J || pr.tpm_dirichlet.cols() != J)
        throw std::invalid_argument("priors: tpm_dirichlet must be n_states x n_states");
    for (std::size_t i = 0; i < J; ++i)
        for (std::size_t j = 0; j < J; ++j) {
            if (spec.family == ModelFamily::Hsmm && i == j) continue;
            if (!(pr.tpm_dirichlet(i, j) > 0.0))
                throw std::invalid_argument("priors: dirichlet concentrations must be > 0");
        }
    if (pr.emission.size() != J) throw std::invalid_argument("priors: one emission prior per state");
    for (const EmissionPrior& e : pr.emission) {
        if (e.mean_loc.size() != dim || e.mean_scale.size() != dim || e.sd_loc.size() != dim ||
            e.sd_scale.size() != dim)
            throw std::invalid_argument("priors: emission hyperparameter dimension mismatch");
        for (double s : e.mean_scale)
            if (!(s > 0.0)) throw std::invalid_argument("priors: scales must be > 0");
        for (double s : e.sd_scale)
            if (!(s > 0.0)) throw std::invalid_argument("priors: scales must be > 0");
        if (!(e.ar_scale > 0.0)) throw std::invalid_argument("priors: scales must be > 0");
    }
    if (spec.family == ModelFamily::Hsmm && pr.sojourn.size() != J)
        throw std::invalid_argument("priors: one sojourn prior per state");
    for (const SojournPrior& s : pr.sojourn)
        if (!(s.log_m_scale > 0.0) || !(s.log_k_scale > 0.0))
            throw std::invalid_argument("priors: scales must be > 0");
}

}  // namespace semimarkov
