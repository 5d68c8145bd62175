#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "likelihood.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "numeric.hpp"

namespace semimarkov {

struct ForwardBackwardTables {
    Matrix log_alpha;      // T x J
    Matrix log_beta;       // T x J
    Matrix log_beta_star;  // T x J, HSMM only
    Matrix log_xi;         // T x J, state occupancy joint with the data
    double log_evidence = neg_inf;
};

struct ViterbiResult {
    std::vector<int> path;  // 1-based states
    double log_joint = neg_inf;
};

enum class DecodeMode { Local, Global, Both };

struct DecodeResult {
    Matrix local_probs;           // T x J, rows normalized
    std::vector<int> local_path;  // argmax_j of local_probs
    std::vector<int> global_path; // Viterbi
    double loglik_evidence = neg_inf;
};

// T x J matrix of log f_j(x_t | lags); rows t < ar_order are zero for every
// state (those observations are conditioned on, not modeled).
inline Matrix log_emission_matrix(const Matrix& x, const Params& p, const ModelSpec& spec) {
    std::size_t T = x.rows();
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    std::size_t ar = static_cast<std::size_t>(spec.ar_order);
    Matrix lem(T, J, 0.0);
    for (std::size_t t = ar; t < T; ++t)
        for (std::size_t j = 0; j < J; ++j)
            lem(t, j) = emission_logpdf(p.emissions[j], x, t);
    return lem;
}

// Smallest D whose truncated support holds at least `coverage` of every
// state's sojourn mass, capped at T.
inline int auto_max_duration(const Params& p, std::size_t T, double coverage = 0.999) {
    int D = 1;
    for (const SojournDist& d : p.sojourns) {
        double acc = 0.0;
        int u = 0;
        while (acc < coverage && u < static_cast<int>(T)) {
            ++u;
            acc += sojourn_pmf(d, u);
        }
        D = std::max(D, u);
    }
    return std::min<int>(D, static_cast<int>(T));
}

namespace detail {

inline int argmax_row(const double* v, std::size_t n) {
    int best = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (v[j] > v[best]) best = static_cast<int>(j);
    return best;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// HMM core, log space throughout.
// ----------------------------------------------------------------------------

inline ForwardBackwardTables fb_hmm_core(const std::vector<double>& log_delta,
                                         const Matrix& log_tpm, const Matrix& log_em) {
    std::size_t T = log_em.rows();
    std::size_t J = log_em.cols();
    ForwardBackwardTables tb;
    tb.log_alpha = Matrix(T, J, neg_inf);
    tb.log_beta = Matrix(T, J, 0.0);
    tb.log_xi = Matrix(T, J, neg_inf);

    for (std::size_t j = 0; j < J; ++j) tb.log_alpha(0, j) = log_delta[j] + log_em(0, j);
    for (std::size_t t = 1; t < T; ++t)
        for (std::size_t j = 0; j < J; ++j) {
            LogSumAcc acc;
            for (std::size_t i = 0; i < J; ++i)
                acc.add(tb.log_alpha(t - 1, i) + log_tpm(i, j));
            tb.log_alpha(t, j) = acc.value() + log_em(t, j);
        }

    for (std::size_t t = T - 1; t-- > 0;)
        for (std::size_t j = 0; j < J; ++j) {
            LogSumAcc acc;
            for (std::size_t i = 0; i < J; ++i)
                acc.add(log_tpm(j, i) + log_em(t + 1, i) + tb.log_beta(t + 1, i));
            tb.log_beta(t, j) = acc.value();
        }

    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t j = 0; j < J; ++j)
            tb.log_xi(t, j) = tb.log_alpha(t, j) + tb.log_beta(t, j);
    tb.log_evidence = log_sum_exp(std::span<const double>(tb.log_alpha.row(T - 1), J));
    return tb;
}

// Ties break toward the lowest state index (strict improvement required).
inline ViterbiResult viterbi_hmm_core(const std::vector<double>& log_delta,
                                      const Matrix& log_tpm, const Matrix& log_em) {
    std::size_t T = log_em.rows();
    std::size_t J = log_em.cols();
    Matrix psi(T, J, neg_inf);
    std::vector<std::vector<int>> bp(T, std::vector<int>(J, -1));
    for (std::size_t j = 0; j < J; ++j) psi(0, j) = log_delta[j] + log_em(0, j);
    for (std::size_t t = 1; t < T; ++t)
        for (std::size_t j = 0; j < J; ++j) {
            double best = neg_inf;
            int arg = 0;
            for (std::size_t i = 0; i < J; ++i) {
                double cand = psi(t - 1, i) + log_tpm(i, j);
                if (cand > best) {
                    best = cand;
                    arg = static_cast<int>(i);
                }
            }
            psi(t, j) = best + log_em(t, j);
            bp[t][j] = arg;
        }
    ViterbiResult r;
    r.path.assign(T, 1);
    int j = detail::argmax_row(psi.row(T - 1), J);
    r.log_joint = psi(T - 1, j);
    for (std::size_t t = T; t-- > 0;) {
        r.path[t] = j + 1;
        if (t > 0) j = bp[t][j];
    }
    return r;
}

// ----------------------------------------------------------------------------
// HSMM core.
//
// log_dur(j, d-1) is the truncated, renormalized sojourn log pmf of state j+1
// at duration d; log_surv(j, d-1) the log survivor Pr(sojourn >= d) of the
// full, untruncated distribution.
//
// alpha_t(j) sums over runs of j ending exactly at t: started either at time
// 1 (weighted by delta_j) or right after another state's run. Runs that end
// at the final observation are censored and use the survivor mass instead of
// the pmf; the survivor is left untruncated because the censored tail has a
// closed form, and with geometric sojourns this makes the recursion agree
// with the HMM it embeds up to the interior truncation error.
//
// beta_t(j) conditions on a run ending at t, beta*_t(j) on one starting at
// t+1. Occupancy xi is accumulated backwards from xi_T = alpha_T by adding
// runs that end at t and removing runs that start at t+1.
// ----------------------------------------------------------------------------

struct HsmmCoreInputs {
    std::vector<double> log_delta;  // J
    Matrix log_tpm;                 // J x J, conditional (diagonal -inf)
    Matrix log_dur;                 // J x D
    Matrix log_surv;                // J x D
    Matrix log_em;                  // T x J
};

namespace detail {

// Prefix sums of log emissions per state: cum(j, t) = sum of log_em rows < t.
inline Matrix emission_prefix_sums(const Matrix& log_em) {
    std::size_t T = log_em.rows();
    std::size_t J = log_em.cols();
    Matrix cum(J, T + 1, 0.0);
    for (std::size_t j = 0; j < J; ++j)
        for (std::size_t t = 0; t < T; ++t) cum(j, t + 1) = cum(j, t) + log_em(t, j);
    return cum;
}

inline void check_hsmm_budget(std::size_t T, std::size_t J, std::size_t D, double budget) {
    double cost = static_cast<double>(T) * static_cast<double>(D) * static_cast<double>(J) *
                  static_cast<double>(J);
    if (cost > budget)
        throw std::runtime_error("hsmm decode: T*D*J^2 exceeds complexity budget");
}

}  // namespace detail

inline ForwardBackwardTables fb_hsmm_core(const HsmmCoreInputs& in, double budget = 5e9) {
    std::size_t T = in.log_em.rows();
    std::size_t J = in.log_em.cols();
    std::size_t D = in.log_dur.cols();
    if (J < 2) throw std::invalid_argument("fb_hsmm_core: needs at least 2 states");
    detail::check_hsmm_budget(T, J, D, budget);

    Matrix cum = detail::emission_prefix_sums(in.log_em);
    auto lw = [&](std::size_t j, std::size_t a, std::size_t b) {  // rows a..b inclusive
        return cum(j, b + 1) - cum(j, a);
    };

    ForwardBackwardTables tb;
    tb.log_alpha = Matrix(T, J, neg_inf);
    tb.log_beta = Matrix(T, J, 0.0);
    tb.log_beta_star = Matrix(T, J, neg_inf);
    tb.log_xi = Matrix(T, J, neg_inf);
    Matrix in_log(T, J, neg_inf);  // lse_{i != j} alpha_t(i) + log_tpm(i, j)

    for (std::size_t t = 0; t < T; ++t) {
        std::size_t maxd = std::min(D, t + 1);
        bool last = (t == T - 1);
        for (std::size_t j = 0; j < J; ++j) {
            LogSumAcc acc;
            for (std::size_t d = 1; d <= maxd; ++d) {
                double ldur = last ? in.log_surv(j, d - 1) : in.log_dur(j, d - 1);
                if (ldur == neg_inf) continue;
                double prev = (d == t + 1) ? in.log_delta[j] : in_log(t - d, j);
                if (prev == neg_inf) continue;
                acc.add(prev + ldur + lw(j, t - d + 1, t));
            }
            tb.log_alpha(t, j) = acc.value();
        }
        for (std::size_t j = 0; j < J; ++j) {
            LogSumAcc acc;
            for (std::size_t i = 0; i < J; ++i)
                if (i != j) acc.add(tb.log_alpha(t, i) + in.log_tpm(i, j));
            in_log(t, j) = acc.value();
        }
    }

    for (std::size_t t = T - 1; t-- > 0;) {
        std::size_t maxd = std::min(D, T - 1 - t);
        for (std::size_t j = 0; j < J; ++j) {
            LogSumAcc acc;
            for (std::size_t d = 1; d <= maxd; ++d) {
                std::size_t e = t + d;  // run covers rows t+1 .. e
                double term;
                if (e == T - 1)
                    term = in.log_surv(j, d - 1) + lw(j, t + 1, e);
                else
                    term = in.log_dur(j, d - 1) + lw(j, t + 1, e) + tb.log_beta(e, j);
                acc.add(term);
            }
            tb.log_beta_star(t, j) = acc.value();
        }
        for (std::size_t j = 0; j < J; ++j) {
            LogSumAcc acc;
            for (std::size_t i = 0; i < J; ++i)
                if (i != j) acc.add(in.log_tpm(j, i) + tb.log_beta_star(t, i));
            tb.log_beta(t, j) = acc.value();
        }
    }

    for (std::size_t j = 0; j < J; ++j) tb.log_xi(T - 1, j) = tb.log_alpha(T - 1, j);
    for (std::size_t t = T - 1; t-- > 0;) {
        for (std::size_t j = 0; j < J; ++j) {
            double ends = tb.log_alpha(t, j) + tb.log_beta(t, j);
            double starts = in_log(t, j) + tb.log_beta_star(t, j);
            tb.log_xi(t, j) = log_sub_exp(log_add_exp(tb.log_xi(t + 1, j), ends), starts);
        }
    }
    tb.log_evidence = log_sum_exp(std::span<const double>(tb.log_alpha.row(T - 1), J));
    return tb;
}

// Same recursion with max in place of sum. Ties break toward the lower state
// index, then the shorter duration (strict improvement required in both
// scans, which are ascending).
inline ViterbiResult viterbi_hsmm_core(const HsmmCoreInputs& in, double budget = 5e9) {
    std::size_t T = in.log_em.rows();
    std::size_t J = in.log_em.cols();
    std::size_t D = in.log_dur.cols();
    if (J < 2) throw std::invalid_argument("viterbi_hsmm_core: needs at least 2 states");
    detail::check_hsmm_budget(T, J, D, budget);

    Matrix cum = detail::emission_prefix_sums(in.log_em);
    auto lw = [&](std::size_t j, std::size_t a, std::size_t b) {
        return cum(j, b + 1) - cum(j, a);
    };

    Matrix phi(T, J, neg_inf);   // best weight of a run of j ending at t
    Matrix m(T, J, neg_inf);     // max_{i != j} phi_t(i) + log_tpm(i, j)
    std::vector<std::vector<int>> bp_d(T, std::vector<int>(J, 0));
    std::vector<std::vector<int>> bp_i(T, std::vector<int>(J, -1));

    for (std::size_t t = 0; t < T; ++t) {
        std::size_t maxd = std::min(D, t + 1);
        bool last = (t == T - 1);
        for (std::size_t j = 0; j < J; ++j) {
            double best = neg_inf;
            int bestd = 0;
            for (std::size_t d = 1; d <= maxd; ++d) {
                double ldur = last ? in.log_surv(j, d - 1) : in.log_dur(j, d - 1);
                if (ldur == neg_inf) continue;
                double prev = (d == t + 1) ? in.log_delta[j] : m(t - d, j);
                if (prev == neg_inf) continue;
                double cand = prev + ldur + lw(j, t - d + 1, t);
                if (cand > best) {
                    best = cand;
                    bestd = static_cast<int>(d);
                }
            }
            phi(t, j) = best;
            bp_d[t][j] = bestd;
        }
        for (std::size_t j = 0; j < J; ++j) {
            double best = neg_inf;
            int arg = -1;
            for (std::size_t i = 0; i < J; ++i) {
                if (i == j) continue;
                double cand = phi(t, i) + in.log_tpm(i, j);
                if (cand > best) {
                    best = cand;
                    arg = static_cast<int>(i);
                }
            }
            m(t, j) = best;
            bp_i[t][j] = arg;
        }
    }

    ViterbiResult r;
    r.path.assign(T, 0);
    int j = detail::argmax_row(phi.row(T - 1), J);
    r.log_joint = phi(T - 1, j);
    if (r.log_joint == neg_inf)
        throw std::runtime_error("viterbi_hsmm: no feasible segmentation (max_duration too small?)");
    std::size_t t = T - 1;
    for (;;) {
        std::size_t d = static_cast<std::size_t>(bp_d[t][j]);
        for (std::size_t s = t + 1 - d; s <= t; ++s) r.path[s] = j + 1;
        if (d == t + 1) break;
        t -= d;
        j = bp_i[t][j];
    }
    return r;
}

// ----------------------------------------------------------------------------
// Parameter-level wrappers.
// ----------------------------------------------------------------------------

namespace detail {

inline std::vector<double> log_vec(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] > 0.0 ? std::log(v[i]) : neg_inf;
    return r;
}

inline Matrix log_mat(const Matrix& m) {
    Matrix r(m.rows(), m.cols(), neg_inf);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) > 0.0) r(i, j) = std::log(m(i, j));
    return r;
}

// The model's truncation, before any fitting-into-the-series concerns: the
// request wins, then ModelSpec::max_duration, then the automatic
// tail-coverage rule.
inline int effective_max_duration(const Params& p, const ModelSpec& spec, std::size_t T,
                                  int requested) {
    int D = requested > 0 ? requested : spec.max_duration;
    if (D <= 0) D = auto_max_duration(p, T);
    return D;
}

inline HsmmCoreInputs build_hsmm_inputs(const Matrix& x, const Params& p, const ModelSpec& spec,
                                        int max_duration) {
    HsmmCoreInputs in;
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    int D = effective_max_duration(p, spec, x.rows(), max_duration);
    // Runs longer than the series are unrepresentable, so the tables only
    // carry min(D, T) rows — but the completed-run pmf stays renormalized
    // over the model's full support {1..D}.
    int Dcap = std::min<int>(D, static_cast<int>(x.rows()));
    in.log_delta = log_vec(p.delta);
    in.log_tpm = log_mat(p.tpm);
    in.log_dur = Matrix(J, static_cast<std::size_t>(Dcap), neg_inf);
    in.log_surv = Matrix(J, static_cast<std::size_t>(Dcap), neg_inf);
    for (std::size_t j = 0; j < J; ++j) {
        double log_tail = sojourn_log_survivor(p.sojourns[j], static_cast<long long>(D) + 1);
        if (log_tail >= 0.0)
            throw std::invalid_argument("hsmm decode: sojourn mass on {1..D} is zero");
        double log_z = log_tail == neg_inf ? 0.0 : std::log(-std::expm1(log_tail));
        for (int d = 1; d <= Dcap; ++d) {
            in.log_dur(j, d - 1) = sojourn_logpmf(p.sojourns[j], d) - log_z;
            in.log_surv(j, d - 1) = sojourn_log_survivor(p.sojourns[j], d);
        }
    }
    in.log_em = log_emission_matrix(x, p, spec);
    return in;
}

// Degenerate single-state tables: occupancy is certain everywhere, so every
// row of xi carries the full evidence.
inline ForwardBackwardTables single_state_tables(const Matrix& log_em) {
    std::size_t T = log_em.rows();
    ForwardBackwardTables tb;
    tb.log_alpha = Matrix(T, 1, neg_inf);
    tb.log_beta = Matrix(T, 1, 0.0);
    tb.log_xi = Matrix(T, 1, neg_inf);
    double tot = 0.0;
    for (std::size_t t = 0; t < T; ++t) tot += log_em(t, 0);
    tb.log_alpha(T - 1, 0) = tot;
    for (std::size_t t = 0; t < T; ++t) tb.log_xi(t, 0) = tot;
    tb.log_evidence = tot;
    return tb;
}

}  // namespace detail

inline ForwardBackwardTables fb_hmm(const LabeledSeries& s, const Params& p,
                                    const ModelSpec& spec) {
    validate_params(p, spec);
    validate_series(s, spec);
    return fb_hmm_core(detail::log_vec(p.delta), detail::log_mat(p.tpm),
                       log_emission_matrix(s.x, p, spec));
}

inline ViterbiResult viterbi_hmm(const LabeledSeries& s, const Params& p, const ModelSpec& spec) {
    validate_params(p, spec);
    validate_series(s, spec);
    return viterbi_hmm_core(detail::log_vec(p.delta), detail::log_mat(p.tpm),
                            log_emission_matrix(s.x, p, spec));
}

inline ForwardBackwardTables fb_hsmm(const LabeledSeries& s, const Params& p,
                                     const ModelSpec& spec, int max_duration = 0,
                                     double budget = 5e9) {
    validate_params(p, spec);
    validate_series(s, spec);
    if (spec.n_states == 1)
        return detail::single_state_tables(log_emission_matrix(s.x, p, spec));
    return fb_hsmm_core(detail::build_hsmm_inputs(s.x, p, spec, max_duration), budget);
}

inline ViterbiResult viterbi_hsmm(const LabeledSeries& s, const Params& p, const ModelSpec& spec,
                                  int max_duration = 0, double budget = 5e9) {
    validate_params(p, spec);
    validate_series(s, spec);
    if (spec.n_states == 1) {
        ViterbiResult r;
        r.path.assign(s.x.rows(), 1);
        Matrix lem = log_emission_matrix(s.x, p, spec);
        r.log_joint = 0.0;
        for (std::size_t t = 0; t < lem.rows(); ++t) r.log_joint += lem(t, 0);
        return r;
    }
    return viterbi_hsmm_core(detail::build_hsmm_inputs(s.x, p, spec, max_duration), budget);
}

// Normalized occupancy probabilities from the tables.
inline Matrix local_state_probs(const ForwardBackwardTables& tb) {
    Matrix probs(tb.log_xi.rows(), tb.log_xi.cols(), 0.0);
    for (std::size_t t = 0; t < probs.rows(); ++t)
        for (std::size_t j = 0; j < probs.cols(); ++j)
            probs(t, j) = std::exp(tb.log_xi(t, j) - tb.log_evidence);
    return probs;
}

inline DecodeResult decode_one(const LabeledSeries& s, const Params& p, const ModelSpec& spec,
                               DecodeMode mode = DecodeMode::Both, int max_duration = 0) {
    DecodeResult r;
    bool hsmm = spec.family == ModelFamily::Hsmm;
    if (mode != DecodeMode::Global) {
        ForwardBackwardTables tb = hsmm ? fb_hsmm(s, p, spec, max_duration) : fb_hmm(s, p, spec);
        r.local_probs = local_state_probs(tb);
        r.local_path.resize(r.local_probs.rows());
        for (std::size_t t = 0; t < r.local_probs.rows(); ++t)
            r.local_path[t] = detail::argmax_row(r.local_probs.row(t), r.local_probs.cols()) + 1;
        r.loglik_evidence = tb.log_evidence;
    }
    if (mode != DecodeMode::Local) {
        ViterbiResult v =
            hsmm ? viterbi_hsmm(s, p, spec, max_duration) : viterbi_hmm(s, p, spec);
        r.global_path = std::move(v.path);
        if (mode == DecodeMode::Global) r.loglik_evidence = v.log_joint;
    }
    return r;
}

struct PooledDecode {
    DecodeResult pooled;
    std::vector<DecodeResult> per_draw;
};

// Decoding under posterior draws: each draw is decoded separately, local
// probabilities are averaged across draws, the pooled local path is the
// argmax of the averaged probabilities and the pooled global path the
// per-time majority vote over draws (ties toward the lower state).
inline PooledDecode decode(const LabeledSeries& s, const std::vector<Params>& draws,
                           const ModelSpec& spec, DecodeMode mode = DecodeMode::Both,
                           int max_duration = 0) {
    if (draws.empty()) throw std::invalid_argument("decode: empty draw set");
    PooledDecode out;
    std::size_t T = s.x.rows();
    std::size_t J = static_cast<std::size_t>(spec.n_states);
    out.per_draw.reserve(draws.size());
    for (const Params& p : draws)
        out.per_draw.push_back(decode_one(s, p, spec, mode, max_duration));

    DecodeResult& pooled = out.pooled;
    double mean_ev = 0.0;
    for (const DecodeResult& d : out.per_draw) mean_ev += d.loglik_evidence;
    pooled.loglik_evidence = mean_ev / static_cast<double>(out.per_draw.size());

    if (mode != DecodeMode::Global) {
        pooled.local_probs = Matrix(T, J, 0.0);
        for (const DecodeResult& d : out.per_draw)
            for (std::size_t t = 0; t < T; ++t)
                for (std::size_t j = 0; j < J; ++j)
                    pooled.local_probs(t, j) += d.local_probs(t, j);
        double inv = 1.0 / static_cast<double>(out.per_draw.size());
        for (double& v : pooled.local_probs.data()) v *= inv;
        pooled.local_path.resize(T);
        for (std::size_t t = 0; t < T; ++t)
            pooled.local_path[t] =
                detail::argmax_row(pooled.local_probs.row(t), J) + 1;
    }
    if (mode != DecodeMode::Local) {
        pooled.global_path.resize(T);
        std::vector<int> votes(J);
        for (std::size_t t = 0; t < T; ++t) {
            std::fill(votes.begin(), votes.end(), 0);
            for (const DecodeResult& d : out.per_draw) ++votes[d.global_path[t] - 1];
            int best = 0;
            for (std::size_t j = 1; j < J; ++j)
                if (votes[j] > votes[best]) best = static_cast<int>(j);
            pooled.global_path[t] = best + 1;
        }
    }
    return out;
}

}  // namespace semimarkov
