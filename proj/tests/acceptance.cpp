// End-to-end acceptance checks. Each numbered check prints exactly one
// PASS/FAIL line; the process exits nonzero if any check fails. Tolerances
// are pinned here, next to the checks they gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <semimarkov/cli.hpp>

#include "support/enumeration.hpp"
#include "support/instances.hpp"

using namespace semimarkov;
using testsupport::Instance;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

std::string fix(double v, int prec = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int pick(Rng& rng, int n) {
    int v = static_cast<int>(rng.uniform() * static_cast<double>(n));
    return std::min(v, n - 1);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Occupancy normalization: sum_j xi_t(j) must reproduce the evidence at
// every t. Tracked across every series any check decodes.
struct XiTracker {
    double worst = 0.0;
    std::size_t n_series = 0;

    void add(const ForwardBackwardTables& tb) {
        ++n_series;
        for (std::size_t t = 0; t < tb.log_xi.rows(); ++t) {
            std::vector<double> row(tb.log_xi.cols());
            for (std::size_t j = 0; j < row.size(); ++j) row[j] = tb.log_xi(t, j);
            worst = std::max(worst, std::abs(log_sum_exp(row) - tb.log_evidence));
        }
    }
};

XiTracker xi_tracker;

// ---------------------------------------------------------------------------
// 1 + 2: enumeration oracles for local and global decoding
// ---------------------------------------------------------------------------

struct EnumSweep {
    double max_marginal = 0.0;   // worst |local prob - enumerated prob|
    double max_evidence = 0.0;   // worst |log evidence - log enumerated sum|
    double max_joint = 0.0;      // worst |viterbi log joint - log enumerated max|
    double max_pathw = 0.0;      // worst gap between returned path weight and max
    int path_mismatches = 0;
    double elapsed = 0.0;
};

EnumSweep run_enum_sweep() {
    auto t0 = std::chrono::steady_clock::now();
    EnumSweep sw;
    Rng rng(20260819);
    for (int i = 0; i < 200; ++i) {
        int J = 2 + pick(rng, 2);
        std::size_t T = static_cast<std::size_t>(4 + pick(rng, 4));
        int D = 2 + pick(rng, 6);
        int p = pick(rng, 2);
        int dim = 1 + pick(rng, 2);

        Instance hs = testsupport::random_hsmm_instance(rng, J, T, D, p, dim);
        oracle::EmitFn emit = oracle::make_ar_emit(hs.params.emissions, hs.series.x, p);
        oracle::Score sc = oracle::score_hsmm(hs.params.delta, hs.params.tpm,
                                              hs.params.sojourns, D, emit, T);

        ForwardBackwardTables tb = fb_hsmm(hs.series, hs.params, hs.spec, D);
        xi_tracker.add(tb);
        Matrix probs = local_state_probs(tb);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t j = 0; j < static_cast<std::size_t>(J); ++j)
                sw.max_marginal = std::max(
                    sw.max_marginal, std::abs(probs(t, j) - sc.marginals(t, j) / sc.evidence));
        sw.max_evidence =
            std::max(sw.max_evidence, std::abs(tb.log_evidence - std::log(sc.evidence)));

        ViterbiResult vit = viterbi_hsmm(hs.series, hs.params, hs.spec, D);
        sw.max_joint =
            std::max(sw.max_joint, std::abs(vit.log_joint - std::log(sc.best_weight)));
        std::vector<int> zero_based(vit.path.size());
        for (std::size_t t = 0; t < T; ++t) zero_based[t] = vit.path[t] - 1;
        double own = oracle::hsmm_path_weight(zero_based, hs.params.delta, hs.params.tpm,
                                              hs.params.sojourns, D, emit);
        sw.max_pathw =
            std::max(sw.max_pathw, std::abs(std::log(own) - std::log(sc.best_weight)));
        if (vit.path != sc.best_path) ++sw.path_mismatches;

        Instance hm = testsupport::random_hmm_instance(rng, J, T, p, dim);
        oracle::EmitFn emit2 = oracle::make_ar_emit(hm.params.emissions, hm.series.x, p);
        oracle::Score sc2 = oracle::score_hmm(hm.params.delta, hm.params.tpm, emit2, T);

        ForwardBackwardTables tb2 = fb_hmm(hm.series, hm.params, hm.spec);
        xi_tracker.add(tb2);
        Matrix probs2 = local_state_probs(tb2);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t j = 0; j < static_cast<std::size_t>(J); ++j)
                sw.max_marginal = std::max(
                    sw.max_marginal, std::abs(probs2(t, j) - sc2.marginals(t, j) / sc2.evidence));
        sw.max_evidence =
            std::max(sw.max_evidence, std::abs(tb2.log_evidence - std::log(sc2.evidence)));

        ViterbiResult vit2 = viterbi_hmm(hm.series, hm.params, hm.spec);
        sw.max_joint =
            std::max(sw.max_joint, std::abs(vit2.log_joint - std::log(sc2.best_weight)));
        if (vit2.path != sc2.best_path) ++sw.path_mismatches;
    }
    sw.elapsed = seconds_since(t0);
    return sw;
}

Outcome check1(const EnumSweep& sw) {
    bool pass = sw.max_marginal <= 1e-8 && sw.max_evidence <= 1e-8 && sw.elapsed < 60.0;
    return {pass, "marginals vs enumeration on 200 instances: max |dprob| " +
                      sci(sw.max_marginal) + ", max |dlogZ| " + sci(sw.max_evidence) + ", " +
                      fix(sw.elapsed, 1) + " s (< 60 s)"};
}

Outcome check2(const EnumSweep& sw) {
    bool pass = sw.max_joint <= 1e-10 && sw.max_pathw <= 1e-10 && sw.path_mismatches == 0 &&
                sw.elapsed < 60.0;
    return {pass, "viterbi vs enumerated maximum on the same instances: max |dlog joint| " +
                      sci(sw.max_joint) + ", path mismatches " +
                      std::to_string(sw.path_mismatches) + ", " + fix(sw.elapsed, 1) +
                      " s (< 60 s)"};
}

// ---------------------------------------------------------------------------
// 3: geometric-sojourn model against its embedded Markov chain
// ---------------------------------------------------------------------------

Outcome check3() {
    Rng rng(30303);
    double max_ev = 0.0, max_marg = 0.0, max_joint = 0.0;
    int path_mismatches = 0;
    for (int i = 0; i < 50; ++i) {
        int J = 2 + pick(rng, 2);
        std::size_t T = static_cast<std::size_t>(150 + pick(rng, 51));
        int p = pick(rng, 2);
        Instance hs = testsupport::random_hsmm_instance(rng, J, T, static_cast<int>(T), p, 1,
                                                        /*geometric_only=*/true,
                                                        /*stay_max=*/0.8);
        Params emb = testsupport::embed_geometric(hs.params);
        ModelSpec hspec = hs.spec;
        hspec.family = ModelFamily::Hmm;

        ForwardBackwardTables a = fb_hsmm(hs.series, hs.params, hs.spec, static_cast<int>(T));
        ForwardBackwardTables b = fb_hmm(hs.series, emb, hspec);
        xi_tracker.add(a);
        xi_tracker.add(b);
        max_ev = std::max(max_ev, std::abs(a.log_evidence - b.log_evidence));
        Matrix pa = local_state_probs(a), pb = local_state_probs(b);
        for (std::size_t k = 0; k < pa.data().size(); ++k)
            max_marg = std::max(max_marg, std::abs(pa.data()[k] - pb.data()[k]));

        ViterbiResult va = viterbi_hsmm(hs.series, hs.params, hs.spec, static_cast<int>(T));
        ViterbiResult vb = viterbi_hmm(hs.series, emb, hspec);
        max_joint = std::max(max_joint, std::abs(va.log_joint - vb.log_joint));
        if (va.path != vb.path) ++path_mismatches;
    }
    bool pass = max_ev <= 1e-8 && max_marg <= 1e-8 && max_joint <= 1e-8 && path_mismatches == 0;
    return {pass, "geometric embedding on 50 instances: max |dlogZ| " + sci(max_ev) +
                      ", max |dprob| " + sci(max_marg) + ", max |dlog joint| " +
                      sci(max_joint) + ", path mismatches " + std::to_string(path_mismatches)};
}

// ---------------------------------------------------------------------------
// 4: occupancy normalization across everything decoded above plus a batch of
//    longer auto-truncated decodes
// ---------------------------------------------------------------------------

Outcome check4() {
    Rng rng(40404);
    for (int i = 0; i < 5; ++i) {
        int J = 2 + pick(rng, 2);
        Instance hs = testsupport::random_hsmm_instance(rng, J, 400, /*D=*/0, pick(rng, 2));
        xi_tracker.add(fb_hsmm(hs.series, hs.params, hs.spec));  // automatic truncation
    }
    bool pass = xi_tracker.worst <= 1e-9;
    return {pass, "sum_j xi_t(j) == evidence on " + std::to_string(xi_tracker.n_series) +
                      " decoded series: worst relative gap " + sci(xi_tracker.worst)};
}

// ---------------------------------------------------------------------------
// 5: closed-form Dirichlet updates and their sampled means
// ---------------------------------------------------------------------------

Outcome check5() {
    ModelSpec spec;
    spec.family = ModelFamily::Hsmm;
    spec.n_states = 3;
    spec.obs_dim = 1;
    spec.sojourn_family = SojournFamily::NegBinomial;

    auto series = [](const std::string& id, std::vector<int> labels) {
        LabeledSeries s;
        s.id = id;
        s.x = Matrix(labels.size(), 1, 0.1);
        s.labels = std::move(labels);
        return s;
    };
    std::vector<LabeledSeries> set = {series("s1", {1, 2, 2, 3, 1}), series("s2", {2, 1, 1})};

    Priors pr = default_priors(spec);
    pr.delta_dirichlet = {0.5, 1.0, 1.5};
    pr.tpm_dirichlet = Matrix(3, 3, 2.0);
    for (std::size_t j = 0; j < 3; ++j) pr.tpm_dirichlet(j, j) = 0.0;

    SufficientStats st = sufficient_stats(set, spec);
    DirichletPosteriors post = dirichlet_posteriors(st, pr, spec);

    bool exact = post.delta == std::vector<double>{1.5, 2.0, 1.5};
    // run switches: 1->2, 2->3, 3->1 in s1 and 2->1 in s2, on top of prior 2
    Matrix want(3, 3, 2.0);
    want(0, 1) = 3.0;
    want(1, 2) = 3.0;
    want(2, 0) = 3.0;
    want(1, 0) = 3.0;
    for (std::size_t j = 0; j < 3; ++j) want(j, j) = 0.0;
    exact = exact && post.tpm.data() == want.data();

    // sampled means against analytic posterior means, three MC standard
    // errors at 1e4 draws
    const int n = 10000;
    Rng rng(50505);
    auto mc_gap = [&](const std::vector<double>& alpha) {
        double a0 = 0.0;
        for (double a : alpha) a0 += a;
        std::vector<double> acc(alpha.size(), 0.0);
        bool zero_ok = true;
        for (int i = 0; i < n; ++i) {
            std::vector<double> draw = rng.dirichlet(alpha);
            for (std::size_t j = 0; j < alpha.size(); ++j) {
                acc[j] += draw[j];
                if (alpha[j] == 0.0 && draw[j] != 0.0) zero_ok = false;
            }
        }
        double worst = 0.0;
        for (std::size_t j = 0; j < alpha.size(); ++j) {
            if (alpha[j] == 0.0) continue;
            double m = alpha[j] / a0;
            double se = std::sqrt(m * (1.0 - m) / (a0 + 1.0) / n);
            worst = std::max(worst, std::abs(acc[j] / n - m) / se);
        }
        return zero_ok ? worst : std::numeric_limits<double>::infinity();
    };
    std::vector<double> row1 = {post.tpm(1, 0), post.tpm(1, 1), post.tpm(1, 2)};
    double z = std::max(mc_gap(post.delta), mc_gap(row1));

    bool pass = exact && z <= 3.0;
    return {pass, std::string("posterior concentrations ") +
                      (exact ? "exact" : "WRONG") + "; sampled means within " + fix(z, 2) +
                      " MC standard errors (<= 3) at 1e4 draws"};
}

// ---------------------------------------------------------------------------
// 6: credible-interval recovery of emission means on simulated data
// ---------------------------------------------------------------------------

Outcome check6() {
    ModelSpec spec;
    spec.family = ModelFamily::Hsmm;
    spec.n_states = 2;
    spec.obs_dim = 1;
    spec.sojourn_family = SojournFamily::NegBinomial;

    Params truth;
    truth.delta = {0.5, 0.5};
    truth.tpm = Matrix(2, 2, 0.0);
    truth.tpm(0, 1) = 1.0;
    truth.tpm(1, 0) = 1.0;
    truth.emissions = {StateEmission{{0.0}, Matrix(0, 1), {1.0}},
                       StateEmission{{2.0}, Matrix(0, 1), {1.0}}};
    truth.sojourns = {SojournDist::negbinomial(5.0, 2.0), SojournDist::negbinomial(8.0, 1.0)};

    SamplerConfig cfg;
    cfg.burn_in = 1000;
    cfg.thin = 2;

    // 1000 kept draws put the nearest-rank quantile estimates well inside the
    // interval widths; the hit count is unchanged when the budget is doubled.
    int hits = 0;
    const int reps = 20, n_draws = 1000;
    for (int rep = 0; rep < reps; ++rep) {
        LabeledSeries s = simulate_series(spec, truth, 3000, derive_seed(1000, rep),
                                          "rep" + std::to_string(rep));
        PosteriorDraws pd = sample_posterior({s}, default_priors(spec), spec, n_draws,
                                             derive_seed(2000, rep), cfg);
        bool inside = true;
        for (std::size_t j = 0; j < 2; ++j) {
            std::vector<double> means;
            means.reserve(pd.draws.size());
            for (const Params& d : pd.draws) means.push_back(d.emissions[j].mean[0]);
            std::sort(means.begin(), means.end());
            double lo = means[static_cast<std::size_t>(0.025 * n_draws)];
            double hi = means[static_cast<std::size_t>(0.975 * n_draws)];
            double want = truth.emissions[j].mean[0];
            inside = inside && lo <= want && want <= hi;
        }
        hits += inside ? 1 : 0;
    }
    bool pass = hits >= 17;
    return {pass, "emission means inside central 95% credible intervals in " +
                      std::to_string(hits) + "/20 replications (>= 17)"};
}

// ---------------------------------------------------------------------------
// 7: comparative trends in the desk-scale simulation study
// ---------------------------------------------------------------------------

Outcome check7() {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<StudyRow> rows = run_simulation_study(desk_scale(), 20260819, {});
    double elapsed = seconds_since(t0);

    double low_min = 1.0;
    std::vector<double> none_hsmm, none_hmm, one_hsmm, one_hmm;
    std::map<std::string, std::map<std::string, double>> by_cell;
    for (const StudyRow& r : rows) {
        by_cell[r.cell][r.model] = r.acc_fb.median;
        if (r.overlap == "low") low_min = std::min(low_min, r.acc_fb.median);
        if (r.overlap == "high" && r.sojourn_avg == 20.0) {
            bool one_geometric = r.k1 == 1.0;
            auto& hs = one_geometric ? one_hsmm : none_hsmm;
            auto& hm = one_geometric ? one_hmm : none_hmm;
            (r.model == "hsmm" ? hs : hm).push_back(r.acc_fb.median);
        }
    }

    bool a = low_min > 0.9;
    double none_gap = median(none_hsmm) - median(none_hmm);
    double one_gap = median(one_hsmm) - median(one_hmm);
    bool b = none_gap > 0.0;
    bool c = one_gap < none_gap;
    bool pass = a && b && c && elapsed < 900.0;
    return {pass,
            "desk study (" + std::to_string(by_cell.size()) + " cells, " + fix(elapsed, 0) +
                " s < 900 s): low-overlap min median FB acc " + fix(low_min) +
                " (> 0.9); high-overlap avg-20 pooled FB gap hsmm-hmm: " + fix(none_gap) +
                " with no geometric sojourn (> 0), " + fix(one_gap) +
                " with one geometric sojourn (smaller)"};
}

// ---------------------------------------------------------------------------
// 8: metric identities
// ---------------------------------------------------------------------------

Outcome check8() {
    std::vector<int> labels = {1, 2, 3, 4, 1};
    Matrix perfect(5, 4, 0.0);
    for (std::size_t t = 0; t < 5; ++t)
        perfect(t, static_cast<std::size_t>(labels[t] - 1)) = 1.0;
    bool ce0 = cross_entropy_total(perfect, labels) == 0.0 &&
               cross_entropy_mean(perfect, labels) == 0.0;

    Matrix uniform(5, 4, 0.25);
    double gap = std::abs(cross_entropy_mean(uniform, labels) - std::log(4.0));

    bool acc = accuracy({1, 2, 3}, {1, 2, 3}) == 1.0 && accuracy({1, 1, 1}, {2, 2, 2}) == 0.0;

    bool pass = ce0 && gap <= 1e-12 && acc;
    return {pass, std::string("cross-entropy 0 on certainty: ") + (ce0 ? "yes" : "NO") +
                      "; |mean CE - log 4| on uniform 4-state rows: " + sci(gap) +
                      " (<= 1e-12); accuracy endpoints 0 and 1: " + (acc ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// 9: feature pipeline geometry and the inactive / fast-walk contrast
// ---------------------------------------------------------------------------

Outcome check9() {
    Rng rng(90909);
    bool perm_ok = true;
    std::vector<double> a(64), b(64), c(64);
    for (std::size_t i = 0; i < 64; ++i) {
        a[i] = rng.normal(0.0, 1.0);
        b[i] = rng.normal(0.0, 1.0);
        c[i] = rng.normal(0.0, 1.0);
    }
    std::vector<double> base = vedba(a, b, c, 8);
    const std::vector<double>* axes[3] = {&a, &b, &c};
    const int perms[5][3] = {{1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
    for (const auto& pm : perms) {
        std::vector<double> other = vedba(*axes[pm[0]], *axes[pm[1]], *axes[pm[2]], 8);
        for (std::size_t i = 0; i < base.size(); ++i)
            perm_ok = perm_ok && std::abs(base[i] - other[i]) <= 1e-12;
    }

    std::vector<double> angles = pitch({0.0, 1.0, -1.0}, 0);
    bool pitch_ok = angles[0] == 0.0 && std::abs(angles[1] - 90.0) <= 1e-12 &&
                    std::abs(angles[2] + 90.0) <= 1e-12;

    bool ma_ok = moving_average(a, 1) == a;

    // near-constant posture versus a strong high-frequency gait oscillation
    auto build = [&](bool active, const std::string& label) {
        RawAccel raw;
        for (int i = 0; i < 240; ++i) {
            raw.t.push_back(i / 8.0);
            double phase = 2.0 * M_PI * i / 5.0;
            if (active) {
                raw.surge.push_back(0.3 + 0.8 * std::sin(phase) + rng.normal(0.0, 0.05));
                raw.sway.push_back(0.5 * std::cos(phase) + rng.normal(0.0, 0.05));
                raw.heave.push_back(0.6 + 0.5 * std::sin(phase + 1.0) + rng.normal(0.0, 0.05));
            } else {
                raw.surge.push_back(rng.normal(0.95, 0.005));
                raw.sway.push_back(rng.normal(0.02, 0.005));
                raw.heave.push_back(rng.normal(0.1, 0.005));
            }
            raw.labels.push_back(label);
        }
        FeatureConfig cfg;
        cfg.rate = 8;
        cfg.static_window = 8;
        return window_features(raw, cfg);
    };
    FeatureSeries still = build(false, "inactive");
    FeatureSeries walk = build(true, "fast-walk");
    bool separated = still.x.rows() == 30 && walk.x.rows() == 30;
    for (std::size_t col : {std::size_t{0}, std::size_t{2}}) {
        double still_max = -1e300, walk_min = 1e300;
        for (std::size_t w = 0; w < still.x.rows(); ++w) {
            still_max = std::max(still_max, still.x(w, col));
            walk_min = std::min(walk_min, walk.x(w, col));
        }
        separated = separated && still_max < walk_min;
    }

    bool pass = perm_ok && pitch_ok && ma_ok && separated;
    return {pass, std::string("vedba axis-permutation invariant: ") + (perm_ok ? "yes" : "NO") +
                      "; pitch at 0/+1g/-1g = 0/90/-90 deg: " + (pitch_ok ? "yes" : "NO") +
                      "; window-1 moving average is identity: " + (ma_ok ? "yes" : "NO") +
                      "; inactive < fast-walk on log mean vedba and log sd pitch in every "
                      "window: " +
                      (separated ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// 10: byte-identical CLI pipelines under a fixed seed
// ---------------------------------------------------------------------------

std::map<std::string, std::string> collect_files(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        out[fs::relative(entry.path(), root).string()] =
            std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return out;
}

Outcome check10() {
    fs::path base = fs::temp_directory_path() / "semimarkov-acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    std::string grid_path = (base / "grid.json").string();
    write_json_file(grid_path, Json{{"overlaps", {"low"}},
                                    {"avgs", {6.0}},
                                    {"diffs", {2.0}},
                                    {"dispersions", {{1.0, 3.0}}}});
    std::string fit_cfg = (base / "fit.json").string();
    write_json_file(fit_cfg,
                    Json{{"spec",
                          {{"family", "hsmm"},
                           {"n_states", 2},
                           {"obs_dim", 1},
                           {"sojourn_family", "negbinomial"}}},
                         {"sampler", {{"burn_in", 60}}},
                         {"n_draws", 5},
                         {"seed", 3}});
    std::string accel_path = (base / "accel.csv").string();
    {
        RawAccel raw;
        Rng rng(777);
        for (int i = 0; i < 48; ++i) {
            raw.t.push_back(i / 4.0);
            raw.surge.push_back(rng.normal(0.5, 0.2));
            raw.sway.push_back(rng.normal(0.0, 0.2));
            raw.heave.push_back(rng.normal(0.3, 0.2));
        }
        std::ofstream os = open_out(accel_path);
        write_accel_csv(os, raw);
    }

    std::string cell = "ov-low_avg-6_diff-2_k-1-3";
    int failures = 0;
    auto pipeline = [&](const std::string& leaf) {
        fs::path root = base / leaf;
        fs::create_directories(root);
        std::ostringstream sink;
        std::string sim = (root / "sim").string();
        std::string s0 = sim + "/" + cell + "/series_0.csv";
        std::string s1 = sim + "/" + cell + "/series_1.csv";
        std::vector<std::vector<std::string>> calls = {
            {"simulate", "--config", grid_path, "--out", sim, "--seed", "11", "--n-series",
             "2", "--length", "150"},
            {"features", "--input", accel_path, "--out", (root / "feat.csv").string(),
             "--rate", "4", "--static-window", "4"},
            {"fit", "--series", s0, s1, "--config", fit_cfg, "--out",
             (root / "draws.json").string()},
            {"decode", "--series", s0, "--draws", (root / "draws.json").string(), "--out",
             (root / "dec.csv").string()},
            {"cv", "--series", s0, s1, "--config", fit_cfg, "--out", (root / "cv").string(),
             "--pred-draws", "2", "--seed", "4"},
        };
        for (const auto& args : calls)
            if (run_cli(args, sink, sink) != 0) ++failures;
        return collect_files(root);
    };

    std::map<std::string, std::string> first = pipeline("a");
    std::map<std::string, std::string> second = pipeline("b");
    bool identical = failures == 0 && !first.empty() && first.size() == second.size();
    if (identical)
        for (const auto& [path, bytes] : first)
            identical = identical && second.count(path) && second.at(path) == bytes;
    fs::remove_all(base);
    return {identical, "simulate/features/fit/decode/cv re-run with the same seeds: " +
                           std::to_string(first.size()) + " output files, " +
                           (identical ? "all byte-identical" : "MISMATCH") +
                           (failures ? " (" + std::to_string(failures) + " nonzero exits)"
                                     : "")};
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, Outcome>> results;
    auto run = [&](const std::string& name, auto&& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        results.emplace_back(name, o);
        std::cout << name << (o.pass ? " PASS" : " FAIL") << " - " << o.detail << std::endl;
    };

    EnumSweep sweep;
    std::string sweep_error;
    try {
        sweep = run_enum_sweep();
    } catch (const std::exception& e) {
        sweep_error = e.what();
    }
    run("AC1", [&]() -> Outcome {
        if (!sweep_error.empty()) return {false, "exception: " + sweep_error};
        return check1(sweep);
    });
    run("AC2", [&]() -> Outcome {
        if (!sweep_error.empty()) return {false, "exception: " + sweep_error};
        return check2(sweep);
    });
    run("AC3", check3);
    run("AC4", check4);
    run("AC5", check5);
    run("AC6", check6);
    run("AC7", check7);
    run("AC8", check8);
    run("AC9", check9);
    run("AC10", check10);

    int failed = 0;
    for (const auto& [name, o] : results) failed += o.pass ? 0 : 1;
    std::cout << (failed == 0 ? "all acceptance checks passed"
                              : std::to_string(failed) + " acceptance check(s) failed")
              << std::endl;
    return failed == 0 ? 0 : 1;
}
