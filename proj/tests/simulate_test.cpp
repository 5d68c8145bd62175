#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <semimarkov/likelihood.hpp>
#include <semimarkov/simulate.hpp>

#include "support/instances.hpp"

using namespace semimarkov;

namespace {

ModelSpec two_state_spec(ModelFamily family, SojournFamily sf, int ar = 0) {
    ModelSpec spec;
    spec.family = family;
    spec.n_states = 2;
    spec.obs_dim = 1;
    spec.ar_order = ar;
    spec.sojourn_family = sf;
    return spec;
}

Params two_state_emissions() {
    Params p;
    p.delta = {0.5, 0.5};
    StateEmission e1{{0.0}, Matrix(0, 0), {1.0}};
    StateEmission e2{{3.0}, Matrix(0, 0), {1.0}};
    p.emissions = {e1, e2};
    return p;
}

// Mean run length per state, final (censored) run excluded.
std::vector<double> mean_run_lengths(const std::vector<int>& labels, int J,
                                     std::vector<std::size_t>* counts = nullptr) {
    std::vector<Run> runs = run_length_encode(labels);
    std::vector<double> sum(static_cast<std::size_t>(J), 0.0);
    std::vector<std::size_t> n(static_cast<std::size_t>(J), 0);
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
        sum[static_cast<std::size_t>(runs[r].state - 1)] += static_cast<double>(runs[r].length);
        ++n[static_cast<std::size_t>(runs[r].state - 1)];
    }
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] /= static_cast<double>(n[j]);
    if (counts) *counts = n;
    return sum;
}

}  // namespace

TEST_CASE("simulation is reproducible from the seed alone") {
    Rng rng(77);
    testsupport::Instance in = testsupport::random_hsmm_instance(rng, 3, 60, 0, 1);
    LabeledSeries a = simulate_series(in.spec, in.params, 60, 42, "a");
    LabeledSeries b = simulate_series(in.spec, in.params, 60, 42, "b");
    CHECK(a.labels == b.labels);
    CHECK(a.x.data() == b.x.data());

    LabeledSeries c = simulate_series(in.spec, in.params, 60, 43);
    CHECK(a.x.data() != c.x.data());

    CHECK(a.labels.size() == 60);
    for (int l : a.labels) {
        CHECK(l >= 1);
        CHECK(l <= 3);
    }
    CHECK_THROWS_AS(simulate_series(in.spec, in.params, 0, 1), std::invalid_argument);
}

TEST_CASE("markov chains realize the transition matrix") {
    ModelSpec spec = two_state_spec(ModelFamily::Hmm, SojournFamily::Geometric);
    Params p = two_state_emissions();
    p.tpm = Matrix(2, 2);
    p.tpm(0, 0) = 0.7;
    p.tpm(0, 1) = 0.3;
    p.tpm(1, 0) = 0.4;
    p.tpm(1, 1) = 0.6;

    std::size_t T = 100000;
    LabeledSeries s = simulate_series(spec, p, T, 2026);
    Matrix counts(2, 2, 0.0);
    for (std::size_t t = 1; t < T; ++t)
        counts(static_cast<std::size_t>(s.labels[t - 1] - 1),
               static_cast<std::size_t>(s.labels[t] - 1)) += 1.0;
    for (std::size_t i = 0; i < 2; ++i) {
        double tot = counts(i, 0) + counts(i, 1);
        REQUIRE(tot > 1000.0);
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(counts(i, j) / tot == Catch::Approx(p.tpm(i, j)).margin(0.01));
    }
}

TEST_CASE("geometric sojourns produce geometric run lengths") {
    ModelSpec spec = two_state_spec(ModelFamily::Hsmm, SojournFamily::Geometric);
    Params p = two_state_emissions();
    p.tpm = Matrix(2, 2, 0.0);
    p.tpm(0, 1) = 1.0;
    p.tpm(1, 0) = 1.0;
    p.sojourns = {SojournDist::geometric(0.5), SojournDist::geometric(0.75)};

    LabeledSeries s = simulate_series(spec, p, 200000, 99);
    std::vector<std::size_t> n;
    std::vector<double> mean = mean_run_lengths(s.labels, 2, &n);
    CHECK(mean[0] == Catch::Approx(2.0).margin(0.05));   // 1/(1-.5)
    CHECK(mean[1] == Catch::Approx(4.0).margin(0.12));   // 1/(1-.75)

    // Pr(run = 1) for state 1 is 1 - stay = 0.5
    std::vector<Run> runs = run_length_encode(s.labels);
    double ones = 0.0, tot = 0.0;
    for (std::size_t r = 0; r + 1 < runs.size(); ++r)
        if (runs[r].state == 1) {
            tot += 1.0;
            if (runs[r].length == 1) ones += 1.0;
        }
    CHECK(ones / tot == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("negative-binomial sojourns have the right run moments") {
    ModelSpec spec = two_state_spec(ModelFamily::Hsmm, SojournFamily::NegBinomial);
    Params p = two_state_emissions();
    p.tpm = Matrix(2, 2, 0.0);
    p.tpm(0, 1) = 1.0;
    p.tpm(1, 0) = 1.0;
    p.sojourns = {SojournDist::negbinomial(3.0, 2.0), SojournDist::negbinomial(1.0, 1.0)};

    LabeledSeries s = simulate_series(spec, p, 200000, 123);
    std::vector<Run> runs = run_length_encode(s.labels);
    double sum1 = 0.0, sq1 = 0.0, n1 = 0.0, sum2 = 0.0, n2 = 0.0;
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
        double len = static_cast<double>(runs[r].length);
        if (runs[r].state == 1) {
            sum1 += len;
            sq1 += len * len;
            n1 += 1.0;
        } else {
            sum2 += len;
            n2 += 1.0;
        }
    }
    double mean1 = sum1 / n1;
    CHECK(mean1 == Catch::Approx(4.0).margin(0.1));               // 1 + m
    CHECK(sq1 / n1 - mean1 * mean1 ==
          Catch::Approx(7.5).epsilon(0.05));                      // m + m^2/k
    CHECK(sum2 / n2 == Catch::Approx(2.0).margin(0.05));          // k = 1, geometric
}

TEST_CASE("autoregressive emissions settle into their stationary law") {
    ModelSpec spec;
    spec.family = ModelFamily::Hmm;
    spec.n_states = 1;
    spec.obs_dim = 1;
    spec.ar_order = 1;
    Params p;
    p.delta = {1.0};
    p.tpm = Matrix(1, 1, 1.0);
    StateEmission e;
    e.mean = {1.0};
    e.var = {0.64};
    e.ar = Matrix(1, 1, 0.6);
    p.emissions = {e};

    std::size_t T = 200000;
    LabeledSeries s = simulate_series(spec, p, T, 314);
    double mean = 0.0;
    for (std::size_t t = 0; t < T; ++t) mean += s.x(t, 0);
    mean /= static_cast<double>(T);
    double var = 0.0, cov = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        double d = s.x(t, 0) - mean;
        var += d * d;
        if (t > 0) cov += d * (s.x(t - 1, 0) - mean);
    }
    var /= static_cast<double>(T);
    cov /= static_cast<double>(T - 1);
    CHECK(mean == Catch::Approx(2.5).margin(0.05));        // 1 / (1 - 0.6)
    CHECK(var == Catch::Approx(1.0).epsilon(0.05));        // 0.64 / (1 - 0.36)
    CHECK(cov / var == Catch::Approx(0.6).margin(0.03));   // lag-1 autocorrelation

    // the very first observation is already a stationary draw
    double m0 = 0.0, v0 = 0.0;
    int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        LabeledSeries one = simulate_series(spec, p, 1, 10000 + static_cast<std::uint64_t>(r));
        m0 += one.x(0, 0);
        v0 += one.x(0, 0) * one.x(0, 0);
    }
    m0 /= reps;
    v0 = v0 / reps - m0 * m0;
    CHECK(m0 == Catch::Approx(2.5).margin(0.05));
    CHECK(v0 == Catch::Approx(1.0).epsilon(0.07));
}

TEST_CASE("explosive coefficients fall back to a plain normal start") {
    ModelSpec spec;
    spec.family = ModelFamily::Hmm;
    spec.n_states = 1;
    spec.obs_dim = 1;
    spec.ar_order = 1;
    Params p;
    p.delta = {1.0};
    p.tpm = Matrix(1, 1, 1.0);
    StateEmission e;
    e.mean = {1.0};
    e.var = {0.64};
    e.ar = Matrix(1, 1, 1.2);  // |coef| >= 1: no stationary marginal exists
    p.emissions = {e};

    double m0 = 0.0;
    int reps = 5000;
    for (int r = 0; r < reps; ++r)
        m0 += simulate_series(spec, p, 1, 500 + static_cast<std::uint64_t>(r)).x(0, 0);
    m0 /= reps;
    CHECK(m0 == Catch::Approx(1.0).margin(0.06));
}

TEST_CASE("scenario grid spans the full factorial design") {
    std::vector<Scenario> grid = scenario_grid();
    REQUIRE(grid.size() == 108);

    const Scenario& first = grid[0];
    CHECK(first.name == "ov-high_avg-90_diff-3_k-1-10");
    CHECK(first.overlap == "high");
    CHECK(first.mu2 == 0.3);
    CHECK(first.m1 == Catch::Approx(91.5));
    CHECK(first.m2 == Catch::Approx(88.5));
    CHECK(first.k1 == 1.0);
    CHECK(first.k2 == 10.0);
    CHECK(first.spec.family == ModelFamily::Hsmm);
    CHECK(first.spec.sojourn_family == SojournFamily::NegBinomial);
    CHECK(first.params.tpm(0, 1) == 1.0);
    CHECK(first.params.tpm(1, 0) == 1.0);
    CHECK(first.params.emissions[0].mean[0] == 0.0);
    CHECK(first.params.emissions[1].mean[0] == 0.3);
    CHECK(first.params.emissions[1].var[0] == 1.0);
    CHECK(first.params.sojourns[0].m == Catch::Approx(91.5));
    CHECK(first.params.sojourns[1].k == Catch::Approx(10.0));

    CHECK(grid[36].overlap == "medium");
    CHECK(grid[36].mu2 == 1.0);
    CHECK(grid[72].overlap == "low");
    CHECK(grid[72].mu2 == 3.0);

    // every cell is simulable and validates
    for (const Scenario& sc : grid) validate_params(sc.params, sc.spec);

    ScenarioConfig bad;
    bad.avgs = {10.0};
    bad.diffs = {30.0};
    CHECK_THROWS_AS(scenario_grid(bad), std::invalid_argument);
    bad.diffs = {20.0};  // avg - diff/2 == 0 is infeasible too
    CHECK_THROWS_AS(scenario_grid(bad), std::invalid_argument);
}
