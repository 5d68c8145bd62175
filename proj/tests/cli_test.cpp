#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <semimarkov/cli.hpp>

using namespace semimarkov;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

Json micro_grid() {
    return Json{{"overlaps", {"low"}},
                {"avgs", {6.0}},
                {"diffs", {2.0}},
                {"dispersions", {{1.0, 3.0}}}};
}

// two well-separated geometric states; enough signal that short chains mix
void write_demo_series(const std::string& path, std::uint64_t seed, const std::string& id) {
    ModelSpec spec;
    spec.family = ModelFamily::Hmm;
    spec.n_states = 2;
    spec.obs_dim = 1;
    Params p;
    p.delta = {0.5, 0.5};
    p.tpm = Matrix(2, 2);
    p.tpm(0, 0) = 0.85;
    p.tpm(0, 1) = 0.15;
    p.tpm(1, 0) = 0.2;
    p.tpm(1, 1) = 0.8;
    p.emissions = {StateEmission{{0.0}, Matrix(0, 1), {1.0}},
                   StateEmission{{3.0}, Matrix(0, 1), {1.0}}};
    write_series_csv(path, simulate_series(spec, p, 220, seed, id));
}

Json demo_fit_config() {
    return Json{{"spec", {{"family", "hmm"}, {"n_states", 2}, {"obs_dim", 1}}},
                {"sampler", {{"burn_in", 80}}},
                {"n_draws", 6},
                {"seed", 5}};
}

}  // namespace

TEST_CASE("usage errors, help and runtime failures use distinct exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"simulate"}).code == 2);  // --out is required

    CliResult help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    CHECK(help.out.find("decode") != std::string::npos);

    TempDir dir("semimarkov-cli-codes");
    CHECK(run({"study", "--scale", "huge", "--out", dir / "t.csv"}).code == 2);
    CHECK(run({"decode", "--series", "a.csv", "--draws", "d.json", "--params", "p.json",
               "--out", dir / "o.csv"})
              .code == 2);

    CliResult missing =
        run({"features", "--input", dir / "absent.csv", "--out", dir / "f.csv"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("error:") != std::string::npos);

    CliResult no_model = run({"decode", "--series", dir / "absent.csv", "--out", dir / "o.csv"});
    CHECK(no_model.code == 1);
    CHECK(no_model.err.find("--draws or --params") != std::string::npos);
}

TEST_CASE("simulate writes a reproducible grid of labeled series") {
    TempDir dir("semimarkov-cli-sim");
    std::string grid_path = dir / "grid.json";
    write_json_file(grid_path, micro_grid());

    auto simulate_into = [&](const std::string& leaf, const std::string& seed) {
        CliResult r = run({"simulate", "--config", grid_path, "--out", dir / leaf, "--seed",
                           seed, "--n-series", "2", "--length", "40"});
        REQUIRE(r.code == 0);
        return r;
    };
    CliResult first = simulate_into("a", "9");
    CHECK(first.out.find("wrote 1 cells x 2 series") != std::string::npos);
    simulate_into("b", "9");
    simulate_into("c", "10");

    std::string cell = "ov-low_avg-6_diff-2_k-1-3";
    for (const std::string& leaf :
         {cell + "/series_0.csv", cell + "/series_1.csv", cell + "/params.json",
          std::string("manifest.json")}) {
        CHECK(slurp(dir / ("a/" + leaf)) == slurp(dir / ("b/" + leaf)));
    }
    CHECK(slurp(dir / ("a/" + cell + "/series_0.csv")) !=
          slurp(dir / ("c/" + cell + "/series_0.csv")));

    Json manifest = read_json_file(dir / "a/manifest.json");
    CHECK(manifest["seed"] == 9);
    CHECK(manifest["config_hash"].get<std::string>().size() == 16);

    // the simulated series parse back as labeled two-state data
    SeriesCsv back = read_series_csv(dir / ("a/" + cell + "/series_0.csv"));
    CHECK(back.series.x.rows() == 40);
    CHECK(back.series.labels.size() == 40);
    for (int l : back.series.labels) CHECK((l == 1 || l == 2));
}

TEST_CASE("features turns raw accelerometer files into window summaries") {
    TempDir dir("semimarkov-cli-feat");
    RawAccel raw;
    for (int i = 0; i < 16; ++i) {
        raw.t.push_back(0.25 * i);
        bool still = i < 8;
        raw.surge.push_back(still ? 0.9 : (i % 2 ? 0.7 : -0.7));
        raw.sway.push_back(still ? 0.0 : (i % 2 ? -0.5 : 0.5));
        raw.heave.push_back(still ? 0.1 : 0.3);
        raw.labels.push_back(still ? "rest" : "shake");
    }
    std::string in_path = dir / "raw.csv";
    {
        std::ofstream os = open_out(in_path);
        write_accel_csv(os, raw);
    }

    CliResult r = run({"features", "--input", in_path, "--out", dir / "feat.csv", "--rate",
                       "4", "--static-window", "4"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("wrote 4 windows") != std::string::npos);

    std::string table = slurp(dir / "feat.csv");
    CHECK(table.substr(0, table.find('\n')) ==
          "t,log_mean_vedba,mean_pitch,log_sd_pitch,label");
    CHECK(count_lines(table) == 5);
    CHECK(table.find("rest") != std::string::npos);
    CHECK(table.find("shake") != std::string::npos);

    Json manifest = read_json_file(dir / "feat.csv.manifest.json");
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest["version"] == version_string());
}

TEST_CASE("fit, decode and cross-validation chain together") {
    TempDir dir("semimarkov-cli-fit");
    std::string a = dir / "a.csv", b = dir / "b.csv";
    write_demo_series(a, 21, "a");
    write_demo_series(b, 22, "b");
    std::string cfg = dir / "config.json";
    write_json_file(cfg, demo_fit_config());

    // posterior mode
    CliResult map_run =
        run({"fit", "--series", a, b, "--config", cfg, "--out", dir / "map.json", "--map"});
    REQUIRE(map_run.code == 0);
    Json map_json = read_json_file(dir / "map.json");
    Params map_params = map_json.at("params").get<Params>();
    CHECK(map_params.delta.size() == 2);
    CHECK(map_params.tpm(0, 0) + map_params.tpm(0, 1) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(map_params.emissions[1].mean[0] - map_params.emissions[0].mean[0]) > 1.0);

    // sampling twice with the config seed gives identical bytes
    REQUIRE(run({"fit", "--series", a, b, "--config", cfg, "--out", dir / "d1.json"}).code == 0);
    REQUIRE(run({"fit", "--series", a, b, "--config", cfg, "--out", dir / "d2.json"}).code == 0);
    CHECK(slurp(dir / "d1.json") == slurp(dir / "d2.json"));
    REQUIRE(run({"fit", "--series", a, b, "--config", cfg, "--out", dir / "d3.json", "--seed",
                 "6"})
                .code == 0);
    CHECK(slurp(dir / "d1.json") != slurp(dir / "d3.json"));

    PosteriorDraws pd = read_json_file(dir / "d1.json").get<PosteriorDraws>();
    CHECK(pd.draws.size() == 6);
    std::string report = slurp(dir / "d1.json.report.txt");
    CHECK(report.find("acceptance rates") != std::string::npos);

    // decode against the MAP parameters
    CliResult dec =
        run({"decode", "--series", a, "--params", dir / "map.json", "--out", dir / "dec.csv"});
    REQUIRE(dec.code == 0);
    std::string table = slurp(dir / "dec.csv");
    CHECK(count_lines(table) == 221);
    std::istringstream rows(table);
    std::string line;
    std::getline(rows, line);
    CHECK(line == "t,state_global,prob_1,prob_2,state_local");
    std::getline(rows, line);
    std::vector<std::string> fields = split_csv_line(line);
    REQUIRE(fields.size() == 5);
    CHECK(parse_double(fields[2]) + parse_double(fields[3]) ==
          Catch::Approx(1.0).margin(1e-9));
    Json dec_manifest = read_json_file(dir / "dec.csv.manifest.json");
    CHECK(std::isfinite(dec_manifest.at("loglik_evidence").get<double>()));

    // decode against pooled posterior draws
    CliResult dec2 =
        run({"decode", "--series", b, "--draws", dir / "d1.json", "--out", dir / "dec2.csv"});
    REQUIRE(dec2.code == 0);
    CHECK(count_lines(slurp(dir / "dec2.csv")) == 221);

    // leave-one-out over the two series, twice, byte-identical
    for (const std::string& leaf : {"cv1", "cv2"}) {
        REQUIRE(run({"cv", "--series", a, b, "--config", cfg, "--out", dir / leaf,
                     "--pred-draws", "3", "--seed", "4"})
                    .code == 0);
    }
    CHECK(slurp(dir / "cv1/cv.csv") == slurp(dir / "cv2/cv.csv"));
    std::string cv_table = slurp(dir / "cv1/cv.csv");
    CHECK(cv_table.substr(0, cv_table.find('\n')) ==
          "fold,held_out_id,train_hash,draw,acc_local,acc_global,ce_total,ce_mean");
    CHECK(count_lines(cv_table) == 1 + 2 * 3);  // 2 folds x 3 draws
    CHECK(count_lines(slurp(dir / "cv1/cv_summary.csv")) == 5);
    CHECK(read_json_file(dir / "cv1/manifest.json").contains("config_hash"));
}

TEST_CASE("study writes one table row per cell and model") {
    TempDir dir("semimarkov-cli-study");
    std::string grid_path = dir / "grid.json";
    write_json_file(grid_path, Json{{"overlaps", {"low"}},
                                    {"avgs", {8.0}},
                                    {"diffs", {2.0}},
                                    {"dispersions", {{1.0, 3.0}}}});

    CliResult r = run({"study", "--scale", "desk", "--out", dir / "study.csv", "--grid",
                       grid_path, "--seed", "3", "--plot", dir / "study.json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("wrote 2 study rows") != std::string::npos);

    std::string table = slurp(dir / "study.csv");
    CHECK(count_lines(table) == 3);
    CHECK(table.find(",hsmm,") != std::string::npos);
    CHECK(table.find(",hmm,") != std::string::npos);
    CHECK(table.find("ov-low_avg-8_diff-2_k-1-3") != std::string::npos);

    Json plot = read_json_file(dir / "study.json");
    REQUIRE(plot.is_array());
    CHECK(plot.size() == 2);
    CHECK(plot[0].contains("acc_fb"));
    CHECK(read_json_file(dir / "study.csv.manifest.json")["seed"] == 3);
}
