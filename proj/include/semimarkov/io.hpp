#pragma once

// CSV and JSON serialization. CSV uses a dot decimal point, comma separators,
// and a mandatory header row; doubles are written shortest-round-trip. JSON
// goes through nlohmann::json, whose objects keep keys sorted, so dumps are
// canonical and hashable.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "decode.hpp"
#include "evaluate.hpp"
#include "features.hpp"
#include "fit.hpp"
#include "model.hpp"
#include "simulate.hpp"
#include "version.hpp"

namespace semimarkov {

using Json = nlohmann::json;

// ----------------------------------------------------------------------------
// Number formatting
// ----------------------------------------------------------------------------

inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view sv) {
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r'))
        sv.remove_suffix(1);
    double v = 0.0;
    auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (res.ec == std::errc{} && res.ptr == sv.data() + sv.size()) return v;
    if (sv == "inf") return std::numeric_limits<double>::infinity();
    if (sv == "-inf") return -std::numeric_limits<double>::infinity();
    if (sv == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("csv: cannot parse number '" + std::string(sv) + "'");
}

inline bool parse_int_strict(std::string_view sv, int& out) {
    while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ')) sv.remove_suffix(1);
    auto res = std::from_chars(sv.data(), sv.data() + sv.size(), out);
    return res.ec == std::errc{} && res.ptr == sv.data() + sv.size();
}

// ----------------------------------------------------------------------------
// CSV plumbing
// ----------------------------------------------------------------------------

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            std::string f = line.substr(start, i - start);
            if (!f.empty() && f.back() == '\r') f.pop_back();
            out.push_back(std::move(f));
            start = i + 1;
        }
    }
    return out;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return is;
}

// ----------------------------------------------------------------------------
// LabeledSeries CSV: header `t,<dim names...>[,label]`. The t column is a
// 1-based index on write and is checked but not stored on read. A label
// column of integers is used as-is (states are 1-based); any non-integer
// entry switches the whole column to string labels, which are mapped to
// 1..K in sorted order with the mapping reported back.
// ----------------------------------------------------------------------------

inline void write_series_csv(std::ostream& os, const LabeledSeries& s,
                             const std::vector<std::string>& dim_names = {}) {
    std::size_t dim = s.x.cols();
    if (!dim_names.empty() && dim_names.size() != dim)
        throw std::invalid_argument("write_series_csv: dim_names size mismatch");
    os << 't';
    for (std::size_t d = 0; d < dim; ++d) {
        os << ',';
        if (dim_names.empty())
            os << 'x' << (d + 1);
        else
            os << dim_names[d];
    }
    bool labeled = !s.labels.empty();
    if (labeled) {
        if (s.labels.size() != s.x.rows())
            throw std::invalid_argument("write_series_csv: label length mismatch");
        os << ",label";
    }
    os << '\n';
    for (std::size_t t = 0; t < s.x.rows(); ++t) {
        os << (t + 1);
        for (std::size_t d = 0; d < dim; ++d) os << ',' << fmt_double(s.x(t, d));
        if (labeled) os << ',' << s.labels[t];
        os << '\n';
    }
}

inline void write_series_csv(const std::string& path, const LabeledSeries& s,
                             const std::vector<std::string>& dim_names = {}) {
    std::ofstream os = open_out(path);
    write_series_csv(os, s, dim_names);
}

struct SeriesCsv {
    LabeledSeries series;
    std::vector<std::string> dim_names;
    std::vector<std::string> label_names;  // when labels came in as strings
};

inline SeriesCsv read_series_csv(std::istream& is, std::string id) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("series csv: empty file");
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "t")
        throw std::runtime_error("series csv: header must start with 't' and have a data column");
    bool labeled = header.back() == "label";
    std::size_t dim = header.size() - 1 - (labeled ? 1 : 0);
    if (dim == 0) throw std::runtime_error("series csv: no data columns");

    SeriesCsv out;
    out.series.id = std::move(id);
    out.dim_names.assign(header.begin() + 1, header.begin() + 1 + dim);
    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != header.size())
            throw std::runtime_error("series csv: row has " + std::to_string(f.size()) +
                                     " fields, expected " + std::to_string(header.size()));
        parse_double(f[0]);
        for (std::size_t d = 0; d < dim; ++d) values.push_back(parse_double(f[1 + d]));
        if (labeled) {
            if (f.back().empty()) throw std::runtime_error("series csv: empty label");
            raw_labels.push_back(f.back());
        }
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("series csv: no data rows");
    out.series.x = Matrix(rows, dim);
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t d = 0; d < dim; ++d) out.series.x(t, d) = values[t * dim + d];

    if (labeled) {
        std::vector<int> ints(rows);
        bool all_int = true;
        for (std::size_t t = 0; t < rows && all_int; ++t)
            all_int = parse_int_strict(raw_labels[t], ints[t]) && ints[t] >= 1;
        if (all_int) {
            out.series.labels = std::move(ints);
        } else {
            out.label_names = raw_labels;
            std::sort(out.label_names.begin(), out.label_names.end());
            out.label_names.erase(std::unique(out.label_names.begin(), out.label_names.end()),
                                  out.label_names.end());
            out.series.labels.resize(rows);
            for (std::size_t t = 0; t < rows; ++t) {
                auto it = std::lower_bound(out.label_names.begin(), out.label_names.end(),
                                           raw_labels[t]);
                out.series.labels[t] = static_cast<int>(it - out.label_names.begin()) + 1;
            }
        }
    }
    return out;
}

inline SeriesCsv read_series_csv(const std::string& path) {
    std::ifstream is = open_in(path);
    return read_series_csv(is, std::filesystem::path(path).stem().string());
}

// ----------------------------------------------------------------------------
// Raw accelerometer CSV: `t,surge,sway,heave[,label]`.
// ----------------------------------------------------------------------------

inline void write_accel_csv(std::ostream& os, const RawAccel& a) {
    bool labeled = !a.labels.empty();
    if (labeled && a.labels.size() != a.t.size())
        throw std::invalid_argument("write_accel_csv: label length mismatch");
    os << "t,surge,sway,heave";
    if (labeled) os << ",label";
    os << '\n';
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        os << fmt_double(a.t[i]) << ',' << fmt_double(a.surge[i]) << ',' << fmt_double(a.sway[i])
           << ',' << fmt_double(a.heave[i]);
        if (labeled) os << ',' << a.labels[i];
        os << '\n';
    }
}

inline RawAccel read_accel_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("accel csv: empty file");
    std::vector<std::string> header = split_csv_line(line);
    bool labeled = header.size() == 5 && header[4] == "label";
    if (!(header.size() == 4 || labeled) || header[0] != "t" || header[1] != "surge" ||
        header[2] != "sway" || header[3] != "heave")
        throw std::runtime_error("accel csv: header must be t,surge,sway,heave[,label]");
    RawAccel a;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != header.size())
            throw std::runtime_error("accel csv: inconsistent field count");
        a.t.push_back(parse_double(f[0]));
        a.surge.push_back(parse_double(f[1]));
        a.sway.push_back(parse_double(f[2]));
        a.heave.push_back(parse_double(f[3]));
        if (labeled) a.labels.push_back(f[4]);
    }
    if (a.t.empty()) throw std::runtime_error("accel csv: no data rows");
    return a;
}

inline RawAccel read_accel_csv(const std::string& path) {
    std::ifstream is = open_in(path);
    return read_accel_csv(is);
}

// Feature windows in the same series layout read back by fit/decode.
inline void write_features_csv(std::ostream& os, const FeatureSeries& fs) {
    bool labeled = !fs.labels.empty();
    os << 't';
    for (const std::string& n : feature_names()) os << ',' << n;
    if (labeled) os << ",label";
    os << '\n';
    for (std::size_t w = 0; w < fs.x.rows(); ++w) {
        os << fmt_double(fs.t[w]);
        for (std::size_t d = 0; d < fs.x.cols(); ++d) os << ',' << fmt_double(fs.x(w, d));
        if (labeled) os << ',' << fs.labels[w];
        os << '\n';
    }
}

// ----------------------------------------------------------------------------
// Decode output CSV: `t,state_global,prob_1..prob_J,state_local`.
// ----------------------------------------------------------------------------

inline void write_decode_csv(std::ostream& os, const DecodeResult& r) {
    std::size_t T = r.local_probs.rows();
    std::size_t J = r.local_probs.cols();
    if (r.global_path.size() != T || r.local_path.size() != T)
        throw std::invalid_argument("write_decode_csv: needs both decoders (mode Both)");
    os << "t,state_global";
    for (std::size_t j = 0; j < J; ++j) os << ",prob_" << (j + 1);
    os << ",state_local\n";
    for (std::size_t t = 0; t < T; ++t) {
        os << (t + 1) << ',' << r.global_path[t];
        for (std::size_t j = 0; j < J; ++j) os << ',' << fmt_double(r.local_probs(t, j));
        os << ',' << r.local_path[t] << '\n';
    }
}

// ----------------------------------------------------------------------------
// Cross-validation and study tables
// ----------------------------------------------------------------------------

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// One row per fold x draw.
inline void write_cv_csv(std::ostream& os, const EvalReport& r) {
    os << "fold,held_out_id,train_hash,draw,acc_local,acc_global,ce_total,ce_mean\n";
    for (std::size_t k = 0; k < r.folds.size(); ++k) {
        const FoldReport& f = r.folds[k];
        for (std::size_t d = 0; d < f.acc_local.size(); ++d)
            os << (k + 1) << ',' << f.held_out_id << ',' << hash_hex(f.train_hash) << ','
               << (d + 1) << ',' << fmt_double(f.acc_local[d]) << ','
               << fmt_double(f.acc_global[d]) << ',' << fmt_double(f.ce_total[d]) << ','
               << fmt_double(f.ce_mean[d]) << '\n';
    }
}

inline void write_cv_summary_csv(std::ostream& os, const EvalReport& r) {
    os << "metric,median,q1,q3\n";
    const std::pair<const char*, const MetricSummary*> rows[] = {
        {"acc_local", &r.acc_local},
        {"acc_global", &r.acc_global},
        {"ce_total", &r.ce_total},
        {"ce_mean", &r.ce_mean}};
    for (const auto& [name, s] : rows)
        os << name << ',' << fmt_double(s->median) << ',' << fmt_double(s->q1) << ','
           << fmt_double(s->q3) << '\n';
}

// One row per cell x model.
inline void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
    os << "cell,overlap,sojourn_avg,sojourn_diff,k1,k2,model,"
          "acc_fb_median,acc_fb_q1,acc_fb_q3,"
          "acc_viterbi_median,acc_viterbi_q1,acc_viterbi_q3,"
          "ce_mean_median,ce_mean_q1,ce_mean_q3\n";
    for (const StudyRow& r : rows)
        os << r.cell << ',' << r.overlap << ',' << fmt_double(r.sojourn_avg) << ','
           << fmt_double(r.sojourn_diff) << ',' << fmt_double(r.k1) << ',' << fmt_double(r.k2)
           << ',' << r.model << ',' << fmt_double(r.acc_fb.median) << ','
           << fmt_double(r.acc_fb.q1) << ',' << fmt_double(r.acc_fb.q3) << ','
           << fmt_double(r.acc_viterbi.median) << ',' << fmt_double(r.acc_viterbi.q1) << ','
           << fmt_double(r.acc_viterbi.q3) << ',' << fmt_double(r.ce_mean.median) << ','
           << fmt_double(r.ce_mean.q1) << ',' << fmt_double(r.ce_mean.q3) << '\n';
}

// ----------------------------------------------------------------------------
// JSON serialization
// ----------------------------------------------------------------------------

inline ModelFamily parse_model_family(const std::string& s) {
    if (s == "hmm") return ModelFamily::Hmm;
    if (s == "hsmm") return ModelFamily::Hsmm;
    throw std::invalid_argument("unknown model family: " + s);
}

inline SojournFamily parse_sojourn_family(const std::string& s) {
    if (s == "geometric") return SojournFamily::Geometric;
    if (s == "negbinomial") return SojournFamily::NegBinomial;
    throw std::invalid_argument("unknown sojourn family: " + s);
}

inline void to_json(Json& j, const Matrix& m) {
    j = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) j.push_back(m.row_vec(r));
}

inline void from_json(const Json& j, Matrix& m) {
    if (!j.is_array()) throw std::invalid_argument("json: matrix must be an array of rows");
    if (j.empty()) {
        m = Matrix();
        return;
    }
    std::size_t cols = j.at(0).size();
    m = Matrix(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Json& row = j.at(r);
        if (row.size() != cols) throw std::invalid_argument("json: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
    }
}

inline void to_json(Json& j, const ModelSpec& s) {
    j = Json{{"family", to_string(s.family)},       {"ar_order", s.ar_order},
             {"n_states", s.n_states},              {"obs_dim", s.obs_dim},
             {"sojourn_family", to_string(s.sojourn_family)},
             {"max_duration", s.max_duration}};
}

inline void from_json(const Json& j, ModelSpec& s) {
    s.family = parse_model_family(j.at("family").get<std::string>());
    s.ar_order = j.value("ar_order", 0);
    s.n_states = j.at("n_states").get<int>();
    s.obs_dim = j.at("obs_dim").get<int>();
    s.sojourn_family = parse_sojourn_family(j.value("sojourn_family", std::string("geometric")));
    s.max_duration = j.value("max_duration", 0);
}

inline void to_json(Json& j, const SojournDist& d) {
    j = Json{{"family", to_string(d.family)}};
    if (d.family == SojournFamily::Geometric)
        j["stay"] = d.stay;
    else {
        j["m"] = d.m;
        j["k"] = d.k;
    }
}

inline void from_json(const Json& j, SojournDist& d) {
    d.family = parse_sojourn_family(j.at("family").get<std::string>());
    if (d.family == SojournFamily::Geometric)
        d.stay = j.at("stay").get<double>();
    else {
        d.m = j.at("m").get<double>();
        d.k = j.at("k").get<double>();
    }
}

inline void to_json(Json& j, const StateEmission& e) {
    j = Json{{"mean", e.mean}, {"ar", e.ar}, {"var", e.var}};
}

inline void from_json(const Json& j, StateEmission& e) {
    e.mean = j.at("mean").get<std::vector<double>>();
    e.var = j.at("var").get<std::vector<double>>();
    if (j.contains("ar"))
        e.ar = j.at("ar").get<Matrix>();
    else
        e.ar = Matrix(0, e.mean.size());
}

inline void to_json(Json& j, const Params& p) {
    j = Json{{"delta", p.delta}, {"tpm", p.tpm}, {"emissions", p.emissions}};
    if (!p.sojourns.empty()) j["sojourns"] = p.sojourns;
}

inline void from_json(const Json& j, Params& p) {
    p.delta = j.at("delta").get<std::vector<double>>();
    p.tpm = j.at("tpm").get<Matrix>();
    p.emissions = j.at("emissions").get<std::vector<StateEmission>>();
    p.sojourns = j.contains("sojourns") ? j.at("sojourns").get<std::vector<SojournDist>>()
                                        : std::vector<SojournDist>{};
}

inline void to_json(Json& j, const EmissionPrior& e) {
    j = Json{{"mean_loc", e.mean_loc}, {"mean_scale", e.mean_scale}, {"sd_loc", e.sd_loc},
             {"sd_scale", e.sd_scale}, {"ar_loc", e.ar_loc},         {"ar_scale", e.ar_scale}};
}

inline void from_json(const Json& j, EmissionPrior& e) {
    e.mean_loc = j.at("mean_loc").get<std::vector<double>>();
    e.mean_scale = j.at("mean_scale").get<std::vector<double>>();
    e.sd_loc = j.at("sd_loc").get<std::vector<double>>();
    e.sd_scale = j.at("sd_scale").get<std::vector<double>>();
    e.ar_loc = j.value("ar_loc", 0.0);
    e.ar_scale = j.value("ar_scale", 10.0);
}

inline void to_json(Json& j, const SojournPrior& s) {
    j = Json{{"log_m_loc", s.log_m_loc},
             {"log_m_scale", s.log_m_scale},
             {"log_k_loc", s.log_k_loc},
             {"log_k_scale", s.log_k_scale}};
}

inline void from_json(const Json& j, SojournPrior& s) {
    s.log_m_loc = j.at("log_m_loc").get<double>();
    s.log_m_scale = j.at("log_m_scale").get<double>();
    s.log_k_loc = j.value("log_k_loc", 0.0);
    s.log_k_scale = j.value("log_k_scale", 1.5);
}

inline void to_json(Json& j, const Priors& p) {
    j = Json{{"delta_dirichlet", p.delta_dirichlet},
             {"tpm_dirichlet", p.tpm_dirichlet},
             {"emission", p.emission}};
    if (!p.sojourn.empty()) j["sojourn"] = p.sojourn;
}

inline void from_json(const Json& j, Priors& p) {
    p.delta_dirichlet = j.at("delta_dirichlet").get<std::vector<double>>();
    p.tpm_dirichlet = j.at("tpm_dirichlet").get<Matrix>();
    p.emission = j.at("emission").get<std::vector<EmissionPrior>>();
    p.sojourn = j.contains("sojourn") ? j.at("sojourn").get<std::vector<SojournPrior>>()
                                      : std::vector<SojournPrior>{};
}

inline void to_json(Json& j, const SamplerConfig& c) {
    j = Json{{"burn_in", c.burn_in},
             {"thin", c.thin},
             {"target_accept", c.target_accept},
             {"adapt_rate", c.adapt_rate}};
}

inline void from_json(const Json& j, SamplerConfig& c) {
    c.burn_in = j.value("burn_in", 1000);
    c.thin = j.value("thin", 1);
    c.target_accept = j.value("target_accept", 0.35);
    c.adapt_rate = j.value("adapt_rate", 1.0);
}

inline void to_json(Json& j, const PosteriorDraws& p) {
    j = Json{{"spec", p.spec},
             {"seed", p.seed},
             {"acceptance", p.acceptance},
             {"warnings", p.warnings},
             {"draws", p.draws}};
}

inline void from_json(const Json& j, PosteriorDraws& p) {
    p.spec = j.at("spec").get<ModelSpec>();
    p.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("acceptance"))
        p.acceptance = j.at("acceptance").get<std::map<std::string, double>>();
    if (j.contains("warnings")) p.warnings = j.at("warnings").get<std::vector<std::string>>();
    p.draws = j.at("draws").get<std::vector<Params>>();
}

inline void to_json(Json& j, const ScenarioConfig& c) {
    j = Json{{"overlaps", c.overlaps},
             {"avgs", c.avgs},
             {"diffs", c.diffs},
             {"dispersions", c.dispersions}};
}

inline void from_json(const Json& j, ScenarioConfig& c) {
    ScenarioConfig defaults;
    c.overlaps = j.value("overlaps", defaults.overlaps);
    c.avgs = j.value("avgs", defaults.avgs);
    c.diffs = j.value("diffs", defaults.diffs);
    c.dispersions = j.value("dispersions", defaults.dispersions);
}

inline void to_json(Json& j, const StudyScale& s) {
    j = Json{{"n_series", s.n_series},
             {"series_length", s.series_length},
             {"fold_limit", s.fold_limit},
             {"n_pred_draws", s.n_pred_draws},
             {"sampler", s.sampler}};
}

inline void from_json(const Json& j, StudyScale& s) {
    StudyScale d;
    s.n_series = j.value("n_series", d.n_series);
    s.series_length = j.value("series_length", d.series_length);
    s.fold_limit = j.value("fold_limit", d.fold_limit);
    s.n_pred_draws = j.value("n_pred_draws", d.n_pred_draws);
    if (j.contains("sampler")) s.sampler = j.at("sampler").get<SamplerConfig>();
}

inline void to_json(Json& j, const MetricSummary& s) {
    j = Json{{"median", s.median}, {"q1", s.q1}, {"q3", s.q3}};
}

inline void to_json(Json& j, const StudyRow& r) {
    j = Json{{"cell", r.cell},
             {"overlap", r.overlap},
             {"sojourn_avg", r.sojourn_avg},
             {"sojourn_diff", r.sojourn_diff},
             {"k1", r.k1},
             {"k2", r.k2},
             {"model", r.model},
             {"acc_fb", r.acc_fb},
             {"acc_viterbi", r.acc_viterbi},
             {"ce_mean", r.ce_mean}};
}

inline void to_json(Json& j, const FoldReport& f) {
    j = Json{{"held_out_id", f.held_out_id}, {"train_hash", hash_hex(f.train_hash)},
             {"acc_local", f.acc_local},     {"acc_global", f.acc_global},
             {"ce_total", f.ce_total},       {"ce_mean", f.ce_mean}};
}

inline void to_json(Json& j, const EvalReport& r) {
    j = Json{{"folds", r.folds},
             {"acc_local", r.acc_local},
             {"acc_global", r.acc_global},
             {"ce_total", r.ce_total},
             {"ce_mean", r.ce_mean}};
}

inline void to_json(Json& j, const FeatureConfig& c) {
    j = Json{{"rate", c.rate}, {"static_window", c.static_window}, {"floor", c.floor}};
}

inline void from_json(const Json& j, FeatureConfig& c) {
    FeatureConfig d;
    c.rate = j.value("rate", d.rate);
    c.static_window = j.value("static_window", d.static_window);
    c.floor = j.value("floor", d.floor);
}

// ----------------------------------------------------------------------------
// Manifests: every CLI output directory gets one, tying outputs to the exact
// configuration hash, master seed, and library version. No timestamps, so
// reruns are byte-identical.
// ----------------------------------------------------------------------------

inline std::uint64_t config_hash(const Json& config) {
    std::string dump = config.dump();
    return fnv1a(dump.data(), dump.size());
}

inline Json make_manifest(const Json& config, std::uint64_t seed) {
    return Json{{"config_hash", hash_hex(config_hash(config))},
                {"seed", seed},
                {"version", version_string()}};
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream os = open_out(path);
    os << j.dump(2) << '\n';
}

inline Json read_json_file(const std::string& path) {
    std::ifstream is = open_in(path);
    Json j;
    is >> j;
    return j;
}

}  // namespace semimarkov
