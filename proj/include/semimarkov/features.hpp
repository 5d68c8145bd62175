#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace semimarkov {

// Raw tri-axial accelerometer trace. Labels are optional per-sample behavior
// tags carried through to the windowed features by majority vote.
struct RawAccel {
    std::vector<double> t;
    std::vector<double> surge, sway, heave;
    std::vector<std::string> labels;
};

struct FeatureConfig {
    int rate = 40;           // samples per second and per feature window
    int static_window = 40;  // running-mean width for the static component; 0 = no smoothing
    double floor = 1e-8;     // lower clamp before the log features
};

// Centered moving average; the window shrinks at the edges. An even window
// extends one sample further forward than backward.
inline std::vector<double> moving_average(const std::vector<double>& x, int window) {
    if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
    std::vector<double> out(x.size());
    long n = static_cast<long>(x.size());
    long back = (window - 1) / 2, fwd = window / 2;
    for (long i = 0; i < n; ++i) {
        long lo = std::max(0L, i - back), hi = std::min(n - 1, i + fwd);
        double acc = 0.0;
        for (long k = lo; k <= hi; ++k) acc += x[k];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

// Vectorial dynamic body acceleration: the norm of the three dynamic
// components, each the sample minus its running mean over static_window.
// With static_window = 0 this is the literal norm of the raw samples.
inline std::vector<double> vedba(const std::vector<double>& surge, const std::vector<double>& sway,
                                 const std::vector<double>& heave, int static_window) {
    if (surge.size() != sway.size() || surge.size() != heave.size())
        throw std::invalid_argument("vedba: axis length mismatch");
    std::vector<double> ds = surge, dw = sway, dh = heave;
    if (static_window > 0) {
        std::vector<double> ms = moving_average(surge, static_window);
        std::vector<double> mw = moving_average(sway, static_window);
        std::vector<double> mh = moving_average(heave, static_window);
        for (std::size_t i = 0; i < surge.size(); ++i) {
            ds[i] -= ms[i];
            dw[i] -= mw[i];
            dh[i] -= mh[i];
        }
    }
    std::vector<double> out(surge.size());
    for (std::size_t i = 0; i < surge.size(); ++i)
        out[i] = std::sqrt(ds[i] * ds[i] + dw[i] * dw[i] + dh[i] * dh[i]);
    return out;
}

// Pitch angle in degrees from the running mean of the surge axis, with the
// argument clamped into [-1, 1] before the arcsine.
inline std::vector<double> pitch(const std::vector<double>& surge, int static_window) {
    std::vector<double> m = static_window > 0 ? moving_average(surge, static_window) : surge;
    std::vector<double> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        double v = std::min(1.0, std::max(-1.0, m[i]));
        out[i] = std::asin(v) * 180.0 / M_PI;
    }
    return out;
}

// One-second summary features, ready to feed the models.
struct FeatureSeries {
    std::vector<double> t;            // first timestamp of each window
    Matrix x;                         // W x 3: log mean VeDBA, mean pitch, log sd pitch
    std::vector<std::string> labels;  // majority per window; empty if unlabeled
    std::vector<std::string> warnings;
};

inline const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {"log_mean_vedba", "mean_pitch",
                                                   "log_sd_pitch"};
    return names;
}

// Non-overlapping windows of `rate` samples; a trailing partial window is
// dropped. Mean VeDBA and the pitch standard deviation are clamped at
// cfg.floor before the log (with a warning when the clamp bites).
inline FeatureSeries window_features(const RawAccel& raw, const FeatureConfig& cfg = {}) {
    if (cfg.rate < 2) throw std::invalid_argument("window_features: rate must be >= 2");
    std::size_t n = raw.surge.size();
    if (raw.sway.size() != n || raw.heave.size() != n)
        throw std::invalid_argument("window_features: axis length mismatch");
    if (!raw.labels.empty() && raw.labels.size() != n)
        throw std::invalid_argument("window_features: label length mismatch");
    if (n < static_cast<std::size_t>(cfg.rate))
        throw std::invalid_argument("window_features: fewer samples than one window");

    FeatureSeries out;
    if (raw.t.size() >= 2) {
        std::vector<double> dt;
        dt.reserve(raw.t.size() - 1);
        for (std::size_t i = 1; i < raw.t.size(); ++i) dt.push_back(raw.t[i] - raw.t[i - 1]);
        std::sort(dt.begin(), dt.end());
        double med = dt[dt.size() / 2];
        if (med > 0.0 && std::abs(med * cfg.rate - 1.0) > 0.1)
            out.warnings.push_back("median sampling interval disagrees with declared rate");
    }

    std::vector<double> vb = vedba(raw.surge, raw.sway, raw.heave, cfg.static_window);
    std::vector<double> pt = pitch(raw.surge, cfg.static_window);

    std::size_t W = n / static_cast<std::size_t>(cfg.rate);
    out.x = Matrix(W, 3);
    out.t.resize(W);
    bool floored = false;
    for (std::size_t w = 0; w < W; ++w) {
        std::size_t a = w * static_cast<std::size_t>(cfg.rate);
        std::size_t b = a + static_cast<std::size_t>(cfg.rate);
        out.t[w] = raw.t.empty() ? static_cast<double>(a) : raw.t[a];
        double mv = 0.0, mp = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            mv += vb[i];
            mp += pt[i];
        }
        mv /= static_cast<double>(cfg.rate);
        mp /= static_cast<double>(cfg.rate);
        double ss = 0.0;
        for (std::size_t i = a; i < b; ++i) ss += (pt[i] - mp) * (pt[i] - mp);
        double sdp = std::sqrt(ss / static_cast<double>(cfg.rate - 1));
        if (mv < cfg.floor || sdp < cfg.floor) floored = true;
        out.x(w, 0) = std::log(std::max(mv, cfg.floor));
        out.x(w, 1) = mp;
        out.x(w, 2) = std::log(std::max(sdp, cfg.floor));
    }
    if (floored)
        out.warnings.push_back("feature values clamped at the floor before taking logs");

    if (!raw.labels.empty()) {
        out.labels.resize(W);
        for (std::size_t w = 0; w < W; ++w) {
            std::map<std::string, int> votes;
            std::size_t a = w * static_cast<std::size_t>(cfg.rate);
            for (std::size_t i = a; i < a + static_cast<std::size_t>(cfg.rate); ++i)
                if (!raw.labels[i].empty()) ++votes[raw.labels[i]];
            int best = 0;
            for (const auto& [lab, c] : votes)
                if (c > best) {
                    best = c;
                    out.labels[w] = lab;
                }
        }
    }
    return out;
}

}  // namespace semimarkov
