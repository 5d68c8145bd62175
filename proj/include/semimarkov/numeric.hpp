#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace semimarkov {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double log_two_pi = 1.8378770664093454836;

// log(exp(a) + exp(b)) without leaving log space.
inline double log_add_exp(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log(exp(a) - exp(b)); requires a >= b up to rounding, clamps to -inf otherwise.
inline double log_sub_exp(double a, double b) {
    if (b == neg_inf) return a;
    if (b >= a) return neg_inf;
    return a + std::log1p(-std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> v) {
    double m = neg_inf;
    for (double x : v)
        if (x > m) m = x;
    if (m == neg_inf) return neg_inf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& v) {
    return log_sum_exp(std::span<const double>(v.data(), v.size()));
}

// Streaming log-sum-exp accumulator: one exp per term, rescales when a new
// maximum arrives so intermediate sums never overflow.
class LogSumAcc {
public:
    void add(double x) {
        if (x == neg_inf) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = (max_ == neg_inf) ? 1.0 : sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }
    double value() const { return max_ == neg_inf ? neg_inf : max_ + std::log(sum_); }
    void reset() { max_ = neg_inf; sum_ = 0.0; }

private:
    double max_ = neg_inf;
    double sum_ = 0.0;
};

inline double logit(double p) { return std::log(p) - std::log1p(-p); }
inline double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double sqr(double x) { return x * x; }

// Density of N(mu, sd^2) at x, in log space.
inline double normal_logpdf(double x, double mu, double sd) {
    if (!(sd > 0.0)) return neg_inf;
    double z = (x - mu) / sd;
    return -0.5 * log_two_pi - std::log(sd) - 0.5 * z * z;
}

// log Phi(x) via erfc; adequate for the moderate tail use here.
inline double normal_logcdf(double x) {
    return std::log(0.5 * std::erfc(-x / std::sqrt(2.0)));
}

// Normal prior truncated to (0, inf), log density.
inline double truncnormal_pos_logpdf(double x, double mu, double sd) {
    if (!(x > 0.0)) return neg_inf;
    return normal_logpdf(x, mu, sd) - normal_logcdf(mu / sd);
}

inline double median_sorted(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("median of empty vector");
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Linear-interpolation quantile on a sorted vector (R type 7).
inline double quantile_sorted(const std::vector<double>& v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile of empty vector");
    if (v.size() == 1) return v[0];
    double h = p * static_cast<double>(v.size() - 1);
    size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace semimarkov
