#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace semimarkov {

// Seed derivation uses splitmix64 over (master seed, stream id) so that
// independent units of work (grid cells, CV folds, sampler blocks) get
// decorrelated streams while the whole pipeline stays reproducible from a
// single master seed. The core engine is std::mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::mt19937_64& engine() { return engine_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal(double mu = 0.0, double sd = 1.0) {
        return std::normal_distribution<double>(mu, sd)(engine_);
    }
    double gamma(double shape, double scale) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }

    // Index draw from unnormalized non-negative weights.
    int categorical(const std::vector<double>& w) {
        double tot = 0.0;
        for (double x : w) {
            if (x < 0.0) throw std::invalid_argument("categorical: negative weight");
            tot += x;
        }
        if (!(tot > 0.0)) throw std::invalid_argument("categorical: zero total weight");
        double u = uniform() * tot;
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i];
            if (u <= acc) return static_cast<int>(i);
        }
        return static_cast<int>(w.size()) - 1;
    }

    // Dirichlet draw via normalized gammas; zero concentrations give zero mass.
    std::vector<double> dirichlet(const std::vector<double>& alpha) {
        std::vector<double> g(alpha.size(), 0.0);
        double tot = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (alpha[i] < 0.0) throw std::invalid_argument("dirichlet: negative concentration");
            if (alpha[i] > 0.0) g[i] = gamma(alpha[i], 1.0);
            tot += g[i];
        }
        if (!(tot > 0.0)) throw std::invalid_argument("dirichlet: all concentrations zero");
        for (double& x : g) x /= tot;
        return g;
    }

    // Count draw on {0,1,...} with mean m and dispersion k, via the
    // gamma-Poisson mixture: lambda ~ Gamma(k, m/k), y | lambda ~ Poisson(lambda).
    long long negbinomial(double m, double k) {
        if (!(m > 0.0) || !(k > 0.0)) throw std::invalid_argument("negbinomial: m, k must be > 0");
        double lambda = gamma(k, m / k);
        if (lambda <= 0.0) return 0;
        return std::poisson_distribution<long long>(lambda)(engine_);
    }

    // Trials-to-exit draw on {1,2,...} for stay probability gamma_stay.
    long long geometric_trials(double stay) {
        if (!(stay >= 0.0) || !(stay < 1.0))
            throw std::invalid_argument("geometric_trials: stay must be in [0,1)");
        return 1 + std::geometric_distribution<long long>(1.0 - stay)(engine_);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace semimarkov
