#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semimarkov {

struct OptimResult {
    std::vector<double> x;
    double f = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
};

struct OptimError : std::runtime_error {
    OptimError(std::string msg, std::vector<double> best, double gnorm)
        : std::runtime_error(std::move(msg)), best_x(std::move(best)), grad_norm(gnorm) {}
    std::vector<double> best_x;
    double grad_norm;
};

namespace detail {

inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double h = 1e-6 * (1.0 + std::abs(x[i]));
        double xi = x[i];
        x[i] = xi + h;
        double fp = f(x);
        x[i] = xi - h;
        double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

// BFGS minimizer with central-difference gradients and Armijo backtracking.
// Problems here are smooth and low-dimensional (a handful of emission or
// sojourn parameters on unconstrained scales), so a dense inverse-Hessian
// update is plenty. Throws OptimError with the best iterate if the gradient
// tolerance is not reached.
inline OptimResult minimize_bfgs(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, int max_iter = 500,
                                 double gtol = 1e-6) {
    std::size_t n = x0.size();
    std::vector<double> x = std::move(x0);
    double fx = f(x);
    if (!std::isfinite(fx))
        throw OptimError("minimize_bfgs: objective not finite at start", x, INFINITY);
    std::vector<double> g = detail::fd_gradient(f, x);

    // inverse Hessian approximation, identity to start
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0;

    for (int iter = 1; iter <= max_iter; ++iter) {
        double gn = detail::inf_norm(g);
        if (gn < gtol * (1.0 + std::abs(fx))) return {x, fx, gn, iter - 1};

        std::vector<double> p(n, 0.0);  // -H g
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) p[i] -= H[i][j] * g[j];
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
        if (slope >= 0.0) {  // not a descent direction; reset to steepest
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = -g[i];
                for (std::size_t j = 0; j < n; ++j) H[i][j] = (i == j) ? 1.0 : 0.0;
            }
            slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
        }

        double step = 1.0;
        std::vector<double> xn(n);
        double fn = fx;
        bool ok = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * p[i];
            fn = f(xn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) {
            double gn2 = detail::inf_norm(g);
            if (gn2 < 1e-4 * (1.0 + std::abs(fx))) return {x, fx, gn2, iter};
            throw OptimError("minimize_bfgs: line search failed", x, gn2);
        }

        std::vector<double> gn_vec = detail::fd_gradient(f, xn);
        std::vector<double> sv(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            sv[i] = xn[i] - x[i];
            yv[i] = gn_vec[i] - g[i];
        }
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) sy += sv[i] * yv[i];
        if (sy > 1e-12) {  // BFGS inverse update
            double rho = 1.0 / sy;
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i][j] * yv[j];
            double yHy = 0.0;
            for (std::size_t i = 0; i < n; ++i) yHy += yv[i] * Hy[i];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i][j] += rho * rho * (yHy + sy) * sv[i] * sv[j] -
                               rho * (Hy[i] * sv[j] + sv[i] * Hy[j]);
        }
        x = std::move(xn);
        fx = fn;
        g = std::move(gn_vec);
    }
    throw OptimError("minimize_bfgs: no convergence in max_iter", x, detail::inf_norm(g));
}

}  // namespace semimarkov
