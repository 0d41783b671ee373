// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Regularized lower incomplete gamma P(s, x) by series expansion.
inline double gamma_p_series(double s, double x) {
    if (x <= 0.0) return 0.0;
    double term = 1.0 / s;
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (s + k);
        sum += term;
        if (term < sum * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// chi-squared(3) CDF through the incomplete gamma, then quantile by bisection.
inline double chi2_3_cdf(double x) { return gamma_p_series(1.5, 0.5 * x); }

inline double chi2_3_quantile(double p) {
    double lo = 0.0, hi = 100.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (chi2_3_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Posterior mean of the mixing weight by composite-Simpson quadrature of the
// Gauss-hypergeometric-type density. Stable log form: the huge common factor
// exp(sum_g norm_g (lambda0 - lambda1)) cancels in the mean, so each factor
// log(1 - theta x_g) is evaluated as c_g + log(theta l1/l0 + (1-theta)e^{-c_g})
// with the c_g dropped from both integrals.
inline double theta_mean_quadrature(double a, double b, long G, long q_hat,
                                    double lambda0, double lambda1,
                                    const std::vector<double>& norms) {
    const double z = 1.0 - lambda1 / lambda0;
    const auto log_kernel = [&](double th, double a_pow) {
        double v = a_pow * std::log(th) + (b - 1.0) * std::log1p(-th) +
                   static_cast<double>(G - q_hat) * std::log1p(-th * z);
        for (double nm : norms) {
            const double c = nm * (lambda0 - lambda1);
            v += std::log(th * lambda1 / lambda0 + (1.0 - th) * std::exp(-c));
        }
        return v;
    };
    const int N = 1 << 14; // Simpson intervals
    const double h = 1.0 / N;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double th = i * h;
        double fn = 0.0, fd = 0.0;
        if (th > 0.0 && th < 1.0) {
            fn = std::exp(log_kernel(th, a));
            fd = std::exp(log_kernel(th, a - 1.0));
        }
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        num += w * fn;
        den += w * fd;
    }
    if (den == 0.0) throw std::runtime_error("theta quadrature degenerate");
    return num / den;
}

inline VectorXd ols(const MatrixXd& X, const VectorXd& y) {
    return X.colPivHouseholderQr().solve(y);
}

// Natural cubic spline basis via truncated powers (the d_k - d_{K-1}
// construction over all knots, boundary knots included). Spans the natural
// spline space together with {1, x}.
inline MatrixXd natural_truncated_power(const VectorXd& x, std::vector<double> knots) {
    const long K = static_cast<long>(knots.size());
    if (K < 2) throw std::runtime_error("need at least the boundary knots");
    const auto cube_plus = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
    const auto d = [&](double xi, long k) {
        return (cube_plus(xi - knots[k]) - cube_plus(xi - knots[K - 1])) /
               (knots[K - 1] - knots[k]);
    };
    MatrixXd basis(x.size(), K); // columns: 1, x, N_3..N_K
    for (long i = 0; i < x.size(); ++i) {
        basis(i, 0) = 1.0;
        basis(i, 1) = x(i);
        for (long k = 0; k + 2 < K; ++k) {
            basis(i, k + 2) = d(x(i), k) - d(x(i), K - 2);
        }
    }
    return basis;
}

} // namespace oracle
