#include "ssgl/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssgl/errors.hpp"
#include "ssgl/stats.hpp"

namespace ssgl {

void PenaltyParams::validate() const {
    if (!(lambda1 > 0.0) || !(lambda0 >= lambda1)) {
        throw InvalidArgument("penalty requires 0 < lambda1 <= lambda0");
    }
    if (!(theta > 0.0 && theta < 1.0)) {
        throw InvalidArgument("theta must lie strictly in (0,1)");
    }
    if (!(sigma2 > 0.0) || !(n > 0.0) || m < 1) {
        throw InvalidArgument("sigma2, n must be positive and m >= 1");
    }
}

double group_lasso_log_constant(int m) {
    if (m < 1) throw InvalidArgument("group size must be >= 1");
    const double md = static_cast<double>(m);
    return -md * std::log(2.0) - 0.5 * (md - 1.0) * std::log(M_PI) -
           std::lgamma(0.5 * (md + 1.0));
}

double group_lasso_log_density(double norm, double lambda, int m) {
    if (norm < 0.0) throw InvalidArgument("norm must be nonnegative");
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    // log C_m + m log(lambda), arranged so m = 1 reproduces the Laplace
    // log-density log(lambda/2) bit for bit
    return m * std::log(lambda / 2.0) - 0.5 * (m - 1) * std::log(M_PI) -
           std::lgamma(0.5 * (m + 1)) - lambda * norm;
}

namespace {

// log-odds of the slab given the norm; the normalizing constants cancel
double slab_logit(double norm, const PenaltyParams& p) {
    return std::log(p.theta) - std::log1p(-p.theta) +
           p.m * (std::log(p.lambda1) - std::log(p.lambda0)) +
           (p.lambda0 - p.lambda1) * norm;
}

} // namespace

double p_star(double norm, const PenaltyParams& p) {
    p.validate();
    // sigmoid(logit) = exp(-log(1+e^{-logit}))
    return std::exp(-log1p_exp(-slab_logit(norm, p)));
}

double lambda_star(double norm, const PenaltyParams& p) {
    const double ps = p_star(norm, p);
    return p.lambda1 * ps + p.lambda0 * (1.0 - ps);
}

double pen_separable_group(double norm, const PenaltyParams& p) {
    // log p*(0) - log p*(t) computed through log1p_exp of the logits
    const double l0 = slab_logit(0.0, p);
    const double lt = slab_logit(norm, p);
    return -p.lambda1 * norm + log1p_exp(-lt) - log1p_exp(-l0);
}

double h_at_zero(const PenaltyParams& p) {
    const double gap = lambda_star(0.0, p) - p.lambda1;
    const double log_p0 = -log1p_exp(-slab_logit(0.0, p));
    return gap * gap + (2.0 * p.n / p.sigma2) * log_p0;
}

double delta_upper(const PenaltyParams& p) {
    p.validate();
    const double log_inv_p0 = log1p_exp(-slab_logit(0.0, p));
    return std::sqrt(2.0 * p.n * p.sigma2 * log_inv_p0) + p.sigma2 * p.lambda1;
}

double delta_lower(const PenaltyParams& p) {
    p.validate();
    if (!(p.lambda0 > p.lambda1)) {
        throw InvalidArgument("delta_lower requires lambda0 > lambda1");
    }
    const double sigma = std::sqrt(p.sigma2);
    const double a = p.n / (p.sigma2 * (p.lambda0 - p.lambda1)) -
                     std::sqrt(2.0 * p.n) / sigma;
    const double d_sup = 2.0 * p.n / p.sigma2 - a * a;
    const double log_inv_p0 = log1p_exp(-slab_logit(0.0, p));
    const double radicand = 2.0 * p.n * p.sigma2 * log_inv_p0 - p.sigma2 * p.sigma2 * d_sup;
    return std::sqrt(std::max(radicand, 0.0)) + p.sigma2 * p.lambda1;
}

double solver_threshold(const PenaltyParams& p) {
    if (h_at_zero(p) > 0.0) return delta_upper(p);
    return p.sigma2 * lambda_star(0.0, p);
}

double threshold_oracle(const PenaltyParams& p) {
    p.validate();
    const auto objective = [&](double t) {
        return 0.5 * p.n * t - p.sigma2 * pen_separable_group(t, p) / t;
    };

    const double lo = 1e-8;
    const double hi = 10.0 * delta_upper(p) / p.n;

    // coarse scan to bracket the minimum, then golden-section refinement
    constexpr int kGrid = 400;
    double best_t = lo, best_f = objective(lo);
    if (!std::isfinite(best_f)) throw NonFinite("threshold objective overflowed");
    for (int i = 1; i <= kGrid; ++i) {
        const double t = lo * std::pow(hi / lo, static_cast<double>(i) / kGrid);
        const double f = objective(t);
        if (!std::isfinite(f)) throw NonFinite("threshold objective overflowed");
        if (f < best_f) {
            best_f = f;
            best_t = t;
        }
    }
    double a = std::max(lo, best_t / std::pow(hi / lo, 1.0 / kGrid));
    double b = std::min(hi, best_t * std::pow(hi / lo, 1.0 / kGrid));

    constexpr double kInvPhi = 0.61803398874989484820;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > 1e-10) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = objective(x2);
        }
    }
    const double t = 0.5 * (a + b);
    const double val = objective(t);
    if (!std::isfinite(val)) throw NonFinite("threshold objective overflowed");
    return std::min(val, best_f);
}

double omega_threshold(const PenaltyParams& p) {
    p.validate();
    if (!(p.lambda0 > p.lambda1)) {
        throw InvalidArgument("omega_threshold requires lambda0 > lambda1");
    }
    const double log_prior_odds = std::log1p(-p.theta) - std::log(p.theta);
    const double log_rate_ratio = p.m * (std::log(p.lambda0) - std::log(p.lambda1));
    return (log_prior_odds + log_rate_ratio) / (p.lambda0 - p.lambda1);
}

} // namespace ssgl
