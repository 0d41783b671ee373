#pragma once

namespace ssgl {

/// Parameters of the spike-and-slab group penalty for one group size.
/// `lambda0` is the spike rate after any group-size scaling has been applied.
struct PenaltyParams {
    double lambda0 = 10.0; ///< spike rate, >= lambda1
    double lambda1 = 1.0;  ///< slab rate, > 0
    double theta = 0.5;    ///< mixing proportion, in (0,1)
    double sigma2 = 1.0;   ///< error variance, > 0
    double n = 100.0;      ///< sample count
    int m = 1;             ///< group size

    void validate() const;
};

/// Log of the multivariate exponential-type density on a coefficient group:
/// log C_m + m log(lambda) - lambda * norm, where
/// C_m = 2^{-m} pi^{-(m-1)/2} / Gamma((m+1)/2). For m = 1 this is the
/// univariate Laplace log-density.
double group_lasso_log_density(double norm, double lambda, int m);

/// log C_m above.
double group_lasso_log_constant(int m);

/// Conditional probability that a group with the given norm came from the
/// slab: theta*Psi_1 / (theta*Psi_1 + (1-theta)*Psi_0). Evaluated in log
/// space; nondecreasing in the norm.
double p_star(double norm, const PenaltyParams& p);

/// Adaptive regularization weight lambda1*p* + lambda0*(1 - p*); always lies
/// in [lambda1, lambda0] and is nonincreasing in the norm.
double lambda_star(double norm, const PenaltyParams& p);

/// Separable penalty contribution of a single group at the given norm,
/// centered so the value at zero is 0:
///   pen(t) = -lambda1*t + log[p*(0)/p*(t)].
/// Summing over groups gives the full separable penalty.
double pen_separable_group(double norm, const PenaltyParams& p);

/// h(0) = [lambda*(0) - lambda1]^2 + (2n/sigma2) log p*(0). Its sign decides
/// whether the refined threshold bound applies.
double h_at_zero(const PenaltyParams& p);

/// Upper threshold bound: sqrt(2 n sigma2 log(1/p*(0))) + sigma2*lambda1.
double delta_upper(const PenaltyParams& p);

/// Lower threshold bound evaluated at the supremum of the admissible d range,
///   d_sup = 2n/sigma2 - (n/(sigma2(lambda0-lambda1)) - sqrt(2n)/sigma)^2,
/// which yields the loosest valid lower bound. The radicand is clamped at 0.
double delta_lower(const PenaltyParams& p);

/// Threshold actually used by the solver: delta_upper when h(0) > 0,
/// otherwise sigma2 * lambda*(0).
double solver_threshold(const PenaltyParams& p);

/// Exact selection threshold Delta = inf_{t>0} { n t / 2 - sigma2 pen(t)/t },
/// located by a grid scan refined with golden-section search to 1e-10 over
/// t in (1e-8, 10*delta_upper/n]. Test oracle only; never called by the
/// solver. Throws NonFinite if the objective overflows.
double threshold_oracle(const PenaltyParams& p);

/// Norm at which spike and slab densities intersect:
///   omega = log[((1-theta)/theta) (lambda0/lambda1)^m] / (lambda0 - lambda1).
/// Requires lambda0 > lambda1.
double omega_threshold(const PenaltyParams& p);

} // namespace ssgl
