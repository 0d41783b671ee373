#pragma once

#include "ssgl/grouped_design.hpp"
#include "ssgl/solver.hpp"

namespace ssgl {

/// Approximate inverse of Sigma_hat = X^T X / n assembled from nodewise
/// lasso regressions.
struct NodewiseResult {
    Matrix theta_hat; ///< p x p
    Vector tau2;      ///< per-node denominators ||X_j - X_{-j} g||^2/n + lambda_j ||g||_1
    Vector lambdas;   ///< lambda_j actually used per node
};

struct DebiasOutput {
    Vector beta_d;
    Vector se;
    Vector ci_lower;
    Vector ci_upper;
    double alpha = 0.05;
};

/// min ||target - predictors*gamma||_2^2 / n + 2 lambda ||gamma||_1 by cyclic
/// coordinate descent, iterated until every KKT condition holds within `tol`.
/// Columns are used as given; the caller standardizes. Throws MaxIterExceeded.
Vector lasso_cd(const Matrix& predictors, const Vector& target, double lambda,
                double tol = 1e-7, long max_sweeps = 100000);

/// Universal default lambda_j = sqrt(log p / n), calibrated for columns with
/// mean 0 and squared norm n (the orthonormalized design satisfies both).
double default_nodewise_lambda(long n, long p);

/// Runs the p nodewise regressions and assembles Theta_hat = T^{-2} C_hat.
/// `lambdas` may hold one shared value or one per column. Throws
/// DegenerateVariance when some tau2_j falls below 1e-12.
NodewiseResult build_theta(const Matrix& X, const Vector& lambdas,
                           double tol = 1e-7);

/// One-step correction beta_hat + Theta_hat X^T (y - X beta_hat) / n.
Vector debias(const Vector& beta_hat, const Matrix& X, const Vector& y,
              const NodewiseResult& nodewise);

/// Pointwise intervals beta_dj -/+ z_{1-alpha/2} sqrt(sigma2 (T S T^T)_jj / n).
DebiasOutput confidence_intervals(const Vector& beta_d, double sigma2_hat,
                                  const NodewiseResult& nodewise,
                                  const Matrix& sigma_hat, long n, double alpha);

/// Inference for a fitted model: nodewise regressions run on the
/// orthonormalized design the fit used; coordinate intervals are then mapped
/// back to the original column scale through the stored group transforms.
struct DebiasInference {
    DebiasOutput ortho;
    DebiasOutput original;
    NodewiseResult nodewise;
};

/// `lambda_j` < 0 selects the universal default.
DebiasInference run_debias(const PreparedDesign& prep, const SsglFit& fit,
                           double alpha = 0.05, double lambda_j = -1.0,
                           double tol = 1e-7);

} // namespace ssgl
