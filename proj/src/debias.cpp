#include "ssgl/debias.hpp"

#include <cmath>

#include "ssgl/stats.hpp"

namespace ssgl {

Vector lasso_cd(const Matrix& Z, const Vector& target, double lambda,
                double tol, long max_sweeps) {
    const long n = Z.rows();
    const long q = Z.cols();
    if (target.size() != n) throw DimensionMismatch("lasso_cd: target length mismatch");
    if (lambda < 0.0) throw InvalidArgument("lasso_cd: lambda must be >= 0");

    Vector gamma = Vector::Zero(q);
    Vector residual = target;
    Vector col_sq(q);
    for (long k = 0; k < q; ++k) {
        col_sq(k) = Z.col(k).squaredNorm() / static_cast<double>(n);
        if (col_sq(k) <= 0.0) throw DegenerateVariance("lasso_cd: zero-norm predictor column");
    }

    const auto soft = [](double u, double t) {
        if (u > t) return u - t;
        if (u < -t) return u + t;
        return 0.0;
    };

    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        for (long k = 0; k < q; ++k) {
            const double old = gamma(k);
            const double u = Z.col(k).dot(residual) / static_cast<double>(n) + col_sq(k) * old;
            const double updated = soft(u, lambda) / col_sq(k);
            if (updated != old) {
                residual -= (updated - old) * Z.col(k);
                gamma(k) = updated;
            }
        }
        // KKT certificate for the current iterate
        double worst = 0.0;
        for (long k = 0; k < q; ++k) {
            const double grad = Z.col(k).dot(residual) / static_cast<double>(n);
            const double viol = gamma(k) == 0.0
                                    ? std::max(std::abs(grad) - lambda, 0.0)
                                    : std::abs(grad - lambda * (gamma(k) > 0 ? 1.0 : -1.0));
            worst = std::max(worst, viol);
        }
        if (worst <= tol) return gamma;
    }
    throw MaxIterExceeded("lasso_cd did not satisfy KKT conditions in " +
                          std::to_string(max_sweeps) + " sweeps");
}

double default_nodewise_lambda(long n, long p) {
    return std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

NodewiseResult build_theta(const Matrix& X, const Vector& lambdas, double tol) {
    const long n = X.rows();
    const long p = X.cols();
    if (lambdas.size() != 1 && lambdas.size() != p) {
        throw DimensionMismatch("build_theta: need one lambda or one per column");
    }

    NodewiseResult out;
    out.theta_hat = Matrix::Zero(p, p);
    out.tau2 = Vector::Zero(p);
    out.lambdas = Vector::Zero(p);

    Matrix others(n, p - 1);
    for (long j = 0; j < p; ++j) {
        const double lambda_j = lambdas.size() == 1 ? lambdas(0) : lambdas(j);
        out.lambdas(j) = lambda_j;
        long c = 0;
        for (long k = 0; k < p; ++k) {
            if (k != j) others.col(c++) = X.col(k);
        }
        const Vector gamma = lasso_cd(others, X.col(j), lambda_j, tol);
        const double rss = (X.col(j) - others * gamma).squaredNorm() / static_cast<double>(n);
        const double tau2 = rss + lambda_j * gamma.lpNorm<1>();
        if (tau2 < 1e-12) {
            throw DegenerateVariance("nodewise tau2 degenerate at column " + std::to_string(j));
        }
        out.tau2(j) = tau2;
        out.theta_hat(j, j) = 1.0 / tau2;
        c = 0;
        for (long k = 0; k < p; ++k) {
            if (k != j) out.theta_hat(j, k) = -gamma(c++) / tau2;
        }
    }
    return out;
}

Vector debias(const Vector& beta_hat, const Matrix& X, const Vector& y,
              const NodewiseResult& nodewise) {
    const long n = X.rows();
    const long p = X.cols();
    if (beta_hat.size() != p || y.size() != n || nodewise.theta_hat.cols() != p) {
        throw DimensionMismatch("debias: dimension mismatch");
    }
    const Vector score = X.transpose() * (y - X * beta_hat) / static_cast<double>(n);
    return beta_hat + nodewise.theta_hat * score;
}

DebiasOutput confidence_intervals(const Vector& beta_d, double sigma2_hat,
                                  const NodewiseResult& nodewise,
                                  const Matrix& sigma_hat, long n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must be in (0,1)");
    const long p = beta_d.size();
    if (sigma_hat.rows() != p || sigma_hat.cols() != p) {
        throw DimensionMismatch("confidence_intervals: Sigma_hat shape mismatch");
    }
    const Matrix cov = nodewise.theta_hat * sigma_hat * nodewise.theta_hat.transpose();
    const double z = normal_quantile(1.0 - alpha / 2.0);

    DebiasOutput out;
    out.alpha = alpha;
    out.beta_d = beta_d;
    out.se = (sigma2_hat / static_cast<double>(n) * cov.diagonal().array()).sqrt();
    out.ci_lower = beta_d - z * out.se;
    out.ci_upper = beta_d + z * out.se;
    return out;
}

DebiasInference run_debias(const PreparedDesign& prep, const SsglFit& fit,
                           double alpha, double lambda_j, double tol) {
    const Matrix& X = prep.design.X;
    const long n = prep.design.n();
    const long p = prep.design.p();
    if (lambda_j < 0.0) lambda_j = default_nodewise_lambda(n, p);

    Vector lambdas(1);
    lambdas(0) = lambda_j;
    NodewiseResult nodewise = build_theta(X, lambdas, tol);

    const Matrix sigma_hat = X.transpose() * X / static_cast<double>(n);
    const Vector beta_d = debias(fit.beta_ortho, X, prep.design.y, nodewise);

    DebiasInference inf;
    inf.ortho = confidence_intervals(beta_d, fit.sigma2, nodewise, sigma_hat, n, alpha);

    // map back per group: beta_orig = T beta, covariance block T M_gg T^T
    const Matrix cov = nodewise.theta_hat * sigma_hat * nodewise.theta_hat.transpose();
    const double z = normal_quantile(1.0 - alpha / 2.0);
    inf.original.alpha = alpha;
    inf.original.beta_d = back_transform(beta_d, prep.design.groups, prep.transforms);
    inf.original.se = Vector::Zero(p);
    for (int g = 0; g < prep.design.num_groups(); ++g) {
        const long off = prep.design.offset(g);
        const int m = prep.design.groups[g].size;
        const Matrix& T = prep.transforms[g].T;
        const Matrix block = T * cov.block(off, off, m, m) * T.transpose();
        inf.original.se.segment(off, m) =
            (fit.sigma2 / static_cast<double>(n) * block.diagonal().array()).sqrt();
    }
    inf.original.ci_lower = inf.original.beta_d - z * inf.original.se;
    inf.original.ci_upper = inf.original.beta_d + z * inf.original.se;
    inf.nodewise = std::move(nodewise);
    return inf;
}

} // namespace ssgl
