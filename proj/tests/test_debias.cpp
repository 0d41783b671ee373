#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ssgl/debias.hpp"
#include "ssgl/rng.hpp"
#include "ssgl/stats.hpp"

using namespace ssgl;

namespace {

Matrix random_matrix(long n, long p, Rng& rng) {
    Matrix X(n, p);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < p; ++j) X(i, j) = rng.normal();
    }
    return X;
}

Matrix centered(Matrix X) {
    Eigen::RowVectorXd means = X.colwise().mean();
    return X.rowwise() - means;
}

} // namespace

TEST_SUITE("debias") {

TEST_CASE("lasso coordinate descent") {
    Rng rng(1);

    SUBCASE("orthogonal predictors, lambda 0: per-column least squares") {
        const long n = 32;
        Matrix Z = Matrix::Zero(n, 3);
        Z(0, 0) = 2.0;
        Z(5, 1) = -1.5;
        Z(9, 2) = 3.0; // disjoint supports => orthogonal
        Vector target(n);
        for (long i = 0; i < n; ++i) target(i) = rng.normal();
        Vector gamma = lasso_cd(Z, target, 0.0, 1e-12);
        for (int k = 0; k < 3; ++k) {
            const double ls = Z.col(k).dot(target) / Z.col(k).squaredNorm();
            CHECK(gamma(k) == doctest::Approx(ls).epsilon(1e-10));
        }
    }

    SUBCASE("lambda above the null threshold gives the zero solution") {
        const long n = 50;
        Matrix Z = centered(random_matrix(n, 4, rng));
        Vector target = centered(random_matrix(n, 1, rng));
        const double thresh =
            (Z.transpose() * target).cwiseAbs().maxCoeff() / static_cast<double>(n);
        CHECK(lasso_cd(Z, target, thresh * 1.0001).isZero(0.0));
        CHECK(!lasso_cd(Z, target, thresh * 0.9).isZero(0.0));
    }

    SUBCASE("small instance satisfies the KKT certificate") {
        const long n = 60;
        Matrix Z = centered(random_matrix(n, 5, rng));
        Vector target = Z.col(0) * 0.8 - Z.col(3) * 0.5;
        for (long i = 0; i < n; ++i) target(i) += rng.normal(0.0, 0.3);
        const double lambda = 0.05;
        Vector gamma = lasso_cd(Z, target, lambda, 1e-9);
        Vector r = target - Z * gamma;
        for (int k = 0; k < 5; ++k) {
            const double grad = Z.col(k).dot(r) / static_cast<double>(n);
            if (gamma(k) == 0.0) {
                CHECK(std::abs(grad) <= lambda + 1e-9);
            } else {
                CHECK(grad == doctest::Approx(lambda * (gamma(k) > 0 ? 1 : -1)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("nodewise theta assembly") {
    Rng rng(2);

    SUBCASE("orthogonal columns, lambda 0: diagonal inverse") {
        const long n = 24;
        Matrix X = Matrix::Zero(n, 3);
        X(0, 0) = 2.0;
        X(3, 1) = 0.5;
        X(7, 2) = -4.0;
        Vector lambdas = Vector::Zero(1);
        NodewiseResult nw = build_theta(X, lambdas, 1e-12);
        for (int j = 0; j < 3; ++j) {
            CHECK(nw.theta_hat(j, j) ==
                  doctest::Approx(n / X.col(j).squaredNorm()).epsilon(1e-9));
        }
        Matrix sigma = X.transpose() * X / static_cast<double>(n);
        CHECK((nw.theta_hat * sigma - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("well-conditioned low dimension, lambda 0: matches the exact inverse") {
        const long n = 200, p = 6;
        Matrix X = centered(random_matrix(n, p, rng));
        Vector lambdas = Vector::Zero(1);
        NodewiseResult nw = build_theta(X, lambdas, 1e-13);
        Matrix sigma = X.transpose() * X / static_cast<double>(n);
        Matrix inverse = sigma.inverse();
        CHECK((nw.theta_hat - inverse).cwiseAbs().maxCoeff() < 1e-6);
    }

    SUBCASE("nodewise KKT certified per node at positive lambda") {
        const long n = 80, p = 6;
        Matrix X = centered(random_matrix(n, p, rng));
        Vector lambdas(1);
        lambdas << 0.1;
        NodewiseResult nw = build_theta(X, lambdas, 1e-7);
        for (long j = 0; j < p; ++j) {
            // reconstruct gamma_j from the theta row
            Matrix others(n, p - 1);
            long c = 0;
            for (long k = 0; k < p; ++k) {
                if (k != j) others.col(c++) = X.col(k);
            }
            Vector gamma(p - 1);
            c = 0;
            for (long k = 0; k < p; ++k) {
                if (k != j) gamma(c++) = -nw.theta_hat(j, k) * nw.tau2(j);
            }
            Vector r = X.col(j) - others * gamma;
            for (long k = 0; k < p - 1; ++k) {
                const double grad = others.col(k).dot(r) / static_cast<double>(n);
                if (gamma(k) == 0.0) {
                    CHECK(std::abs(grad) <= 0.1 + 1e-7);
                } else {
                    CHECK(std::abs(grad - 0.1 * (gamma(k) > 0 ? 1 : -1)) <= 1e-6);
                }
            }
        }
    }

    SUBCASE("degenerate column is an error") {
        const long n = 40;
        Matrix X = centered(random_matrix(n, 3, rng));
        X.col(2) = X.col(0); // duplicated: tau2 -> 0 at lambda 0
        Vector lambdas = Vector::Zero(1);
        CHECK_THROWS_AS(build_theta(X, lambdas, 1e-10), DegenerateVariance);
    }
}

TEST_CASE("debias algebra") {
    Rng rng(3);
    const long n = 120, p = 8;
    Matrix X = centered(random_matrix(n, p, rng));
    Vector beta_true(p);
    for (long j = 0; j < p; ++j) beta_true(j) = rng.normal();
    Vector y = X * beta_true;
    for (long i = 0; i < n; ++i) y(i) += rng.normal(0.0, 0.5);
    y = y.array() - y.mean();

    Vector lambdas = Vector::Zero(1);
    NodewiseResult nw = build_theta(X, lambdas, 1e-13);
    Vector ols = oracle::ols(X, y);

    SUBCASE("zero residual returns beta unchanged") {
        Vector beta_d = debias(ols, X, X * ols, nw);
        CHECK((beta_d - ols).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("exact inverse cancels any starting point to OLS") {
        for (int rep = 0; rep < 5; ++rep) {
            Vector beta_hat(p);
            for (long j = 0; j < p; ++j) beta_hat(j) = rng.normal(0.0, 2.0);
            Vector beta_d = debias(beta_hat, X, y, nw);
            CHECK((beta_d - ols).cwiseAbs().maxCoeff() < 1e-8);
        }
        Vector from_zero = debias(Vector::Zero(p), X, y, nw);
        CHECK((from_zero - ols).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("confidence intervals") {
    const long p = 4, n = 100;
    Vector beta_d(p);
    beta_d << 0.0, 1.0, -2.0, 0.5;

    // identity covariance contraption: theta = I, sigma = I
    NodewiseResult nw;
    nw.theta_hat = Matrix::Identity(p, p);
    nw.tau2 = Vector::Ones(p);
    nw.lambdas = Vector::Zero(p);
    Matrix sigma_hat = Matrix::Identity(p, p);

    DebiasOutput out = confidence_intervals(beta_d, 1.0, nw, sigma_hat, n, 0.05);
    for (long j = 0; j < p; ++j) {
        CHECK(out.se(j) == doctest::Approx(0.1));
        CHECK(out.ci_upper(j) - beta_d(j) ==
              doctest::Approx(1.959963984540054 / 10.0).epsilon(1e-12));
        CHECK(beta_d(j) - out.ci_lower(j) ==
              doctest::Approx(1.959963984540054 / 10.0).epsilon(1e-12));
    }

    SUBCASE("alpha = 0.5 uses the 0.75 quantile") {
        DebiasOutput half = confidence_intervals(beta_d, 1.0, nw, sigma_hat, n, 0.5);
        CHECK(half.ci_upper(1) - beta_d(1) ==
              doctest::Approx(0.6744897501960817 / 10.0).epsilon(1e-12));
    }
    SUBCASE("widths are monotone in sigma2 and alpha") {
        DebiasOutput wide = confidence_intervals(beta_d, 4.0, nw, sigma_hat, n, 0.05);
        CHECK(wide.se(0) > out.se(0));
        DebiasOutput narrow = confidence_intervals(beta_d, 1.0, nw, sigma_hat, n, 0.2);
        CHECK(narrow.ci_upper(0) - narrow.ci_lower(0) <
              out.ci_upper(0) - out.ci_lower(0));
    }
    SUBCASE("alpha outside (0,1) is rejected") {
        CHECK_THROWS_AS(confidence_intervals(beta_d, 1.0, nw, sigma_hat, n, 0.0),
                        InvalidArgument);
        CHECK_THROWS_AS(confidence_intervals(beta_d, 1.0, nw, sigma_hat, n, 1.0),
                        InvalidArgument);
    }
}

TEST_CASE("pipeline maps intervals back to the original scale") {
    Rng rng(4);
    const long n = 150;
    Matrix X = random_matrix(n, 6, rng);
    Vector beta_true = Vector::Zero(6);
    beta_true(0) = 1.0;
    beta_true(3) = -0.8;
    Vector y = X * beta_true;
    for (long i = 0; i < n; ++i) y(i) += rng.normal(0.0, 0.5);

    GroupedDesign design = make_design(y, X, {2, 2, 2});
    PreparedDesign prep = prepare(design);
    SsglConfig config;
    config.lambda0_ladder = {1, 5, 10, 20};
    SsglFit fit = fit_path(prep, config).final_fit();

    DebiasInference inf = run_debias(prep, fit, 0.05, 0.05);
    // original-scale point estimates are the block transforms of the ortho ones
    Vector mapped = back_transform(inf.ortho.beta_d, prep.design.groups, prep.transforms);
    CHECK((inf.original.beta_d - mapped).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((inf.original.se.array() > 0).all());
    // symmetric intervals containing the point estimate
    for (long j = 0; j < 6; ++j) {
        CHECK(inf.original.ci_lower(j) <= inf.original.beta_d(j));
        CHECK(inf.original.beta_d(j) <= inf.original.ci_upper(j));
        CHECK(inf.original.ci_upper(j) - inf.original.beta_d(j) ==
              doctest::Approx(inf.original.beta_d(j) - inf.original.ci_lower(j)));
    }
    // debiased estimates land near the truth on this easy instance
    CHECK((inf.original.beta_d - beta_true).cwiseAbs().maxCoeff() < 0.3);
}

} // TEST_SUITE
