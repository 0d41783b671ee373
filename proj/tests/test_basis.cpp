#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ssgl/basis.hpp"
#include "ssgl/rng.hpp"
#include "ssgl/solver.hpp"

using namespace ssgl;

namespace {

Vector uniform_vec(long n, Rng& rng, double lo = 0.0, double hi = 1.0) {
    Vector x(n);
    for (long i = 0; i < n; ++i) x(i) = rng.uniform(lo, hi);
    return x;
}

// residual of each column of B against the column space of A
double max_span_residual(const Matrix& A, const Matrix& B) {
    const Matrix coef = A.colPivHouseholderQr().solve(B);
    return (B - A * coef).cwiseAbs().maxCoeff();
}

} // namespace

TEST_SUITE("basis") {

TEST_CASE("raw cubic B-splines form a partition of unity") {
    Rng rng(1);
    Vector x = uniform_vec(200, rng);
    const std::vector<double> interior = {0.3, 0.6};
    Matrix B = bspline_raw(x, 0.0, 1.0, interior);
    CHECK(B.cols() == 6);
    Vector row_sums = B.rowwise().sum();
    CHECK((row_sums.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(B.minCoeff() >= 0.0);
}

TEST_CASE("df=1 natural basis is affine with nonzero slope") {
    Rng rng(2);
    Vector x = uniform_vec(50, rng);
    BasisSpec spec;
    spec.df = 1;
    Matrix N = spline_basis(x, spec);
    REQUIRE(N.cols() == 1);
    Matrix A(50, 2);
    A.col(0).setOnes();
    A.col(1) = x;
    Vector coef = A.colPivHouseholderQr().solve(N.col(0));
    CHECK((N.col(0) - A * coef).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(coef(1)) > 1e-6);
}

TEST_CASE("natural basis spans the truncated-power natural spline space") {
    Rng rng(3);
    Vector x = uniform_vec(150, rng);
    for (int df : {2, 3, 4}) {
        BasisSpec spec;
        spec.df = df;
        FittedBasis fb = fit_basis(x, spec);
        Matrix N = eval_basis(fb, x);
        REQUIRE(N.cols() == df);

        std::vector<double> all_knots;
        all_knots.push_back(fb.lo);
        for (double k : fb.interior_knots) all_knots.push_back(k);
        all_knots.push_back(fb.hi);
        Matrix TP = oracle::natural_truncated_power(x, all_knots);
        REQUIRE(TP.cols() == df + 1); // includes the constant

        // each constructed column lies in the truncated-power space ...
        CHECK(max_span_residual(TP, N) < 1e-8);
        // ... and together with the constant they span all of it
        Matrix N1(x.size(), df + 1);
        N1.col(0).setOnes();
        N1.rightCols(df) = N;
        CHECK(max_span_residual(N1, TP) < 1e-8);
    }
}

TEST_CASE("basis evaluation is reproducible bit for bit") {
    Rng rng(4);
    Vector x = uniform_vec(80, rng);
    BasisSpec spec;
    spec.df = 4;
    Matrix a = spline_basis(x, spec);
    Matrix b = spline_basis(x, spec);
    CHECK((a.array() == b.array()).all());
}

TEST_CASE("linear extrapolation beyond the boundary knots") {
    Rng rng(5);
    Vector x = uniform_vec(100, rng, 0.0, 1.0);
    BasisSpec spec;
    spec.df = 3;
    FittedBasis fb = fit_basis(x, spec);

    Vector grid(4);
    grid << fb.hi + 0.5, fb.hi + 1.0, fb.hi + 1.5, fb.hi + 2.0;
    bool extrapolated = false;
    Matrix out = eval_basis(fb, grid, &extrapolated);
    CHECK(extrapolated);
    // equally spaced points on a line: second differences vanish
    for (int j = 0; j < out.cols(); ++j) {
        for (int i = 0; i + 2 < grid.size(); ++i) {
            CHECK(std::abs(out(i, j) - 2.0 * out(i + 1, j) + out(i + 2, j)) < 1e-9);
        }
    }
    bool inside_flag = true;
    eval_basis(fb, x, &inside_flag);
    CHECK(!inside_flag);
}

TEST_CASE("too few distinct values is an error") {
    Vector x(6);
    x << 0.0, 0.0, 1.0, 1.0, 0.5, 0.5;
    BasisSpec spec;
    spec.df = 4;
    CHECK_THROWS_AS(fit_basis(x, spec), TooFewDistinctValues);
    spec.df = 2;
    CHECK_NOTHROW(fit_basis(x, spec));
}

TEST_CASE("main-effect design shape and group ids") {
    Rng rng(6);
    const long n = 60;
    Matrix X(n, 3);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform();
    }
    Vector y = X.col(0);
    BasisSpec spec;
    spec.df = 3;
    GamModel model = build_main_design(X, y, spec, {"a", "b", "c"});
    CHECK(model.prep.design.p() == 9);
    CHECK(model.prep.design.num_groups() == 3);
    CHECK(model.prep.design.groups[1].id == "b");
    CHECK(model.prep.design.groups[1].size == 3);

    SUBCASE("single covariate, df=3: one group of width 3") {
        GamModel small = build_main_design(X.leftCols(1), y, spec);
        CHECK(small.prep.design.p() == 3);
        CHECK(small.prep.design.num_groups() == 1);
    }
}

TEST_CASE("fitted surface is invariant to the orthonormalization") {
    Rng rng(7);
    const long n = 90;
    Matrix X(n, 4);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < 4; ++j) X(i, j) = rng.uniform();
    }
    Vector f(n);
    for (long i = 0; i < n; ++i) f(i) = std::sin(3.0 * X(i, 0)) + X(i, 2);
    Vector y = f;
    for (long i = 0; i < n; ++i) y(i) += rng.normal(0.0, 0.2);

    BasisSpec spec;
    spec.df = 3;
    GamModel model = build_main_design(X, y, spec);
    SsglConfig config;
    config.lambda0_ladder = {1, 5, 10};
    SsglFit fit = fit_path(model.prep, config).final_fit();

    // prediction through raw columns + intercept equals the ortho-scale fit
    Vector through_raw = predict(model, fit, X);
    Vector through_ortho =
        (model.prep.design.X * fit.beta_ortho).array() + model.prep.y_mean;
    CHECK((through_raw - through_ortho).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("interaction design: widths, counts, orthogonality") {
    Rng rng(8);
    const long n = 70;
    const int p = 5;
    Matrix X(n, p);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.uniform();
    }
    Vector y(n);
    for (long i = 0; i < n; ++i) y(i) = rng.normal();

    BasisSpec spec;
    spec.df = 2;
    InteractionSpec ispec;
    ispec.d_star = 2;
    GamModel model = build_gam_design(X, y, spec, ispec);

    CHECK(model.pairs.size() == 10); // p(p-1)/2
    CHECK(model.prep.design.num_groups() == p + 10);
    for (int g = p; g < model.prep.design.num_groups(); ++g) {
        CHECK(model.prep.design.groups[g].size == 4); // d*^2
    }

    // every interaction block orthogonal to its two parent main blocks
    for (std::size_t pi = 0; pi < model.pairs.size(); ++pi) {
        const auto [k, l] = model.pairs[pi];
        const auto inter = model.prep.design.group_block(p + static_cast<int>(pi));
        const double to_k =
            (model.prep.design.group_block(k).transpose() * inter).cwiseAbs().maxCoeff();
        const double to_l =
            (model.prep.design.group_block(l).transpose() * inter).cwiseAbs().maxCoeff();
        CHECK(to_k < 1e-8 * n);
        CHECK(to_l < 1e-8 * n);
    }
}

TEST_CASE("pair count at the paper's interaction scale") {
    Rng rng(9);
    const long n = 40;
    const int p = 25;
    Matrix X(n, p);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) X(i, j) = rng.uniform();
    }
    InteractionSpec ispec;
    ispec.d_star = 2;
    BasisSpec spec;
    spec.df = 2;
    GamModel model = build_gam_design(X, Vector::Zero(n), spec, ispec);
    CHECK(model.pairs.size() == 300);
    CHECK(model.prep.design.num_groups() == 325);
}

TEST_CASE("residualization is idempotent") {
    Rng rng(10);
    const long n = 50;
    Matrix X(n, 3);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform();
    }
    BasisSpec spec;
    spec.df = 2;
    InteractionSpec ispec;
    ispec.d_star = 2;
    GamModel model = build_gam_design(X, Vector::Zero(n), spec, ispec);

    Matrix cols = raw_design_columns(model, X);
    const int df = spec.df;
    for (std::size_t pi = 0; pi < model.pairs.size(); ++pi) {
        const auto [k, l] = model.pairs[pi];
        Matrix A(n, 2 * df + 1);
        A.leftCols(df) = model.prep.design.group_block(k);
        A.middleCols(df, df) = model.prep.design.group_block(l);
        A.col(2 * df).setOnes();
        const Matrix block = cols.middleCols(3 * df + 4 * pi, 4);
        const Matrix again = block - A * A.colPivHouseholderQr().solve(block);
        CHECK((again - block).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("hierarchy augmentation widens pair groups to 2d*+d*^2") {
    Rng rng(11);
    const long n = 60;
    Matrix X(n, 3);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform();
    }
    BasisSpec spec;
    spec.df = 2;
    InteractionSpec ispec;
    ispec.d_star = 2;
    ispec.hierarchy = true;
    GamModel model = build_gam_design(X, Vector::Zero(n), spec, ispec);
    for (int g = 3; g < model.prep.design.num_groups(); ++g) {
        CHECK(model.prep.design.groups[g].size == 8);
    }
    // the first d* raw columns of a pair group are that covariate's basis,
    // so selecting the group brings the main effect in by construction
    Matrix cols = raw_design_columns(model, X);
    const auto [k, l] = model.pairs[0];
    Matrix basis_k = eval_basis(model.inter_bases[k], X.col(k));
    CHECK((cols.middleCols(3 * 2, 2) - basis_k).cwiseAbs().maxCoeff() < 1e-12);

    SUBCASE("disabled hierarchy leaves plain tensor groups") {
        InteractionSpec plain = ispec;
        plain.hierarchy = false;
        GamModel flat = build_gam_design(X, Vector::Zero(n), spec, plain);
        for (int g = 3; g < flat.prep.design.num_groups(); ++g) {
            CHECK(flat.prep.design.groups[g].size == 4);
        }
    }
}

TEST_CASE("effect curves: zero coefficients and linear slopes") {
    Rng rng(12);
    const long n = 60;
    Matrix X(n, 2);
    for (long i = 0; i < n; ++i) {
        X(i, 0) = rng.uniform();
        X(i, 1) = rng.uniform();
    }
    Vector y = 2.0 * X.col(0);
    BasisSpec spec;
    spec.df = 1; // affine basis
    GamModel model = build_main_design(X, y, spec);
    SsglConfig config;
    config.lambda0_ladder = {1.0};
    config.lambda1 = 1e-4;
    SsglFit fit = fit_single(model.prep, config, 1.0, nullptr, true);

    Vector grid(5);
    grid << 0.1, 0.3, 0.5, 0.7, 0.9;
    EffectCurve c0 = predict_effect(model, fit, 0, grid);
    const double slope = (c0.effect(4) - c0.effect(0)) / (grid(4) - grid(0));
    CHECK(slope == doctest::Approx(2.0).epsilon(1e-2));

    SsglFit zero_fit = fit;
    zero_fit.beta_original.setZero();
    EffectCurve flat = predict_effect(model, zero_fit, 1, grid);
    CHECK(flat.effect.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("prediction on training rows reproduces fitted values") {
    Rng rng(13);
    const long n = 80;
    Matrix X(n, 6);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < 6; ++j) X(i, j) = rng.uniform();
    }
    Vector y(n);
    for (long i = 0; i < n; ++i) {
        y(i) = 3.0 * std::sin(2.0 * X(i, 1)) + rng.normal(0.0, 0.3);
    }
    BasisSpec spec;
    spec.df = 3;
    InteractionSpec ispec;
    ispec.d_star = 2;
    GamModel model = build_gam_design(X, y, spec, ispec);
    SsglConfig config;
    config.lambda0_ladder = {1, 10, 20};
    SsglFit fit = fit_path(model.prep, config).final_fit();

    Vector pred = predict(model, fit, X);
    Vector fitted = (model.prep.design.X * fit.beta_ortho).array() + model.prep.y_mean;
    CHECK((pred - fitted).cwiseAbs().maxCoeff() < 1e-8);
}

} // TEST_SUITE
