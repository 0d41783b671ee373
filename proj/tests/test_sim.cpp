#include <doctest.h>

#include <cmath>
#include <set>

#include "ssgl/sim.hpp"

using namespace ssgl;

namespace {
constexpr double kPi = 3.141592653589793238462643383280;
}

TEST_SUITE("sim") {

TEST_CASE("sparse additive generator") {
    Rng rng(1);
    auto data = gen_sparse_gam(200, 8, rng);
    CHECK(data.X.rows() == 200);
    CHECK(data.X.cols() == 8);
    CHECK(data.truth_groups == std::vector<int>{0, 2, 3, 4});
    CHECK(data.X.minCoeff() >= 0.0);
    CHECK(data.X.maxCoeff() <= 1.0);

    // transcription check of the mean function on the generated rows
    for (long i = 0; i < 20; ++i) {
        const auto x = data.X.row(i);
        const double f = 5.0 * std::sin(kPi * x(0)) + 2.5 * (x(2) * x(2) - 0.5) +
                         std::exp(x(3)) + 3.0 * x(4);
        CHECK(data.f(i) == doctest::Approx(f).epsilon(1e-14));
    }

    SUBCASE("noise variance is one (Monte Carlo)") {
        Rng rng2(42);
        auto big = gen_sparse_gam(100000, 5, rng2);
        const double var_y =
            (big.y.array() - big.y.mean()).square().sum() / (big.y.size() - 1);
        const double var_f =
            (big.f.array() - big.f.mean()).square().sum() / (big.f.size() - 1);
        CHECK(std::abs(var_y - var_f - 1.0) < 0.05);
    }

    SUBCASE("fixed seed reproduces bit for bit") {
        Rng a(7), b(7);
        auto d1 = gen_sparse_gam(50, 5, a);
        auto d2 = gen_sparse_gam(50, 5, b);
        CHECK((d1.X.array() == d2.X.array()).all());
        CHECK((d1.y.array() == d2.y.array()).all());
    }
}

TEST_CASE("interaction generator") {
    Rng rng(2);
    auto data = gen_interaction(300, 25, rng);
    CHECK(data.truth_pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 4}});
    for (long i = 0; i < 20; ++i) {
        const auto x = data.X.row(i);
        const double f = 2.5 * std::sin(kPi * x(0) * x(1)) +
                         2.0 * std::cos(kPi * (x(2) + x(4))) + 2.0 * (x(5) - 0.5) +
                         2.5 * x(6);
        CHECK(data.f(i) == doctest::Approx(f).epsilon(1e-14));
    }
    // mean function at the origin: 0 + 2 - 1 + 0 = 1
    const double at_zero = 2.5 * std::sin(0.0) + 2.0 * std::cos(0.0) + 2.0 * (0.0 - 0.5);
    CHECK(at_zero == doctest::Approx(1.0));
}

TEST_CASE("coverage generator") {
    Rng rng(3);
    auto data = gen_coverage(50, 10, 0.0, rng);
    CHECK(data.X.cols() == 20);
    CHECK(data.group_sizes == std::vector<int>(10, 2));
    CHECK(data.truth_coords == std::vector<int>{1, 2, 3, 6});
    CHECK(data.truth_groups == std::vector<int>{0, 1, 3});
    CHECK(data.beta(1) == 0.5);
    CHECK(data.beta(6) == 0.7);
    // squared columns follow the linear ones
    CHECK((data.X.col(1) - data.X.col(0).array().square().matrix()).cwiseAbs().maxCoeff() ==
          0.0);

    SUBCASE("AR(1) covariance matches rho^{|i-j|} (Monte Carlo)") {
        const double rho = 0.6;
        const long reps = 100000, G = 5;
        Rng rng2(11);
        Matrix cov = Matrix::Zero(G, G);
        Matrix mean = Matrix::Zero(1, G);
        for (long r = 0; r < reps; ++r) {
            auto d = gen_coverage(1, G, rho, rng2);
            for (long a = 0; a < G; ++a) {
                mean(0, a) += d.X(0, 2 * a) / reps;
                for (long b = 0; b < G; ++b) cov(a, b) += d.X(0, 2 * a) * d.X(0, 2 * b) / reps;
            }
        }
        for (long a = 0; a < G; ++a) {
            for (long b = 0; b < G; ++b) {
                const double target = std::pow(rho, std::abs(a - b));
                CHECK(std::abs(cov(a, b) - mean(0, a) * mean(0, b) - target) < 0.02);
            }
        }
    }
}

TEST_CASE("dense, sigma-check, many-groups, timing generators") {
    Rng rng(4);
    auto dense = gen_dense(60, 300, rng);
    CHECK(dense.truth_groups.size() == 20);
    CHECK(dense.X.cols() == 600);
    CHECK(dense.beta.head(40).cwiseAbs().minCoeff() == doctest::Approx(0.2));

    auto sigma = gen_sigma_check(80, 80, rng);
    CHECK(sigma.truth_groups == std::vector<int>{0, 1, 9, 19});
    CHECK(sigma.X.cols() == 160);
    CHECK(sigma.beta(19) == 0.6);   // the squared term of the 10th covariate
    CHECK(sigma.beta(38) == -0.2);  // the linear term of the 20th

    auto many = gen_many_groups(40, 100, rng);
    CHECK(many.X.cols() == 300);
    CHECK(many.truth_groups == std::vector<int>{96, 97, 98, 99});
    // redrawn coefficients differ between replicates
    auto many2 = gen_many_groups(40, 100, rng);
    CHECK((many.beta - many2.beta).cwiseAbs().maxCoeff() > 0.0);

    auto timing = gen_timing(30, 50, rng);
    CHECK(timing.X.cols() == 100);
    CHECK(timing.group_sizes == std::vector<int>(50, 2));
}

TEST_CASE("selection scoring conventions") {
    auto perfect = score_selection({0, 2, 3}, {0, 2, 3});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);

    auto empty_sel = score_selection({}, {0, 1});
    CHECK(empty_sel.precision == 1.0); // TP+FP = 0 convention
    CHECK(empty_sel.recall == 0.0);

    auto mixed = score_selection({0, 1, 5}, {0, 2});
    CHECK(mixed.tp == 1);
    CHECK(mixed.fp == 2);
    CHECK(mixed.fn == 1);
    CHECK(mixed.precision == doctest::Approx(1.0 / 3.0));
    CHECK(mixed.recall == doctest::Approx(0.5));

    auto empty_truth = score_selection({}, {});
    CHECK(empty_truth.precision == 1.0);
    CHECK(empty_truth.recall == 1.0);
}

TEST_CASE("scenario runner: sigma check end to end, deterministic") {
    SimScenario sc;
    sc.name = "sigma_check";
    sc.n = 60;
    sc.G = 60;
    sc.replicates = 2;
    sc.seed = 5;
    sc.ladder = {1, 20, 40};
    sc.tune_by_cv = false;
    SimReport report = run_scenario(sc);
    CHECK(report.replicate.size() == 2);
    CHECK(report.mean_sigma2 > 0.0);
    CHECK(report.replicate[0].selected >= 0);

    SimReport again = run_scenario(sc);
    CHECK(again.mean_mse == report.mean_mse);
    CHECK(again.mean_sigma2 == report.mean_sigma2);
    CHECK(again.replicate[1].lambda0 == report.replicate[1].lambda0);
}

TEST_CASE("scenario runner: coverage produces counts at both strata") {
    SimScenario sc;
    sc.name = "coverage";
    sc.n = 50;
    sc.G = 10;
    sc.rho = 0.0;
    sc.replicates = 2;
    sc.seed = 6;
    sc.ladder = {1, 10, 20};
    sc.tune_by_cv = false;
    SimReport report = run_scenario(sc);
    CHECK(report.coverage.total_important == 2 * 4);
    CHECK(report.coverage.total_null == 2 * 16);
    CHECK(report.coverage_null >= 0.0);
    CHECK(report.coverage_null <= 1.0);
}

TEST_CASE("scenario runner: group lasso baseline differs from the spike fit") {
    SimScenario sc;
    sc.name = "sigma_check";
    sc.n = 60;
    sc.G = 30;
    sc.replicates = 1;
    sc.seed = 9;
    sc.ladder = {5.0};
    sc.tune_by_cv = false;
    SimReport ssgl_report = run_scenario(sc);
    sc.method = "grouplasso";
    SimReport gl_report = run_scenario(sc);
    CHECK(gl_report.replicate[0].sigma2_hat == 1.0);
    CHECK(gl_report.mean_mse != ssgl_report.mean_mse);
}

TEST_CASE("unknown scenario is rejected") {
    SimScenario sc;
    sc.name = "nope";
    CHECK_THROWS_AS(run_scenario(sc), InvalidArgument);
}

} // TEST_SUITE
